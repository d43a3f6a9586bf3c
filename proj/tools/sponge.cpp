#include "sponge/coding.hpp"
#include "sponge/document.hpp"
#include "sponge/render.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <regex>

using namespace sponge;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kBudget = 2, kInternal = 3 };

ApproximationOptions approximation_options(unsigned threads) {
  ApproximationOptions opt;
  opt.threads = std::max(1u, threads);
  if (const char* env = std::getenv("SPONGE_MAX_CELLS")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) throw SpecError("SPONGE_MAX_CELLS must be a positive integer");
    opt.max_cells = static_cast<std::size_t>(v);
  }
  return opt;
}

ordered_json words_json(const std::vector<Word>& ws) {
  ordered_json a = ordered_json::array();
  for (const auto& w : ws) a.push_back(to_string(w));
  return a;
}

ordered_json box_json(const Box& b) {
  ordered_json a = ordered_json::array();
  for (const auto& iv : b) a.push_back("[" + to_string(iv.lo) + ", " + to_string(iv.hi) + "]");
  return a;
}

// "(0,1)(2,3)|(1,1)": prefix, then the repeating period after '|'.
Coding parse_coding(const std::string& text, std::size_t dim) {
  auto parse_word = [&](const std::string& part) {
    static const std::regex tuple(R"(\(\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\))");
    std::vector<Digit> out;
    std::string rest = std::regex_replace(part, tuple, "");
    if (rest.find_first_not_of(" \t") != std::string::npos) throw SpecError("malformed coding \"" + text + "\"");
    for (std::sregex_iterator it(part.begin(), part.end(), tuple), end; it != end; ++it) {
      Digit d;
      std::stringstream ss((*it)[1].str());
      for (std::string x; std::getline(ss, x, ',');) d.push_back(std::stoi(x));
      if (d.size() != dim) throw SpecError("coding symbol " + it->str() + " has the wrong dimension");
      out.push_back(std::move(d));
    }
    return out;
  };
  auto bar = text.find('|');
  Coding c;
  c.prefix = parse_word(text.substr(0, bar));
  if (bar != std::string::npos) c.period = parse_word(text.substr(bar + 1));
  return c;
}

Point parse_point(const std::string& text, std::size_t dim) {
  Point p;
  std::stringstream ss(text);
  for (std::string x; std::getline(ss, x, ',');) {
    try {
      p.push_back(parse_rational(x));
    } catch (const std::invalid_argument& e) {
      throw SpecError("point coordinate \"" + x + "\": " + e.what());
    }
  }
  if (p.size() != dim) throw SpecError("point has " + std::to_string(p.size()) + " coordinates, expected " + std::to_string(dim));
  return p;
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path == "-") {
    std::cout.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

int cmd_validate(const std::string& file) {
  auto doc = load_document(file);
  std::cout << file << ": ok (" << doc.spec.dimension() << "-dimensional, " << doc.spec.digit_count() << " digits"
            << (doc.spec.slicing() ? "" : ", non-slicing") << (doc.spec.is_sierpinski() ? ", Sierpinski" : "") << ")\n";
  if (doc.roles && doc.sofic) {
    auto mismatch = compare_with_sofic(*doc.roles, *doc.sofic);
    if (!mismatch.empty()) std::cout << "note: " << mismatch << "\n";
  }
  return kOk;
}

int cmd_analyze(const std::string& file, int depth, unsigned threads) {
  const auto doc = load_document(file);
  const auto opt = approximation_options(threads);
  const auto g = build_approximation(doc.spec, depth, opt);

  ordered_json out;
  out["name"] = doc.name;
  out["depth"] = depth;
  out["cells"] = g.size();
  out["components"] = g.components.size();
  ordered_json islands = ordered_json::array();
  for (auto c : g.islands()) {
    const auto& comp = g.components[c];
    std::vector<Word> ws;
    for (auto m : comp.members) ws.push_back(to_word(doc.spec, g.index_word(m)));
    Box hull;
    for (std::size_t j = 0; j < comp.lo.size(); ++j) hull.push_back({Rational(comp.lo[j], g.scale[j]), Rational(comp.hi[j], g.scale[j])});
    islands.push_back(ordered_json{{"cells", words_json(ws)}, {"box", box_json(hull)}});
  }
  out["islands"] = std::move(islands);

  if (doc.spec.slicing()) {
    auto datum = connected_part_cover(doc.spec, depth, opt);
    ordered_json cover{{"found", datum.found}, {"searched_depth", datum.searched}};
    if (datum.found) {
      cover["k0"] = datum.k0;
      cover["kept_coordinates"] = datum.kept_coordinates;
      cover["J"] = words_json(datum.islands);
      cover["D_prime"] = words_json(datum.sub_ifs);
      auto check = cover_check(datum, 2, opt);
      cover["check"] = ordered_json{{"ok", check.ok}, {"detail", check.reason}};
    }
    out["cover"] = std::move(cover);
  }
  if (doc.roles) {
    auto r = verify_component_structure(doc.spec, *doc.roles, depth, opt);
    out["component_structure"] = ordered_json{{"ok", r.ok()},
                                              {"origin_in_Y", r.origin_in_y},
                                              {"Y_connected", r.y_connected},
                                              {"Y_is_origin_component", r.y_is_origin_component},
                                              {"components_are_copies", r.components_are_copies},
                                              {"Y_cells", r.y_cells},
                                              {"counterexample", r.counterexample}};
    if (doc.sofic) out["component_structure"]["sofic_mismatch"] = compare_with_sofic(*doc.roles, *doc.sofic);
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

DimensionReport dimension_report(const SpecDocument& doc, int max_k) {
  DimensionReport r;
  r.name = doc.name;
  auto unavailable = [](const char* method) { return Quantity{std::numeric_limits<long double>::quiet_NaN(), 0, method}; };
  if (doc.spec.dimension() != 2) {
    r.dim_h = r.dim_b = r.ind_h = r.ind_b = unavailable("n/a");
    return r;
  }
  if (!doc.spec.is_sierpinski()) {
    r.dim_h = r.dim_b = r.ind_h = r.ind_b = unavailable("unsupported");
    return r;
  }
  const auto whole = BMCarpet::from_spec(doc.spec);
  ConnectedPart part;
  SoficOptions so;
  so.max_k = max_k;
  if (!doc.connected_part) {
    r.dim_h = {bm_hausdorff(whole), 0, "closed-form"};
    r.dim_b = {bm_box(whole), 0, "closed-form"};
    r.ind_h = r.ind_b = unavailable("unknown");
    return r;
  }
  const auto& cp = *doc.connected_part;
  if (cp.kind == "carpet") {
    part.kind = ConnectedPart::Kind::Carpet;
    part.carpet = BMCarpet::from_spec(doc.spec.with_digits(cp.digits));
  } else if (cp.kind == "sofic") {
    part.kind = ConnectedPart::Kind::Sofic;
    part.sofic = *doc.sofic;
    part.sofic_rows = cp.rows;
  } else if (cp.kind == "empty") {
    part.kind = ConnectedPart::Kind::Empty;
  }
  r = connectedness_indices(whole, part, so);
  r.name = doc.name;
  return r;
}

int cmd_dims(const std::vector<std::string>& files, bool table, int max_k) {
  if (!table && files.size() != 1) throw SpecError("dims takes one spec; use --table for several");
  std::vector<std::string> rows;
  for (const auto& f : files) rows.push_back(csv_row(dimension_report(load_document(f), max_k)));
  std::cout << csv_header() << "\n";
  for (const auto& row : rows) std::cout << row << "\n";
  return kOk;
}

int cmd_render(const std::string& file, bool counterexample, RenderSettings rs, unsigned threads, const std::string& output) {
  if (file.empty() == !counterexample) throw SpecError("render needs exactly one of a spec file and --counterexample");
  rs.validate();
  Scene scene = counterexample ? counterexample_scene(counterexample_ifs(), rs, std::max(1u, threads))
                               : sponge_scene(load_document(file).spec, rs, approximation_options(threads));
  write_output(output, render(scene, rs));
  return kOk;
}

int cmd_homeo(const std::string& file, const std::string& coding, const std::string& point, int depth) {
  if (coding.empty() == point.empty()) throw SpecError("homeo needs exactly one of --coding and --point");
  const auto doc = load_document(file);
  ordered_json out;
  if (!coding.empty()) {
    auto img = homeo_F(doc.spec, parse_coding(coding, doc.spec.dimension()), static_cast<std::size_t>(depth));
    out["source"] = box_json(img.source);
    out["image"] = box_json(img.image);
    out["exact"] = img.exact;
  } else {
    auto img = homeo_point(doc.spec, parse_point(point, doc.spec.dimension()), static_cast<std::size_t>(depth));
    out["codings"] = img.codings.size();
    out["image"] = box_json(img.image);
  }
  std::cout << out.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-affine sponges: validation, topology, dimensions and rendering"};
  app.require_subcommand(1);

  std::string file;
  std::vector<std::string> files;
  int depth = 3, max_k = 15;
  unsigned threads = 1;
  bool table = false, counterexample = false;
  std::string format = "ppm", output = "-", coding, point;
  RenderSettings rs;

  auto* validate = app.add_subcommand("validate", "Check a spec document");
  validate->add_option("spec", file, "Spec document (JSON)")->required();

  auto* analyze = app.add_subcommand("analyze", "Components, islands and connected-part cover at a depth");
  analyze->add_option("spec", file, "Spec document (JSON)")->required();
  analyze->add_option("--depth", depth, "Approximation depth")->check(CLI::NonNegativeNumber);
  analyze->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  auto* dims = app.add_subcommand("dims", "Dimensions and connectedness indices as CSV");
  dims->add_option("spec", files, "Spec document(s)")->required();
  dims->add_flag("--table", table, "Aggregate several specs into one table");
  dims->add_option("--max-k", max_k, "Longest product length for the sofic Hausdorff estimate")->check(CLI::Range(2, 40));

  auto* rend = app.add_subcommand("render", "Draw the k-th approximation");
  rend->add_option("spec", file, "Spec document (JSON)");
  rend->add_flag("--counterexample", counterexample, "Draw the seven-map planar example instead of a spec");
  rend->add_option("--format", format, "ppm or svg")->check(CLI::IsMember({"ppm", "svg"}));
  rend->add_option("--resolution", rs.resolution, "Pixels per side")->check(CLI::Range(16, 1 << 14));
  rend->add_option("--depth", rs.depth, "Approximation depth")->check(CLI::NonNegativeNumber);
  rend->add_flag("--color-components", rs.color_components, "One color per connected component");
  rend->add_flag("--highlight-islands", rs.highlight_islands, "Paint islands red");
  rend->add_flag("--highlight-l", rs.highlight_l, "Draw the segment L (counterexample only)");
  rend->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  rend->add_option("-o,--output", output, "Output file, - for stdout");

  auto* homeo = app.add_subcommand("homeo", "Image of a point under the homeomorphism onto the Sierpinski sponge");
  homeo->add_option("spec", file, "Spec document (JSON)")->required();
  homeo->add_option("--coding", coding, "Coding as (a,b)(c,d)|(e,f): prefix, then period");
  homeo->add_option("--point", point, "Point as p/q,p/q");
  homeo->add_option("--depth", depth, "Number of coding symbols evaluated")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*validate) return cmd_validate(file);
    if (*analyze) return cmd_analyze(file, depth, threads);
    if (*dims) return cmd_dims(files, table, max_k);
    if (*rend) {
      rs.format = format == "svg" ? RenderSettings::Format::Svg : RenderSettings::Format::Ppm;
      return cmd_render(file, counterexample, rs, threads, output);
    }
    if (*homeo) return cmd_homeo(file, coding, point, depth);
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
