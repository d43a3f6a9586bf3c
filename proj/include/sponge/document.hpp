#pragma once

#include "sponge/graph_directed.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace sponge {

// JSON spec document:
//   { "name": "E", "dimension": 2,
//     "grid": [8, 5]                                   (Sierpinski shortcut)
//     or "bases": [[{"ratio": "1/2", "offset": "0"}, ...], ...],
//     "digits": [[0, 0], ...], "slicing": true,
//     "roles": {"J_XY": [...], "J_YY": [...], "J_XX": [...], "J_YX": [...]},
//     "sofic": {"rows": [A_0, ...], "adjacency": A},
//     "connected_part": {"kind": "whole" | "carpet" | "sofic" | "empty", "digits": [...], "rows": s} }
struct ConnectedPartSpec {
  std::string kind = "whole";
  std::vector<Digit> digits;  // kind "carpet"
  long long rows = 0;         // kind "sofic": s, 0 for the occupied rows of D
};

struct SpecDocument {
  std::string name;
  SpongeSpec spec;
  bool grid_form = false;
  std::optional<ComponentSystem> roles;
  std::optional<SoficSystem> sofic;
  std::optional<ConnectedPartSpec> connected_part;
};

namespace detail {

using nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

struct Reader {
  std::vector<Diagnostic> diags;

  void error(const std::string& where, const std::string& msg) { diags.push_back({where, msg}); }

  void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) error(where, "unknown field \"" + key + "\"");
    }
  }

  std::optional<std::vector<Digit>> digits(const json& j, const std::string& where) {
    if (!j.is_array()) {
      error(where, "expected a list of integer tuples");
      return std::nullopt;
    }
    std::vector<Digit> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
      const auto& t = j[k];
      if (!t.is_array()) {
        error(where + "[" + std::to_string(k) + "]", "expected an integer tuple");
        continue;
      }
      Digit d;
      for (const auto& x : t) {
        if (!x.is_number_integer()) {
          error(where + "[" + std::to_string(k) + "]", "entries must be integers");
          break;
        }
        d.push_back(x.get<int>());
      }
      out.push_back(std::move(d));
    }
    return out;
  }

  std::optional<IntMatrix> matrix(const json& j, const std::string& where) {
    if (!j.is_array()) {
      error(where, "expected a matrix (list of rows)");
      return std::nullopt;
    }
    IntMatrix m;
    for (const auto& row : j) {
      if (!row.is_array()) {
        error(where, "expected a matrix (list of rows)");
        return std::nullopt;
      }
      std::vector<std::int64_t> r;
      for (const auto& x : row) {
        if (!x.is_number_integer()) {
          error(where, "matrix entries must be integers");
          return std::nullopt;
        }
        r.push_back(x.get<std::int64_t>());
      }
      m.push_back(std::move(r));
    }
    return m;
  }

  std::optional<Rational> rational(const json& j, const std::string& where) {
    try {
      if (j.is_string()) return parse_rational(j.get<std::string>());
      if (j.is_number_integer()) return Rational(j.get<long long>());
    } catch (const std::invalid_argument& e) {
      error(where, e.what());
      return std::nullopt;
    }
    error(where, "expected a rational written as \"p/q\"");
    return std::nullopt;
  }
};

}  // namespace detail

inline SpecDocument parse_document(std::string_view text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw SpecError({Diagnostic{"line " + std::to_string(line) + ", column " + std::to_string(col), msg}});
  }
  detail::Reader rd;
  if (!root.is_object()) throw SpecError({Diagnostic{"document", "expected a JSON object"}});
  rd.only_keys(root, "document", {"name", "dimension", "grid", "bases", "digits", "slicing", "roles", "sofic", "connected_part"});

  std::string name;
  if (root.contains("name")) {
    if (root["name"].is_string()) name = root["name"].get<std::string>();
    else rd.error("name", "expected a string");
  }

  SpongeInput in;
  bool grid_form = false;
  if (root.contains("grid") == root.contains("bases")) {
    rd.error("document", "exactly one of \"grid\" and \"bases\" is required");
  } else if (root.contains("grid")) {
    grid_form = true;
    const auto& g = root["grid"];
    if (!g.is_array()) rd.error("grid", "expected a list of branch counts");
    else
      for (const auto& n : g) {
        if (!n.is_number_integer() || n.get<int>() < 1) {
          rd.error("grid", "branch counts must be positive integers");
          break;
        }
        in.bases.push_back(BaseIFS::uniform(n.get<int>()));
      }
  } else {
    const auto& bs = root["bases"];
    if (!bs.is_array()) rd.error("bases", "expected one list of maps per coordinate");
    else
      for (std::size_t i = 0; i < bs.size(); ++i) {
        const std::string where = "bases[" + std::to_string(i) + "]";
        BaseIFS b;
        if (!bs[i].is_array()) {
          rd.error(where, "expected a list of {ratio, offset} maps");
          continue;
        }
        for (std::size_t j = 0; j < bs[i].size(); ++j) {
          const auto& m = bs[i][j];
          const std::string wj = where + "[" + std::to_string(j) + "]";
          if (!m.is_object() || !m.contains("ratio") || !m.contains("offset")) {
            rd.error(wj, "expected {\"ratio\": \"p/q\", \"offset\": \"p/q\"}");
            continue;
          }
          rd.only_keys(m, wj, {"ratio", "offset"});
          auto r = rd.rational(m["ratio"], wj + ".ratio");
          auto o = rd.rational(m["offset"], wj + ".offset");
          if (r && o) {
            b.ratios.push_back(*r);
            b.offsets.push_back(*o);
          }
        }
        in.bases.push_back(std::move(b));
      }
  }
  if (root.contains("dimension")) {
    const auto& d = root["dimension"];
    if (!d.is_number_integer()) rd.error("dimension", "expected an integer");
    else if (d.get<long long>() != static_cast<long long>(in.bases.size()))
      rd.error("dimension", "dimension " + std::to_string(d.get<long long>()) + " does not match " +
                                std::to_string(in.bases.size()) + " coordinates");
  }
  if (!root.contains("digits")) rd.error("digits", "missing");
  else if (auto d = rd.digits(root["digits"], "digits")) in.digits = std::move(*d);
  if (root.contains("slicing")) {
    if (root["slicing"].is_boolean()) in.require_slicing = root["slicing"].get<bool>();
    else rd.error("slicing", "expected true or false");
  }
  if (!rd.diags.empty()) throw SpecError(rd.diags);

  auto v = validate_spec(std::move(in));
  if (!v.ok()) throw SpecError(v.diagnostics);
  SpecDocument doc{name, std::move(*v.spec), grid_form, std::nullopt, std::nullopt, std::nullopt};

  if (root.contains("roles")) {
    const auto& r = root["roles"];
    if (!r.is_object()) {
      rd.error("roles", "expected an object");
    } else {
      rd.only_keys(r, "roles", {"J_XX", "J_XY", "J_YX", "J_YY"});
      auto get = [&](const char* key) -> std::optional<std::vector<Digit>> {
        if (!r.contains(key)) return std::nullopt;
        return rd.digits(r[key], std::string("roles.") + key);
      };
      auto xy = get("J_XY"), yy = get("J_YY");
      if (!xy || !yy) rd.error("roles", "J_XY and J_YY are required");
      if (rd.diags.empty()) {
        try {
          doc.roles = ComponentSystem::from_roles(doc.spec, *xy, *yy, get("J_XX"), get("J_YX"));
        } catch (const SpecError& e) {
          rd.error("roles", e.what());
        }
      }
    }
  }
  if (root.contains("sofic")) {
    const auto& s = root["sofic"];
    if (!s.is_object() || !s.contains("rows")) {
      rd.error("sofic", "expected {\"rows\": [...], \"adjacency\": ...}");
    } else {
      rd.only_keys(s, "sofic", {"rows", "adjacency"});
      std::vector<IntMatrix> rows;
      if (!s["rows"].is_array()) rd.error("sofic.rows", "expected a list of matrices");
      else
        for (std::size_t j = 0; j < s["rows"].size(); ++j)
          if (auto m = rd.matrix(s["rows"][j], "sofic.rows[" + std::to_string(j) + "]")) rows.push_back(std::move(*m));
      std::optional<IntMatrix> adj;
      if (s.contains("adjacency")) adj = rd.matrix(s["adjacency"], "sofic.adjacency");
      if (rd.diags.empty()) {
        try {
          doc.sofic = SoficSystem::make(std::move(rows), adj);
        } catch (const SpecError& e) {
          rd.error("sofic", e.what());
        }
      }
    }
  }
  if (root.contains("connected_part")) {
    const auto& c = root["connected_part"];
    if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string()) {
      rd.error("connected_part", "expected {\"kind\": ...}");
    } else {
      rd.only_keys(c, "connected_part", {"kind", "digits", "rows"});
      ConnectedPartSpec cp;
      cp.kind = c["kind"].get<std::string>();
      if (cp.kind != "whole" && cp.kind != "carpet" && cp.kind != "sofic" && cp.kind != "empty")
        rd.error("connected_part.kind", "unknown kind \"" + cp.kind + "\"");
      if (c.contains("digits"))
        if (auto d = rd.digits(c["digits"], "connected_part.digits")) cp.digits = std::move(*d);
      if (c.contains("rows")) {
        if (c["rows"].is_number_integer()) cp.rows = c["rows"].get<long long>();
        else rd.error("connected_part.rows", "expected an integer");
      }
      if (cp.kind == "carpet" && cp.digits.empty()) rd.error("connected_part", "kind \"carpet\" needs digits");
      if (cp.kind == "sofic" && !doc.sofic) rd.error("connected_part", "kind \"sofic\" needs a sofic block");
      for (const auto& d : cp.digits)
        if (!doc.spec.contains(d)) rd.error("connected_part.digits", "digit " + to_string(d) + " is not in D");
      doc.connected_part = std::move(cp);
    }
  }
  if (!rd.diags.empty()) throw SpecError(rd.diags);
  return doc;
}

inline SpecDocument load_document(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError({Diagnostic{path, "cannot open file"}});
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_document(ss.str());
  } catch (SpecError& e) {
    std::vector<Diagnostic> d = e.diagnostics();
    for (auto& x : d) x.where = path + ": " + x.where;
    throw SpecError(d);
  }
}

inline std::string emit_document(const SpecDocument& doc) {
  using nlohmann::ordered_json;
  ordered_json j;
  auto digits = [](const std::vector<Digit>& ds) {
    ordered_json a = ordered_json::array();
    for (const auto& d : ds) a.push_back(d);
    return a;
  };
  if (!doc.name.empty()) j["name"] = doc.name;
  j["dimension"] = doc.spec.dimension();
  if (doc.grid_form && doc.spec.is_sierpinski()) {
    j["grid"] = doc.spec.branch_counts();
  } else {
    ordered_json bases = ordered_json::array();
    for (const auto& b : doc.spec.bases()) {
      ordered_json maps = ordered_json::array();
      for (std::size_t k = 0; k < b.size(); ++k)
        maps.push_back(ordered_json{{"ratio", to_string(b.ratios[k])}, {"offset", to_string(b.offsets[k])}});
      bases.push_back(std::move(maps));
    }
    j["bases"] = std::move(bases);
  }
  j["digits"] = digits(doc.spec.digits());
  if (!doc.spec.slicing()) j["slicing"] = false;
  if (doc.roles)
    j["roles"] = ordered_json{{"J_XY", digits(doc.roles->j_xy)},
                              {"J_YY", digits(doc.roles->j_yy)},
                              {"J_XX", digits(doc.roles->j_xx)},
                              {"J_YX", digits(doc.roles->j_yx)}};
  if (doc.sofic) j["sofic"] = ordered_json{{"rows", doc.sofic->rows}, {"adjacency", doc.sofic->adjacency}};
  if (doc.connected_part) {
    ordered_json c{{"kind", doc.connected_part->kind}};
    if (!doc.connected_part->digits.empty()) c["digits"] = digits(doc.connected_part->digits);
    if (doc.connected_part->rows > 0) c["rows"] = doc.connected_part->rows;
    j["connected_part"] = std::move(c);
  }
  return j.dump(2) + "\n";
}

}  // namespace sponge
