#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sponge {

struct Diagnostic {
  std::string where;
  std::string message;
};

inline std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += "; ";
    out += d.where.empty() ? d.message : d.where + ": " + d.message;
  }
  return out;
}

/// Invalid input: malformed spec, symbol outside the digit set, violated precondition.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(std::string what) : std::runtime_error(std::move(what)) {}
  explicit SpecError(std::vector<Diagnostic> diags)
      : std::runtime_error(format_diagnostics(diags)), diagnostics_(std::move(diags)) {}
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// A configured size or iteration budget would be exceeded.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A mathematical guarantee the code relies on did not hold; indicates a bug or a bad witness.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sponge
