#ifndef FLOERLIB_CHECK_HPP
#define FLOERLIB_CHECK_HPP

#include <ostream>
#include <string>
#include <vector>

namespace floerlib {

/// One line of a structured report: CHECK <name> PASS|FAIL [witness]
struct CheckResult {
  std::string name;
  bool pass = false;
  std::string witness;  // empty unless failing or informative
};

struct Report {
  std::vector<CheckResult> checks;

  void add(std::string name, bool pass, std::string witness = "") {
    checks.push_back({std::move(name), pass, std::move(witness)});
  }

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void merge(const Report& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }

  void print(std::ostream& os) const {
    for (const auto& c : checks) {
      os << "CHECK " << c.name << (c.pass ? " PASS" : " FAIL");
      if (!c.witness.empty()) os << " " << c.witness;
      os << "\n";
    }
  }
};

}  // namespace floerlib

#endif
