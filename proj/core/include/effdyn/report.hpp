#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace effdyn {

enum class BoundStatus {
  Satisfied,
  Violated,
  Informational,  // rhs carries a constant that is not explicit; reported as a ratio
  Skipped,
};

std::string_view to_string(BoundStatus s);

/// One checked inequality lhs <= rhs.
struct BoundEntry {
  std::string name;     // short identifier, e.g. "martingale_sup"
  std::string formula;  // the inequality being checked, in plain text
  double lhs = 0.0;
  double std_error = 0.0;
  double rhs = 0.0;
  BoundStatus status = BoundStatus::Skipped;
  std::string note;

  /// rhs / lhs; +inf when lhs is 0.
  double slack() const;
};

/// Builds an entry that is satisfied when lhs - z * se <= rhs * (1 + rel_tol).
BoundEntry check_bound(std::string name, std::string formula, double lhs, double se, double rhs,
                       double rel_tol = 0.0, double z = 2.0);

BoundEntry informational_bound(std::string name, std::string formula, double lhs, double se,
                               double rhs, std::string note);

BoundEntry skipped_bound(std::string name, std::string formula, std::string reason);

struct BoundReport {
  std::vector<BoundEntry> entries;

  /// No entry is Violated.
  bool all_satisfied() const;
  const BoundEntry* find(std::string_view name) const;

  /// Columns name,lhs,se,rhs,slack,satisfied.
  void write_csv(std::ostream& os, std::string_view provenance = {}) const;
  /// `key: value` lines, one block per entry separated by blank lines.
  void write_summary(std::ostream& os, std::string_view provenance = {}) const;
};

}  // namespace effdyn
