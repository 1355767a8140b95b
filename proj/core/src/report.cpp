#include "effdyn/report.hpp"

#include <cmath>
#include <limits>

#include "effdyn/csv.hpp"

namespace effdyn {

std::string_view to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Satisfied:
      return "true";
    case BoundStatus::Violated:
      return "false";
    case BoundStatus::Informational:
      return "informational";
    case BoundStatus::Skipped:
      return "skipped";
  }
  return "?";
}

double BoundEntry::slack() const {
  if (lhs == 0.0) return std::numeric_limits<double>::infinity();
  return rhs / lhs;
}

BoundEntry check_bound(std::string name, std::string formula, double lhs, double se, double rhs,
                       double rel_tol, double z) {
  BoundEntry e;
  e.name = std::move(name);
  e.formula = std::move(formula);
  e.lhs = lhs;
  e.std_error = se;
  e.rhs = rhs;
  const bool ok = std::isfinite(lhs) && lhs - z * se <= rhs * (1.0 + rel_tol);
  e.status = ok ? BoundStatus::Satisfied : BoundStatus::Violated;
  return e;
}

BoundEntry informational_bound(std::string name, std::string formula, double lhs, double se,
                               double rhs, std::string note) {
  BoundEntry e;
  e.name = std::move(name);
  e.formula = std::move(formula);
  e.lhs = lhs;
  e.std_error = se;
  e.rhs = rhs;
  e.status = BoundStatus::Informational;
  e.note = std::move(note);
  return e;
}

BoundEntry skipped_bound(std::string name, std::string formula, std::string reason) {
  BoundEntry e;
  e.name = std::move(name);
  e.formula = std::move(formula);
  e.lhs = std::numeric_limits<double>::quiet_NaN();
  e.rhs = std::numeric_limits<double>::quiet_NaN();
  e.status = BoundStatus::Skipped;
  e.note = std::move(reason);
  return e;
}

bool BoundReport::all_satisfied() const {
  for (const auto& e : entries) {
    if (e.status == BoundStatus::Violated) return false;
  }
  return true;
}

const BoundEntry* BoundReport::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

void BoundReport::write_csv(std::ostream& os, std::string_view provenance) const {
  write_provenance(os, provenance);
  os << "name,lhs,se,rhs,slack,satisfied\n";
  for (const auto& e : entries) {
    os << e.name << ',' << fmt17(e.lhs) << ',' << fmt17(e.std_error) << ',' << fmt17(e.rhs) << ','
       << fmt17(e.slack()) << ',' << to_string(e.status) << '\n';
  }
}

void BoundReport::write_summary(std::ostream& os, std::string_view provenance) const {
  if (!provenance.empty()) os << "provenance: " << provenance << '\n' << '\n';
  bool first = true;
  for (const auto& e : entries) {
    if (!first) os << '\n';
    first = false;
    os << "name: " << e.name << '\n'
       << "formula: " << e.formula << '\n'
       << "lhs: " << fmt17(e.lhs) << '\n'
       << "se: " << fmt17(e.std_error) << '\n'
       << "rhs: " << fmt17(e.rhs) << '\n'
       << "slack: " << fmt17(e.slack()) << '\n'
       << "satisfied: " << to_string(e.status) << '\n';
    if (!e.note.empty()) os << "note: " << e.note << '\n';
  }
}

}  // namespace effdyn
