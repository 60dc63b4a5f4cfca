#ifndef REEBKIT_LEDGER_IO_HPP
#define REEBKIT_LEDGER_IO_HPP

#include <map>
#include <string>
#include <vector>

#include "reebkit/curve_ledger.hpp"

// JSON serialization of ledgers and the batch checker behind `ledger check`.
// File format: top-level {orbits:[], curves:[], rel_intersections:{},
// buildings:[], foliations:[]}; numbers are integers or {num, den} rationals;
// curves reference orbits by name; building levels hold curve names or
// {"trivial_cylinder": {"orbit": ..., "m": ...}} entries.

namespace reebkit::ledger {

struct Ledger {
  std::map<std::string, OrbitSymbol> orbits;
  std::vector<CurveClass> curves;
  RelTable rel;
  std::vector<BuildingDescriptor> buildings;
  std::vector<FoliationDescriptor> foliations;

  const CurveClass& curve(const std::string& name) const;
};

// Throws std::invalid_argument on malformed input (unknown references,
// asymmetric rel_intersections duplicates, bad rationals).
Ledger ledger_from_json(const std::string& text);
std::string ledger_to_json(const Ledger& ledger);

// Synthesizes the trivial cylinder over the m-fold cover with extremal
// windings and c1 = 0.
CurveClass make_trivial_cylinder(const OrbitSymbol& orbit, long long m);

struct LedgerCheckItem {
  std::string name;
  bool pass = true;
  std::vector<std::string> details;
};

struct LedgerCheckResult {
  bool pass = true;
  std::vector<LedgerCheckItem> items;
  std::string to_json() const;
};

// Per-curve index/energy/winding summary, building additivity, foliation
// stability; aggregates into a single pass flag.
LedgerCheckResult check_ledger(const Ledger& ledger);

}  // namespace reebkit::ledger

#endif
