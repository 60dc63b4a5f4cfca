#ifndef REEBKIT_CURVE_LEDGER_HPP
#define REEBKIT_CURVE_LEDGER_HPP

#include <boost/rational.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

// Exact integer/rational combinatorics of punctured-curve classes: total CZ,
// Fredholm index, energies, generalized intersection numbers, vanishing
// conditions, winding bounds, transversality and foliation checks.  No
// floating point anywhere in this module.

namespace reebkit::ledger {

using Rat = boost::rational<long long>;

long long rat_floor(const Rat& r);

enum class OrbitKind { elliptic, hyperbolic };

struct OrbitSymbol {
  std::string name;
  Rat period{1};
  OrbitKind kind = OrbitKind::hyperbolic;
  Rat theta{0};           // elliptic rotation-number proxy (denominator <= 1e6)
  long long base_cz = 0;  // hyperbolic CZ of the simple orbit

  void validate() const;
};

struct Puncture {
  int sign = +1;      // +1 positive, -1 negative
  OrbitSymbol orbit;  // self-contained copy
  long long m = 1;    // covering multiplicity
  long long winding = 0;  // wind_infinity relative to the trivialization
};

struct CurveClass {
  std::string name;
  long long genus = 0;
  std::vector<Puncture> punctures;
  long long c1 = 0;  // relative Chern number (ledger input)
  bool trivial_cylinder = false;

  void validate() const;
};

// mu of the m-fold cover: hyperbolic m*base_cz, elliptic 2*floor(m*theta)+1.
// Throws on a degenerate elliptic iterate (m*theta integral).
long long orbit_cz_at_multiplicity(const OrbitSymbol& orbit, long long m);

// floor(sign*mu(gamma^m)/2), exact
long long floor_half_cz(const OrbitSymbol& orbit, long long m, int sign);

bool iterate_even(const OrbitSymbol& orbit, long long m);

long long total_cz(const CurveClass& curve);  // 2*c1 + sum(+) - sum(-)

long long fredholm_index(const CurveClass& curve);  // mu - (2-2g) + #punctures

long long count_even_punctures(const CurveClass& curve);

struct Energies {
  Rat e;          // sum over positive punctures of m*period
  Rat e_dlambda;  // e minus the negative-puncture sum; >= 0 enforced
};
Energies energies(const CurveClass& curve);

// i_phi + same-sign same-orbit pair terms m_z m_w max(floor ratios); exact.
long long gen_intersection(const CurveClass& a, const CurveClass& b,
                           long long i_phi);

struct CheckReport {
  bool pass = true;
  std::vector<std::string> failures;
};

// Vanishing condition set (2)(c), symmetrized over the two curve orderings:
// same-sign pairs need extremal windings and equal floor ratios; opposite-sign
// pairs need extremal windings and both iterates even.
CheckReport gin_zero_conditions(const CurveClass& a, const CurveClass& b);

struct WindingCheck {
  bool satisfied = false;  // sign*wind <= floor(sign*mu/2)
  bool extremal = false;   // equality
};
std::vector<WindingCheck> winding_bound_check(const CurveClass& curve);

// true iff (even orbit, m+ = m- = 1) or (odd hyperbolic, m+ = m- = 2)
bool bidirectional_admissible(const OrbitSymbol& orbit, long long m_plus,
                              long long m_minus);
long long bidirectional_gcd(const OrbitSymbol& orbit, long long m, int sign);

bool automatic_transversality_check(const CurveClass& curve);  // ind >= 2g + #even

// genus 0, #even = 2 - ind, extremal windings, zero normal-zero count.
// Throws when ind is outside {1,2}.
CheckReport foliating_constraints(const CurveClass& curve);

struct BuildingDescriptor {
  std::string name;
  std::vector<std::vector<CurveClass>> levels;  // top level first
  bool sphere_limit = false;
};

struct BuildingCheck {
  long long index_sum = 0;
  bool levels_stable = true;  // no level is all trivial cylinders
  long long arithmetic_genus = 0;
};

// Verifies the level pairings, sums component indices, computes the arithmetic
// genus #E - #V + sum(g) + 1 (must vanish when sphere_limit is set).
BuildingCheck building_index_additivity(const BuildingDescriptor& building);

using RelTable = std::map<std::pair<std::string, std::string>, long long>;
long long rel_lookup(const RelTable& rel, const std::string& a, const std::string& b);

struct FoliationDescriptor {
  std::string name;
  std::vector<CurveClass> curves;
  std::vector<OrbitSymbol> trivial_orbits;
};

struct FoliationReport {
  bool pass = true;
  Rat energy{0};  // sup of curve energies
  std::vector<std::string> failures;
};

FoliationReport foliation_stability_check(const FoliationDescriptor& fol,
                                          const RelTable& rel);

}  // namespace reebkit::ledger

#endif
