#include "reebkit/curve_ledger.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace reebkit::ledger {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::string pair_tag(const Puncture& z, const Puncture& w) {
  return z.orbit.name + "[" + (z.sign > 0 ? "+" : "-") + std::to_string(z.m) +
         "] vs " + w.orbit.name + "[" + (w.sign > 0 ? "+" : "-") +
         std::to_string(w.m) + "]";
}

}  // namespace

long long rat_floor(const Rat& r) {
  const long long n = r.numerator(), d = r.denominator();  // d > 0
  return n >= 0 ? n / d : -((-n + d - 1) / d);
}

void OrbitSymbol::validate() const {
  require(!name.empty(), "orbit: empty name");
  require(period > Rat(0), "orbit " + name + ": period must be positive");
  if (kind == OrbitKind::elliptic)
    require(theta.denominator() <= 1000000,
            "orbit " + name + ": theta denominator exceeds 1e6");
}

void CurveClass::validate() const {
  require(genus >= 0, "curve " + name + ": negative genus");
  for (const auto& z : punctures) {
    require(z.sign == 1 || z.sign == -1, "curve " + name + ": bad puncture sign");
    require(z.m >= 1, "curve " + name + ": multiplicity < 1");
    z.orbit.validate();
  }
  if (trivial_cylinder) {
    require(punctures.size() == 2 && c1 == 0 && genus == 0 &&
                punctures[0].sign * punctures[1].sign == -1 &&
                punctures[0].orbit.name == punctures[1].orbit.name &&
                punctures[0].m == punctures[1].m,
            "curve " + name + ": malformed trivial cylinder");
  }
}

long long orbit_cz_at_multiplicity(const OrbitSymbol& orbit, long long m) {
  require(m >= 1, "orbit_cz_at_multiplicity: m < 1");
  orbit.validate();
  if (orbit.kind == OrbitKind::hyperbolic) return m * orbit.base_cz;
  const Rat mt = Rat(m) * orbit.theta;
  require(mt.denominator() != 1,
          "orbit " + orbit.name + ": degenerate elliptic iterate (m*theta integral)");
  return 2 * rat_floor(mt) + 1;
}

long long floor_half_cz(const OrbitSymbol& orbit, long long m, int sign) {
  const long long mu = orbit_cz_at_multiplicity(orbit, m);
  return rat_floor(Rat(sign * mu, 2));
}

bool iterate_even(const OrbitSymbol& orbit, long long m) {
  return orbit_cz_at_multiplicity(orbit, m) % 2 == 0;
}

long long total_cz(const CurveClass& curve) {
  curve.validate();
  long long mu = 2 * curve.c1;
  for (const auto& z : curve.punctures)
    mu += z.sign * orbit_cz_at_multiplicity(z.orbit, z.m);
  return mu;
}

long long fredholm_index(const CurveClass& curve) {
  return total_cz(curve) - (2 - 2 * curve.genus) +
         (long long)(curve.punctures.size());
}

long long count_even_punctures(const CurveClass& curve) {
  long long n = 0;
  for (const auto& z : curve.punctures)
    if (iterate_even(z.orbit, z.m)) ++n;
  return n;
}

Energies energies(const CurveClass& curve) {
  curve.validate();
  Energies out{Rat(0), Rat(0)};
  for (const auto& z : curve.punctures)
    if (z.sign > 0) out.e += Rat(z.m) * z.orbit.period;
  out.e_dlambda = out.e;
  for (const auto& z : curve.punctures)
    if (z.sign < 0) out.e_dlambda -= Rat(z.m) * z.orbit.period;
  if (out.e_dlambda < Rat(0))
    throw std::invalid_argument("curve " + curve.name + ": negative dlambda-energy");
  return out;
}

long long gen_intersection(const CurveClass& a, const CurveClass& b,
                           long long i_phi) {
  a.validate();
  b.validate();
  Rat total(i_phi);
  for (const auto& z : a.punctures)
    for (const auto& w : b.punctures) {
      if (z.sign != w.sign || z.orbit.name != w.orbit.name) continue;
      const Rat az(floor_half_cz(z.orbit, z.m, z.sign), z.m);
      const Rat aw(floor_half_cz(w.orbit, w.m, w.sign), w.m);
      total += Rat(z.m * w.m) * std::max(az, aw);
    }
  require(total.denominator() == 1, "gen_intersection: non-integer total");
  return total.numerator();
}

CheckReport gin_zero_conditions(const CurveClass& a, const CurveClass& b) {
  a.validate();
  b.validate();
  CheckReport rep;
  auto fail = [&rep](const std::string& s) {
    rep.pass = false;
    rep.failures.push_back(s);
  };
  for (const auto& z : a.punctures)
    for (const auto& w : b.punctures) {
      if (z.orbit.name != w.orbit.name) continue;
      const long long fz = floor_half_cz(z.orbit, z.m, z.sign);
      const long long fw = floor_half_cz(w.orbit, w.m, w.sign);
      if (z.sign == w.sign) {
        // 2(c)(i)/(ii) symmetrized: extremal windings, equal floor ratios
        const char* clause = z.sign > 0 ? "2(c)(i)" : "2(c)(ii)";
        if (z.sign * z.winding != fz)
          fail(std::string(clause) + " winding not extremal: " + pair_tag(z, w));
        if (w.sign * w.winding != fw)
          fail(std::string(clause) + " winding not extremal: " + pair_tag(w, z));
        if (Rat(fz, z.m) != Rat(fw, w.m))
          fail(std::string(clause) + " floor-ratio mismatch: " + pair_tag(z, w));
      } else {
        if (z.sign * z.winding != fz || w.sign * w.winding != fw)
          fail("2(c)(iii) winding not extremal: " + pair_tag(z, w));
        if (!iterate_even(z.orbit, z.m) || !iterate_even(w.orbit, w.m))
          fail("2(c)(iii) iterates not both even: " + pair_tag(z, w));
      }
    }
  return rep;
}

std::vector<WindingCheck> winding_bound_check(const CurveClass& curve) {
  curve.validate();
  std::vector<WindingCheck> out;
  out.reserve(curve.punctures.size());
  for (const auto& z : curve.punctures) {
    const long long bound = floor_half_cz(z.orbit, z.m, z.sign);
    const long long lhs = z.sign * z.winding;
    out.push_back({lhs <= bound, lhs == bound});
  }
  return out;
}

bool bidirectional_admissible(const OrbitSymbol& orbit, long long m_plus,
                              long long m_minus) {
  orbit.validate();
  if (orbit.kind != OrbitKind::hyperbolic) return false;
  const bool even = orbit.base_cz % 2 == 0;
  if (even) return m_plus == 1 && m_minus == 1;
  return m_plus == 2 && m_minus == 2;
}

long long bidirectional_gcd(const OrbitSymbol& orbit, long long m, int sign) {
  return std::gcd(m, std::abs(floor_half_cz(orbit, m, sign)));
}

bool automatic_transversality_check(const CurveClass& curve) {
  return fredholm_index(curve) >= 2 * curve.genus + count_even_punctures(curve);
}

CheckReport foliating_constraints(const CurveClass& curve) {
  const long long ind = fredholm_index(curve);
  require(ind == 1 || ind == 2,
          "curve " + curve.name + ": declared index outside {1,2}");
  CheckReport rep;
  auto fail = [&rep](const std::string& s) {
    rep.pass = false;
    rep.failures.push_back(s);
  };
  if (curve.genus != 0) fail("genus nonzero");
  const long long n_even = count_even_punctures(curve);
  if (n_even != 2 - ind) fail("#even punctures != 2 - ind");
  const auto wb = winding_bound_check(curve);
  for (size_t i = 0; i < wb.size(); ++i)
    if (!wb[i].extremal)
      fail("puncture " + std::to_string(i) + " winding not extremal");
  // normal zero count: 0 <= i(V) <= (ind - (2-2g) + #even)/2 must pin to 0
  if (ind - (2 - 2 * curve.genus) + n_even != 0) fail("normal zero-count bound nonzero");
  return rep;
}

BuildingCheck building_index_additivity(const BuildingDescriptor& building) {
  require(!building.levels.empty(), "building " + building.name + ": no levels");
  BuildingCheck out;
  long long vertices = 0, edges = 0, genus_sum = 0;
  for (size_t i = 0; i < building.levels.size(); ++i) {
    const auto& level = building.levels[i];
    require(!level.empty(), "building " + building.name + ": empty level");
    bool all_trivial = true;
    for (const auto& c : level) {
      c.validate();
      ++vertices;
      genus_sum += c.genus;
      out.index_sum += fredholm_index(c);
      if (!c.trivial_cylinder) all_trivial = false;
    }
    if (all_trivial) out.levels_stable = false;
  }
  for (size_t i = 0; i + 1 < building.levels.size(); ++i) {
    std::vector<std::pair<std::string, long long>> neg, pos;
    for (const auto& c : building.levels[i])
      for (const auto& z : c.punctures)
        if (z.sign < 0) neg.emplace_back(z.orbit.name, z.m);
    for (const auto& c : building.levels[i + 1])
      for (const auto& z : c.punctures)
        if (z.sign > 0) pos.emplace_back(z.orbit.name, z.m);
    std::sort(neg.begin(), neg.end());
    std::sort(pos.begin(), pos.end());
    require(neg == pos, "building " + building.name + ": level pairing mismatch");
    edges += (long long)(neg.size());
  }
  out.arithmetic_genus = edges - vertices + genus_sum + 1;
  if (building.sphere_limit)
    require(out.arithmetic_genus == 0,
            "building " + building.name + ": nonzero arithmetic genus");
  return out;
}

long long rel_lookup(const RelTable& rel, const std::string& a, const std::string& b) {
  const auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
  const auto it = rel.find(key);
  require(it != rel.end(), "rel_intersections: missing entry (" + a + ", " + b + ")");
  return it->second;
}

FoliationReport foliation_stability_check(const FoliationDescriptor& fol,
                                          const RelTable& rel) {
  FoliationReport rep;
  auto fail = [&rep](const std::string& s) {
    rep.pass = false;
    rep.failures.push_back(s);
  };
  for (const auto& c : fol.curves) {
    const Energies en = energies(c);
    rep.energy = std::max(rep.energy, en.e);
    if (c.trivial_cylinder) continue;
    try {
      const auto fc = foliating_constraints(c);
      if (!fc.pass)
        for (const auto& f : fc.failures) fail(c.name + ": " + f);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  for (size_t i = 0; i < fol.curves.size(); ++i)
    for (size_t j = i; j < fol.curves.size(); ++j) {
      const auto& a = fol.curves[i];
      const auto& b = fol.curves[j];
      const long long gin = gen_intersection(a, b, rel_lookup(rel, a.name, b.name));
      if (gin != 0)
        fail(a.name + " * " + b.name + " = " + std::to_string(gin) + " != 0");
    }
  return rep;
}

}  // namespace reebkit::ledger
