#include "reebkit/ledger_io.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reebkit::ledger {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Rat rat_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  require(j.is_object() && j.contains("num") && j.contains("den") &&
              j["num"].is_number_integer() && j["den"].is_number_integer(),
          where + ": rational must be an integer or {num, den}");
  const long long den = j["den"].get<long long>();
  require(den != 0, where + ": zero denominator");
  return Rat(j["num"].get<long long>(), den);
}

json rat_to_json(const Rat& r) {
  if (r.denominator() == 1) return json(r.numerator());
  return json{{"num", r.numerator()}, {"den", r.denominator()}};
}

int sign_from_json(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+") return +1;
    if (s == "-") return -1;
  } else if (j.is_number_integer()) {
    const auto v = j.get<long long>();
    if (v == 1 || v == -1) return int(v);
  }
  throw std::invalid_argument(where + ": sign must be \"+\", \"-\", 1 or -1");
}

OrbitSymbol orbit_from_json(const json& j) {
  require(j.is_object() && j.contains("name") && j.contains("kind"),
          "orbit: need name and kind");
  OrbitSymbol o;
  o.name = j["name"].get<std::string>();
  const auto kind = j["kind"].get<std::string>();
  require(kind == "elliptic" || kind == "hyperbolic",
          "orbit " + o.name + ": kind must be elliptic or hyperbolic");
  o.kind = kind == "elliptic" ? OrbitKind::elliptic : OrbitKind::hyperbolic;
  if (j.contains("period")) o.period = rat_from_json(j["period"], "orbit " + o.name);
  if (j.contains("theta")) o.theta = rat_from_json(j["theta"], "orbit " + o.name);
  if (j.contains("base_cz")) o.base_cz = j["base_cz"].get<long long>();
  o.validate();
  return o;
}

CurveClass curve_from_json(const json& j,
                           const std::map<std::string, OrbitSymbol>& orbits) {
  require(j.is_object() && j.contains("name"), "curve: missing name");
  CurveClass c;
  c.name = j["name"].get<std::string>();
  if (j.contains("genus")) c.genus = j["genus"].get<long long>();
  if (j.contains("c1")) c.c1 = j["c1"].get<long long>();
  if (j.contains("trivial_cylinder"))
    c.trivial_cylinder = j["trivial_cylinder"].get<bool>();
  for (const auto& p : j.value("punctures", json::array())) {
    Puncture z;
    z.sign = sign_from_json(p.at("sign"), "curve " + c.name);
    const auto oname = p.at("orbit").get<std::string>();
    const auto it = orbits.find(oname);
    require(it != orbits.end(), "curve " + c.name + ": unknown orbit " + oname);
    z.orbit = it->second;
    z.m = p.value("m", 1LL);
    z.winding = p.value("winding", 0LL);
    c.punctures.push_back(std::move(z));
  }
  c.validate();
  return c;
}

}  // namespace

const CurveClass& Ledger::curve(const std::string& name) const {
  for (const auto& c : curves)
    if (c.name == name) return c;
  throw std::invalid_argument("ledger: unknown curve " + name);
}

CurveClass make_trivial_cylinder(const OrbitSymbol& orbit, long long m) {
  CurveClass c;
  c.name = "cyl(" + orbit.name + "^" + std::to_string(m) + ")";
  c.trivial_cylinder = true;
  for (int sign : {+1, -1}) {
    Puncture z;
    z.sign = sign;
    z.orbit = orbit;
    z.m = m;
    z.winding = sign * floor_half_cz(orbit, m, sign);
    c.punctures.push_back(std::move(z));
  }
  c.validate();
  return c;
}

Ledger ledger_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("ledger: JSON parse error: ") + e.what());
  }
  require(j.is_object(), "ledger: top level must be an object");
  Ledger out;

  for (const auto& oj : j.value("orbits", json::array())) {
    OrbitSymbol o = orbit_from_json(oj);
    require(!out.orbits.count(o.name), "ledger: duplicate orbit " + o.name);
    out.orbits.emplace(o.name, std::move(o));
  }
  for (const auto& cj : j.value("curves", json::array())) {
    CurveClass c = curve_from_json(cj, out.orbits);
    for (const auto& other : out.curves)
      require(other.name != c.name, "ledger: duplicate curve " + c.name);
    out.curves.push_back(std::move(c));
  }

  // rel_intersections: {"A": {"B": v}}; symmetric duplicates must agree
  const json rel_rows = j.value("rel_intersections", json::object());
  for (const auto& [a, row] : rel_rows.items()) {
    require(row.is_object(), "rel_intersections: row for " + a + " must be an object");
    for (const auto& [b, v] : row.items()) {
      require(v.is_number_integer(), "rel_intersections: (" + a + "," + b + ") not integer");
      const auto key = a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
      const auto it = out.rel.find(key);
      const long long val = v.get<long long>();
      if (it != out.rel.end())
        require(it->second == val,
                "rel_intersections: asymmetric values for (" + a + "," + b + ")");
      else
        out.rel.emplace(key, val);
    }
  }

  for (const auto& bj : j.value("buildings", json::array())) {
    BuildingDescriptor b;
    b.name = bj.at("name").get<std::string>();
    b.sphere_limit = bj.value("sphere_limit", false);
    for (const auto& lj : bj.at("levels")) {
      require(lj.is_array(), "building " + b.name + ": level must be an array");
      std::vector<CurveClass> level;
      for (const auto& ej : lj) {
        if (ej.is_string()) {
          level.push_back(out.curve(ej.get<std::string>()));
        } else if (ej.is_object() && ej.contains("trivial_cylinder")) {
          const auto& t = ej["trivial_cylinder"];
          const auto oname = t.at("orbit").get<std::string>();
          const auto it = out.orbits.find(oname);
          require(it != out.orbits.end(),
                  "building " + b.name + ": unknown orbit " + oname);
          level.push_back(make_trivial_cylinder(it->second, t.value("m", 1LL)));
        } else {
          throw std::invalid_argument("building " + b.name + ": bad level entry");
        }
      }
      b.levels.push_back(std::move(level));
    }
    out.buildings.push_back(std::move(b));
  }

  for (const auto& fj : j.value("foliations", json::array())) {
    FoliationDescriptor f;
    f.name = fj.at("name").get<std::string>();
    for (const auto& cj : fj.at("curves"))
      f.curves.push_back(out.curve(cj.get<std::string>()));
    for (const auto& oj : fj.value("trivial_orbits", json::array())) {
      const auto oname = oj.get<std::string>();
      const auto it = out.orbits.find(oname);
      require(it != out.orbits.end(), "foliation " + f.name + ": unknown orbit " + oname);
      f.trivial_orbits.push_back(it->second);
    }
    out.foliations.push_back(std::move(f));
  }
  return out;
}

std::string ledger_to_json(const Ledger& ledger) {
  json j;
  j["orbits"] = json::array();
  for (const auto& [name, o] : ledger.orbits) {
    json oj{{"name", name},
            {"kind", o.kind == OrbitKind::elliptic ? "elliptic" : "hyperbolic"},
            {"period", rat_to_json(o.period)}};
    if (o.kind == OrbitKind::elliptic)
      oj["theta"] = rat_to_json(o.theta);
    else
      oj["base_cz"] = o.base_cz;
    j["orbits"].push_back(std::move(oj));
  }
  j["curves"] = json::array();
  for (const auto& c : ledger.curves) {
    json cj{{"name", c.name}, {"genus", c.genus}, {"c1", c.c1}};
    if (c.trivial_cylinder) cj["trivial_cylinder"] = true;
    cj["punctures"] = json::array();
    for (const auto& z : c.punctures)
      cj["punctures"].push_back({{"sign", z.sign > 0 ? "+" : "-"},
                                 {"orbit", z.orbit.name},
                                 {"m", z.m},
                                 {"winding", z.winding}});
    j["curves"].push_back(std::move(cj));
  }
  j["rel_intersections"] = json::object();
  for (const auto& [key, v] : ledger.rel) j["rel_intersections"][key.first][key.second] = v;
  j["buildings"] = json::array();
  for (const auto& b : ledger.buildings) {
    json bj{{"name", b.name}, {"sphere_limit", b.sphere_limit}, {"levels", json::array()}};
    for (const auto& level : b.levels) {
      json lj = json::array();
      for (const auto& c : level) {
        if (c.trivial_cylinder && c.name.rfind("cyl(", 0) == 0)
          lj.push_back({{"trivial_cylinder",
                         {{"orbit", c.punctures[0].orbit.name}, {"m", c.punctures[0].m}}}});
        else
          lj.push_back(c.name);
      }
      bj["levels"].push_back(std::move(lj));
    }
    j["buildings"].push_back(std::move(bj));
  }
  j["foliations"] = json::array();
  for (const auto& f : ledger.foliations) {
    json fj{{"name", f.name}, {"curves", json::array()}, {"trivial_orbits", json::array()}};
    for (const auto& c : f.curves) fj["curves"].push_back(c.name);
    for (const auto& o : f.trivial_orbits) fj["trivial_orbits"].push_back(o.name);
    j["foliations"].push_back(std::move(fj));
  }
  return j.dump(2);
}

std::string LedgerCheckResult::to_json() const {
  json j{{"pass", pass}, {"items", json::array()}};
  for (const auto& item : items)
    j["items"].push_back({{"name", item.name}, {"pass", item.pass}, {"details", item.details}});
  return j.dump(2);
}

LedgerCheckResult check_ledger(const Ledger& ledger) {
  LedgerCheckResult out;
  auto add = [&out](LedgerCheckItem item) {
    out.pass = out.pass && item.pass;
    out.items.push_back(std::move(item));
  };

  for (const auto& c : ledger.curves) {
    LedgerCheckItem item{"curve:" + c.name, true, {}};
    try {
      const long long mu = total_cz(c);
      const long long ind = fredholm_index(c);
      const Energies en = energies(c);
      item.details.push_back("mu=" + std::to_string(mu));
      item.details.push_back("ind=" + std::to_string(ind));
      item.details.push_back("E=" + std::to_string(en.e.numerator()) + "/" +
                             std::to_string(en.e.denominator()));
      const auto wb = winding_bound_check(c);
      for (size_t i = 0; i < wb.size(); ++i)
        if (!wb[i].satisfied) {
          item.pass = false;
          item.details.push_back("puncture " + std::to_string(i) +
                                 " violates the winding bound");
        }
    } catch (const std::exception& e) {
      item.pass = false;
      item.details.push_back(e.what());
    }
    add(std::move(item));
  }

  for (const auto& b : ledger.buildings) {
    LedgerCheckItem item{"building:" + b.name, true, {}};
    try {
      const BuildingCheck bc = building_index_additivity(b);
      item.details.push_back("index_sum=" + std::to_string(bc.index_sum));
      item.details.push_back("arithmetic_genus=" + std::to_string(bc.arithmetic_genus));
      if (!bc.levels_stable) {
        item.pass = false;
        item.details.push_back("a level consists entirely of trivial cylinders");
      }
    } catch (const std::exception& e) {
      item.pass = false;
      item.details.push_back(e.what());
    }
    add(std::move(item));
  }

  for (const auto& f : ledger.foliations) {
    LedgerCheckItem item{"foliation:" + f.name, true, {}};
    try {
      const FoliationReport fr = foliation_stability_check(f, ledger.rel);
      item.pass = fr.pass;
      item.details.push_back("energy=" + std::to_string(fr.energy.numerator()) + "/" +
                             std::to_string(fr.energy.denominator()));
      for (const auto& s : fr.failures) item.details.push_back(s);
    } catch (const std::exception& e) {
      item.pass = false;
      item.details.push_back(e.what());
    }
    add(std::move(item));
  }
  return out;
}

}  // namespace reebkit::ledger
