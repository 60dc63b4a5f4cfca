#include "reebkit/reeb_flow.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace reebkit::flow {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

using V3 = std::array<double, 3>;

V3 field(const NeckProfile& profile, contact::ChartId chart, const V3& c) {
  return contact::reeb_field_closed_form(profile, ChartPoint{chart, c}).v;
}

V3 rk4_step(const NeckProfile& profile, contact::ChartId chart, const V3& c, double h) {
  const V3 k1 = field(profile, chart, c);
  V3 tmp;
  for (int i = 0; i < 3; ++i) tmp[i] = c[i] + 0.5 * h * k1[i];
  const V3 k2 = field(profile, chart, tmp);
  for (int i = 0; i < 3; ++i) tmp[i] = c[i] + 0.5 * h * k2[i];
  const V3 k3 = field(profile, chart, tmp);
  for (int i = 0; i < 3; ++i) tmp[i] = c[i] + h * k3[i];
  const V3 k4 = field(profile, chart, tmp);
  V3 out;
  for (int i = 0; i < 3; ++i)
    out[i] = c[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// |sin theta| in either neck chart
double pole_proximity(const ChartPoint& p) {
  if (p.chart == contact::ChartId::neck_polar) return std::abs(std::sin(p.c[1]));
  return std::sqrt(p.c[1] * p.c[1] + p.c[2] * p.c[2]);
}

// hysteresis: polar -> pole below 0.1, pole -> polar above 0.12
ChartPoint maybe_switch(const ChartPoint& p, int& switches) {
  if (p.chart == contact::ChartId::neck_polar && pole_proximity(p) < 0.1) {
    ++switches;
    return contact::polar_to_pole(p);
  }
  if (contact::is_pole_chart(p.chart) && pole_proximity(p) > 0.12) {
    ++switches;
    return contact::pole_to_polar(p);
  }
  return p;
}

double wrap_angle(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace

Trajectory integrate(const NeckProfile& profile, const ChartPoint& start,
                     double duration, double h, bool allow_exit) {
  profile.validate();
  start.validate();
  require(contact::is_neck_chart(start.chart), "integrate: start not in a neck chart");
  require(duration > 0.0 && h > 0.0 && h <= duration / 100.0,
          "integrate: need 0 < h <= duration/100");

  const int n = int(std::lround(duration / h));
  const double hs = duration / n;

  Trajectory traj;
  traj.h = hs;
  ChartPoint cur = maybe_switch(start, traj.chart_switches);
  traj.points.push_back({0.0, cur});

  for (int k = 0; k < n; ++k) {
    if (std::abs(cur.c[0]) >= 10.0 * profile.epsilon) {
      if (allow_exit) {
        traj.exited = true;
        return traj;
      }
      throw std::runtime_error("integrate: trajectory left the modeled region");
    }
    ChartPoint next{cur.chart, rk4_step(profile, cur.chart, cur.c, hs)};
    for (double x : next.c)
      if (!std::isfinite(x)) throw std::runtime_error("integrate: non-finite step");
    cur = maybe_switch(next, traj.chart_switches);
    traj.points.push_back({(k + 1) * hs, cur});
  }
  return traj;
}

std::vector<double> monotone_functional(const Trajectory& traj) {
  std::vector<double> z;
  z.reserve(traj.points.size());
  for (const auto& tp : traj.points) z.push_back(contact::monotone_z(tp.p));
  return z;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream out;
  out.precision(17);
  out << "t,chart_id,c1,c2,c3,Z\n";
  for (const auto& tp : traj.points)
    out << tp.t << ',' << contact::chart_name(tp.p.chart) << ',' << tp.p.c[0] << ','
        << tp.p.c[1] << ',' << tp.p.c[2] << ',' << contact::monotone_z(tp.p) << '\n';
  return out.str();
}

double first_return_time(const NeckProfile& profile, const ChartPoint& start,
                         double h) {
  profile.validate();
  start.validate();
  require(start.chart == contact::ChartId::neck_polar,
          "first_return_time: start must be polar");
  ChartPoint cur = start;
  double total = 0.0, t = 0.0;
  const int max_steps = int(10.0 * kPi * profile.f(0.0) / h) + 10;
  for (int k = 0; k < max_steps; ++k) {
    ChartPoint next{cur.chart, rk4_step(profile, cur.chart, cur.c, h)};
    require(std::abs(std::sin(next.c[1])) > 0.1,
            "first_return_time: trajectory left the equatorial band");
    const double dphi = wrap_angle(next.c[2] - cur.c[2]);
    if (total + dphi >= 2.0 * kPi)
      return t + h * (2.0 * kPi - total) / dphi;
    total += dphi;
    t += h;
    cur = next;
  }
  throw std::runtime_error("first_return_time: no return found");
}

double action_integral(const NeckProfile& profile, const Trajectory& traj) {
  require(traj.points.size() >= 2, "action_integral: too few points");
  auto integrand = [&](const ChartPoint& p) {
    const auto form = contact::lambda_f_form(profile, p.chart);
    return form.eval(p, contact::reeb_field_closed_form(profile, p).v);
  };
  double acc = 0.0;
  for (size_t k = 0; k + 1 < traj.points.size(); ++k) {
    const auto& a = traj.points[k];
    const auto& b = traj.points[k + 1];
    acc += 0.5 * (b.t - a.t) * (integrand(a.p) + integrand(b.p));
  }
  return acc;
}

ChartPoint PeriodicOrbitRecord::at(double t) const {
  double phi = std::fmod(2.0 * kPi * t, 2.0 * kPi);
  if (phi < 0.0) phi += 2.0 * kPi;
  return ChartPoint{contact::ChartId::neck_polar, {0.0, 0.5 * kPi, phi}};
}

void PeriodicOrbitRecord::validate() const {
  profile.validate();
  require(std::abs(period - profile.f(0.0) * kPi) <= 1e-12 * period,
          "orbit record: period mismatch");
  for (int k = 0; k < 256; ++k) {
    const ChartPoint p = at(k / 256.0);
    const auto x = contact::reeb_field_closed_form(profile, p).v;
    // gamma_0'(t) = (0, 0, 2*pi) in the polar chart
    const double r = std::hypot(period * x[0], period * x[1],
                                period * x[2] - 2.0 * kPi);
    require(r <= 1e-8, "orbit record: residual exceeds 1e-8");
  }
  const sp::Mat2 m = generator;
  const auto path = sp::evolve_linear_system([m](double) { return m; }, 4096);
  require((floquet - path.endpoint()).norm() <= 1e-6 * (1.0 + floquet.norm()),
          "orbit record: floquet inconsistent with generator");
  const bool even = cz_index % 2 == 0;
  const bool kind_even = classification.kind == sp::EndpointKind::hyperbolic_even;
  require(even == kind_even, "orbit record: classification/parity mismatch");
}

void floquet_constants(const NeckProfile& profile, double& a, double& b) {
  const double f0 = profile.f(0.0);
  a = std::sqrt(2.0 * kPi * f0);
  b = std::sqrt(kPi * profile.ddf(0.0)) / (2.0 * f0);
}

sp::Mat2 floquet_closed_form(const NeckProfile& profile, double t) {
  double a, b;
  floquet_constants(profile, a, b);
  sp::Mat2 c, d;
  c << a / b, 1.0, -1.0, b / a;
  c *= 1.0 / std::sqrt(2.0);
  d << std::exp(a * b * t), 0.0, 0.0, std::exp(-a * b * t);
  return c * d * c.inverse();
}

PeriodicOrbitRecord equatorial_orbit(const NeckProfile& profile, int steps) {
  profile.validate();
  PeriodicOrbitRecord rec;
  rec.profile = profile;
  const double f0 = profile.f(0.0);
  rec.period = f0 * kPi;
  rec.generator << 0.0, -2.0 * kPi * f0,
      -kPi * profile.ddf(0.0) / (4.0 * f0 * f0), 0.0;
  const sp::Mat2 m = rec.generator;
  const auto path = sp::evolve_linear_system([m](double) { return m; }, steps);
  rec.floquet = path.endpoint();
  rec.classification = sp::classify_endpoint(rec.floquet);
  rec.cz_index = sp::conley_zehnder(path);
  rec.validate();
  return rec;
}

int orbit_cz(const PeriodicOrbitRecord& record, int steps) {
  const sp::Mat2 m = record.generator;
  const auto path = sp::evolve_linear_system([m](double) { return m; }, steps);
  return sp::conley_zehnder(path);
}

}  // namespace reebkit::flow
