#include "reebkit/contact_models.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace reebkit::contact {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double wrap_2pi(double phi) {
  double w = std::fmod(phi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w;
}

// degree-7 smoothstep on [0,1]: 35u^4 - 84u^5 + 70u^6 - 20u^7
double smooth7(double u) {
  return u * u * u * u * (((-20.0 * u + 70.0) * u - 84.0) * u + 35.0);
}
double smooth7_d(double u) {
  const double v = u * (1.0 - u);
  return 140.0 * v * v * v;  // 140 u^3 (1-u)^3
}
double smooth7_dd(double u) {
  const double w = u * (1.0 - u);
  return 420.0 * w * w * (1.0 - 2.0 * u);  // 420 u^2 (1-u)^2 (1-2u)
}

}  // namespace

const char* chart_name(ChartId id) {
  switch (id) {
    case ChartId::r3_plus: return "r3_plus";
    case ChartId::r3_minus: return "r3_minus";
    case ChartId::neck_polar: return "neck_polar";
    case ChartId::neck_pole_north: return "neck_pole_north";
    case ChartId::neck_pole_south: return "neck_pole_south";
  }
  return "?";
}

bool is_neck_chart(ChartId id) {
  return id == ChartId::neck_polar || is_pole_chart(id);
}

bool is_pole_chart(ChartId id) {
  return id == ChartId::neck_pole_north || id == ChartId::neck_pole_south;
}

void ChartPoint::validate() const {
  for (double x : c) require(std::isfinite(x), "non-finite chart coordinate");
  if (chart == ChartId::neck_polar) {
    require(c[1] > 0.0 && c[1] < kPi, "theta outside (0,pi)");
    require(std::abs(std::sin(c[1])) > 1e-6,
            "polar chart too close to a pole; use a pole chart");
  } else if (is_pole_chart(chart)) {
    require(c[1] * c[1] + c[2] * c[2] < 1.0, "pole chart needs X^2+Y^2 < 1");
  }
}

ChartPoint polar_to_pole(const ChartPoint& p) {
  require(p.chart == ChartId::neck_polar, "polar_to_pole: wrong chart");
  const double theta = p.c[1], phi = p.c[2];
  const bool north = std::cos(theta) >= 0.0;
  ChartPoint q;
  q.chart = north ? ChartId::neck_pole_north : ChartId::neck_pole_south;
  q.c = {p.c[0], std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi)};
  return q;
}

ChartPoint pole_to_polar(const ChartPoint& p) {
  require(is_pole_chart(p.chart), "pole_to_polar: wrong chart");
  const double r = std::hypot(p.c[1], p.c[2]);
  require(r > 1e-12, "pole_to_polar: at the pole, polar chart undefined");
  const double a = std::asin(std::min(1.0, r));
  ChartPoint q;
  q.chart = ChartId::neck_polar;
  q.c = {p.c[0], p.chart == ChartId::neck_pole_north ? a : kPi - a,
         wrap_2pi(std::atan2(p.c[2], p.c[1]))};
  return q;
}

double monotone_z(const ChartPoint& p) {
  if (p.chart == ChartId::neck_polar) return p.c[0] * std::cos(p.c[1]);
  require(is_pole_chart(p.chart), "monotone_z: not a neck chart");
  const double s = p.chart == ChartId::neck_pole_north ? 1.0 : -1.0;
  const double cz = std::sqrt(std::max(0.0, 1.0 - p.c[1] * p.c[1] - p.c[2] * p.c[2]));
  return p.c[0] * s * cz;
}

double g_of_theta(double theta) {
  const double ct = std::cos(theta);
  return 2.0 * ct * ct + 1.0;
}

// ---------------------------------------------------------------------------
// neck profile

namespace {

// beta and derivatives as functions of x (even extension of the smoothstep)
double beta_of(double x, double eps) {
  const double a = std::abs(x);
  if (a <= 0.5 * eps) return 0.0;
  if (a >= eps) return 1.0;
  return smooth7((a - 0.5 * eps) / (0.5 * eps));
}

double beta_d(double x, double eps) {
  const double a = std::abs(x);
  if (a <= 0.5 * eps || a >= eps) return 0.0;
  const double d = smooth7_d((a - 0.5 * eps) / (0.5 * eps)) * (2.0 / eps);
  return x >= 0.0 ? d : -d;
}

double beta_dd(double x, double eps) {
  const double a = std::abs(x);
  if (a <= 0.5 * eps || a >= eps) return 0.0;
  return smooth7_dd((a - 0.5 * eps) / (0.5 * eps)) * (4.0 / (eps * eps));
}

}  // namespace

double NeckProfile::f(double x) const {
  const double b = beta_of(x, epsilon);
  return 0.5 * (b + 1.0) * x * x + (1.0 - b) * c_eps;
}

double NeckProfile::df(double x) const {
  const double b = beta_of(x, epsilon);
  const double bd = beta_d(x, epsilon);
  return 0.5 * bd * x * x + (b + 1.0) * x - bd * c_eps;
}

double NeckProfile::ddf(double x) const {
  const double b = beta_of(x, epsilon);
  const double bd = beta_d(x, epsilon);
  const double bdd = beta_dd(x, epsilon);
  return 0.5 * bdd * x * x + 2.0 * bd * x + (b + 1.0) - bdd * c_eps;
}

void NeckProfile::validate() const {
  require(epsilon > 0.0 && c_eps > 0.0, "invalid neck profile constants");
  for (int k = -4; k <= 4; ++k) {
    const double x = epsilon * (1.0 + 0.5 * std::abs(k)) * (k >= 0 ? 1.0 : -1.0);
    require(std::abs(f(x) - x * x) <= 1e-15 * std::max(1.0, x * x),
            "f(x) != x^2 outside the neck");
  }
  require(ddf(0.0) > 0.0, "f''(0) <= 0");
  for (int i = 0; i < 1000; ++i) {
    const double x = -2.0 * epsilon + 4.0 * epsilon * (i + 0.5) / 1000.0;
    require(f(x) > 0.0, "f not positive");
    if (std::abs(x) > 1e-12)
      require(x * df(x) > 0.0, "x f'(x) not positive away from 0");
  }
}

NeckProfile neck_profile(double epsilon) {
  require(epsilon > 0.0, "neck_profile: epsilon <= 0");
  NeckProfile p;
  p.epsilon = epsilon;
  // plateau constant: 1/c = 2 * max(beta'/x), maximized on a 1e4 grid (tiny
  // safety factor absorbs the grid underestimate; any valid constant works)
  double peak = 0.0;
  for (int i = 1; i <= 10000; ++i) {
    const double x = epsilon * double(i) / 10000.0;
    peak = std::max(peak, beta_d(x, epsilon) / x);
  }
  p.c_eps = 1.0 / (2.0 * peak * (1.0 + 1e-6));
  p.validate();
  return p;
}

std::string neck_profile_to_json(const NeckProfile& p) {
  nlohmann::json j{{"epsilon", p.epsilon}, {"c_eps", p.c_eps}};
  return j.dump();
}

NeckProfile neck_profile_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  NeckProfile p;
  p.epsilon = j.at("epsilon").get<double>();
  p.c_eps = j.at("c_eps").get<double>();
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// one-forms

std::array<std::array<double, 3>, 3> ChartOneForm::curl(const ChartPoint& p) const {
  const auto g = grad(p);
  std::array<std::array<double, 3>, 3> f{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) f[i][j] = g[j][i] - g[i][j];
  return f;
}

double ChartOneForm::eval(const ChartPoint& p, const std::array<double, 3>& v) const {
  const auto a = coeff(p);
  return a[0] * v[0] + a[1] * v[1] + a[2] * v[2];
}

double ChartOneForm::d_eval(const ChartPoint& p, const std::array<double, 3>& v,
                            const std::array<double, 3>& w) const {
  const auto f = curl(p);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += f[i][j] * v[i] * w[j];
  return s;
}

double ChartOneForm::contact_volume(const ChartPoint& p) const {
  const auto a = coeff(p);
  const auto f = curl(p);
  return a[0] * f[1][2] - a[1] * f[0][2] + a[2] * f[0][1];
}

ChartOneForm lambda_plus() {
  ChartOneForm l;
  l.chart = ChartId::r3_plus;
  l.coeff = [](const ChartPoint& p) {
    return std::array<double, 3>{-0.5 * p.c[1], 0.5 * p.c[0], 1.0};
  };
  l.grad = [](const ChartPoint&) {
    std::array<std::array<double, 3>, 3> g{};
    g[0] = {0.0, -0.5, 0.0};
    g[1] = {0.5, 0.0, 0.0};
    g[2] = {0.0, 0.0, 0.0};
    return g;
  };
  return l;
}

ChartOneForm lambda_minus() {
  ChartOneForm l = lambda_plus();
  l.chart = ChartId::r3_minus;
  auto base = l.coeff;
  l.coeff = [base](const ChartPoint& p) {
    auto a = base(p);
    a[2] = -1.0;
    return a;
  };
  return l;
}

ChartOneForm lambda_one_form(ChartId neck_chart) {
  require(is_neck_chart(neck_chart), "lambda_one_form: not a neck chart");
  ChartOneForm l;
  l.chart = neck_chart;
  if (neck_chart == ChartId::neck_polar) {
    l.coeff = [](const ChartPoint& p) {
      const double theta = p.c[1];
      return std::array<double, 3>{3.0 * std::cos(theta), -p.c[0] * std::sin(theta),
                                   0.5 * std::sin(theta) * std::sin(theta)};
    };
    l.grad = [](const ChartPoint& p) {
      const double rho = p.c[0], theta = p.c[1];
      const double st = std::sin(theta), ct = std::cos(theta);
      std::array<std::array<double, 3>, 3> g{};
      g[0] = {0.0, -3.0 * st, 0.0};          // d(3cos)/d(rho,theta,phi)
      g[1] = {-st, -rho * ct, 0.0};          // d(-rho sin)
      g[2] = {0.0, st * ct, 0.0};            // d(sin^2/2)
      return g;
    };
  } else {
    const double s = neck_chart == ChartId::neck_pole_north ? 1.0 : -1.0;
    l.coeff = [s](const ChartPoint& p) {
      const double rho = p.c[0], x = p.c[1], y = p.c[2];
      const double cz = std::sqrt(1.0 - x * x - y * y);
      return std::array<double, 3>{3.0 * s * cz, -s * rho * x / cz - 0.5 * y,
                                   -s * rho * y / cz + 0.5 * x};
    };
    l.grad = [s](const ChartPoint& p) {
      const double rho = p.c[0], x = p.c[1], y = p.c[2];
      const double cz = std::sqrt(1.0 - x * x - y * y);
      const double c3 = cz * cz * cz;
      std::array<std::array<double, 3>, 3> g{};
      g[0] = {0.0, -3.0 * s * x / cz, -3.0 * s * y / cz};
      g[1] = {-s * x / cz, -s * rho * (1.0 / cz + x * x / c3),
              -s * rho * x * y / c3 - 0.5};
      g[2] = {-s * y / cz, -s * rho * x * y / c3 + 0.5,
              -s * rho * (1.0 / cz + y * y / c3)};
      return g;
    };
  }
  return l;
}

ChartOneForm lambda_f_form(const NeckProfile& profile, ChartId neck_chart) {
  ChartOneForm base = lambda_one_form(neck_chart);
  ChartOneForm l;
  l.chart = neck_chart;
  l.coeff = [profile, base](const ChartPoint& p) {
    auto a = base.coeff(p);
    const double f = profile.f(p.c[0]);
    for (double& x : a) x *= f;
    return a;
  };
  l.grad = [profile, base](const ChartPoint& p) {
    auto g = base.grad(p);
    const auto a = base.coeff(p);
    const double f = profile.f(p.c[0]);
    const double fp = profile.df(p.c[0]);
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) g[j][i] *= f;
      g[j][0] += fp * a[j];  // rho is coordinate 0 in every neck chart
    }
    return g;
  };
  return l;
}

ChartOneForm scaled_form(const ChartOneForm& base, double factor) {
  ChartOneForm l;
  l.chart = base.chart;
  l.coeff = [base, factor](const ChartPoint& p) {
    auto a = base.coeff(p);
    for (double& x : a) x *= factor;
    return a;
  };
  l.grad = [base, factor](const ChartPoint& p) {
    auto g = base.grad(p);
    for (auto& row : g)
      for (double& x : row) x *= factor;
    return g;
  };
  return l;
}

std::array<double, 3> lambda_one(const ChartPoint& p) {
  require(is_neck_chart(p.chart), "lambda_one: not a neck chart");
  p.validate();
  return lambda_one_form(p.chart).coeff(p);
}

// ---------------------------------------------------------------------------
// Reeb fields

TangentVector reeb_field_closed_form(const NeckProfile& profile, const ChartPoint& p) {
  require(is_neck_chart(p.chart), "reeb_field_closed_form: not a neck chart");
  p.validate();
  const double rho = p.c[0];
  const double f = profile.f(rho), fp = profile.df(rho);
  TangentVector out;
  out.base = p;
  if (p.chart == ChartId::neck_polar) {
    const double theta = p.c[1];
    const double scale = 1.0 / (g_of_theta(theta) * f * f);
    out.v = {scale * f * std::cos(theta), scale * (-0.5) * std::sin(theta) * fp,
             scale * (-rho * fp + 2.0 * f)};
  } else {
    const double s = p.chart == ChartId::neck_pole_north ? 1.0 : -1.0;
    const double x = p.c[1], y = p.c[2];
    const double cz = s * std::sqrt(1.0 - x * x - y * y);  // cos(theta)
    const double g = 3.0 - 2.0 * (x * x + y * y);
    const double scale = 1.0 / (g * f * f);
    const double rot = -rho * fp + 2.0 * f;  // coefficient of d/d(phi)
    out.v = {scale * f * cz, scale * (-rot * y - 0.5 * fp * cz * x),
             scale * (rot * x - 0.5 * fp * cz * y)};
  }
  return out;
}

TangentVector reeb_field_numeric(const ChartOneForm& form, const ChartPoint& p) {
  p.validate();
  require(std::abs(form.contact_volume(p)) > 1e-10,
          "reeb_field_numeric: contact condition violated");
  const auto a = form.coeff(p);
  const auto f = form.curl(p);
  Eigen::Matrix<double, 4, 3> sys;
  Eigen::Vector4d rhs;
  for (int j = 0; j < 3; ++j) sys(0, j) = a[j];
  rhs(0) = 1.0;
  for (int j = 0; j < 3; ++j) {  // row j+1: dlambda(X, e_j) = sum_i X_i f[i][j]
    for (int i = 0; i < 3; ++i) sys(j + 1, i) = f[i][j];
    rhs(j + 1) = 0.0;
  }
  const Eigen::Vector3d x = sys.colPivHouseholderQr().solve(rhs);
  const Eigen::Vector4d res = sys * x - rhs;
  require(res.norm() < 1e-7, "reeb_field_numeric: singular system");
  TangentVector out;
  out.base = p;
  out.v = {x(0), x(1), x(2)};
  return out;
}

// ---------------------------------------------------------------------------
// gluing maps

PhiImage phi_map(int sign, const ChartPoint& p) {
  require(sign == 1 || sign == -1, "phi_map: sign must be +-1");
  require(is_neck_chart(p.chart), "phi_map: not a neck chart");
  p.validate();
  const double rho = p.c[0];
  require(rho != 0.0, "phi_map: rho = 0");
  require(double(sign) * rho > 0.0, "phi_map: sign inconsistent with rho");
  const double sg = double(sign);
  PhiImage out;
  out.image.chart = sign > 0 ? ChartId::r3_plus : ChartId::r3_minus;
  if (p.chart == ChartId::neck_polar) {
    const double theta = p.c[1], phi = p.c[2];
    const double st = std::sin(theta), ct = std::cos(theta);
    out.image.c = {sg * rho * st * std::cos(phi), sg * rho * st * std::sin(phi),
                   sg * rho * rho * rho * ct};
    out.jacobian = {{{sg * st * std::cos(phi), sg * rho * ct * std::cos(phi),
                      -sg * rho * st * std::sin(phi)},
                     {sg * st * std::sin(phi), sg * rho * ct * std::sin(phi),
                      sg * rho * st * std::cos(phi)},
                     {sg * 3.0 * rho * rho * ct, -sg * rho * rho * rho * st, 0.0}}};
    // determinant quoted in the (rho, phi, theta) coordinate ordering; the
    // stored jacobian uses (rho, theta, phi), an odd permutation away
    out.jacobian_det = -sg * std::pow(rho, 4) * st * (1.0 + 2.0 * ct * ct);
  } else {
    const double s = p.chart == ChartId::neck_pole_north ? 1.0 : -1.0;
    const double x = p.c[1], y = p.c[2];
    const double cz = std::sqrt(1.0 - x * x - y * y);
    out.image.c = {sg * rho * x, sg * rho * y, sg * rho * rho * rho * s * cz};
    out.jacobian = {{{sg * x, sg * rho, 0.0},
                     {sg * y, 0.0, sg * rho},
                     {sg * 3.0 * rho * rho * s * cz, -sg * rho * rho * rho * s * x / cz,
                      -sg * rho * rho * rho * s * y / cz}}};
    out.jacobian_det = sg * s * std::pow(rho, 4) * (3.0 - 2.0 * x * x - 2.0 * y * y) / cz;
  }
  return out;
}

// ---------------------------------------------------------------------------
// symplectic frame

std::pair<TangentVector, TangentVector> symplectic_frame(const NeckProfile& profile,
                                                         const ChartPoint& p) {
  require(p.chart == ChartId::neck_polar, "symplectic_frame: polar chart only");
  p.validate();
  const double rho = p.c[0], theta = p.c[1];
  const double st = std::sin(theta), ct = std::cos(theta);
  require(std::abs(st) > 1e-6, "symplectic_frame: theta too near a pole");
  const double f = profile.f(rho);
  const double fg = f * g_of_theta(theta);
  TangentVector v1{p, {0.5 * st / fg, 0.0, -3.0 * (ct / st) / fg}};
  TangentVector v2{p, {0.0, 1.0, 2.0 * rho / st}};
  return {v1, v2};
}

}  // namespace reebkit::contact
