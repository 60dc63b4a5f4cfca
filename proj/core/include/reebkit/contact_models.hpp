#ifndef REEBKIT_CONTACT_MODELS_HPP
#define REEBKIT_CONTACT_MODELS_HPP

#include <array>
#include <functional>
#include <string>

// Chart-based contact forms for the connected-sum neck model: the standard
// forms lambda_pm on R^3, the neck forms lambda_1 and lambda_f = f*lambda_1
// on R x S^2, the gluing maps Phi_pm, the neck profile f_eps, and Reeb fields.

namespace reebkit::contact {

enum class ChartId { r3_plus, r3_minus, neck_polar, neck_pole_north, neck_pole_south };

const char* chart_name(ChartId id);

// neck_polar coords: (rho, theta in (0,pi), phi mod 2pi)
// pole charts:       (rho, X, Y) with X^2+Y^2 < 1, X = sin(theta)cos(phi)
// r3 charts:         (x, y, z)
struct ChartPoint {
  ChartId chart;
  std::array<double, 3> c;

  void validate() const;
};

struct TangentVector {
  ChartPoint base;
  std::array<double, 3> v;
};

bool is_neck_chart(ChartId id);
bool is_pole_chart(ChartId id);

// Conversions on the overlap |sin(theta)| > 0 of the neck charts.
ChartPoint polar_to_pole(const ChartPoint& p);
ChartPoint pole_to_polar(const ChartPoint& p);

// Z(rho,theta,phi) = rho*cos(theta), monotone along the Reeb flow.
double monotone_z(const ChartPoint& p);

// Profile f_eps: f(x) = (1/2)(beta+1)x^2 + (1-beta)c_eps with beta a C^3
// degree-7 smoothstep in |x| on [eps/2, eps].
struct NeckProfile {
  double epsilon = 0.0;
  double c_eps = 0.0;

  double f(double rho) const;
  double df(double rho) const;
  double ddf(double rho) const;
  void validate() const;  // spec invariants, sampled on 1e3 points
};

NeckProfile neck_profile(double epsilon);

// One-form a*dx1 + b*dx2 + c*dx3 on a single chart, with analytic first
// partials: grad(p)[j][i] = d(coeff_j)/d(coord_i).
struct ChartOneForm {
  ChartId chart;
  std::function<std::array<double, 3>(const ChartPoint&)> coeff;
  std::function<std::array<std::array<double, 3>, 3>(const ChartPoint&)> grad;

  // coefficients of d(lambda): curl[i][j] = d_i(coeff_j) - d_j(coeff_i)
  std::array<std::array<double, 3>, 3> curl(const ChartPoint& p) const;
  double eval(const ChartPoint& p, const std::array<double, 3>& v) const;
  double d_eval(const ChartPoint& p, const std::array<double, 3>& v,
                const std::array<double, 3>& w) const;
  // scalar of lambda ^ d(lambda) against dx1^dx2^dx3 (contact condition)
  double contact_volume(const ChartPoint& p) const;
};

ChartOneForm lambda_plus();   // dz + (x dy - y dx)/2 on r3_plus
ChartOneForm lambda_minus();  // -dz + (x dy - y dx)/2 on r3_minus
ChartOneForm lambda_one_form(ChartId neck_chart);
ChartOneForm lambda_f_form(const NeckProfile& profile, ChartId neck_chart);
ChartOneForm scaled_form(const ChartOneForm& base, double factor);

// Coefficients of lambda_1 at a neck point (routes by p.chart).
std::array<double, 3> lambda_one(const ChartPoint& p);

// X_f in closed form (polar or pole chart).
TangentVector reeb_field_closed_form(const NeckProfile& profile, const ChartPoint& p);

// Generic Reeb solve of [lambda(X)=1, i_X dlambda=0] from analytic partials.
TangentVector reeb_field_numeric(const ChartOneForm& form, const ChartPoint& p);

struct PhiImage {
  ChartPoint image;        // in r3_plus / r3_minus
  double jacobian_det;
  std::array<std::array<double, 3>, 3> jacobian;  // row i = d(image_i)/d(coord_j)
};

PhiImage phi_map(int sign, const ChartPoint& p);

// Symplectic frame (v1, v2) of xi_1 away from the poles.
std::pair<TangentVector, TangentVector> symplectic_frame(const NeckProfile& profile,
                                                         const ChartPoint& p);

// g(theta) = 2cos^2(theta) + 1
double g_of_theta(double theta);

std::string neck_profile_to_json(const NeckProfile& p);
NeckProfile neck_profile_from_json(const std::string& text);

}  // namespace reebkit::contact

#endif
