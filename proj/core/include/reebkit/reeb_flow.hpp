#ifndef REEBKIT_REEB_FLOW_HPP
#define REEBKIT_REEB_FLOW_HPP

#include <string>
#include <vector>

#include "reebkit/contact_models.hpp"
#include "reebkit/sp_paths.hpp"

// Reeb-flow integration on the neck model, certification of the equatorial
// orbit gamma_0, linearized flow in the frame (v1, v2), Floquet analysis.

namespace reebkit::flow {

using contact::ChartPoint;
using contact::NeckProfile;

struct TrajectoryPoint {
  double t;
  ChartPoint p;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  double h = 0.0;
  int chart_switches = 0;
  bool exited = false;  // left |rho| >= 10*epsilon before the full duration
};

// RK4 flow of X_f with automatic polar<->pole chart switching (hysteresis at
// |sin theta| = 0.1 / 0.12).  Throws when the trajectory leaves the modeled
// region unless allow_exit is set (then the trajectory ends with exited=true).
Trajectory integrate(const NeckProfile& profile, const ChartPoint& start,
                     double duration, double h, bool allow_exit = false);

// Z = rho*cos(theta) sampled along the trajectory.
std::vector<double> monotone_functional(const Trajectory& traj);

// CSV export: t, chart_id, c1, c2, c3, Z
std::string trajectory_csv(const Trajectory& traj);

// Time at which phi first accumulates 2*pi from an equatorial start.
double first_return_time(const NeckProfile& profile, const ChartPoint& start,
                         double h);

// action integral of lambda_f along a trajectory (trapezoid in t)
double action_integral(const NeckProfile& profile, const Trajectory& traj);

struct PeriodicOrbitRecord {
  NeckProfile profile;
  double period = 0.0;                  // f(0)*pi
  sp::Mat2 generator;                   // constant M of the linearized flow
  sp::Mat2 floquet;                     // Psi(1) of Psi' = M Psi
  sp::PathEndpointClass classification;
  int cz_index = 0;

  ChartPoint at(double t) const;        // gamma_0(t) = (0, pi/2, 2*pi*t)
  void validate() const;                // residual + consistency invariants
};

// The analytic candidate gamma_0 certified by residual; generator from the
// paper's frame computation, Floquet by evolve_linear_system.
PeriodicOrbitRecord equatorial_orbit(const NeckProfile& profile, int steps = 10000);

// CZ of the orbit: evolve the generator, apply the path method.
int orbit_cz(const PeriodicOrbitRecord& record, int steps = 10000);

// A = sqrt(2 pi f(0)), B = sqrt(pi f''(0)) / (2 f(0))
void floquet_constants(const NeckProfile& profile, double& a, double& b);

// C diag(e^{AB t}, e^{-AB t}) C^{-1}, the closed-form linearized flow
sp::Mat2 floquet_closed_form(const NeckProfile& profile, double t);

}  // namespace reebkit::flow

#endif
