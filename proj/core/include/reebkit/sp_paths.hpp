#ifndef REEBKIT_SP_PATHS_HPP
#define REEBKIT_SP_PATHS_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

// Paths in Sp(2,R): evolution from time-dependent generators, Maslov index of
// loops, Conley-Zehnder index of nondegenerate paths, iteration formulas.

namespace reebkit::sp {

using Mat2 = Eigen::Matrix2d;

// J0 = [[0,-1],[1,0]], the standard complex structure on R^2.
Mat2 j0();

// Counterclockwise rotation by angle beta.
Mat2 rotation(double beta);

// Sampled path Psi(t) in Sp(2,R) on a uniform grid over [0,1], Psi(0) = I.
struct SymplecticPath {
  std::vector<Mat2> samples;

  double h() const { return 1.0 / double(samples.size() - 1); }
  const Mat2& endpoint() const { return samples.back(); }
  void validate() const;  // throws on non-symplectic / bad grid
};

enum class EndpointKind { elliptic, hyperbolic_even, hyperbolic_odd, degenerate };

struct PathEndpointClass {
  EndpointKind kind;
  std::complex<double> eig1, eig2;
};

const char* endpoint_kind_name(EndpointKind k);

// RK4 solution of Psi' = M(t) Psi, Psi(0) = I, with det renormalization
// (division by sqrt(det)) after every step.  steps >= 16.
SymplecticPath evolve_linear_system(const std::function<Mat2(double)>& generator,
                                    int steps);

// Rotation angle of the polar part of A (A = U P with U a rotation, P > 0
// symmetric); well defined on all of Sp(2,R).
double polar_angle(const Mat2& a);

// Total polar-rotation angle of the loop divided by 2*pi.  Requires
// ||Psi(1) - I|| <= 1e-6 and a grid fine enough to lift the angle.
int maslov_index(const SymplecticPath& loop);

// Conley-Zehnder index by the rotation-function method: lift the polar angle
// along the path, then along a canonical eigenvalue-interpolating arc from
// Psi(1) to the normal form (-I for elliptic / hyperbolic_odd endpoints,
// diag(2,1/2) for hyperbolic_even); the index is the total angle over pi.
int conley_zehnder(const SymplecticPath& path);

// Iteration formulas: hyperbolic mu(gamma^m) = m*mu, elliptic 2*floor(m*theta)+1.
int cz_iterate_hyperbolic(int base_mu, int m);
int cz_iterate_elliptic(double theta, int m);

PathEndpointClass classify_endpoint(const Mat2& w);

}  // namespace reebkit::sp

#endif
