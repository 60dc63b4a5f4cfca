#ifndef REEBKIT_ASYM_OP_HPP
#define REEBKIT_ASYM_OP_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "reebkit/sp_paths.hpp"

// Spectral analysis of trivialized asymptotic operators -J0 d/dt - S(t) on
// loops of plane vectors: eigenvalues, eigenvector windings, the spectral
// Conley-Zehnder formula mu = 2*alpha + p, extremal eigenspace dimensions.

namespace reebkit::asym {

struct TrivializedAsymptoticOperator {
  std::function<sp::Mat2(double)> s;  // 1-periodic symmetric 2x2
  int n = 256;                        // even resolution >= 64

  void validate() const;
  double s_sup() const;  // max operator norm of S over the grid
};

struct SpectrumSlice {
  double eigenvalue = 0.0;
  int winding = 0;
  int multiplicity = 1;
  std::vector<Eigen::Vector2d> eigenloop;  // n samples over [0,1)
};

// 2N x 2N real symmetric matrix: central differences with periodic wrap.
Eigen::MatrixXd assemble(const TrivializedAsymptoticOperator& op);

// Eigenpairs in [lo, hi], winding per eigenvector, multiplicities clustered at
// 1e-6*(1+|lambda|).  Requires the anti-aliasing bound 2*pi*N/4 >
// max(|lo|,|hi|) + ||S||_inf; aliased high-frequency discrete modes are split
// off inside degenerate clusters by their roughness and discarded.
std::vector<SpectrumSlice> spectrum(const TrivializedAsymptoticOperator& op,
                                    double lo, double hi);

// Continuous-lift winding of a sampled nonvanishing loop (cyclic).
int eigenloop_winding(const std::vector<Eigen::Vector2d>& loop);

struct SpectralCz {
  int alpha = 0;   // winding at the largest negative eigenvalue
  int parity = 0;  // 0 iff some positive eigenvalue shares that winding
  int mu = 0;      // 2*alpha + parity
};

// Default window [-4pi, 4pi] (window <= 0); requires a spectral gap > 1e-8 at
// 0.  Pass a larger window when ||S|| exceeds 4pi.
SpectralCz spectral_cz(const TrivializedAsymptoticOperator& op, double window = 0.0);

// Multiplicities of the largest-negative / smallest-positive eigenvalues for
// an even-orbit (parity 0) operator.
std::pair<int, int> extremal_eigenspace_dims(const TrivializedAsymptoticOperator& op,
                                             double window = 0.0);

std::string spectrum_to_json(const std::vector<SpectrumSlice>& slices);

}  // namespace reebkit::asym

#endif
