#include "reebkit/asym_op.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace reebkit::asym {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double cluster_tol(double lambda) { return 1e-6 * (1.0 + std::abs(lambda)); }

double wrap_diff(double to, double from) {
  double d = std::fmod(to - from, 2.0 * kPi);
  if (d > kPi) d -= 2.0 * kPi;
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

}  // namespace

void TrivializedAsymptoticOperator::validate() const {
  require(bool(s), "operator: missing S");
  require(n >= 64 && n % 2 == 0, "operator: resolution must be even and >= 64");
  for (int k = 0; k < n; ++k) {
    const sp::Mat2 m = s(double(k) / n);
    require(m.allFinite(), "operator: non-finite S sample");
    require((m - m.transpose()).norm() <= 1e-12, "operator: S not symmetric");
  }
  require((s(0.0) - s(1.0)).norm() <= 1e-9, "operator: S not 1-periodic");
}

double TrivializedAsymptoticOperator::s_sup() const {
  double sup = 0.0;
  for (int k = 0; k < n; ++k)
    sup = std::max(sup, s(double(k) / n).operatorNorm());
  return sup;
}

Eigen::MatrixXd assemble(const TrivializedAsymptoticOperator& op) {
  op.validate();
  const int n = op.n;
  const double inv2d = 0.5 * n;  // 1/(2*delta), delta = 1/n
  const sp::Mat2 hop = -sp::j0() * inv2d;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    const int next = (k + 1) % n;
    a.block<2, 2>(2 * k, 2 * k) = -op.s(double(k) / n);
    a.block<2, 2>(2 * k, 2 * next) = hop;
    a.block<2, 2>(2 * next, 2 * k) = hop.transpose();
  }
  if ((a - a.transpose()).norm() != 0.0)
    throw std::runtime_error("assemble: matrix not exactly symmetric");
  return a;
}

int eigenloop_winding(const std::vector<Eigen::Vector2d>& loop) {
  require(loop.size() >= 4, "eigenloop_winding: too few samples");
  double total = 0.0;
  double prev = std::atan2(loop[0](1), loop[0](0));
  for (size_t i = 1; i <= loop.size(); ++i) {
    const Eigen::Vector2d& v = loop[i % loop.size()];
    require(v.norm() > 1e-10, "eigenloop_winding: vanishing sample");
    const double cur = std::atan2(v(1), v(0));
    const double d = wrap_diff(cur, prev);
    require(std::abs(d) < 0.5 * kPi, "eigenloop_winding: under-resolved loop");
    total += d;
    prev = cur;
  }
  const double w = total / (2.0 * kPi);
  const long k = std::lround(w);
  require(std::abs(w - double(k)) <= 0.1, "eigenloop_winding: lift residual > 0.1");
  return int(k);
}

std::vector<SpectrumSlice> spectrum(const TrivializedAsymptoticOperator& op,
                                    double lo, double hi) {
  require(lo < hi && std::isfinite(lo) && std::isfinite(hi),
          "spectrum: bad window");
  const double bound = std::max(std::abs(lo), std::abs(hi)) + op.s_sup();
  require(2.0 * kPi * op.n / 4.0 > bound,
          "spectrum: anti-aliasing bound violated (N too small for window)");

  const int n = op.n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(assemble(op));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectrum: eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending

  std::vector<SpectrumSlice> out;
  int lo_i = 0;
  while (lo_i < ev.size()) {
    // cluster of near-equal eigenvalues
    int hi_i = lo_i;
    while (hi_i + 1 < ev.size() &&
           ev(hi_i + 1) - ev(hi_i) <= cluster_tol(ev(hi_i)))
      ++hi_i;
    const int d = hi_i - lo_i + 1;
    const double mid = 0.5 * (ev(lo_i) + ev(hi_i));
    if (mid < lo - cluster_tol(mid) || mid > hi + cluster_tol(mid)) {
      lo_i = hi_i + 1;
      continue;
    }
    // Split the cluster by roughness: a genuine mode under the anti-aliasing
    // bound turns by < pi/2 per sample (||u_{k+1}-u_k||^2 ~ 2(1-cos)|u_k|^2
    // < 2), an aliased mode by > pi/2.  Degenerate clusters (e.g. S=0) mix
    // both; the roughness form separates them.
    const Eigen::MatrixXd v = es.eigenvectors().middleCols(lo_i, d);
    Eigen::MatrixXd w(2 * n, d);
    for (int k = 0; k < n; ++k)
      w.middleRows(2 * k, 2) =
          v.middleRows(2 * ((k + 1) % n), 2) - v.middleRows(2 * k, 2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rough(w.transpose() * w);
    std::vector<Eigen::VectorXd> smooth;
    for (int j = 0; j < d; ++j)
      if (rough.eigenvalues()(j) < 2.0)
        smooth.push_back(v * rough.eigenvectors().col(j));
    for (const auto& u : smooth) {
      SpectrumSlice slice;
      slice.eigenvalue = mid;
      slice.multiplicity = int(smooth.size());
      slice.eigenloop.reserve(n);
      for (int k = 0; k < n; ++k)
        slice.eigenloop.emplace_back(u(2 * k), u(2 * k + 1));
      slice.winding = eigenloop_winding(slice.eigenloop);
      if (slice.eigenvalue >= lo && slice.eigenvalue <= hi)
        out.push_back(std::move(slice));
    }
    lo_i = hi_i + 1;
  }
  return out;
}

SpectralCz spectral_cz(const TrivializedAsymptoticOperator& op, double window) {
  if (window <= 0.0) window = 4.0 * kPi;
  const auto slices = spectrum(op, -window, window);
  const SpectrumSlice* neg = nullptr;
  const SpectrumSlice* pos = nullptr;
  for (const auto& s : slices) {
    require(std::abs(s.eigenvalue) > 1e-8, "spectral_cz: 0 in spectrum");
    if (s.eigenvalue < 0.0 && (!neg || s.eigenvalue > neg->eigenvalue)) neg = &s;
    if (s.eigenvalue > 0.0 && (!pos || s.eigenvalue < pos->eigenvalue)) pos = &s;
  }
  require(neg && pos, "spectral_cz: window misses an extremal eigenvalue");
  SpectralCz out;
  out.alpha = neg->winding;
  // p = 0 iff some positive eigenvalue keeps the winding alpha (even case)
  out.parity = 1;
  for (const auto& s : slices)
    if (s.eigenvalue > 0.0 && s.winding == out.alpha) out.parity = 0;
  out.mu = 2 * out.alpha + out.parity;
  return out;
}

std::pair<int, int> extremal_eigenspace_dims(const TrivializedAsymptoticOperator& op,
                                             double window) {
  if (window <= 0.0) window = 4.0 * kPi;
  const auto cz = spectral_cz(op, window);
  require(cz.parity == 0, "extremal_eigenspace_dims: operator is not even");
  const auto slices = spectrum(op, -window, window);
  const SpectrumSlice* neg = nullptr;
  const SpectrumSlice* pos = nullptr;
  for (const auto& s : slices) {
    if (s.eigenvalue < 0.0 && (!neg || s.eigenvalue > neg->eigenvalue)) neg = &s;
    if (s.eigenvalue > 0.0 && (!pos || s.eigenvalue < pos->eigenvalue)) pos = &s;
  }
  return {neg->multiplicity, pos->multiplicity};
}

std::string spectrum_to_json(const std::vector<SpectrumSlice>& slices) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : slices)
    j.push_back({{"eigenvalue", s.eigenvalue},
                 {"winding", s.winding},
                 {"multiplicity", s.multiplicity}});
  return j.dump();
}

}  // namespace reebkit::asym
