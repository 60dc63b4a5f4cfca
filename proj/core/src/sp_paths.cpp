#include "reebkit/sp_paths.hpp"

#include <cmath>
#include <stdexcept>

namespace reebkit::sp {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Wrapped angle difference in (-pi, pi].
double angle_diff(double to, double from) {
  double d = std::fmod(to - from, 2.0 * kPi);
  if (d > kPi) d -= 2.0 * kPi;
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

// Kahan's FMA determinant: accurate to a few ulp even under the massive
// cancellation of strongly hyperbolic samples (ad, bc ~ ||A||^2 >> det = 1).
double det2(const Mat2& m) {
  const double w = m(0, 1) * m(1, 0);
  const double e = std::fma(m(0, 1), m(1, 0), -w);
  const double f = std::fma(m(0, 0), m(1, 1), -w);
  return f - e;
}

// det = 1 is representable only up to eps*(|ad|+|bc|): entrywise rounding of a
// strongly hyperbolic sample already perturbs the determinant by that much.
double det_slack(const Mat2& m) {
  return 1e-9 + 1e-11 * (std::abs(m(0, 0) * m(1, 1)) + std::abs(m(0, 1) * m(1, 0)));
}

}  // namespace

Mat2 j0() {
  Mat2 j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

Mat2 rotation(double beta) {
  Mat2 r;
  r << std::cos(beta), -std::sin(beta), std::sin(beta), std::cos(beta);
  return r;
}

void SymplecticPath::validate() const {
  require(samples.size() >= 2, "path needs at least two samples");
  require((samples.front() - Mat2::Identity()).norm() <= 1e-9,
          "path must start at the identity");
  for (const Mat2& m : samples) {
    require(m.allFinite(), "non-finite path sample");
    require(std::abs(det2(m) - 1.0) <= det_slack(m),
            "path sample is not symplectic (det far from 1)");
  }
}

SymplecticPath evolve_linear_system(const std::function<Mat2(double)>& generator,
                                    int steps) {
  require(steps >= 16, "evolve_linear_system: steps < 16");
  const double h = 1.0 / double(steps);
  SymplecticPath path;
  path.samples.reserve(steps + 1);
  Mat2 psi = Mat2::Identity();
  path.samples.push_back(psi);
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Mat2 m1 = generator(t);
    const Mat2 m2 = generator(t + 0.5 * h);
    const Mat2 m4 = generator(t + h);
    require(m1.allFinite() && m2.allFinite() && m4.allFinite(),
            "evolve_linear_system: non-finite generator value");
    const Mat2 k1 = m1 * psi;
    const Mat2 k2 = m2 * (psi + 0.5 * h * k1);
    const Mat2 k3 = m2 * (psi + 0.5 * h * k2);
    const Mat2 k4 = m4 * (psi + h * k3);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // Renormalize only when the deviation is genuine drift: below the
    // representation noise floor eps*(|ad|+|bc|) the measured det reflects
    // entrywise rounding, and dividing by it would corrupt the sample.
    const double d = det2(psi);
    const double floor_ = 100.0 * 2.3e-16 *
        (std::abs(psi(0, 0) * psi(1, 1)) + std::abs(psi(0, 1) * psi(1, 0)) + 1.0);
    if (std::abs(d - 1.0) > floor_ && std::abs(d - 1.0) < 0.0625)
      psi /= std::sqrt(d);
    path.samples.push_back(psi);
  }
  return path;
}

double polar_angle(const Mat2& a) {
  // A = U P, U = R(theta): theta = atan2(a21 - a12, a11 + a22).  For det A = 1
  // the pair (a11+a22, a21-a12) never vanishes simultaneously.
  return std::atan2(a(1, 0) - a(0, 1), a(0, 0) + a(1, 1));
}

namespace {

// Continuous lift of the polar angle along a sample sequence, starting from
// `start_lift` whose wrapped value matches the first sample.  Throws when the
// lift is ambiguous (jump > pi/2 between consecutive samples).
double lift_polar_angle(const std::vector<Mat2>& seq, double start_lift) {
  double lift = start_lift;
  double prev = polar_angle(seq.front());
  for (size_t i = 1; i < seq.size(); ++i) {
    const double cur = polar_angle(seq[i]);
    const double d = angle_diff(cur, prev);
    if (std::abs(d) > 0.5 * kPi)
      throw std::runtime_error("angle lift ambiguous: jump > pi/2 (grid too coarse)");
    lift += d;
    prev = cur;
  }
  return lift;
}

struct EigenFrame {
  Mat2 q;         // det(q) = 1
  double alpha;   // signed elliptic rotation angle, 0 if hyperbolic
  double lambda;  // real eigenvalue (|lambda| >= 1), 0 if elliptic
};

// Complex eigenvector of w for eigenvalue mu, from whichever row is better
// conditioned.
std::pair<std::complex<double>, std::complex<double>> eigvec(
    const Mat2& w, std::complex<double> mu) {
  const std::complex<double> v1a = w(0, 1), v2a = mu - w(0, 0);
  const std::complex<double> v1b = mu - w(1, 1), v2b = w(1, 0);
  const double na = std::norm(v1a) + std::norm(v2a);
  const double nb = std::norm(v1b) + std::norm(v2b);
  return na >= nb ? std::make_pair(v1a, v2a) : std::make_pair(v1b, v2b);
}

// For elliptic w: w = q * rotation(alpha) * q^{-1} with det q = 1.
EigenFrame elliptic_frame(const Mat2& w) {
  const double half_tr = 0.5 * w.trace();
  const double a = std::acos(std::min(1.0, std::max(-1.0, half_tr)));
  const std::complex<double> mu(std::cos(a), std::sin(a));
  auto [v1, v2] = eigvec(w, mu);
  Eigen::Vector2d u(v1.real(), v2.real()), x(v1.imag(), v2.imag());
  // w (u + i x) = e^{ia} (u + i x)  =>  w = [u x] R(-a) [u x]^{-1}
  Mat2 q;
  q.col(0) = u;
  q.col(1) = x;
  double det = det2(q);
  double alpha = -a;
  if (det < 0.0) {  // flip the imaginary part: conjugation by diag(1,-1)
    q.col(1) = -x;
    det = -det;
    alpha = a;
  }
  if (det <= 1e-14) throw std::runtime_error("elliptic frame degenerate");
  q /= std::sqrt(det);
  return {q, alpha, 0.0};
}

// For hyperbolic w: w = q * diag(lambda, 1/lambda) * q^{-1}, |lambda| > 1.
EigenFrame hyperbolic_frame(const Mat2& w) {
  const double tr = w.trace();
  const double disc = std::sqrt(tr * tr - 4.0);
  const double lambda = 0.5 * (tr + (tr >= 0.0 ? disc : -disc));  // |lambda|>1
  auto [a1, a2] = eigvec(w, lambda);
  auto [b1, b2] = eigvec(w, 1.0 / lambda);
  Mat2 q;
  q << a1.real(), b1.real(), a2.real(), b2.real();
  double det = det2(q);
  if (det < 0.0) {
    q.col(1) = -q.col(1);
    det = -det;
  }
  if (det <= 1e-14) throw std::runtime_error("hyperbolic frame degenerate");
  q /= std::sqrt(det);
  return {q, 0.0, lambda};
}

// Polar decomposition q = R(phi) p with p symmetric positive definite.
void polar_decompose(const Mat2& q, double& phi, Mat2& p) {
  phi = polar_angle(q);
  p = rotation(-phi) * q;
  p = 0.5 * (p + p.transpose().eval());  // symmetrize roundoff
}

Mat2 sym_pow(const Mat2& p, double s) {
  Eigen::SelfAdjointEigenSolver<Mat2> es(p);
  const Eigen::Vector2d d = es.eigenvalues();
  Mat2 dp = Mat2::Zero();
  dp(0, 0) = std::pow(d(0), s);
  dp(1, 1) = std::pow(d(1), s);
  return es.eigenvectors() * dp * es.eigenvectors().transpose();
}

constexpr int kArcSamples = 1024;

// Canonical arc from a nondegenerate endpoint to its normal form, staying in
// the nondegenerate set: elliptic / hyperbolic_odd endpoints run to -I along
// an eigenvalue interpolation; hyperbolic_even endpoints run eigenvalues to
// {2, 1/2} and then contract the eigenframe to the identity (the eigenvalues,
// hence nondegeneracy, are untouched by the conjugation leg).
std::vector<Mat2> normal_form_arc(const Mat2& w, EndpointKind kind) {
  std::vector<Mat2> arc;
  arc.reserve(2 * kArcSamples + 2);
  if (std::abs(w.trace() + 2.0) < 1e-3) {
    // Near -I the eigenframe is ill-conditioned; the straight line to -I
    // (det-renormalized) stays in the nondegenerate set and does the job.
    for (int i = 0; i <= kArcSamples; ++i) {
      const double s = double(i) / kArcSamples;
      Mat2 m = (1.0 - s) * w - s * Mat2::Identity();
      m /= std::sqrt(det2(m));
      arc.push_back(m);
    }
    return arc;
  }
  switch (kind) {
    case EndpointKind::elliptic: {
      const EigenFrame f = elliptic_frame(w);
      const Mat2 qi = f.q.inverse();
      const double target = f.alpha >= 0.0 ? kPi : -kPi;
      for (int i = 0; i <= kArcSamples; ++i) {
        const double s = double(i) / kArcSamples;
        arc.push_back(f.q * rotation((1.0 - s) * f.alpha + s * target) * qi);
      }
      break;
    }
    case EndpointKind::hyperbolic_odd: {
      const EigenFrame f = hyperbolic_frame(w);
      const Mat2 qi = f.q.inverse();
      const double mag = -f.lambda;  // > 1
      for (int i = 0; i <= kArcSamples; ++i) {
        const double s = double(i) / kArcSamples;
        const double l = -std::pow(mag, 1.0 - s);
        Mat2 d = Mat2::Zero();
        d(0, 0) = l;
        d(1, 1) = 1.0 / l;
        arc.push_back(f.q * d * qi);
      }
      break;
    }
    case EndpointKind::hyperbolic_even: {
      EigenFrame f = hyperbolic_frame(w);  // lambda > 1
      const Mat2 qi = f.q.inverse();
      for (int i = 0; i <= kArcSamples; ++i) {
        const double s = double(i) / kArcSamples;
        const double l = std::pow(f.lambda, 1.0 - s) * std::pow(2.0, s);
        Mat2 d = Mat2::Zero();
        d(0, 0) = l;
        d(1, 1) = 1.0 / l;
        arc.push_back(f.q * d * qi);
      }
      double phi;
      Mat2 p;
      polar_decompose(f.q, phi, p);
      Mat2 d = Mat2::Zero();
      d(0, 0) = 2.0;
      d(1, 1) = 0.5;
      for (int i = 1; i <= kArcSamples; ++i) {
        const double s = double(i) / kArcSamples;
        const Mat2 qs = rotation((1.0 - s) * phi) * sym_pow(p, 1.0 - s);
        arc.push_back(qs * d * qs.inverse());
      }
      break;
    }
    case EndpointKind::degenerate:
      throw std::invalid_argument("degenerate endpoint has no normal-form arc");
  }
  return arc;
}

}  // namespace

int maslov_index(const SymplecticPath& loop) {
  loop.validate();
  require((loop.endpoint() - Mat2::Identity()).norm() <= 1e-6,
          "maslov_index: path is not a loop");
  const double total = lift_polar_angle(loop.samples, polar_angle(loop.samples[0]));
  const double turns = total / (2.0 * kPi);
  const long rounded = std::lround(turns);
  if (std::abs(turns - double(rounded)) > 0.1)
    throw std::runtime_error("maslov_index: rounding residual > 0.1 (grid too coarse)");
  return int(rounded);
}

int conley_zehnder(const SymplecticPath& path) {
  path.validate();
  const Mat2 w = path.endpoint();
  require(std::abs(det2(Mat2(w - Mat2::Identity()))) > 1e-8,
          "conley_zehnder: degenerate endpoint");
  const PathEndpointClass cls = classify_endpoint(w);
  double lift = lift_polar_angle(path.samples, polar_angle(path.samples[0]));

  std::vector<Mat2> arc = normal_form_arc(w, cls.kind);
  lift = lift_polar_angle(arc, lift);

  const double half_turns = lift / kPi;
  const long rounded = std::lround(half_turns);
  if (std::abs(half_turns - double(rounded)) > 0.1)
    throw std::runtime_error("conley_zehnder: rounding residual > 0.1");
  return int(rounded);
}

int cz_iterate_hyperbolic(int base_mu, int m) {
  require(m >= 1, "cz_iterate: m < 1");
  return m * base_mu;
}

int cz_iterate_elliptic(double theta, int m) {
  require(m >= 1, "cz_iterate: m < 1");
  const double mt = m * theta;
  require(std::abs(mt - std::round(mt)) > 1e-9,
          "cz_iterate: m*theta within 1e-9 of an integer (degenerate iterate)");
  return 2 * int(std::floor(mt)) + 1;
}

const char* endpoint_kind_name(EndpointKind k) {
  switch (k) {
    case EndpointKind::elliptic: return "elliptic";
    case EndpointKind::hyperbolic_even: return "hyperbolic_even";
    case EndpointKind::hyperbolic_odd: return "hyperbolic_odd";
    case EndpointKind::degenerate: return "degenerate";
  }
  return "?";
}

PathEndpointClass classify_endpoint(const Mat2& w) {
  require(w.allFinite(), "classify_endpoint: non-finite entries");
  const double tr = w.trace();
  PathEndpointClass out;
  const double disc = tr * tr - 4.0;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    out.eig1 = 0.5 * (tr + r);
    out.eig2 = 0.5 * (tr - r);
  } else {
    const double im = 0.5 * std::sqrt(-disc);
    out.eig1 = {0.5 * tr, im};
    out.eig2 = {0.5 * tr, -im};
  }
  if (std::abs(out.eig1 - 1.0) <= 1e-8 || std::abs(out.eig2 - 1.0) <= 1e-8) {
    out.kind = EndpointKind::degenerate;
  } else if (disc < 0.0) {
    out.kind = EndpointKind::elliptic;
  } else if (tr > 0.0) {
    out.kind = EndpointKind::hyperbolic_even;
  } else {
    out.kind = EndpointKind::hyperbolic_odd;
  }
  return out;
}

}  // namespace reebkit::sp
