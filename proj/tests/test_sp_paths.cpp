#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "reebkit/sp_paths.hpp"

using namespace reebkit::sp;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

SymplecticPath sample_path(const std::function<Mat2(double)>& psi, int n) {
  SymplecticPath p;
  p.samples.reserve(n + 1);
  for (int i = 0; i <= n; ++i) p.samples.push_back(psi(double(i) / n));
  return p;
}

// Random symplectic matrix: R(a) * diag(e^s, e^-s) * R(b).
Mat2 random_symplectic(std::mt19937& rng, double stretch = 1.0) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> str(-stretch, stretch);
  Mat2 d = Mat2::Zero();
  const double s = str(rng);
  d(0, 0) = std::exp(s);
  d(1, 1) = std::exp(-s);
  return rotation(ang(rng)) * d * rotation(ang(rng));
}

// Random 1-periodic symmetric loop S(t), trig polynomial of degree 2.
std::function<Mat2(double)> random_symmetric_loop(std::mt19937& rng, double amp) {
  std::uniform_real_distribution<double> coef(-amp, amp);
  std::array<Mat2, 5> c;
  for (auto& m : c) {
    const double a = coef(rng), b = coef(rng), d = coef(rng);
    m << a, b, b, d;
  }
  return [c](double t) {
    return Mat2(c[0] + c[1] * std::cos(2.0 * kPi * t) + c[2] * std::sin(2.0 * kPi * t) +
                c[3] * std::cos(4.0 * kPi * t) + c[4] * std::sin(4.0 * kPi * t));
  };
}

// Crossing-form oracle: mu = 1/2 sgn S(0) + sum over interior crossings of
// sgn(Gamma), with Gamma the restriction of S(t) to ker(Psi(t) - I).  Valid
// for paths with regular crossings; used as an independent check on the
// rotation-function method.
int crossing_form_cz(const std::function<Mat2(double)>& psi,
                     const std::function<Mat2(double)>& s_of_t) {
  auto signature = [](const Mat2& s) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(s);
    int sg = 0;
    for (int i = 0; i < 2; ++i) {
      if (es.eigenvalues()(i) > 1e-9) ++sg;
      if (es.eigenvalues()(i) < -1e-9) --sg;
    }
    return sg;
  };
  auto crossing_sign = [&](double t, double det_at_min) {
    const Mat2 a = psi(t) - Mat2::Identity();
    // full-kernel crossing: ||A|| ~ sqrt(det A); rank-1 keeps ||A|| = O(1)
    if (a.norm() < 10.0 * std::sqrt(det_at_min) + 1e-9)
      return signature(s_of_t(t));
    Eigen::Vector2d v;  // kernel direction of the singular 2x2 matrix
    if (std::hypot(a(0, 0), a(0, 1)) > std::hypot(a(1, 0), a(1, 1)))
      v = Eigen::Vector2d(a(0, 1), -a(0, 0));
    else
      v = Eigen::Vector2d(a(1, 1), -a(1, 0));
    v.normalize();
    const double g = v.dot(s_of_t(t) * v);
    return g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
  };

  const int n = 20000;
  double half = 0.5 * signature(s_of_t(0.0));
  double total = half;
  bool in_cluster = false;
  double best_t = 0.0, best_d = 1e300;
  for (int i = 1; i <= n; ++i) {  // interior crossings: clusters of small det
    const double t = double(i) / n;
    const double d = std::abs((psi(t) - Mat2::Identity()).determinant());
    const bool low = d < 1e-5 && i < n;
    if (low) {
      if (!in_cluster || d < best_d) best_t = t, best_d = d;
      in_cluster = true;
    } else if (in_cluster) {
      if (best_t > 0.01) total += crossing_sign(best_t, best_d);  // t=0 handled by the 1/2-term
      in_cluster = false;
      best_d = 1e300;
    }
  }
  return int(std::lround(total));
}

}  // namespace

TEST_CASE("evolve_linear_system: zero generator is the constant identity") {
  auto p = evolve_linear_system([](double) { return Mat2::Zero(); }, 64);
  for (const auto& m : p.samples) CHECK((m - Mat2::Identity()).norm() < 1e-12);
}

TEST_CASE("evolve_linear_system: rejects bad input") {
  CHECK_THROWS(evolve_linear_system([](double) { return Mat2::Zero(); }, 8));
  CHECK_THROWS(evolve_linear_system(
      [](double) {
        Mat2 m;
        m << std::nan(""), 0, 0, 0;
        return m;
      },
      64));
}

TEST_CASE("evolve_linear_system: hyperbolic closed form (neck generator)") {
  const double f0 = 0.37, fpp0 = 1.0;  // any admissible profile data
  const double A = std::sqrt(2.0 * kPi * f0);
  const double B = std::sqrt(kPi * fpp0) / (2.0 * f0);
  Mat2 gen;
  gen << 0.0, -A * A, -B * B, 0.0;
  auto p = evolve_linear_system([gen](double) { return gen; }, 4096);
  for (int i = 0; i <= 16; ++i) {
    const double t = i / 16.0;
    Mat2 exact;
    exact << std::cosh(A * B * t), -(A / B) * std::sinh(A * B * t),
        -(B / A) * std::sinh(A * B * t), std::cosh(A * B * t);
    CHECK((p.samples[size_t(t * 4096)] - exact).norm() < 1e-6);
  }
}

TEST_CASE("evolve_linear_system: rotation generator 2*pi*J0") {
  auto p = evolve_linear_system([](double) { return Mat2(2.0 * kPi * j0()); }, 2048);
  for (int i = 0; i <= 8; ++i) {
    const double t = i / 8.0;
    CHECK((p.samples[size_t(t * 2048)] - rotation(2.0 * kPi * t)).norm() < 1e-6);
  }
}

TEST_CASE("RK4 determinant drift before renormalization stays below 1e-7") {
  // re-run the same Butcher tableau without the det re-projection
  auto drift = [](const std::function<Mat2(double)>& gen, int steps) {
    const double h = 1.0 / steps;
    Mat2 psi = Mat2::Identity();
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double t = k * h;
      const Mat2 m1 = gen(t), m2 = gen(t + 0.5 * h), m4 = gen(t + h);
      const Mat2 k1 = m1 * psi;
      const Mat2 k2 = m2 * (psi + 0.5 * h * k1);
      const Mat2 k3 = m2 * (psi + 0.5 * h * k2);
      const Mat2 k4 = m4 * (psi + h * k3);
      psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      worst = std::max(worst, std::abs(psi.determinant() - 1.0));
    }
    return worst;
  };
  std::mt19937 rng(7);
  for (int i = 0; i < 5; ++i) {
    auto s = random_symmetric_loop(rng, kPi);
    CHECK(drift([s](double t) { return Mat2(j0() * s(t)); }, 1024) <= 1e-7);
  }
}

TEST_CASE("maslov_index: generator loop, constant loop, double loop") {
  auto gen = sample_path([](double t) { return rotation(2.0 * kPi * t); }, 256);
  CHECK(maslov_index(gen) == 1);
  auto cons = sample_path([](double) { return Mat2(Mat2::Identity()); }, 64);
  CHECK(maslov_index(cons) == 0);
  auto dbl = sample_path([](double t) { return rotation(4.0 * kPi * t); }, 512);
  CHECK(maslov_index(dbl) == 2);
}

TEST_CASE("maslov_index: rejects non-loops") {
  auto p = sample_path([](double t) { return rotation(1.0 * t); }, 128);
  CHECK_THROWS(maslov_index(p));
}

TEST_CASE("conley_zehnder: hyperbolic model paths have index 0") {
  std::mt19937 rng(11);
  for (double k : {0.7, -0.3, 1.9}) {
    for (int rep = 0; rep < 6; ++rep) {
      const Mat2 c = random_symplectic(rng);
      const Mat2 ci = c.inverse();
      auto p = sample_path(
          [&](double t) {
            Mat2 d = Mat2::Zero();
            d(0, 0) = std::exp(k * t);
            d(1, 1) = std::exp(-k * t);
            return Mat2(c * d * ci);
          },
          1024);
      CHECK(conley_zehnder(p) == 0);
    }
  }
}

TEST_CASE("conley_zehnder: elliptic rotation paths give 2*floor(theta)+1") {
  for (double theta : {0.3, 2.3, 0.5, 1.5, 0.9999, 3.7, -0.3, -1.2}) {
    auto p = sample_path([theta](double t) { return rotation(2.0 * kPi * theta * t); },
                         4096);
    const int expect = 2 * int(std::floor(theta)) + 1;
    CHECK(conley_zehnder(p) == expect);
  }
}

TEST_CASE("conley_zehnder: degenerate endpoint rejected") {
  auto p = sample_path([](double t) { return rotation(2.0 * kPi * t); }, 256);
  CHECK_THROWS(conley_zehnder(p));
}

TEST_CASE("crossing-form oracle agrees on model families") {
  for (double theta : {0.3, 1.4, 2.3, 0.8, -0.6}) {
    auto psi = [theta](double t) { return rotation(2.0 * kPi * theta * t); };
    auto s = [theta](double) { return Mat2(2.0 * kPi * theta * Mat2::Identity()); };
    auto p = sample_path(psi, 4096);
    CHECK(conley_zehnder(p) == crossing_form_cz(psi, s));
  }
  std::mt19937 rng(3);
  for (double k : {0.9, -1.1}) {
    const Mat2 c = random_symplectic(rng);
    const Mat2 ci = c.inverse();
    Mat2 gen = Mat2::Zero();
    gen(0, 0) = k;
    gen(1, 1) = -k;
    const Mat2 m = c * gen * ci;
    auto psi = [&](double t) {
      Mat2 d = Mat2::Zero();
      d(0, 0) = std::exp(k * t);
      d(1, 1) = std::exp(-k * t);
      return Mat2(c * d * ci);
    };
    auto s = [m](double) { return Mat2(-j0() * m); };
    auto p = sample_path(psi, 1024);
    CHECK(conley_zehnder(p) == crossing_form_cz(psi, s));
  }
}

TEST_CASE("axiom suite: inverse and loop compatibility on random paths") {
  std::mt19937 rng(2026);
  int done = 0;
  while (done < 50) {
    auto s = random_symmetric_loop(rng, 0.8 * kPi);
    auto psi = evolve_linear_system([s](double t) { return Mat2(j0() * s(t)); }, 4096);
    const Mat2 w = psi.endpoint();
    if (std::abs((w - Mat2::Identity()).determinant()) < 1e-3) continue;
    if (std::abs(w.trace() + 2.0) < 1e-2) continue;  // keep frames well-conditioned
    const int mu = conley_zehnder(psi);

    SymplecticPath inv;
    inv.samples.reserve(psi.samples.size());
    for (const auto& m : psi.samples) inv.samples.push_back(m.inverse());
    CHECK(conley_zehnder(inv) == -mu);

    SymplecticPath looped;
    const int n = int(psi.samples.size()) - 1;
    looped.samples.reserve(psi.samples.size());
    for (int i = 0; i <= n; ++i)
      looped.samples.push_back(rotation(2.0 * kPi * double(i) / n) * psi.samples[i]);
    CHECK(conley_zehnder(looped) == 2 + mu);
    ++done;
  }
}

TEST_CASE("parity matches endpoint classification on random paths") {
  std::mt19937 rng(5);
  int done = 0;
  while (done < 30) {
    auto s = random_symmetric_loop(rng, kPi);
    auto psi = evolve_linear_system([s](double t) { return Mat2(j0() * s(t)); }, 4096);
    const Mat2 w = psi.endpoint();
    if (std::abs((w - Mat2::Identity()).determinant()) < 1e-3) continue;
    const int mu = conley_zehnder(psi);
    const auto cls = classify_endpoint(w);
    CHECK((mu % 2 == 0) == (cls.kind == EndpointKind::hyperbolic_even));
    ++done;
  }
}

TEST_CASE("cz_iterate formulas") {
  CHECK(cz_iterate_hyperbolic(-2, 3) == -6);
  CHECK(cz_iterate_hyperbolic(0, 7) == 0);
  CHECK(cz_iterate_elliptic(0.3, 4) == 3);
  CHECK(cz_iterate_elliptic(0.3, 1) == 1);
  CHECK_THROWS(cz_iterate_elliptic(0.5, 2));  // m*theta integral
}

TEST_CASE("cz_iterate consistency with path indices for rotation orbits") {
  for (double theta : {0.3, 0.7, 1.3}) {
    for (int m = 1; m <= 4; ++m) {
      auto p = sample_path(
          [&](double t) { return rotation(2.0 * kPi * theta * m * t); }, 8192);
      CHECK(conley_zehnder(p) == cz_iterate_elliptic(theta, m));
    }
  }
}

TEST_CASE("classify_endpoint") {
  Mat2 m = Mat2::Zero();
  m(0, 0) = 2.0;
  m(1, 1) = 0.5;
  CHECK(classify_endpoint(m).kind == EndpointKind::hyperbolic_even);
  CHECK(classify_endpoint(rotation(1.0)).kind == EndpointKind::elliptic);
  CHECK(classify_endpoint(Mat2(-m)).kind == EndpointKind::hyperbolic_odd);
  CHECK(classify_endpoint(Mat2(Mat2::Identity())).kind == EndpointKind::degenerate);
  Mat2 shear;
  shear << 1.0, 3.0, 0.0, 1.0;
  CHECK(classify_endpoint(shear).kind == EndpointKind::degenerate);
}

TEST_CASE("homotopy invariance: conjugating the hyperbolic model leaves CZ fixed") {
  std::mt19937 rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    const Mat2 c = random_symplectic(rng, 1.5);
    const Mat2 ci = c.inverse();
    auto p = sample_path(
        [&](double t) {
          Mat2 d = Mat2::Zero();
          d(0, 0) = std::exp(1.3 * t);
          d(1, 1) = std::exp(-1.3 * t);
          return Mat2(c * d * ci);
        },
        2048);
    CHECK(conley_zehnder(p) == 0);
  }
}
