#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "threshold_lab/model.hpp"
#include "threshold_lab/system_io.hpp"
#include "threshold_lab/twobody.hpp"

using namespace tlab;
using Vec = std::array<double, 3>;

namespace {

Vec sub(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec scale(const Vec& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }
double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double len(const Vec& a) { return std::sqrt(dot(a, a)); }

// Jacobi vectors built directly from particle positions.
void jacobi(const MassConfig& m, const std::array<Vec, 3>& X, Vec& x, Vec& y) {
  const double mu12 = m.m1 * m.m2 / (m.m1 + m.m2);
  const double M12 = (m.m1 + m.m2) * m.m3 / (m.m1 + m.m2 + m.m3);
  Vec cm;
  for (int c = 0; c < 3; ++c) cm[c] = (m.m1 * X[0][c] + m.m2 * X[1][c]) / (m.m1 + m.m2);
  x = scale(sub(X[1], X[0]), std::sqrt(2.0 * mu12));
  y = scale(sub(X[2], cm), std::sqrt(2.0 * M12));
}

}  // namespace

TEST_CASE("separation distances agree with random particle configurations") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (const MassConfig m : {MassConfig{1, 1, 1}, MassConfig{1, 2, 5}, MassConfig{7, 0.3, 1.1}}) {
    const JacobiFrame f = build_jacobi_frame(m);
    for (int trial = 0; trial < 200; ++trial) {
      std::array<Vec, 3> X;
      for (auto& p : X)
        for (double& c : p) c = nd(rng);
      Vec x, y;
      jacobi(m, X, x, y);
      const double r1 = len(x), r2 = len(y), u = dot(x, y) / (r1 * r2);
      const Separations s = separation_distances(r1, r2, u, f);
      CHECK(s.d12 == doctest::Approx(len(sub(X[1], X[0]))).epsilon(1e-12));
      CHECK(s.d13 == doctest::Approx(len(sub(X[2], X[0]))).epsilon(1e-12));
      CHECK(s.d23 == doctest::Approx(len(sub(X[2], X[1]))).epsilon(1e-12));
    }
  }
}

TEST_CASE("Jacobi kinetic energy is (|x'|^2 + |y'|^2) / 4 in the centre of mass frame") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  const MassConfig m{1.5, 0.4, 3.0};
  const double M = m.m1 + m.m2 + m.m3;
  for (int trial = 0; trial < 50; ++trial) {
    std::array<Vec, 3> V;
    for (auto& p : V)
      for (double& c : p) c = nd(rng);
    Vec P{};
    const double ms[] = {m.m1, m.m2, m.m3};
    for (int i = 0; i < 3; ++i)
      for (int c = 0; c < 3; ++c) P[c] += ms[i] * V[i][c];
    for (int i = 0; i < 3; ++i) V[i] = sub(V[i], scale(P, 1.0 / M));
    double T = 0.0;
    for (int i = 0; i < 3; ++i) T += 0.5 * ms[i] * dot(V[i], V[i]);
    Vec xd, yd;
    jacobi(m, V, xd, yd);
    CHECK(T == doctest::Approx(0.25 * (dot(xd, xd) + dot(yd, yd))).epsilon(1e-12));
  }
}

TEST_CASE("the {1,3} Jacobi pair is an orthogonal change of variables") {
  const JacobiFrame f = build_jacobi_frame({1.0, 2.5, 0.7});
  const auto B = f.xyToEtaZeta();
  CHECK(B[0] * B[0] + B[1] * B[1] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(B[2] * B[2] + B[3] * B[3] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(B[0] * B[2] + B[1] * B[3]) < 1e-13);
  CHECK(f.alphaPrime == doctest::Approx(1.0 / std::sqrt(2.0 * f.mu13)));
}

TEST_CASE("mass validation") {
  CHECK_THROWS_AS(MassConfig({0.0, 1.0, 1.0}).validate(), ConfigError);
  CHECK_THROWS_AS(build_jacobi_frame({1.0, -1.0, 1.0}), ConfigError);
}

TEST_CASE("potential shapes") {
  PairPotential g{PotentialFamily::Gaussian, 2.0, 1.5};
  CHECK(g.value(1.5) == doctest::Approx(-2.0 * std::exp(-1.0)));
  PairPotential e{PotentialFamily::Exponential, 1.0, 2.0};
  CHECK(e.value(2.0) == doctest::Approx(-std::exp(-1.0)));
  PairPotential y{PotentialFamily::TruncatedYukawa, 1.0, 1.0};
  CHECK(y.shape(0.0) == doctest::Approx(1.0));
  CHECK(y.shape(2.0) == doctest::Approx((1 - std::exp(-2.0)) * std::exp(-2.0) / 2.0));
  PairPotential h{PotentialFamily::Harmonic, 1.0, 2.0};
  CHECK(h.value(4.0) == doctest::Approx(4.0));
  for (auto p : {g, e, y})
    for (double s = 0.0; s < 30.0; s += 0.37) CHECK(p.shape(s) <= p.exponentialBoundConstant() * std::exp(-s) + 1e-15);
  CHECK(parse_family("exponential") == PotentialFamily::Exponential);
  CHECK_THROWS_AS(parse_family("square"), ConfigError);
  CHECK_THROWS_AS((PairPotential{PotentialFamily::Gaussian, 1.0, 0.0}.validate()), ConfigError);
}

TEST_CASE("moment integrals are finite for wells") {
  for (auto fam : {PotentialFamily::Gaussian, PotentialFamily::Exponential, PotentialFamily::TruncatedYukawa}) {
    const MomentIntegrals m = moment_integrals({fam, 1.0, 1.0});
    CHECK(std::isfinite(m.gamma));
    CHECK(std::isfinite(m.gamma0));
    CHECK(m.gamma > 0.0);
  }
}

namespace {

SystemSpec equal_mass(double v13Depth, double lambda) {
  SystemSpec s;
  s.v12 = {PotentialFamily::Gaussian, 0.0, 1.0};
  s.v12.depth = twobody::pair_critical_depth(s.v12, 0.5);
  s.v13 = s.v23 = {PotentialFamily::Gaussian, v13Depth, 1.0};
  s.lambda = lambda;
  return s;
}

}  // namespace

TEST_CASE("admissibility of the reference equal-mass system") {
  const SystemSpec s = equal_mass(2.684, 0.9);
  const AdmissibilityReport r = admissibility_check(s);
  CHECK(r.r1());
  CHECK(r.r3());
  CHECK(r.ok());
}

TEST_CASE("admissibility rejects supercritical coupled pairs and off-critical v12") {
  CHECK_FALSE(admissibility_check(equal_mass(2.684, 1.01)).v13Subcritical);
  SystemSpec s = equal_mass(1.0, 1.0);
  s.v12.depth *= 0.9;
  CHECK_FALSE(admissibility_check(s).v12Critical);
  SystemSpec d = equal_mass(1.0, 1.0);
  d.delta = 0.2;
  CHECK_FALSE(admissibility_check(d).deltaInRange);
  SystemSpec h = equal_mass(1.0, 1.0);
  h.v13.family = PotentialFamily::Harmonic;
  CHECK_FALSE(admissibility_check(h).ok());
}

TEST_CASE("system JSON round trip and critical depth keyword") {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "masses": {"m1": 1, "m2": 2, "m3": 3},
    "potentials": {"v12": {"family": "exponential", "depth": "critical", "range": 1.0},
                   "v13": {"family": "gaussian", "depth": 0.5, "range": 0.7},
                   "v23": {"family": "truncated-yukawa", "depth": 0.25, "range": 1.2}},
    "lambda": 0.8})");
  const SystemSpec s = system_from_json(j);
  const JacobiFrame f = build_jacobi_frame(s.masses);
  CHECK(s.v12.depth == doctest::Approx(twobody::pair_critical_depth(s.v12, f.mu12)));
  const SystemSpec back = system_from_json(system_to_json(s));
  CHECK(back.v12.depth == s.v12.depth);
  CHECK(back.v23.family == PotentialFamily::TruncatedYukawa);
  CHECK(back.v13.range == 0.7);
  CHECK(back.lambda == 0.8);
  CHECK(back.masses.m3 == 3.0);
  CHECK_THROWS_AS(system_from_json(nlohmann::json::parse(R"({"masses": {"m1": 1}})")), ConfigError);
}
