// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "support/oracles.hpp"
#include "threshold_lab/observables.hpp"
#include "threshold_lab/parallel.hpp"
#include "threshold_lab/threebody.hpp"
#include "threshold_lab/twobody.hpp"
#include "threshold_lab/universal.hpp"

using namespace tlab;
using namespace tlab::threebody;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void expect(bool ok, const std::string& what) {
    details.push_back(std::string(ok ? "ok   " : "MISS ") + what);
    pass = pass && ok;
  }
};

std::string num(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + num("%.6g", x);
  return s;
}

int failures = 0;

void run(int id, const std::string& title, double budgetSeconds, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.expect(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.expect(secs < budgetSeconds, "runtime " + num("%.1f", secs) + " s < " + num("%.0f", budgetSeconds) + " s");
  std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str());
  for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

SystemSpec equal_mass_gaussian() {
  SystemSpec s;
  s.v12 = {PotentialFamily::Gaussian, 0.0, 1.0};
  s.v12.depth = twobody::pair_critical_depth(s.v12, 0.5);
  s.v13 = s.v23 = s.v12;
  s.lambda = 0.9;
  return s;
}

}  // namespace

int main() {
  set_thread_count(jobs_from_env(1));
  std::printf("threshold_lab acceptance (jobs = %d)\n", thread_count());

  run(1, "kernel identity W(y) = 2 pi e^{-|y|}", 10, [] {
    Outcome o;
    for (double y : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      const auto c = twobody::w_kernel_check(y);
      const double rel = std::abs(c.numeric - 2.0 * kPi * std::exp(-y)) / (2.0 * kPi * std::exp(-y));
      o.expect(rel < 1e-6, "y = " + num("%g", y) + ": relative error " + num("%.2e", rel));
    }
    return o;
  });

  run(2, "critical coupling oracles", 60, [] {
    Outcome o;
    const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
    const PairPotential e{PotentialFamily::Exponential, 1.0, 1.0};
    const double gc = twobody::find_critical_coupling(e).gCritical;
    const double rel = std::abs(gc - j01 * j01 / 4.0) / (j01 * j01 / 4.0);
    o.expect(rel < 1e-5, "exponential gc = " + num("%.12f", gc) + ", j01^2/4 relative error " + num("%.2e", rel));
    const PairPotential g{PotentialFamily::Gaussian, 1.0, 1.0};
    const double shoot = twobody::find_critical_coupling(g).gCritical;
    const double bs = oracle::birman_schwinger_critical(g, 600, 8.0);
    const double relg = std::abs(shoot - bs) / bs;
    o.expect(relg < 1e-4, "gaussian shooting " + num("%.9f", shoot) + " vs Birman-Schwinger " + num("%.9f", bs) +
                              ", relative " + num("%.2e", relg));
    return o;
  });

  run(3, "two-body distance to the asymptotic profile", 60, [] {
    Outcome o;
    const PairPotential p{PotentialFamily::Exponential, 1.0, 1.0};
    const auto seq = twobody::energy_sequence(p, -0.1, 0.5, 7);
    std::vector<double> d;
    for (const auto& e : seq) d.push_back(e.distance);
    o.expect(strictly_decreasing(d), "strictly decreasing: " + join(d));
    o.expect(d.back() < 0.5 * d.front(), "final/initial = " + num("%.4f", d.back() / d.front()));
    return o;
  });

  run(4, "three-body solver oracle (oscillator)", 600, [] {
    Outcome o;
    std::vector<double> err;
    for (int n : {64, 128, 256}) {
      const Grid3 g = build_grid(10.0, n, n, 16, 1.0);
      const WaveFunction3 psi = ground_state(Hamiltonian(g, oscillator_potentials(g), 0.0));
      err.push_back(std::abs(psi.energy - 6.0));
      o.details.push_back("     N = " + std::to_string(n) + ": E = " + num("%.8f", psi.energy));
    }
    o.expect(err.back() / 6.0 < 5e-3, "default grid relative error " + num("%.3e", err.back() / 6.0));
    const double order = std::log2(err[1] / err[2]);
    o.expect(order >= 1.8, "observed order " + num("%.3f", order) + " (64 -> 128: " +
                               num("%.3f", std::log2(err[0] / err[1])) + ")");

    const SystemSpec s = equal_mass_gaussian();
    const Grid3 g = grid_for_target(s, -0.1, GridOptions{});
    const Hamiltonian h(g, system_potentials(g, s), 0.9);
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> nd;
    std::vector<double> a(g.size()), b(g.size());
    for (double& v : a) v = nd(rng);
    for (double& v : b) v = nd(rng);
    std::vector<double> ha(g.size()), hb(g.size());
    h.apply_scaled(a, ha);
    h.apply_scaled(b, hb);
    double ab = 0, ba = 0, na = 0, nb = 0, nha = 0;
    for (std::size_t m = 0; m < a.size(); ++m) {
      ab += a[m] * hb[m];
      ba += ha[m] * b[m];
      na += a[m] * a[m];
      nb += b[m] * b[m];
      nha += ha[m] * ha[m];
    }
    const double res = std::abs(ab - ba) / (std::sqrt(na * nb) * std::sqrt(nha / na));
    o.expect(res < 1e-10, "self-adjointness residual " + num("%.2e", res) + " on the default system grid");
    return o;
  });

  run(5, "hyperradial quadrature rate and substitution identity", 60, [] {
    Outcome o;
    const double lim = 1.0 / (8.0 * kPi * kPi * kPi);
    const double e3 = std::abs(universal::d_theta_n(kPi / 4, 1e-3) - lim);
    const double e6 = std::abs(universal::d_theta_n(kPi / 4, 1e-6) - lim);
    o.expect(e3 / e6 >= 1.6 && e3 / e6 <= 2.4, "error ratio k = 1e-3 vs 1e-6: " + num("%.6f", e3 / e6));
    double worst = 0.0;
    for (double theta : {0.2, 0.5, kPi / 4, 1.1, 1.4})
      for (double k : {1e-2, 1e-3, 1e-6, 1e-9, 1e-12}) {
        const double a = universal::radial_integral(theta, k), b = universal::t_integral(theta, k);
        worst = std::max(worst, std::abs(a - b) / std::abs(a));
      }
    o.expect(worst < 1e-10, "substitution residual max over 25 pairs " + num("%.2e", worst));
    return o;
  });

  // Shared by criteria 6 and 7.
  const SystemSpec sys = equal_mass_gaussian();
  const std::vector<double> targets = geometric_targets(-0.1, 4);
  ThresholdSequence seq;
  std::vector<observables::AngularDistribution> dists;
  double seqSeconds = 0.0;
  std::string seqError;
  {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SequenceOptions so;
      so.jobs = thread_count();
      seq = generate_threshold_sequence(sys, targets, so);
      for (const auto& e : seq.entries) dists.push_back(observables::angular_distribution(e.state));
    } catch (const std::exception& e) {
      seqError = e.what();
    }
    seqSeconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  run(6, "threshold sequence: spreading, distances, flatness", 1800 - seqSeconds, [&] {
    Outcome o;
    o.details.push_back("     sequence " + num("%.1f", seqSeconds) + " s");
    if (!seqError.empty()) o.expect(false, "sequence failed: " + seqError);
    o.expect(seq.complete && seq.entries.size() == targets.size(), "4 entries computed");
    if (!o.pass) return o;
    std::vector<double> spread, t2, l1, flat;
    for (std::size_t j = 0; j < seq.entries.size(); ++j) {
      const auto& e = seq.entries[j];
      spread.push_back(observables::spreading_diagnostic(e.state, 5.0));
      t2.push_back(observables::theorem2_distance(e.state, e.k));
      l1.push_back(observables::l1_distance_to_universal(dists[j]));
      flat.push_back(observables::u_flatness(dists[j]));
      o.details.push_back("     n = " + std::to_string(j) + ": E = " + num("%.6g", e.energy) + ", lambda = " +
                          num("%.6f", e.lambda) + ", R3 " + (e.r3 ? "yes" : "no"));
    }
    o.expect(strictly_decreasing(spread), "spreading R = 5 decreasing: " + join(spread));
    o.expect(strictly_decreasing(t2), "theorem2_distance decreasing: " + join(t2));
    o.expect(strictly_decreasing(l1), "L1 to universal decreasing: " + join(l1));
    o.expect(strictly_decreasing(flat), "u_flatness decreasing: " + join(flat));
    for (std::size_t j = 0; j < l1.size(); ++j)
      o.expect(l1[j] <= 1.1 * 2.0 * t2[j], "n = " + std::to_string(j) + ": L1 " + num("%.4f", l1[j]) +
                                               " <= 1.1 * 2 * " + num("%.4f", t2[j]));
    return o;
  });

  run(7, "normalization invariants", 10, [&] {
    Outcome o;
    if (!seqError.empty() || seq.entries.empty()) o.expect(false, "sequence unavailable");
    for (std::size_t j = 0; j < seq.entries.size(); ++j) {
      const double n = norm_of(seq.entries[j].state.grid, seq.entries[j].state.values);
      o.expect(std::abs(n - 1.0) < 1e-8, "n = " + std::to_string(j) + ": |psi| - 1 = " + num("%.2e", n - 1.0));
      o.expect(std::abs(dists[j].normalization - 1.0) < 2e-2,
               "n = " + std::to_string(j) + ": 8 pi^2 int D = " + num("%.6f", dists[j].normalization));
    }
    // 8π² · 2 · (π/4) / (4π³)
    const double closed = 8.0 * kPi * kPi * 2.0 * (kPi / 4.0) / (4.0 * kPi * kPi * kPi);
    o.expect(std::abs(closed - 1.0) < 1e-15, "closed form int D_inf = " + num("%.17g", closed));
    if (!dists.empty()) {
      const double q = observables::universal_distribution(dists.front()).normalization;
      o.expect(std::abs(q - 1.0) < 1e-13, "quadrature of D_inf on the sampling nodes " + num("%.17g", q));
    }
    return o;
  });

  run(8, "heuristic PDE and boundary conditions", 10, [] {
    Outcome o;
    for (int n : {1, 3}) {
      const auto c = universal::heuristic_pde_residual(n);
      o.expect(c.residual < 1e-8, "n = " + std::to_string(n) + ": residual " + num("%.2e", c.residual));
      o.expect(c.boundaryOk, "n = " + std::to_string(n) + ": d/d|x| on theta = pi/2 " +
                                 num("%.1e", c.boundaryDerivative) + ", value on theta = 0 " +
                                 num("%.1e", c.boundaryValue));
    }
    for (int n : {2, 4}) {
      const auto c = universal::heuristic_pde_residual(n);
      o.expect(!c.boundaryOk, "n = " + std::to_string(n) + " rejected (d/d|x| = " + num("%.3f", c.boundaryDerivative) + ")");
    }
    return o;
  });

  std::printf("%d criteria failed\n", failures);
  return failures;
}
