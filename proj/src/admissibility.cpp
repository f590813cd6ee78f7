#include <cmath>
#include <sstream>

#include "threshold_lab/model.hpp"
#include "threshold_lab/twobody.hpp"

namespace tlab {
namespace {

bool sampled_nonpositive(const PairPotential& p) {
  for (int i = 0; i <= 4000; ++i) {
    const double r = 50.0 * p.range * i / 4000.0;
    if (p.value(r) > 0.0) return false;
  }
  return true;
}

bool sampled_exponential_bound(const PairPotential& p) {
  const double c = p.exponentialBoundConstant();
  if (!std::isfinite(c)) return false;
  for (int i = 0; i <= 4000; ++i) {
    const double s = 50.0 * i / 4000.0;
    if (p.shape(s) > c * std::exp(-s) * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace

AdmissibilityReport admissibility_check(const SystemSpec& spec, const AdmissibilityOptions& opts) {
  AdmissibilityReport rep;
  std::ostringstream notes;
  const JacobiFrame frame = build_jacobi_frame(spec.masses);

  rep.wellFamilies = spec.v12.isWell() && spec.v13.isWell() && spec.v23.isWell();
  if (!rep.wellFamilies) notes << "harmonic family is a test oracle only; ";

  rep.deltaInRange = spec.delta > 0.0 && spec.delta < 0.125;
  notes << "delta enforced in (0, 1/8); the two-body moment condition only needs (0, 1); ";

  rep.momentsFinite = true;
  auto moments = [&](const PairPotential& p, MomentIntegrals& out) {
    try {
      PairPotential q = p;
      q.delta = spec.delta;
      out = moment_integrals(q);
      if (!std::isfinite(out.gamma) || !std::isfinite(out.gamma0)) rep.momentsFinite = false;
    } catch (const Error& e) {
      rep.momentsFinite = false;
      notes << e.what() << "; ";
    }
  };
  moments(spec.v12, rep.moments12);
  moments(spec.v13, rep.moments13);
  moments(spec.v23, rep.moments23);

  rep.v12Nonpositive = sampled_nonpositive(spec.v12);
  rep.v12ExponentialBound = rep.v12Nonpositive && sampled_exponential_bound(spec.v12);

  if (!rep.wellFamilies) {
    rep.notes = notes.str();
    return rep;
  }

  try {
    rep.v12CriticalDepth = twobody::pair_critical_depth(spec.v12, frame.mu12);
    rep.v13CriticalDepth = twobody::pair_critical_depth(spec.v13, frame.mu13);
    rep.v23CriticalDepth = twobody::pair_critical_depth(spec.v23, frame.mu23);
    rep.v12Critical = std::abs(spec.v12.depth - rep.v12CriticalDepth) <= opts.criticalRelTol * rep.v12CriticalDepth;
    rep.v13Subcritical = twobody::subcriticality_check(spec.v13, spec.lambda, frame.mu13, opts.subcriticalMargin);
    rep.v23Subcritical = twobody::subcriticality_check(spec.v23, spec.lambda, frame.mu23, opts.subcriticalMargin);
  } catch (const Error& e) {
    notes << e.what() << "; ";
  }
  rep.notes = notes.str();
  return rep;
}

}  // namespace tlab
