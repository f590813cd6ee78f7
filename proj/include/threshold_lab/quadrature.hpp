#pragma once

#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace tlab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel kronrod_panel(F& f, double a, double b) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
  // boost reports |K - G| for the panel mapped onto [-1, 1]
  return {a, b, v, 0.5 * (b - a) * err};
}

inline constexpr int kInitialSplit = 4;

}  // namespace detail

/// Globally adaptive 15-point Gauss–Kronrod (bisect the worst panel until
/// the summed error estimate meets max(absTol, relTol |I|)) over consecutive
/// breakpoints. The last breakpoint may be +infinity.
template <class F>
Result adaptive(F&& f, std::span<const double> breaks, double relTol = 1e-12, double absTol = 0.0,
                int maxPanels = 4000) {
  Result out;
  if (breaks.size() < 2) return out;
  std::vector<double> knots(breaks.begin(), breaks.end());
  const bool infinite = std::isinf(knots.back());

  // map [a, inf) onto [0, 1) with x = a + t / (1 - t)
  const double a0 = knots[knots.size() - 2];
  auto mapped = [&](double t) {
    const double s = 1.0 - t;
    return f(a0 + t / s) / (s * s);
  };
  auto finite = [&](double x) { return f(x); };

  std::priority_queue<detail::Panel> heap;
  double total = 0.0, error = 0.0;
  const std::size_t finitePieces = infinite ? knots.size() - 2 : knots.size() - 1;
  for (std::size_t i = 0; i < finitePieces; ++i) {
    if (!(knots[i + 1] > knots[i])) continue;
    // a lone 15-point panel can agree with its 7-point embedding by accident
    const double w = (knots[i + 1] - knots[i]) / detail::kInitialSplit;
    for (int j = 0; j < detail::kInitialSplit; ++j) {
      const double lo = knots[i] + j * w;
      heap.push(detail::kronrod_panel(finite, lo, j + 1 == detail::kInitialSplit ? knots[i + 1] : lo + w));
    }
  }
  std::priority_queue<detail::Panel> tailHeap;
  if (infinite) {
    for (int j = 0; j < detail::kInitialSplit; ++j) {
      tailHeap.push(detail::kronrod_panel(mapped, double(j) / detail::kInitialSplit, double(j + 1) / detail::kInitialSplit));
    }
  }

  auto sums = [&] {
    total = 0.0;
    error = 0.0;
    for (auto copy = heap; !copy.empty(); copy.pop()) total += copy.top().value, error += copy.top().error;
    for (auto copy = tailHeap; !copy.empty(); copy.pop()) total += copy.top().value, error += copy.top().error;
  };
  sums();
  int panels = static_cast<int>(heap.size() + tailHeap.size());
  while (error > std::max(absTol, relTol * std::abs(total)) && panels < maxPanels) {
    const bool useTail = !tailHeap.empty() && (heap.empty() || tailHeap.top().error > heap.top().error);
    auto& h = useTail ? tailHeap : heap;
    const detail::Panel worst = h.top();
    h.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {  // panel at machine resolution
      h.push(worst);
      break;
    }
    detail::Panel left = useTail ? detail::kronrod_panel(mapped, worst.a, mid) : detail::kronrod_panel(finite, worst.a, mid);
    detail::Panel right = useTail ? detail::kronrod_panel(mapped, mid, worst.b) : detail::kronrod_panel(finite, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    h.push(left);
    h.push(right);
    ++panels;
    if (panels % 256 == 0) sums();  // re-sum to shed drift from the running updates
  }
  sums();
  out.value = total;
  out.error = error;
  out.intervals = panels;
  return out;
}

template <class F>
Result adaptive(F&& f, double a, double b, double relTol = 1e-12, double absTol = 0.0, int maxPanels = 4000) {
  const double knots[] = {a, b};
  return adaptive(f, std::span<const double>(knots), relTol, absTol, maxPanels);
}

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule on [-1, 1], nodes ascending and exactly
/// antisymmetric about 0.
GaussRule gauss_legendre(int n);

/// Same rule mapped affinely onto [a, b].
GaussRule gauss_legendre(int n, double a, double b);

/// Legendre polynomials P_0..P_lmax at x.
std::vector<double> legendre_values(int lmax, double x);

}  // namespace tlab::quad
