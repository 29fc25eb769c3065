#include "sykm/framepot.hpp"

#include <algorithm>
#include <cmath>

namespace sykm {

namespace {

double check_and_rate(const FramePotentialInput& inp) {
  if (inp.m < 1) throw domain_error("frame potential: m must be >= 1");
  if (inp.NL < 1) throw domain_error("frame potential: NL must be >= 1");
  if (inp.t < 0) throw domain_error("frame potential: t must be >= 0");
  return inp.J / 8.0 + inp.U / (4.0 * inp.q);
}

}  // namespace

double log_frame_potential(const FramePotentialInput& inp) {
  const double s = check_and_rate(inp);
  const int m = inp.m;
  // Fold the e^{-m NL t s} prefactor into each term: the k = m term is then
  // exactly log m!, so the Haar lower bound holds to round-off even when
  // NL t s is enormous.
  const double decay = inp.NL * (std::log(2.0) - inp.t * s);
  std::vector<double> terms(m + 1);
  for (int k = 0; k <= m; ++k) {
    terms[k] = 2.0 * std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
               2.0 * std::lgamma(m - k + 1.0) + (m - k) * decay;
  }
  double peak = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double a : terms) acc += std::exp(a - peak);
  return peak + std::log(acc);
}

double design_time(FramePotentialInput inp, double epsilon) {
  if (!(epsilon > 0)) throw domain_error("design_time: epsilon must be > 0");
  const double target = std::lgamma(inp.m + 1.0) + epsilon;

  inp.t = 0.0;
  if (log_frame_potential(inp) <= target) return 0.0;

  // bracket: the crossover sits near t ~ log 2 / s
  double s = inp.J / 8.0 + inp.U / (4.0 * inp.q);
  double hi = std::log(2.0) / s;
  for (int it = 0; it < 200; ++it) {
    inp.t = hi;
    if (log_frame_potential(inp) <= target) break;
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    inp.t = mid;
    (log_frame_potential(inp) > target ? lo : hi) = mid;
    if (hi - lo <= 1e-9 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sykm
