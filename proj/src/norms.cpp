#include "profdec/norms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cell_tree.hpp"
#include "profdec/errors.hpp"

namespace profdec {

namespace {

double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

// ℓ^e norm, scaled by the max entry to keep powers in range.
double ell_norm(const std::vector<double>& xs, double e) {
  double mx = 0.0;
  for (double x : xs) mx = std::max(mx, std::fabs(x));
  if (mx == 0.0 || std::isinf(e)) return mx;
  long double acc = 0;
  for (double x : xs) acc += std::pow(static_cast<long double>(std::fabs(x) / mx), static_cast<long double>(e));
  return mx * static_cast<double>(std::pow(acc, 1.0L / e));
}

double square_weight(const WaveletIndex& idx, double amp, std::size_t dim, double p) {
  return amp * amp * std::exp2(2.0 * static_cast<double>(dim) * static_cast<double>(idx.scale) / p);
}

std::int64_t min_scale(const CoeffField& f, std::int64_t start) {
  for (const auto& [idx, amp] : f.entries()) start = std::min(start, idx.scale);
  return start;
}

}  // namespace

void check_besov(const BesovParams& prm) {
  if (!std::isfinite(prm.s)) throw ValidationError("Besov smoothness must be finite");
  if (!(prm.a >= 1.0) || !(prm.b >= 1.0)) throw ValidationError("Besov exponents must lie in [1, inf]");
}

double critical_smoothness(std::size_t dim, double p, double r) {
  return static_cast<double>(dim) * (inv(r) - inv(p));
}

double lp_tilde(const CoeffField& f) {
  if (f.empty()) return 0.0;
  const double p = f.p();
  detail::CellTree tree(f.dim(), min_scale(f, f.entries().begin()->first.scale));
  for (const auto& [idx, amp] : f.entries()) tree.add(cube_of(idx), 0, square_weight(idx, amp, f.dim(), p));
  const long double half_p = p / 2.0L;
  const long double integral = tree.integrate([&](const auto& w) { return std::pow(static_cast<long double>(w[0]), half_p); });
  return static_cast<double>(std::pow(integral, 1.0L / p));
}

double besov_tilde(const CoeffField& f, const BesovParams& prm) {
  check_besov(prm);
  const double d = static_cast<double>(f.dim());
  const double exponent = prm.s + d * (1.0 / f.p() - inv(prm.a));
  std::vector<double> per_scale;
  std::vector<double> amps;
  auto flush = [&](std::int64_t scale) {
    if (amps.empty()) return;
    per_scale.push_back(std::exp2(static_cast<double>(scale) * exponent) * ell_norm(amps, prm.a));
    amps.clear();
  };
  // Map order is scale-major, so each scale is one contiguous run.
  std::int64_t current = 0;
  for (const auto& [idx, amp] : f.entries()) {
    if (!amps.empty() && idx.scale != current) flush(current);
    current = idx.scale;
    amps.push_back(amp);
  }
  flush(current);
  return ell_norm(per_scale, prm.b);
}

double sup_tilde(const CoeffField& f) {
  double mx = 0.0;
  for (const auto& [idx, amp] : f.entries()) mx = std::max(mx, std::fabs(amp));
  return mx;
}

double coeff_lp(const CoeffField& f) {
  std::vector<double> amps;
  amps.reserve(f.size());
  for (const auto& [idx, amp] : f.entries()) amps.push_back(amp);
  return ell_norm(amps, f.p());
}

double square_function_cross_integral(const CoeffField& f, const CoeffField& g) {
  if (f.dim() != g.dim() || f.p() != g.p()) throw ValidationError("cross integral: fields differ in dimension or p");
  const double p = f.p();
  if (p <= 2.0) throw ValidationError("cross integral requires p > 2");
  if (f.empty() || g.empty()) return 0.0;
  const auto top = min_scale(g, min_scale(f, f.entries().begin()->first.scale));
  detail::CellTree tree(f.dim(), top);
  for (const auto& [idx, amp] : f.entries()) tree.add(cube_of(idx), 0, square_weight(idx, amp, f.dim(), p));
  for (const auto& [idx, amp] : g.entries()) tree.add(cube_of(idx), 1, square_weight(idx, amp, g.dim(), p));
  const long double e = p / 2.0L - 1.0L;
  return static_cast<double>(tree.integrate([&](const auto& w) -> long double {
    if (w[0] == 0.0 || w[1] == 0.0) return 0.0L;
    return static_cast<long double>(w[0]) * std::pow(static_cast<long double>(w[1]), e);
  }));
}

InterpolationResult interpolation_check(const CoeffField& f, double q, double r, double alpha) {
  const double p = f.p();
  if (!(q > p) || !(r > p)) throw ValidationError("interpolation check requires p < q, r");
  const double lo = std::max(p * inv(r), p * inv(q));
  if (!(alpha > lo && alpha < 1.0))
    throw ValidationError("alpha must lie in (" + std::to_string(lo) + ", 1)");
  InterpolationResult out;
  out.lhs = besov_tilde(f, {critical_smoothness(f.dim(), p, r), r, q});
  out.rhs = std::pow(coeff_lp(f), alpha) * std::pow(sup_tilde(f), 1.0 - alpha);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-12);
  return out;
}

EmbeddingReport embedding_chain_check(const CoeffField& f, double q, double r) {
  const double p = f.p();
  if (!(q >= p) || !(r >= p)) throw ValidationError("embedding check requires p <= q, r");
  constexpr double slack = 1.0 + 1e-12;  // floating rounding only
  EmbeddingReport out;
  out.besov_0_p_p = besov_tilde(f, {0.0, p, p});
  out.besov_0_p_q = besov_tilde(f, {0.0, p, q});
  out.besov_crit_r_q = besov_tilde(f, {critical_smoothness(f.dim(), p, r), r, q});
  out.outer_monotone = out.besov_0_p_q <= out.besov_0_p_p * slack;
  out.inner_monotone = out.besov_crit_r_q <= out.besov_0_p_q * slack;
  out.lp_tilde = lp_tilde(f);
  out.lp_ratio = out.lp_tilde > 0.0 ? out.besov_0_p_p / out.lp_tilde : 0.0;
  return out;
}

NormReport norm_report(const CoeffField& f, std::span<const BesovParams> besov) {
  NormReport out;
  out.lp_tilde = lp_tilde(f);
  out.sup_tilde = sup_tilde(f);
  out.coeff_lp = coeff_lp(f);
  for (const auto& prm : besov) {
    out.besov_params.push_back(prm);
    out.besov.push_back(besov_tilde(f, prm));
  }
  return out;
}

}  // namespace profdec
