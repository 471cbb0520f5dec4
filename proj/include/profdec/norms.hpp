#pragma once

#include <limits>
#include <span>
#include <vector>

#include "profdec/field.hpp"

namespace profdec {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Homogeneous Besov parameters: smoothness s, inner exponent a over (i,k),
/// outer exponent b over j. a, b in [1, inf].
struct BesovParams {
  double s = 0.0;
  double a = 2.0;
  double b = 2.0;

  friend bool operator==(const BesovParams&, const BesovParams&) = default;
};

void check_besov(const BesovParams& prm);

/// s_{p,r} = d (1/r - 1/p); the smoothness making B^s_{r,.} scale like L^p.
double critical_smoothness(std::size_t dim, double p, double r);

/// || (Σ_λ |a_λ|^2 2^{2dj/p} χ_{δ(λ)})^{1/2} ||_{L^p}, integrated exactly over
/// the dyadic cell arrangement of the field's cubes.
double lp_tilde(const CoeffField& f);

/// || 2^{j(s + d(1/p - 1/a))} ||a_{j,.}||_{ℓ^a} ||_{ℓ^b_j}
double besov_tilde(const CoeffField& f, const BesovParams& prm);

/// max |a_λ|; 0 for the empty field.
double sup_tilde(const CoeffField& f);

/// ℓ^p norm of the amplitudes (p taken from the field).
double coeff_lp(const CoeffField& f);

/// ∫ S_f · S_g^{p/2 - 1} where S is the square function used by lp_tilde.
/// Both fields must share dimension and p; p > 2.
double square_function_cross_integral(const CoeffField& f, const CoeffField& g);

struct InterpolationResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// lhs = ||f||~ in B^{s_{p,r}}_{r,q}, rhs = coeff_lp(f)^α · sup_tilde(f)^{1-α}.
/// Requires p < q, r <= inf and α in (max{p/r, p/q}, 1).
InterpolationResult interpolation_check(const CoeffField& f, double q, double r, double alpha);

struct EmbeddingReport {
  double besov_0_p_p = 0.0;    // B^0_{p,p} = coeff_lp
  double besov_0_p_q = 0.0;    // B^0_{p,q}
  double besov_crit_r_q = 0.0; // B^{s_{p,r}}_{r,q}
  bool outer_monotone = false; // B^0_{p,q} <= B^0_{p,p}
  bool inner_monotone = false; // B^{s_{p,r}}_{r,q} <= B^0_{p,q}
  double lp_tilde = 0.0;
  // coeff_lp / lp_tilde; the embedding constant is not known in closed form.
  double lp_ratio = 0.0;
};

EmbeddingReport embedding_chain_check(const CoeffField& f, double q, double r);

struct NormReport {
  double lp_tilde = 0.0;
  double sup_tilde = 0.0;
  double coeff_lp = 0.0;
  std::vector<BesovParams> besov_params;
  std::vector<double> besov;
};

NormReport norm_report(const CoeffField& f, std::span<const BesovParams> besov = {});

}  // namespace profdec
