#pragma once

#include <string>
#include <vector>

#include "dxi/funceq.hpp"
#include "dxi/xi_core.hpp"

namespace dxi::detail {

// Collects evaluation counts and precision flags across the Xi values that
// make up one side of an identity.
struct Tally {
  QuadSpec spec1, spec2, spec3;
  long long evaluations = 0;
  bool precision_warning = false;

  explicit Tally(const std::optional<QuadSpec>& override_spec);
  const QuadSpec& spec_for(int d) const;
  cplx take(const XiValue& v);
  // Xi(rho, s) for any 1 <= d <= 3 (d = 1 is Xi_rho(s)).
  cplx xi(const RhoMatrix& rho, const std::vector<cplx>& s);
  cplx xi1(cplx rho, cplx s);
};

struct Sides {
  cplx lhs{0.0};
  cplx rhs{0.0};
  std::vector<AuxValue> aux;
};

cplx extra(const VerificationRequest& req, const std::string& key, cplx fallback);
cplx extra_required(const VerificationRequest& req, const std::string& key);
int extra_int(const VerificationRequest& req, const std::string& key, int fallback);

void hypotheses(const VerificationRequest& req);
Sides evaluate(const VerificationRequest& req, Tally& t);

// Right-hand side of the k-th row/column flip:
// Xi(rho, s) = Xi(flip_k rho, s_k -> 1 - s_k) + c e^{(s_k-1)^2/16rho_kk} Xi(reduced, s_a)
//              - c e^{s_k^2/16rho_kk} Xi(reduced, s_b),  c = sqrt(pi/rho_kk)/2.
cplx sk_flip_rhs(const RhoMatrix& rho, const std::vector<cplx>& s, int k, Tally& t);
// The two reduced-matrix terms alone.
cplx sk_flip_correction(const RhoMatrix& rho, const std::vector<cplx>& s, int k, Tally& t);

// The rewrite matrices: [[rho + a s^2, +-a s], [+-a s, a]].
RhoMatrix rewrite_matrix(cplx rho, cplx alpha, cplx s, int sign);
cplx rewrite_2d_arg(cplx alpha, int n);  // 16 i pi (1 + 2n) alpha

}  // namespace dxi::detail
