#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dxi/gaussmat.hpp"
#include "dxi/quadrature.hpp"

namespace dxi {

enum class IdentityId {
  Telescope,      // extras: m
  SkFlip,         // extras: k (0-based row/column)
  Fun1,
  Fun11,
  FunCor1,        // rho11 == rho22, s1 == s2 == s[0]
  FunCor2,
  Rho12Roots,     // extras: gamma, n, branch, s2, n_prime
  MeanValue,      // Fubini form of the 2D integral vs its closed form
  Result3D,
  SixTerm,
  Rewrite3DA,     // extras: gamma; rho is the scalar rho, s[0] = s
  Rewrite3DB,     // extras: gamma
  Rewrite2D,      // extras: alpha, n
  MobiusRewrite,  // extras: alpha
};

constexpr int kIdentityCount = 14;
IdentityId identity_from_index(int i);
std::string_view identity_name(IdentityId id);  // "telescope", "sk_flip", ...
IdentityId parse_identity(std::string_view name);  // throws Parse
double default_tolerance(IdentityId id);

struct VerificationRequest {
  IdentityId id = IdentityId::Telescope;
  RhoMatrix rho;
  std::vector<cplx> s;
  std::map<std::string, cplx> extras;
  double tol = 0.0;  // 0 selects default_tolerance(id)
  std::optional<QuadSpec> spec;
  std::optional<std::uint64_t> seed;  // recorded when drawn by random_params
};

struct AuxValue {
  std::string name;
  cplx value;
};

struct VerificationReport {
  VerificationRequest request;
  cplx lhs{0.0};
  cplx rhs{0.0};
  double abs_residual = 0.0;
  double rel_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  long long evaluations = 0;
  bool precision_warning = false;
  std::vector<AuxValue> aux;
};

// Throws ErrorCode::Domain when the identity's hypotheses do not hold.
void check_hypotheses(const VerificationRequest& req);

// Throws NonConvergenceError when a quadrature fails; the partial report is
// then available through last_partial_report() on the same thread.
VerificationReport verify(const VerificationRequest& req);
const std::optional<VerificationReport>& last_partial_report();

// A deterministic parameter draw that satisfies the identity's hypotheses.
// The rewrite identities are equivalences, so their draws sit on a located root.
VerificationRequest random_params(IdentityId id, std::uint64_t seed);

enum class ZeroFamily { Telescope, Tilde, FunCor1, FunCor2 };
ZeroFamily parse_zero_family(std::string_view name);
std::string_view zero_family_name(ZeroFamily f);

struct CandidateRoot {
  cplx s;
  int k = 0;
  int branch = 0;  // +-1 for the FUNCOR families, 0 otherwise
};

// Closed-form roots for k in [k_lo, k_hi].  m is used by TELESCOPE/TILDE;
// rho is 1x1 for those and 2x2 with rho11 == rho22 for the FUNCOR families.
std::vector<CandidateRoot> candidate_zeros(ZeroFamily f, const RhoMatrix& rho, int m, int k_lo,
                                           int k_hi);

// The combination that vanishes at the candidate roots, evaluated by quadrature.
cplx zero_confirmation(ZeroFamily f, const RhoMatrix& rho, int m, cplx s,
                       const QuadSpec& spec = {});

struct Rho12Root {
  cplx rho12;
  cplx s1;
};
// rho12 = 1/(32 pi i n) + branch sqrt(gamma^2 - 1/(32 pi n)^2) and the matching
// s1 = 1/2 + (rho12/gamma)(s2 + n'/n).
Rho12Root rho12_special_roots(cplx gamma, int n, int branch, cplx s2, int n_prime);
// 1 + e^{..} - e^{..} - e^{..} with D = 16(gamma^2 - rho12^2).
cplx rho12_combination(cplx gamma, cplx rho12, cplx s1, cplx s2);
// The root as printed, s1 = (gamma/rho12) s2 + 2n'/n (kept for comparison).
cplx rho12_printed_root(cplx gamma, cplx rho12, cplx s2, int n, int n_prime);

// Sign changes of one real component of f along anchor + u*direction,
// u in [-length, length] on 2*grid intervals, each bisected to |du| <= tol.
// The component (Re or Im) is the one with the larger magnitude on the grid.
std::vector<cplx> zero_scan(const std::function<cplx(cplx)>& f, cplx anchor, cplx direction,
                            double length, int grid, double tol = 1e-10);

}  // namespace dxi
