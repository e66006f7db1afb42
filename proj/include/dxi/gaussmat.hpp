#pragma once

#include <array>
#include <string>
#include <vector>

#include "dxi/error.hpp"

namespace dxi {

// Symmetric complex d x d matrix, d <= 3.  Indices are 0-based.
class RhoMatrix {
 public:
  using Entries = std::array<std::array<cplx, 3>, 3>;

  RhoMatrix() : RhoMatrix(1) { m_[0][0] = 1.0; }
  explicit RhoMatrix(int d);
  static RhoMatrix scalar(cplx r);
  static RhoMatrix diagonal(const std::vector<cplx>& diag);
  // Rows must be square and symmetric (exactly).
  static RhoMatrix from_rows(const std::vector<std::vector<cplx>>& rows);
  static RhoMatrix two(cplx r11, cplx r12, cplx r22);
  static RhoMatrix three(cplx r11, cplx r12, cplx r13, cplx r22, cplx r23, cplx r33);

  int dim() const { return d_; }
  cplx operator()(int i, int j) const { return m_[i][j]; }
  void set(int i, int j, cplx v);  // keeps symmetry
  const Entries& entries() const { return m_; }

  cplx det() const;
  // R_ik = rho_ii rho_kk - rho_ik^2,  T_ijk = rho_ij rho_kk - rho_ik rho_jk.
  cplx R(int i, int k) const;
  cplx T(int i, int j, int k) const;

  RhoMatrix real_part() const;
  RhoMatrix conj() const;
  RhoMatrix scaled(cplx f) const;

  // Re(rho_ii) > 0, det(Re rho) > 0 and, for d = 3, R_ij(Re rho) > 0.
  bool satisfies_convergence() const;
  // Empty if the predicate holds, otherwise the first failed inequality.
  std::string convergence_failure() const;
  void require_convergence(const char* who) const;

  // Smallest eigenvalue of Re(rho) (closed form, d <= 3).
  double min_eig_real() const;

  // rho^{-1} s by the adjugate.
  std::vector<cplx> solve(const std::vector<cplx>& s) const;
  cplx quad_form_inv(const std::vector<cplx>& s) const;

  // sqrt(det rho), branch continued from det(Re rho) > 0 along
  // Re rho + i tau Im rho, tau in [0, 1].
  cplx sqrt_det() const;

  bool operator==(const RhoMatrix& o) const;

 private:
  int d_;
  Entries m_{};
};

struct MinorSet {
  std::array<std::array<cplx, 3>, 3> R{};
  std::array<std::array<std::array<cplx, 3>, 3>, 3> T{};
};
MinorSet minors(const RhoMatrix& rho);

// sqrt(pi^d / det rho) exp(s . rho^{-1} s / 16)
cplx closed_form_e(const RhoMatrix& rho, const std::vector<cplx>& s);

// Drop row/column k: rho_ii -> R_ik/rho_kk, rho_ij -> T_ijk/rho_kk.
RhoMatrix reduce_k(const RhoMatrix& rho, int k);

// Negate the off-diagonal entries of row and column k.
RhoMatrix flip_k(const RhoMatrix& rho, int k);

struct RescaleResult {
  RhoMatrix rho;
  std::vector<cplx> s;
  double prefactor;
};
RescaleResult rescale_class(const RhoMatrix& rho, const std::vector<cplx>& s,
                            const std::vector<double>& lambda);

// T_ijk == 0 up to 1e-14 * scale.
bool factorisation_condition(const RhoMatrix& rho, int i, int j, int k);

}  // namespace dxi
