#pragma once

#include <array>
#include <vector>

#include "dxi/gaussmat.hpp"
#include "dxi/xi_core.hpp"

namespace dxi {

enum class MultiVariant { Theta, Jensen };

struct MultiXiParams {
  RhoMatrix rho;
  std::vector<cplx> s;
  MultiVariant variant = MultiVariant::Theta;
};

// Per-axis half-widths for prod_i K(e^{x_i}) e^{s_i x_i/2} e^{-x.rho x}: the
// envelope e^{sum b_i|x_i| - x.Re(rho)x} is maximised exactly over the other
// coordinates (Schur complement) and cut where it drops below abs_tol.
std::array<double, 3> multi_truncation_radii(const RhoMatrix& rho, const std::vector<cplx>& s,
                                             double abs_tol, int log_power = 0);

// Xi(rho, s) (Theta) or xi(rho, s) (Jensen, Delta_4 Psi per axis), d <= 3.
XiValue xi_d(const MultiXiParams& p);
XiValue xi_d(const MultiXiParams& p, const QuadSpec& spec);

// int x_i x_j (...) : the mixed log moment behind both heat-equation terms.
XiValue xi_d_moment(const MultiXiParams& p, int i, int j, const QuadSpec& spec);
// d/d rho_ij with rho_ij = rho_ji moved together.
XiValue xi_d_drho(const MultiXiParams& p, int i, int j, const QuadSpec& spec);

// |xi(rho, s) - xi(flip_k rho, s with s_k -> 1 - s_k)|, Jensen variant.
double jensen_flip_residual(const RhoMatrix& rho, const std::vector<cplx>& s, int k);
double jensen_flip_residual(const RhoMatrix& rho, const std::vector<cplx>& s, int k,
                            const QuadSpec& spec);

// |(d_{rho_ij} + 8/(1 + delta_ij) d^2_{s_i s_j}) Xi(rho, s)|
double heat_residual_multi(const RhoMatrix& rho, const std::vector<cplx>& s, int i, int j);
double heat_residual_multi(const RhoMatrix& rho, const std::vector<cplx>& s, int i, int j,
                           const QuadSpec& spec);

// prod_i Xi_{Re rho_ii}(Re s_i): the domination bound for |Xi(rho, s)|.
double domination_bound(const RhoMatrix& rho, const std::vector<cplx>& s);

// Fubini form of the 2D integral:
//   int dx M_{r22}(s2/2 + 2(r22 - r12)x) e^{-q x^2 + (s1 - s2)x/2},
// q = r11 + r22 - 2 r12, where M_r(a) = M[Psi e^{-r ln^2}](a).
XiValue fubini_convolution(cplx r11, cplx r22, cplx r12, cplx s1, cplx s2,
                           const QuadSpec& spec = {});
// Its closed form sqrt(pi/q) e^{(s1-s2)^2/16q} M_{det/q}((s1 r22 + s2 r11 - (s1+s2) r12)/2q).
XiValue fubini_closed(cplx r11, cplx r22, cplx r12, cplx s1, cplx s2, const QuadSpec& spec = {});

// Mean value: int dq M_gamma(q) e^{-(q-s)^2/4(gamma-rho)} / sqrt(4 pi (gamma-rho)),
// which equals M_rho(s) for Re(gamma) > Re(rho) > 0.
XiValue mean_value_convolution(double gamma, double rho, cplx s, const QuadSpec& spec = {});

}  // namespace dxi
