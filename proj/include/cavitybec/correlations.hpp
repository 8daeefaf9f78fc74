#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cavitybec/fluctuations.hpp"

namespace cavitybec {

// Steady-state second moments <R_k R_l> in the basis (da, da^dag, dc, dc^dag)
// with unit commutators ([dc, dc^dag] = 1, i.e. the physical, not the
// 1/sqrt(N)-scaled, atomic operator).
struct OperatorCorrelations {
    Eigen::Matrix4cd g;
};

// Quasi-normal-mode sum for the stationary correlations driven by the cavity
// vacuum input. Only photon-coupled modes contribute; the zero mode and
// parity-decoupled modes are excluded. Throws if any retained mode grows
// (heating state: no steady state exists).
OperatorCorrelations steady_correlations(const ModeSet& ms, double kappa);

// Real symmetric covariance of the quadratures u = (dx, dy, dX, dY),
// C_kl = <u_k u_l + u_l u_k>/2, with photon block P, atomic block A and
// cross block X.
struct QuadCovariance {
    Eigen::Matrix4d c;
    Eigen::Matrix2d photon_block() const { return c.block<2, 2>(0, 0); }
    Eigen::Matrix2d atom_block() const { return c.block<2, 2>(2, 2); }
    Eigen::Matrix2d cross_block() const { return c.block<2, 2>(0, 2); }
};

// Symmetrized transform of the operator correlations; the residual imaginary
// part must vanish (relative 1e-8) or the input is inconsistent.
QuadCovariance quadrature_covariance(const OperatorCorrelations& oc);

// Independent steady-state route: solves drift C + C drift^T + D = 0 in the
// quadrature basis with vacuum-input diffusion D = kappa diag(1, 1, 0, 0).
QuadCovariance lyapunov_covariance(const FluctuationMatrix& fm, double kappa);

// Drift matrix -i T M T^{-1} in the unit-commutator quadrature basis (real by
// the C.M.C = -M^* symmetry).
Eigen::Matrix4d quadrature_drift(const FluctuationMatrix& fm);

// n'_ph = <da^dag da> = (C11 + C22 - 1)/2
double nonclassical_photon_number(const QuadCovariance& c);

// N' = <dc^dag dc> = (C33 + C44 - 1)/2
double depletion(const QuadCovariance& c);

// E_N = max(0, -ln 2 eta^-) from the smaller symplectic eigenvalue of the
// partially transposed two-mode Gaussian state.
double log_negativity(const QuadCovariance& c);

// symplectic eigenvalues of the covariance itself (both >= 1/2 for a
// physical state), ascending
Eigen::Vector2d symplectic_eigenvalues(const QuadCovariance& c);

}  // namespace cavitybec
