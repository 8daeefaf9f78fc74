#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cavitybec/params.hpp"

namespace cavitybec {

enum class Representation { Grid, Fourier, TwoMode };

// Converged self-consistent state: condensate wavefunction plus the
// adiabatically eliminated cavity amplitude.
//
// psi holds, depending on representation:
//   Grid    - samples of the real wavefunction on x_j = j*pi/n, j = 0..n-1,
//             normalized as (pi/n) * sum psi_j^2 = 1
//   Fourier - real amplitudes beta_n, n = -n_max..n_max, sum beta_n^2 = 1
//   TwoMode - (beta_0, beta_1), beta_0^2 + beta_1^2 = 1
struct MeanFieldState {
    Representation representation = Representation::TwoMode;
    Eigen::VectorXd psi;
    std::complex<double> alpha_ss{0.0, 0.0};
    double mu = 0.0;
    double mean_u = 0.0;
    bool converged = false;
    double residual = 0.0;
};

// Thrown on solver non-convergence or NaN; carries the last residual.
class SolveError : public std::runtime_error {
  public:
    SolveError(const std::string& msg, double residual)
        : std::runtime_error(msg), residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_ = 0.0;
};

struct SolverOptions {
    double dtau = 1e-3;          // imaginary-time step, units 1/omega_R
    double tol_residual = 1e-10; // max-norm change of psi per unit imaginary time
    double tol_alpha = 1e-12;    // relative self-consistency of the cavity field
    long max_iters = 2000000;
    std::vector<double>* energy_trace = nullptr;  // optional per-step energy log
};

// Steady cavity amplitude i eta / (Delta_C - N<U> + i kappa).
std::complex<double> cavity_steady_field(const PhysicalParams& p, double mean_u);

// <U> = integral phi U(x) phi dx with U(x) = u0 cos^2(x); for TwoMode this is
// (u0/2)(1 + sqrt(2) beta_0 beta_1).
double light_shift_expectation(const MeanFieldState& state, double u0);

// Dense real symmetric matrix of -d^2/dx^2 on the periodic n-point grid,
// exact for all resolvable Fourier modes.
Eigen::MatrixXd spectral_laplacian(int n);

// Effective energy per particle whose gradient flow the imaginary-time
// iteration follows; decreases monotonically along the iteration. The cavity
// back-action enters through eta^2/(N kappa) * atan((N<U> - Delta_C)/kappa).
double gp_energy(const MeanFieldState& state, const PhysicalParams& p,
                 const Eigen::VectorXd& v_ext = {});

MeanFieldState solve_gpe_grid(const PhysicalParams& p, const GridConfig& grid,
                              const Eigen::VectorXd& v_ext = {},
                              const std::optional<MeanFieldState>& init = {},
                              const SolverOptions& opts = {});

MeanFieldState solve_gpe_fourier(const PhysicalParams& p, int n_max,
                                 const std::optional<MeanFieldState>& init = {},
                                 const SolverOptions& opts = {});

MeanFieldState solve_two_mode(const PhysicalParams& p,
                              const std::optional<MeanFieldState>& init = {},
                              const SolverOptions& opts = {});

// Plane-wave amplitudes beta_n (n = -n_max..n_max) of a state in any
// representation; exact for Fourier/TwoMode, quadrature projection for Grid.
Eigen::VectorXd fourier_amplitudes(const MeanFieldState& state, int n_max);

// Wavefunction samples on an n-point grid for a state in any representation.
Eigen::VectorXd grid_samples(const MeanFieldState& state, int n);

double photon_number(const MeanFieldState& state);

enum class SweepDirection { Up, Down };

struct BranchPoint {
    double delta_c;
    MeanFieldState state;
};

struct BranchFailure {
    double delta_c;
    std::string message;
};

// One continuation run: states ordered with strictly monotone delta_c, all
// converged. jump_after[i] marks a photon-number discontinuity (fold) between
// points[i] and points[i+1].
struct Branch {
    std::vector<BranchPoint> points;
    std::vector<std::size_t> jump_after;
    std::vector<BranchFailure> failures;
    PhysicalParams base;  // delta_c field is per-point
    Representation representation = Representation::TwoMode;
    GridConfig grid;
    SweepDirection direction = SweepDirection::Up;
    double jump_threshold = 0.25;
};

struct ContinuationOptions {
    int n_steps = 400;
    double jump_threshold = 0.25;  // relative photon-number jump flagging a fold
    int fold_retries = 2;          // continuation-step halvings before giving up
    bool mark_failures = false;    // record failures instead of throwing
    SolverOptions solver;
};

Branch continue_branch(const PhysicalParams& p, double delta_lo, double delta_hi,
                       SweepDirection direction, Representation rep,
                       const ContinuationOptions& opts = {},
                       const GridConfig& grid = {});

// Shared scan grid so that up- and down-sweeps land on bit-identical points.
inline double linspace_point(double lo, double hi, int n, int i) {
    return lo + (hi - lo) * (double(i) / double(n - 1));
}

}  // namespace cavitybec
