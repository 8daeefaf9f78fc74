#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "cavitybec/meanfield.hpp"
#include "cavitybec/params.hpp"

namespace cavitybec {

// Linearized drift matrix M for the fluctuation vector
// R = (da, da^dag, dPsi~ or dc~, adjoints), exactly in the operator ordering of
// the equations of motion. Size 2*n_g+2 for a grid state, 4 for two-mode.
struct FluctuationMatrix {
    Eigen::MatrixXcd m;
    Representation basis = Representation::TwoMode;
    std::array<int, 2> noise_rows{0, 1};  // photon noise channels of Z
    int n_atomic = 1;                     // grid points, or 1 for two-mode
    double n_atoms = 0.0;
    double kappa = 0.0;
    bool parity_symmetric = false;  // even v_ext and even state (grid only)
};

FluctuationMatrix build_matrix_grid(const MeanFieldState& state, const PhysicalParams& p,
                                    const GridConfig& grid,
                                    const Eigen::VectorXd& v_ext = {});

FluctuationMatrix build_matrix_two_mode(const MeanFieldState& state, const PhysicalParams& p);

// max-norm of C.M.C + M^* where C swaps each annihilation row with its
// creation partner; vanishes for every physical drift matrix.
double symmetry_residual(const FluctuationMatrix& fm);

enum class ModeParity { Unknown, Even, Odd };

// Biorthogonal eigensystem of M. Columns of right_vecs/left_vecs are
// normalized so that left_vecs.adjoint() * right_vecs = identity.
struct ModeSet {
    Eigen::VectorXcd eigenvalues;  // omega_k = eps_k - i gamma_k
    Eigen::MatrixXcd right_vecs;
    Eigen::MatrixXcd left_vecs;
    std::vector<int> pair_index;          // partner with omega ~ -conj(omega_k)
    std::vector<ModeParity> parity;
    std::vector<bool> zero_mode;
    std::vector<bool> photon_coupled;
    std::vector<bool> parity_decoupled;
    std::vector<bool> unstable;
    bool classified = false;
    // carried metadata
    Representation basis = Representation::TwoMode;
    int n_atomic = 1;
    double n_atoms = 0.0;
    double kappa = 0.0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    double tol_zero() const;  // 1e-8 * max |omega|
};

struct EigenOptions {
    // Grid matrices with parity symmetry are reduced to the even subspace by
    // default; odd modes decouple from the photon field exactly and are only
    // computed on request.
    bool include_odd_modes = false;
    bool force_full = false;
    double biorth_tol = 1e-8;
};

ModeSet eigendecompose(const FluctuationMatrix& fm, const EigenOptions& opts = {});

// Fills the per-mode flags; thresholds are scale-invariant:
// tol_zero = 1e-8 max|omega|, photon coupling weight measured against ||l||.
ModeSet classify_modes(ModeSet ms, const FluctuationMatrix& fm);

enum class StabilityClass { Cooling, Heating };

// Heating iff any photon-coupled, non-zero mode grows (Im omega > tol_zero).
StabilityClass stability(const ModeSet& ms);

}  // namespace cavitybec
