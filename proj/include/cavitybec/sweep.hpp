#pragma once

#include <optional>
#include <vector>

#include "cavitybec/correlations.hpp"
#include "cavitybec/fluctuations.hpp"
#include "cavitybec/meanfield.hpp"

namespace cavitybec {

// One converged point of a detuning scan: mean field, the two photon-coupled
// eigenvalue pairs, and (on cooling rows only) the steady-state correlation
// observables.
struct SweepRow {
    double delta_c = 0.0;
    double eta = 0.0;
    StabilityClass branch = StabilityClass::Cooling;
    double photon_number = 0.0;
    double beta1_sq = 0.0;
    double mean_u = 0.0;
    double mu = 0.0;
    double eps_photon = 0.0;
    double gamma_photon = 0.0;
    double eps_atom = 0.0;
    double gamma_atom = 0.0;
    std::optional<double> n_ph_nonclassical;
    std::optional<double> depletion;
    std::optional<double> log_negativity;
};

struct SweepFailure {
    double delta_c;
    std::string message;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepFailure> failures;
};

struct SweepOptions {
    ContinuationOptions continuation;
    bool with_correlations = true;  // two-mode cooling rows only
    int threads = 0;                // 0: hardware choice (phase diagram only)
};

// Up- and down-continuation over [delta_lo, delta_hi] merged into rows; rows
// where the two directions converge to distinct states appear twice (cooling
// and heating branch).
SweepResult detuning_sweep(const PhysicalParams& p, double delta_lo, double delta_hi,
                           int n_steps, Representation rep, const SweepOptions& opts = {},
                           const GridConfig& grid = {});

// Fold detunings of a continuation branch, refined by bisection re-solves to
// a 1e-3 omega_R window. Empty for a single-valued branch.
std::vector<double> find_turning_points(const Branch& branch);

enum class PhaseClass { Cooling, Heating, Bistable, Failed };

struct PhasePoint {
    double delta_c = 0.0;
    double eta = 0.0;
    PhaseClass cls = PhaseClass::Failed;
};

// Classifies the (delta_c, eta) rectangle by dual-direction continuation plus
// the fluctuation-spectrum sign. Distinct eta lines run in parallel.
std::vector<PhasePoint> phase_diagram(const PhysicalParams& p, double delta_lo,
                                      double delta_hi, int n_delta, double eta_lo,
                                      double eta_hi, int n_eta,
                                      const SweepOptions& opts = {});

struct CriticalPoint {
    double delta_c_crit = 0.0;
    double eta_crit = 0.0;
};

struct CriticalSearchOptions {
    double delta_lo = 0.0;   // 0: derived from n_atoms * u0 / 2
    double delta_hi = 0.0;
    int n_steps = 200;
    double width_tol = 1e-2;  // bistable window width considered closed
    double eta_tol = 0.5;
    ContinuationOptions continuation;
};

// Bisection on eta for the closing of the bistable window; requires the
// bracket to straddle the threshold.
CriticalPoint find_critical_point(const PhysicalParams& p, double eta_lo, double eta_hi,
                                  const CriticalSearchOptions& opts = {});

// Width of the bistable window at the given drive (0 when single-valued).
double bistable_width(const PhysicalParams& p, double eta,
                      const CriticalSearchOptions& opts = {});

}  // namespace cavitybec
