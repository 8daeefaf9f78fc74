#include "cavitybec/params.hpp"

#include <cmath>
#include <stdexcept>

namespace cavitybec {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

PhysicalParams validate(const PhysicalParams& p) {
    require(std::isfinite(p.n_atoms) && p.n_atoms >= 1.0, "n_atoms must be at least 1");
    require(std::isfinite(p.kappa) && p.kappa > 0.0, "kappa must be positive");
    require(std::isfinite(p.eta) && p.eta >= 0.0, "eta must be nonnegative");
    require(std::isfinite(p.u0), "u0 must be finite");
    require(std::isfinite(p.delta_c), "delta_c must be finite");
    require(std::isfinite(p.g_coll), "g_coll must be finite");
    require(std::isfinite(p.omega_r_hz) && p.omega_r_hz > 0.0, "omega_r_hz must be positive");
    return p;
}

GridConfig validate(const GridConfig& g) {
    require(g.n_points >= 16, "n_points must be at least 16");
    require(g.n_points % 2 == 0, "n_points must be even");
    require(g.n_fourier >= 1, "n_fourier must be at least 1");
    return g;
}

double to_hz(double x_recoil, const PhysicalParams& p) { return x_recoil * p.omega_r_hz; }

double from_hz(double f_hz, const PhysicalParams& p) { return f_hz / p.omega_r_hz; }

double swave_frequency_hz(double a_scatter_m, double n_atoms, double period_m,
                          double n_wells, double waist_m, double mass_kg) {
    if (!(a_scatter_m > 0.0 && period_m > 0.0 && n_wells > 0.0 && waist_m > 0.0 &&
          mass_kg > 0.0) ||
        n_atoms < 0.0) {
        throw std::invalid_argument("swave_frequency_hz: inputs must be positive");
    }
    const double omega = 4.0 * kPi * kHbarSI * a_scatter_m * n_atoms /
                         (period_m * n_wells * waist_m * waist_m * mass_kg);
    return omega / (2.0 * kPi);
}

}  // namespace cavitybec
