#pragma once

#include <string>

namespace cavitybec {

// All quantities are dimensionless unless suffixed otherwise: hbar = 1,
// frequencies in units of the recoil frequency omega_R, lengths in units of
// 1/k (pump wavenumber), position variable x = k*x_lab on one lattice period
// [0, pi). The kinetic operator is -d^2/dx^2, so the cos(2x) mode sits at
// 4 omega_R. Conversion to laboratory Hz happens only at output.
struct PhysicalParams {
    double n_atoms = 6.0e4;    // N
    double u0 = 0.96;          // single-atom light shift U_0
    double kappa = 363.9;      // cavity half-linewidth
    double delta_c = 28000.0;  // pump-cavity detuning Delta_C
    double eta = 80.06;        // drive amplitude
    double g_coll = 0.0;       // collective 1-D s-wave coupling 2gN/(lambda p hbar omega_R)
    double omega_r_hz = 3570.0;  // recoil frequency omega_R/2pi in Hz, output conversion only
};

// Throws std::invalid_argument naming the offending field.
PhysicalParams validate(const PhysicalParams& p);

struct GridConfig {
    int n_points = 200;  // grid samples over one period, even, >= 16
    int n_fourier = 8;   // plane-wave cutoff n_max for the band solver, >= 1
};

GridConfig validate(const GridConfig& g);

// frequency unit conversion, f_hz = x * omega_r_hz
double to_hz(double x_recoil, const PhysicalParams& p);
double from_hz(double f_hz, const PhysicalParams& p);

// Characteristic s-wave interaction frequency omega_sw = 4 pi hbar a N / (L p w^2 m),
// returned as an ordinary frequency omega_sw/2pi in Hz. All inputs in SI units.
double swave_frequency_hz(double a_scatter_m, double n_atoms, double period_m,
                          double n_wells, double waist_m, double mass_kg);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbarSI = 1.054571817e-34;  // J s
inline constexpr double kMassRb87SI = 1.44316060e-25;  // kg

}  // namespace cavitybec
