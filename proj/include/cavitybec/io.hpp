#pragma once

#include <map>
#include <string>
#include <vector>

#include "cavitybec/meanfield.hpp"
#include "cavitybec/params.hpp"
#include "cavitybec/sweep.hpp"

namespace cavitybec {

// Flat key=value configuration; '#' starts a comment, blank lines ignored.
using Config = std::map<std::string, std::string>;

Config read_config_file(const std::string& path);

struct RunConfig {
    PhysicalParams params;
    GridConfig grid;
    double delta_min = 0.0;
    double delta_max = 0.0;
    int n_steps = 400;
    double eta_min = 0.0;
    double eta_max = 0.0;
    int eta_steps = 40;
    std::string representation = "twomode";
    std::string outdir = ".";
    std::string format = "csv";  // csv | json
    int threads = 0;
};

// Applies key=value entries onto the run configuration; unknown keys are
// rejected with an error naming the key.
void apply_config(RunConfig& rc, const Config& cfg);

Representation parse_representation(const std::string& name);
std::string to_string(Representation rep);
std::string to_string(StabilityClass cls);
std::string to_string(PhaseClass cls);

// 17-significant-digit scientific notation, locale independent; CSV output is
// byte-identical across runs for identical configs.
std::string format_sci(double x);

// header comment carrying the full resolved parameter set
std::string param_header(const RunConfig& rc);

void write_state_csv(const std::string& path, const MeanFieldState& st, const RunConfig& rc);
void write_state_json(const std::string& path, const MeanFieldState& st, const RunConfig& rc);

void write_branch_csv(const std::string& path, const Branch& up, const Branch& down,
                      const RunConfig& rc);
void write_branch_json(const std::string& path, const Branch& up, const Branch& down,
                       const RunConfig& rc);

void write_spectrum_csv(const std::string& path, const std::vector<SweepRow>& rows,
                        const RunConfig& rc);
void write_spectrum_json(const std::string& path, const std::vector<SweepRow>& rows,
                         const RunConfig& rc);

// one row per mode of a single-point eigendecomposition
void write_modes_csv(const std::string& path, double delta_c, const ModeSet& ms,
                     const RunConfig& rc);
void write_modes_json(const std::string& path, double delta_c, const ModeSet& ms,
                      const RunConfig& rc);

void write_correlations_csv(const std::string& path, const std::vector<SweepRow>& rows,
                            const RunConfig& rc);
void write_correlations_json(const std::string& path, const std::vector<SweepRow>& rows,
                             const RunConfig& rc);

void write_phase_csv(const std::string& path, const std::vector<PhasePoint>& pts,
                     const RunConfig& rc);
void write_phase_json(const std::string& path, const std::vector<PhasePoint>& pts,
                      const RunConfig& rc);

}  // namespace cavitybec
