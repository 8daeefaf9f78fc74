#include "cavitybec/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cavitybec/fluctuations.hpp"

namespace cavitybec {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: value for '" + key + "' is not a number: " + value);
    }
    if (pos != value.size())
        throw std::invalid_argument("config: trailing characters in value for '" + key + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v != static_cast<long long>(v))
        throw std::invalid_argument("config: value for '" + key + "' must be an integer");
    return static_cast<int>(v);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

json params_json(const RunConfig& rc) {
    return json{{"n_atoms", rc.params.n_atoms},
                {"u0", rc.params.u0},
                {"kappa", rc.params.kappa},
                {"delta_c", rc.params.delta_c},
                {"eta", rc.params.eta},
                {"g_coll", rc.params.g_coll},
                {"omega_r_hz", rc.params.omega_r_hz},
                {"n_points", rc.grid.n_points},
                {"n_fourier", rc.grid.n_fourier},
                {"representation", rc.representation}};
}

std::string opt_str(const std::optional<double>& v) {
    return v ? format_sci(*v) : "";
}

}  // namespace

Config read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config: empty key on line " +
                                                     std::to_string(lineno));
        cfg[key] = value;
    }
    return cfg;
}

void apply_config(RunConfig& rc, const Config& cfg) {
    for (const auto& [key, value] : cfg) {
        if (key == "n_atoms") rc.params.n_atoms = parse_double(key, value);
        else if (key == "u0") rc.params.u0 = parse_double(key, value);
        else if (key == "kappa") rc.params.kappa = parse_double(key, value);
        else if (key == "delta_c") rc.params.delta_c = parse_double(key, value);
        else if (key == "eta") rc.params.eta = parse_double(key, value);
        else if (key == "g_coll") rc.params.g_coll = parse_double(key, value);
        else if (key == "omega_r_hz") rc.params.omega_r_hz = parse_double(key, value);
        else if (key == "n_points") rc.grid.n_points = parse_int(key, value);
        else if (key == "n_fourier") rc.grid.n_fourier = parse_int(key, value);
        else if (key == "delta_min") rc.delta_min = parse_double(key, value);
        else if (key == "delta_max") rc.delta_max = parse_double(key, value);
        else if (key == "n_steps") rc.n_steps = parse_int(key, value);
        else if (key == "eta_min") rc.eta_min = parse_double(key, value);
        else if (key == "eta_max") rc.eta_max = parse_double(key, value);
        else if (key == "eta_steps") rc.eta_steps = parse_int(key, value);
        else if (key == "representation") rc.representation = value;
        else if (key == "outdir") rc.outdir = value;
        else if (key == "format") rc.format = value;
        else if (key == "threads") rc.threads = parse_int(key, value);
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    if (rc.format != "csv" && rc.format != "json")
        throw std::invalid_argument("config: format must be csv or json");
}

Representation parse_representation(const std::string& name) {
    if (name == "grid") return Representation::Grid;
    if (name == "fourier") return Representation::Fourier;
    if (name == "twomode") return Representation::TwoMode;
    throw std::invalid_argument("unknown representation '" + name +
                                "' (grid|fourier|twomode)");
}

std::string to_string(Representation rep) {
    switch (rep) {
        case Representation::Grid: return "grid";
        case Representation::Fourier: return "fourier";
        case Representation::TwoMode: return "twomode";
    }
    return "?";
}

std::string to_string(StabilityClass cls) {
    return cls == StabilityClass::Cooling ? "cooling" : "heating";
}

std::string to_string(PhaseClass cls) {
    switch (cls) {
        case PhaseClass::Cooling: return "cooling";
        case PhaseClass::Heating: return "heating";
        case PhaseClass::Bistable: return "bistable";
        case PhaseClass::Failed: return "failed";
    }
    return "?";
}

std::string format_sci(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

std::string param_header(const RunConfig& rc) {
    std::ostringstream out;
    out << "# n_atoms=" << format_sci(rc.params.n_atoms) << " u0=" << format_sci(rc.params.u0)
        << " kappa=" << format_sci(rc.params.kappa)
        << " delta_c=" << format_sci(rc.params.delta_c) << " eta=" << format_sci(rc.params.eta)
        << " g_coll=" << format_sci(rc.params.g_coll)
        << " omega_r_hz=" << format_sci(rc.params.omega_r_hz)
        << " n_points=" << rc.grid.n_points << " n_fourier=" << rc.grid.n_fourier
        << " representation=" << rc.representation;
    return out.str();
}

void write_state_csv(const std::string& path, const MeanFieldState& st, const RunConfig& rc) {
    auto out = open_out(path);
    out << param_header(rc) << "\n";
    out << "# alpha_re=" << format_sci(st.alpha_ss.real())
        << " alpha_im=" << format_sci(st.alpha_ss.imag())
        << " photon_number=" << format_sci(std::norm(st.alpha_ss))
        << " mu=" << format_sci(st.mu) << " mean_u=" << format_sci(st.mean_u)
        << " residual=" << format_sci(st.residual) << "\n";
    switch (st.representation) {
        case Representation::Grid: {
            out << "x,psi\n";
            const int n = static_cast<int>(st.psi.size());
            for (int j = 0; j < n; ++j)
                out << format_sci(kPi * j / n) << "," << format_sci(st.psi[j]) << "\n";
            break;
        }
        case Representation::Fourier:
        case Representation::TwoMode: {
            out << "n,beta_n\n";
            if (st.representation == Representation::TwoMode) {
                out << "0," << format_sci(st.psi[0]) << "\n";
                out << "1," << format_sci(st.psi[1]) << "\n";
            } else {
                const int n_max = (static_cast<int>(st.psi.size()) - 1) / 2;
                for (int m = -n_max; m <= n_max; ++m)
                    out << m << "," << format_sci(st.psi[m + n_max]) << "\n";
            }
            break;
        }
    }
}

void write_state_json(const std::string& path, const MeanFieldState& st, const RunConfig& rc) {
    json j;
    j["params"] = params_json(rc);
    j["representation"] = to_string(st.representation);
    j["alpha_re"] = st.alpha_ss.real();
    j["alpha_im"] = st.alpha_ss.imag();
    j["photon_number"] = std::norm(st.alpha_ss);
    j["mu"] = st.mu;
    j["mean_u"] = st.mean_u;
    j["converged"] = st.converged;
    j["residual"] = st.residual;
    j["psi"] = std::vector<double>(st.psi.data(), st.psi.data() + st.psi.size());
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

namespace {

void branch_rows(std::ostream& out, const Branch& br, const char* direction) {
    for (std::size_t i = 0; i < br.points.size(); ++i) {
        const auto& pt = br.points[i];
        const Eigen::VectorXd beta = fourier_amplitudes(pt.state, 1);
        out << format_sci(pt.delta_c) << "," << format_sci(photon_number(pt.state)) << ","
            << format_sci(2.0 * beta[2] * beta[2]) << "," << format_sci(pt.state.mean_u)
            << "," << format_sci(pt.state.mu) << "," << (pt.state.converged ? 1 : 0) << ","
            << direction << "\n";
    }
}

json branch_json_rows(const Branch& br, const char* direction) {
    json rows = json::array();
    for (const auto& pt : br.points) {
        const Eigen::VectorXd beta = fourier_amplitudes(pt.state, 1);
        rows.push_back({{"delta_c", pt.delta_c},
                        {"photon_number", photon_number(pt.state)},
                        {"beta1_sq", 2.0 * beta[2] * beta[2]},
                        {"mean_u", pt.state.mean_u},
                        {"mu", pt.state.mu},
                        {"converged", pt.state.converged},
                        {"direction", direction}});
    }
    return rows;
}

}  // namespace

void write_branch_csv(const std::string& path, const Branch& up, const Branch& down,
                      const RunConfig& rc) {
    auto out = open_out(path);
    out << param_header(rc) << "\n";
    out << "delta_c,photon_number,beta1_sq,mean_u,mu,converged,direction\n";
    branch_rows(out, up, "up");
    branch_rows(out, down, "down");
}

void write_branch_json(const std::string& path, const Branch& up, const Branch& down,
                       const RunConfig& rc) {
    json j;
    j["params"] = params_json(rc);
    json rows = branch_json_rows(up, "up");
    for (auto& r : branch_json_rows(down, "down")) rows.push_back(r);
    j["rows"] = rows;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_spectrum_csv(const std::string& path, const std::vector<SweepRow>& rows,
                        const RunConfig& rc) {
    auto out = open_out(path);
    out << param_header(rc) << "\n";
    out << "delta_c,branch,eps_photon,gamma_photon,eps_atom,gamma_atom,unstable\n";
    for (const auto& r : rows) {
        out << format_sci(r.delta_c) << "," << to_string(r.branch) << ","
            << format_sci(r.eps_photon) << "," << format_sci(r.gamma_photon) << ","
            << format_sci(r.eps_atom) << "," << format_sci(r.gamma_atom) << ","
            << (r.branch == StabilityClass::Heating ? 1 : 0) << "\n";
    }
}

void write_spectrum_json(const std::string& path, const std::vector<SweepRow>& rows,
                         const RunConfig& rc) {
    json j;
    j["params"] = params_json(rc);
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"delta_c", r.delta_c},
                       {"branch", to_string(r.branch)},
                       {"eps_photon", r.eps_photon},
                       {"gamma_photon", r.gamma_photon},
                       {"eps_atom", r.eps_atom},
                       {"gamma_atom", r.gamma_atom}});
    j["rows"] = arr;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

namespace {

std::string mode_flags(const ModeSet& ms, int k) {
    std::string f;
    if (ms.zero_mode[k]) f += "zero_mode;";
    if (ms.photon_coupled[k]) f += "photon_coupled;";
    if (ms.parity_decoupled[k]) f += "parity_decoupled;";
    if (ms.unstable[k]) f += "unstable;";
    if (!f.empty()) f.pop_back();
    return f;
}

}  // namespace

void write_modes_csv(const std::string& path, double delta_c, const ModeSet& ms,
                     const RunConfig& rc) {
    auto out = open_out(path);
    out << param_header(rc) << "\n";
    out << "delta_c,re_omega,im_omega,flags\n";
    for (int k = 0; k < ms.size(); ++k)
        out << format_sci(delta_c) << "," << format_sci(ms.eigenvalues[k].real()) << ","
            << format_sci(ms.eigenvalues[k].imag()) << "," << mode_flags(ms, k) << "\n";
}

void write_modes_json(const std::string& path, double delta_c, const ModeSet& ms,
                      const RunConfig& rc) {
    json j;
    j["params"] = params_json(rc);
    json arr = json::array();
    for (int k = 0; k < ms.size(); ++k)
        arr.push_back({{"delta_c", delta_c},
                       {"re_omega", ms.eigenvalues[k].real()},
                       {"im_omega", ms.eigenvalues[k].imag()},
                       {"flags", mode_flags(ms, k)}});
    j["rows"] = arr;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_correlations_csv(const std::string& path, const std::vector<SweepRow>& rows,
                            const RunConfig& rc) {
    auto out = open_out(path);
    out << param_header(rc) << "\n";
    out << "delta_c,n_ph_classical,n_ph_nonclassical,depletion,log_negativity,branch\n";
    for (const auto& r : rows) {
        out << format_sci(r.delta_c) << "," << format_sci(r.photon_number) << ","
            << opt_str(r.n_ph_nonclassical) << "," << opt_str(r.depletion) << ","
            << opt_str(r.log_negativity) << "," << to_string(r.branch) << "\n";
    }
}

void write_correlations_json(const std::string& path, const std::vector<SweepRow>& rows,
                             const RunConfig& rc) {
    json j;
    j["params"] = params_json(rc);
    json arr = json::array();
    for (const auto& r : rows) {
        json row{{"delta_c", r.delta_c},
                 {"n_ph_classical", r.photon_number},
                 {"branch", to_string(r.branch)}};
        if (r.n_ph_nonclassical) row["n_ph_nonclassical"] = *r.n_ph_nonclassical;
        if (r.depletion) row["depletion"] = *r.depletion;
        if (r.log_negativity) row["log_negativity"] = *r.log_negativity;
        arr.push_back(row);
    }
    j["rows"] = arr;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_phase_csv(const std::string& path, const std::vector<PhasePoint>& pts,
                     const RunConfig& rc) {
    auto out = open_out(path);
    out << param_header(rc) << "\n";
    out << "delta_c,eta,class\n";
    for (const auto& pt : pts)
        out << format_sci(pt.delta_c) << "," << format_sci(pt.eta) << ","
            << to_string(pt.cls) << "\n";
}

void write_phase_json(const std::string& path, const std::vector<PhasePoint>& pts,
                      const RunConfig& rc) {
    json j;
    j["params"] = params_json(rc);
    json arr = json::array();
    for (const auto& pt : pts)
        arr.push_back(
            {{"delta_c", pt.delta_c}, {"eta", pt.eta}, {"class", to_string(pt.cls)}});
    j["rows"] = arr;
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

}  // namespace cavitybec
