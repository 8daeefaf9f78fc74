#include "cavitybec/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace cavitybec {

namespace {

struct SpectrumSummary {
    double eps_photon, gamma_photon, eps_atom, gamma_atom;
};

// The two pairs plotted in the spectrum figures: photon-like modes carry a
// linewidth close to kappa, atom-like ones stay well below it.
SpectrumSummary summarize_spectrum(const ModeSet& ms) {
    SpectrumSummary s{0.0, 0.0, 0.0, 0.0};
    double best_photon = -1.0, best_atom = -1.0;
    double atom_gamma_max = -std::numeric_limits<double>::infinity();
    bool have_atom = false;
    for (int k = 0; k < ms.size(); ++k) {
        if (!ms.photon_coupled[k] || ms.zero_mode[k]) continue;
        const auto w = ms.eigenvalues[k];
        const double weight = std::sqrt(std::norm(ms.left_vecs(0, k)) +
                                        std::norm(ms.left_vecs(1, k)));
        if (std::abs(w.imag()) >= ms.kappa / 2.0) {
            if (w.real() >= 0.0 && weight > best_photon) {
                best_photon = weight;
                s.eps_photon = w.real();
                s.gamma_photon = w.imag();
            }
        } else {
            have_atom = true;
            if (w.real() > best_atom) {
                best_atom = w.real();
                s.eps_atom = w.real();
            }
            atom_gamma_max = std::max(atom_gamma_max, w.imag());
        }
    }
    if (have_atom) s.gamma_atom = atom_gamma_max;
    return s;
}

ModeSet analyze(const MeanFieldState& st, const PhysicalParams& p, Representation rep,
                const GridConfig& grid, FluctuationMatrix* fm_out = nullptr) {
    FluctuationMatrix fm = rep == Representation::TwoMode
                               ? build_matrix_two_mode(st, p)
                               : build_matrix_grid(st, p, grid);
    ModeSet ms = classify_modes(eigendecompose(fm), fm);
    if (fm_out) *fm_out = std::move(fm);
    return ms;
}

SweepRow make_row(const BranchPoint& pt, const PhysicalParams& base, Representation rep,
                  const GridConfig& grid, bool with_correlations) {
    PhysicalParams p = base;
    p.delta_c = pt.delta_c;
    SweepRow row;
    row.delta_c = pt.delta_c;
    row.eta = p.eta;
    row.photon_number = photon_number(pt.state);
    const Eigen::VectorXd beta = fourier_amplitudes(pt.state, 1);
    row.beta1_sq = 2.0 * beta[2] * beta[2];  // beta_{+1}^2 + beta_{-1}^2
    row.mean_u = pt.state.mean_u;
    row.mu = pt.state.mu;

    ModeSet ms = analyze(pt.state, p, rep, grid);
    row.branch = stability(ms);
    const SpectrumSummary sp = summarize_spectrum(ms);
    row.eps_photon = sp.eps_photon;
    row.gamma_photon = sp.gamma_photon;
    row.eps_atom = sp.eps_atom;
    row.gamma_atom = sp.gamma_atom;

    if (with_correlations && rep == Representation::TwoMode &&
        row.branch == StabilityClass::Cooling) {
        const QuadCovariance c = quadrature_covariance(steady_correlations(ms, p.kappa));
        row.n_ph_nonclassical = nonclassical_photon_number(c);
        row.depletion = depletion(c);
        row.log_negativity = log_negativity(c);
    }
    return row;
}

}  // namespace

SweepResult detuning_sweep(const PhysicalParams& p, double delta_lo, double delta_hi,
                           int n_steps, Representation rep, const SweepOptions& opts,
                           const GridConfig& grid) {
    if (n_steps < 2) throw std::invalid_argument("detuning_sweep needs at least 2 steps");
    if (rep == Representation::Fourier)
        throw std::invalid_argument("detuning_sweep supports Grid and TwoMode states");

    ContinuationOptions copts = opts.continuation;
    copts.n_steps = n_steps;
    copts.mark_failures = true;

    const Branch up =
        continue_branch(p, delta_lo, delta_hi, SweepDirection::Up, rep, copts, grid);
    const Branch down =
        continue_branch(p, delta_lo, delta_hi, SweepDirection::Down, rep, copts, grid);

    SweepResult out;
    for (const auto& f : up.failures) out.failures.push_back({f.delta_c, "up: " + f.message});
    for (const auto& f : down.failures)
        out.failures.push_back({f.delta_c, "down: " + f.message});

    std::map<double, const BranchPoint*> by_delta_up;
    for (const auto& pt : up.points) by_delta_up[pt.delta_c] = &pt;

    auto push_row = [&](const BranchPoint& pt) {
        try {
            out.rows.push_back(make_row(pt, p, rep, grid, opts.with_correlations));
        } catch (const std::exception& e) {
            out.failures.push_back({pt.delta_c, e.what()});
        }
    };

    for (const auto& pt : up.points) push_row(pt);
    for (const auto& pt : down.points) {
        auto it = by_delta_up.find(pt.delta_c);
        if (it != by_delta_up.end()) {
            const double n_up = photon_number(it->second->state);
            const double n_dn = photon_number(pt.state);
            const double gap = std::abs(n_up - n_dn) / std::max(n_up, n_dn);
            if (gap <= opts.continuation.jump_threshold) continue;  // same state
        }
        push_row(pt);
    }
    std::sort(out.rows.begin(), out.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.delta_c != b.delta_c) return a.delta_c < b.delta_c;
        return static_cast<int>(a.branch) < static_cast<int>(b.branch);
    });
    return out;
}

std::vector<double> find_turning_points(const Branch& branch) {
    std::vector<double> folds;
    const double tol = 1e-3;
    for (std::size_t idx : branch.jump_after) {
        if (idx + 1 >= branch.points.size()) continue;
        const BranchPoint& a = branch.points[idx];
        const BranchPoint& b = branch.points[idx + 1];
        double lo = a.delta_c, hi = b.delta_c;
        MeanFieldState on_branch = a.state;
        ContinuationOptions copts;
        copts.fold_retries = 0;
        while (std::abs(hi - lo) > tol) {
            const double mid = 0.5 * (lo + hi);
            PhysicalParams p = branch.base;
            p.delta_c = mid;
            bool stayed = false;
            try {
                MeanFieldState st;
                switch (branch.representation) {
                    case Representation::Grid:
                        st = solve_gpe_grid(p, branch.grid, {}, on_branch, copts.solver);
                        break;
                    case Representation::Fourier:
                        st = solve_gpe_fourier(p, branch.grid.n_fourier, on_branch,
                                               copts.solver);
                        break;
                    case Representation::TwoMode:
                        st = solve_two_mode(p, on_branch, copts.solver);
                        break;
                }
                const double n_ref = photon_number(on_branch);
                const double n_mid = photon_number(st);
                const double gap = std::abs(n_mid - n_ref) / std::max(n_ref, n_mid);
                if (gap <= branch.jump_threshold) {
                    stayed = true;
                    on_branch = std::move(st);
                }
            } catch (const SolveError&) {
                stayed = false;  // no solution on this side of the fold
            }
            if (stayed)
                lo = mid;
            else
                hi = mid;
        }
        folds.push_back(0.5 * (lo + hi));
    }
    return folds;
}

namespace {

PhaseClass classify_point(const PhysicalParams& base, double delta,
                          const std::optional<MeanFieldState>& up,
                          const std::optional<MeanFieldState>& down,
                          double jump_threshold) {
    if (!up && !down) return PhaseClass::Failed;
    if (up && down) {
        const double n_up = photon_number(*up);
        const double n_dn = photon_number(*down);
        const double gap = std::abs(n_up - n_dn) / std::max(n_up, n_dn);
        if (gap > jump_threshold) return PhaseClass::Bistable;
    }
    PhysicalParams p = base;
    p.delta_c = delta;
    const MeanFieldState& st = up ? *up : *down;
    try {
        ModeSet ms = analyze(st, p, Representation::TwoMode, {});
        return stability(ms) == StabilityClass::Cooling ? PhaseClass::Cooling
                                                        : PhaseClass::Heating;
    } catch (const std::exception&) {
        return PhaseClass::Failed;
    }
}

std::vector<PhasePoint> eta_line(const PhysicalParams& base, double eta, double delta_lo,
                                 double delta_hi, int n_delta,
                                 const ContinuationOptions& copts_in) {
    PhysicalParams p = base;
    p.eta = eta;
    ContinuationOptions copts = copts_in;
    copts.n_steps = n_delta;
    copts.mark_failures = true;

    std::map<double, MeanFieldState> up_states, down_states;
    const Branch up =
        continue_branch(p, delta_lo, delta_hi, SweepDirection::Up, Representation::TwoMode, copts);
    for (const auto& pt : up.points) up_states.emplace(pt.delta_c, pt.state);
    const Branch down = continue_branch(p, delta_lo, delta_hi, SweepDirection::Down,
                                        Representation::TwoMode, copts);
    for (const auto& pt : down.points) down_states.emplace(pt.delta_c, pt.state);

    std::vector<PhasePoint> line;
    line.reserve(n_delta);
    for (int i = 0; i < n_delta; ++i) {
        const double d = linspace_point(delta_lo, delta_hi, n_delta, i);
        auto iu = up_states.find(d);
        auto id = down_states.find(d);
        std::optional<MeanFieldState> su, sd;
        if (iu != up_states.end()) su = iu->second;
        if (id != down_states.end()) sd = id->second;
        line.push_back({d, eta, classify_point(p, d, su, sd, copts.jump_threshold)});
    }
    return line;
}

}  // namespace

std::vector<PhasePoint> phase_diagram(const PhysicalParams& p, double delta_lo,
                                      double delta_hi, int n_delta, double eta_lo,
                                      double eta_hi, int n_eta, const SweepOptions& opts) {
    if (!(std::isfinite(delta_lo) && std::isfinite(delta_hi) && std::isfinite(eta_lo) &&
          std::isfinite(eta_hi)))
        throw std::invalid_argument("phase_diagram ranges must be finite");
    if (n_delta < 2 || n_eta < 1) throw std::invalid_argument("phase_diagram grid too small");

    std::vector<std::vector<PhasePoint>> lines(n_eta);
    const int hw = opts.threads > 0 ? opts.threads
                                    : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_eta) return;
            const double eta = n_eta == 1
                                   ? eta_lo
                                   : eta_lo + (eta_hi - eta_lo) * double(i) / (n_eta - 1);
            lines[i] = eta_line(p, eta, delta_lo, delta_hi, n_delta, opts.continuation);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min(hw, n_eta); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::vector<PhasePoint> out;
    out.reserve(static_cast<std::size_t>(n_eta) * n_delta);
    for (auto& line : lines)
        for (auto& pt : line) out.push_back(pt);
    return out;
}

namespace {

void default_delta_window(const PhysicalParams& p, CriticalSearchOptions& opts) {
    const double scale = p.n_atoms * p.u0 / 2.0;  // collective light shift of the
                                                  // homogeneous condensate
    if (opts.delta_lo == 0.0 && opts.delta_hi == 0.0) {
        opts.delta_lo = 0.55 * scale;
        opts.delta_hi = 1.10 * scale;
    }
}

}  // namespace

namespace {

struct WindowResult {
    double width = 0.0;
    double mid = 0.0;  // window midpoint, valid when width > 0
};

// up-sweep loses the cooling branch at the upper endpoint, down-sweep the
// heating branch at the lower one
WindowResult bistable_window(const PhysicalParams& p, double eta,
                             const CriticalSearchOptions& opts) {
    PhysicalParams q = p;
    q.eta = eta;
    ContinuationOptions copts = opts.continuation;
    copts.n_steps = opts.n_steps;
    copts.mark_failures = true;

    WindowResult w;
    const Branch up = continue_branch(q, opts.delta_lo, opts.delta_hi, SweepDirection::Up,
                                      Representation::TwoMode, copts);
    const std::vector<double> up_folds = find_turning_points(up);
    if (up_folds.empty()) return w;
    const Branch down = continue_branch(q, opts.delta_lo, opts.delta_hi, SweepDirection::Down,
                                        Representation::TwoMode, copts);
    const std::vector<double> down_folds = find_turning_points(down);
    if (down_folds.empty()) return w;
    const double hi = *std::max_element(up_folds.begin(), up_folds.end());
    const double lo = *std::min_element(down_folds.begin(), down_folds.end());
    if (hi > lo) {
        w.width = hi - lo;
        w.mid = 0.5 * (hi + lo);
    }
    return w;
}

}  // namespace

double bistable_width(const PhysicalParams& p, double eta,
                      const CriticalSearchOptions& opts_in) {
    CriticalSearchOptions opts = opts_in;
    default_delta_window(p, opts);
    return bistable_window(p, eta, opts).width;
}

CriticalPoint find_critical_point(const PhysicalParams& p, double eta_lo, double eta_hi,
                                  const CriticalSearchOptions& opts_in) {
    CriticalSearchOptions opts = opts_in;
    default_delta_window(p, opts);
    if (!(eta_lo >= 0.0 && eta_hi > eta_lo))
        throw std::invalid_argument("eta bracket must satisfy 0 <= eta_lo < eta_hi");

    const WindowResult w_lo = bistable_window(p, eta_lo, opts);
    WindowResult w_hi = bistable_window(p, eta_hi, opts);
    if (w_lo.width > opts.width_tol || w_hi.width <= opts.width_tol)
        throw std::invalid_argument(
            "eta bracket does not straddle the bistability threshold (widths " +
            std::to_string(w_lo.width) + ", " + std::to_string(w_hi.width) + ")");

    double lo = eta_lo, hi = eta_hi;
    WindowResult last_open = w_hi;
    while (hi - lo > opts.eta_tol) {
        const double mid = 0.5 * (lo + hi);
        const WindowResult w = bistable_window(p, mid, opts);
        if (w.width > opts.width_tol) {
            hi = mid;
            last_open = w;
        } else {
            lo = mid;
        }
    }
    return {last_open.mid, 0.5 * (lo + hi)};
}

}  // namespace cavitybec
