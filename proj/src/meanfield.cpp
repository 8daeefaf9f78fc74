#include "cavitybec/meanfield.hpp"

#include <algorithm>
#include <cmath>

namespace cavitybec {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using std::complex;

VectorXd two_mode_light_shift_row(double u0) {
    VectorXd r(2);
    r << u0 / 2.0, u0 / (2.0 * std::sqrt(2.0));
    return r;
}

// U_{kl} = <phi_k|U|phi_l> = (u0/2) [[1, 1/sqrt(2)], [1/sqrt(2), 1]]
Eigen::Matrix2d two_mode_light_shift(double u0) {
    Eigen::Matrix2d u;
    const double off = u0 / (2.0 * std::sqrt(2.0));
    u << u0 / 2.0, off, off, u0 / 2.0;
    return u;
}

// tridiagonal L_{nn} = 1/2, L_{n,n+-1} = 1/4
MatrixXd light_shift_band_matrix(int n_max) {
    const int dim = 2 * n_max + 1;
    MatrixXd l = MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        l(i, i) = 0.5;
        if (i + 1 < dim) {
            l(i, i + 1) = 0.25;
            l(i + 1, i) = 0.25;
        }
    }
    return l;
}

VectorXd cos2_potential(int n, double u0) {
    VectorXd u(n);
    const double h = kPi / n;
    for (int j = 0; j < n; ++j) {
        const double c = std::cos(h * j);
        u[j] = u0 * c * c;
    }
    return u;
}

void check_finite(const VectorXd& psi, double residual, const char* where) {
    if (!psi.allFinite()) {
        throw SolveError(std::string(where) + ": NaN/Inf encountered in wavefunction",
                         residual);
    }
}

// s-wave convolution c_n = sum_{n2,n3} beta_{n2+n3-n} beta_{n2} beta_{n3}
VectorXd swave_convolution(const VectorXd& beta, int n_max) {
    const int dim = 2 * n_max + 1;
    VectorXd c = VectorXd::Zero(dim);
    for (int n = -n_max; n <= n_max; ++n) {
        double acc = 0.0;
        for (int n2 = -n_max; n2 <= n_max; ++n2) {
            for (int n3 = -n_max; n3 <= n_max; ++n3) {
                const int n1 = n2 + n3 - n;
                if (n1 < -n_max || n1 > n_max) continue;
                acc += beta[n1 + n_max] * beta[n2 + n_max] * beta[n3 + n_max];
            }
        }
        c[n + n_max] = acc;
    }
    return c;
}

double cavity_energy_term(const PhysicalParams& p, double mean_u) {
    if (p.eta == 0.0) return 0.0;
    return p.eta * p.eta / (p.n_atoms * p.kappa) *
           std::atan((p.n_atoms * mean_u - p.delta_c) / p.kappa);
}

}  // namespace

std::complex<double> cavity_steady_field(const PhysicalParams& p, double mean_u) {
    const complex<double> denom(p.delta_c - p.n_atoms * mean_u, p.kappa);
    return complex<double>(0.0, p.eta) / denom;
}

double light_shift_expectation(const MeanFieldState& state, double u0) {
    switch (state.representation) {
        case Representation::Grid: {
            const int n = static_cast<int>(state.psi.size());
            const double h = kPi / n;
            const VectorXd u = cos2_potential(n, u0);
            return h * (u.array() * state.psi.array().square()).sum();
        }
        case Representation::Fourier: {
            const int n_max = (static_cast<int>(state.psi.size()) - 1) / 2;
            const MatrixXd l = light_shift_band_matrix(n_max);
            return u0 * state.psi.dot(l * state.psi);
        }
        case Representation::TwoMode:
            return (u0 / 2.0) * (1.0 + std::sqrt(2.0) * state.psi[0] * state.psi[1]);
    }
    throw std::logic_error("unknown representation");
}

Eigen::MatrixXd spectral_laplacian(int n) {
    // circulant built from the exact symbol (2m)^2 of -d^2/dx^2 on period pi
    VectorXd first(n);
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int m = 1; m < n / 2; ++m) {
            s += 2.0 * (2.0 * m) * (2.0 * m) * std::cos(2.0 * kPi * m * r / n);
        }
        s += double(n) * double(n) * ((r % 2 == 0) ? 1.0 : -1.0);  // Nyquist
        first[r] = s / n;
    }
    MatrixXd d(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) d(j, l) = first[(j - l + n) % n];
    return 0.5 * (d + d.transpose());
}

double gp_energy(const MeanFieldState& state, const PhysicalParams& p,
                 const Eigen::VectorXd& v_ext) {
    const double mean_u = light_shift_expectation(state, p.u0);
    switch (state.representation) {
        case Representation::Grid: {
            const int n = static_cast<int>(state.psi.size());
            const double h = kPi / n;
            const MatrixXd d = spectral_laplacian(n);
            double e = h * state.psi.dot(d * state.psi);
            if (v_ext.size() > 0)
                e += h * (v_ext.array() * state.psi.array().square()).sum();
            e += 0.5 * kPi * p.g_coll * h * state.psi.array().pow(4).sum();
            return e + cavity_energy_term(p, mean_u);
        }
        case Representation::Fourier: {
            const int n_max = (static_cast<int>(state.psi.size()) - 1) / 2;
            double e = 0.0;
            for (int m = -n_max; m <= n_max; ++m)
                e += 4.0 * m * m * state.psi[m + n_max] * state.psi[m + n_max];
            e += 0.5 * p.g_coll * state.psi.dot(swave_convolution(state.psi, n_max));
            return e + cavity_energy_term(p, mean_u);
        }
        case Representation::TwoMode:
            return 4.0 * state.psi[1] * state.psi[1] + cavity_energy_term(p, mean_u);
    }
    throw std::logic_error("unknown representation");
}

namespace {

// Shared imaginary-time driver. The step callback maps psi -> psi' given the
// current self-consistent cavity amplitude; fixed points of the normalized map
// are exact stationary states, independent of dtau.
template <typename MeanU, typename Mu, typename Step, typename Normalize>
MeanFieldState relax(Representation rep, VectorXd psi, const PhysicalParams& p,
                     const SolverOptions& opts, MeanU mean_u_of, Mu mu_of, Step step,
                     Normalize normalize, const Eigen::VectorXd& v_ext) {
    normalize(psi);
    MeanFieldState st;
    st.representation = rep;
    double residual = std::numeric_limits<double>::infinity();
    for (long it = 0; it < opts.max_iters; ++it) {
        const double mean_u = mean_u_of(psi);
        const complex<double> alpha = cavity_steady_field(p, mean_u);
        const double asq = std::norm(alpha);
        const double mu = mu_of(psi, asq);
        VectorXd next = step(psi, asq, mu);
        normalize(next);
        residual = (next - psi).cwiseAbs().maxCoeff() / opts.dtau;
        if (!std::isfinite(residual)) check_finite(next, residual, "solver");
        psi = std::move(next);
        if (opts.energy_trace) {
            st.psi = psi;
            opts.energy_trace->push_back(gp_energy(st, p, v_ext));
        }
        if (residual < opts.tol_residual) {
            // self-consistency of the eliminated field at the new state
            const double mu_new = mean_u_of(psi);
            const complex<double> a_new = cavity_steady_field(p, mu_new);
            if (std::abs(a_new - alpha) <= opts.tol_alpha * std::max(1.0, std::abs(a_new))) {
                st.psi = psi;
                st.mean_u = mu_new;
                st.alpha_ss = a_new;
                st.mu = mu_of(psi, std::norm(a_new));
                st.converged = true;
                st.residual = residual;
                return st;
            }
        }
    }
    throw SolveError("imaginary-time propagation did not converge, last residual " +
                         std::to_string(residual),
                     residual);
}

}  // namespace

MeanFieldState solve_gpe_grid(const PhysicalParams& p, const GridConfig& grid,
                              const Eigen::VectorXd& v_ext,
                              const std::optional<MeanFieldState>& init,
                              const SolverOptions& opts) {
    validate(p);
    validate(grid);
    const int n = grid.n_points;
    const double h = kPi / n;
    if (v_ext.size() > 0 && v_ext.size() != n)
        throw std::invalid_argument("v_ext size does not match n_points");

    const VectorXd u = cos2_potential(n, p.u0);
    const VectorXd vx = v_ext.size() > 0 ? v_ext : VectorXd::Zero(n);
    const MatrixXd lap = spectral_laplacian(n);
    // kinetic part handled implicitly: psi <- (I + dtau T)^{-1} psi
    const MatrixXd kin_inv =
        (MatrixXd::Identity(n, n) + opts.dtau * lap).ldlt().solve(MatrixXd::Identity(n, n));

    VectorXd psi = init ? grid_samples(*init, n) : VectorXd::Constant(n, 1.0 / std::sqrt(kPi));

    auto mean_u_of = [&](const VectorXd& f) {
        return h * (u.array() * f.array().square()).sum();
    };
    auto mu_of = [&](const VectorXd& f, double asq) {
        const auto pot = vx.array() + asq * u.array() + kPi * p.g_coll * f.array().square();
        return h * f.dot(lap * f) + h * (pot * f.array().square()).sum();
    };
    auto step = [&](const VectorXd& f, double asq, double mu) {
        const auto pot = vx.array() + asq * u.array() + kPi * p.g_coll * f.array().square();
        VectorXd half = f.array() - opts.dtau * (pot - mu) * f.array();
        return VectorXd(kin_inv * half);
    };
    auto normalize = [&](VectorXd& f) {
        f /= std::sqrt(h * f.squaredNorm());
        if (f.sum() < 0.0) f = -f;
    };
    return relax(Representation::Grid, std::move(psi), p, opts, mean_u_of, mu_of, step,
                 normalize, vx);
}

MeanFieldState solve_gpe_fourier(const PhysicalParams& p, int n_max,
                                 const std::optional<MeanFieldState>& init,
                                 const SolverOptions& opts) {
    validate(p);
    if (n_max < 1) throw std::invalid_argument("n_fourier must be at least 1");
    const int dim = 2 * n_max + 1;
    const MatrixXd l = light_shift_band_matrix(n_max);
    VectorXd kin(dim);
    for (int m = -n_max; m <= n_max; ++m) kin[m + n_max] = 4.0 * m * m;

    VectorXd beta;
    if (init) {
        beta = fourier_amplitudes(*init, n_max);
    } else {
        beta = VectorXd::Zero(dim);
        beta[n_max] = 1.0;
    }

    auto mean_u_of = [&](const VectorXd& b) { return p.u0 * b.dot(l * b); };
    auto mu_of = [&](const VectorXd& b, double asq) {
        double mu = kin.dot(b.cwiseAbs2()) + asq * p.u0 * b.dot(l * b);
        if (p.g_coll != 0.0) mu += p.g_coll * b.dot(swave_convolution(b, n_max));
        return mu;
    };
    auto step = [&](const VectorXd& b, double asq, double mu) {
        VectorXd rhs = asq * p.u0 * (l * b) - mu * b;
        if (p.g_coll != 0.0) rhs += p.g_coll * swave_convolution(b, n_max);
        VectorXd half = b - opts.dtau * rhs;
        return VectorXd(half.array() / (1.0 + opts.dtau * kin.array()));
    };
    auto normalize = [&](VectorXd& b) {
        b /= b.norm();
        if (b[n_max] < 0.0) b = -b;
    };
    return relax(Representation::Fourier, std::move(beta), p, opts, mean_u_of, mu_of, step,
                 normalize, {});
}

MeanFieldState solve_two_mode(const PhysicalParams& p,
                              const std::optional<MeanFieldState>& init,
                              const SolverOptions& opts) {
    validate(p);
    const Eigen::Matrix2d u = two_mode_light_shift(p.u0);
    const Eigen::Vector2d kin(0.0, 4.0);

    VectorXd beta(2);
    if (init) {
        const VectorXd full = fourier_amplitudes(*init, 1);
        beta << full[1], (full[0] + full[2]) / std::sqrt(2.0);
        beta /= beta.norm();
    } else {
        beta << 1.0, 0.0;
    }

    auto mean_u_of = [&](const VectorXd& b) {
        return (p.u0 / 2.0) * (1.0 + std::sqrt(2.0) * b[0] * b[1]);
    };
    auto mu_of = [&](const VectorXd& b, double asq) {
        return kin.dot(b.cwiseAbs2()) + asq * b.dot(u * b);
    };
    auto step = [&](const VectorXd& b, double asq, double mu) {
        VectorXd rhs = asq * (u * b) - mu * b;
        VectorXd half = b - opts.dtau * rhs;
        return VectorXd(half.array() / (1.0 + opts.dtau * kin.array()));
    };
    auto normalize = [&](VectorXd& b) {
        b /= b.norm();
        if (b[0] < 0.0) b = -b;
    };
    return relax(Representation::TwoMode, std::move(beta), p, opts, mean_u_of, mu_of, step,
                 normalize, {});
}

Eigen::VectorXd fourier_amplitudes(const MeanFieldState& state, int n_max) {
    const int dim = 2 * n_max + 1;
    VectorXd beta = VectorXd::Zero(dim);
    switch (state.representation) {
        case Representation::Fourier: {
            const int have = (static_cast<int>(state.psi.size()) - 1) / 2;
            for (int m = -std::min(have, n_max); m <= std::min(have, n_max); ++m)
                beta[m + n_max] = state.psi[m + have];
            break;
        }
        case Representation::TwoMode: {
            beta[n_max] = state.psi[0];
            if (n_max >= 1) {
                beta[n_max + 1] = state.psi[1] / std::sqrt(2.0);
                beta[n_max - 1] = state.psi[1] / std::sqrt(2.0);
            }
            break;
        }
        case Representation::Grid: {
            const int n = static_cast<int>(state.psi.size());
            const double h = kPi / n;
            for (int m = -n_max; m <= n_max; ++m) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j)
                    acc += state.psi[j] * std::cos(2.0 * m * h * j);
                beta[m + n_max] = h / std::sqrt(kPi) * acc;
            }
            break;
        }
    }
    return beta;
}

Eigen::VectorXd grid_samples(const MeanFieldState& state, int n) {
    const double h = kPi / n;
    if (state.representation == Representation::Grid && state.psi.size() == n)
        return state.psi;
    VectorXd psi(n);
    if (state.representation == Representation::Grid) {
        // resample through the band representation
        MeanFieldState tmp = state;
        const int n_src = static_cast<int>(state.psi.size());
        tmp.psi = fourier_amplitudes(state, n_src / 2 - 1);
        tmp.representation = Representation::Fourier;
        return grid_samples(tmp, n);
    }
    const VectorXd beta = fourier_amplitudes(state, state.representation == Representation::TwoMode
                                                        ? 1
                                                        : (static_cast<int>(state.psi.size()) - 1) / 2);
    const int n_max = (static_cast<int>(beta.size()) - 1) / 2;
    for (int j = 0; j < n; ++j) {
        double v = beta[n_max];
        for (int m = 1; m <= n_max; ++m)
            v += (beta[n_max + m] + beta[n_max - m]) * std::cos(2.0 * m * h * j);
        psi[j] = v / std::sqrt(kPi);
    }
    const double norm = std::sqrt(h * psi.squaredNorm());
    if (norm > 0.0) psi /= norm;
    return psi;
}

double photon_number(const MeanFieldState& state) { return std::norm(state.alpha_ss); }

namespace {

MeanFieldState solve_in(Representation rep, const PhysicalParams& p, const GridConfig& grid,
                        const std::optional<MeanFieldState>& init, const SolverOptions& opts) {
    switch (rep) {
        case Representation::Grid:
            return solve_gpe_grid(p, grid, {}, init, opts);
        case Representation::Fourier:
            return solve_gpe_fourier(p, grid.n_fourier, init, opts);
        case Representation::TwoMode:
            return solve_two_mode(p, init, opts);
    }
    throw std::logic_error("unknown representation");
}

// One continuation move delta_from -> delta_to, recursively halving the step
// on failure (folds cause critical slowing down).
MeanFieldState advance(Representation rep, const PhysicalParams& base, const GridConfig& grid,
                       double delta_from, double delta_to,
                       const std::optional<MeanFieldState>& warm, const SolverOptions& solver,
                       int retries) {
    PhysicalParams p = base;
    p.delta_c = delta_to;
    try {
        return solve_in(rep, p, grid, warm, solver);
    } catch (const SolveError&) {
        if (retries <= 0) throw;
        const double mid = 0.5 * (delta_from + delta_to);
        MeanFieldState half =
            advance(rep, base, grid, delta_from, mid, warm, solver, retries - 1);
        return advance(rep, base, grid, mid, delta_to, half, solver, retries - 1);
    }
}

}  // namespace

Branch continue_branch(const PhysicalParams& p, double delta_lo, double delta_hi,
                       SweepDirection direction, Representation rep,
                       const ContinuationOptions& opts, const GridConfig& grid) {
    validate(p);
    if (!(std::isfinite(delta_lo) && std::isfinite(delta_hi)) || delta_lo >= delta_hi)
        throw std::invalid_argument("delta range must be finite with delta_lo < delta_hi");
    if (opts.n_steps < 2) throw std::invalid_argument("continuation needs at least 2 steps");

    Branch br;
    br.base = p;
    br.representation = rep;
    br.grid = grid;
    br.direction = direction;
    br.jump_threshold = opts.jump_threshold;

    std::optional<MeanFieldState> warm;
    double prev_delta = 0.0;
    for (int i = 0; i < opts.n_steps; ++i) {
        const int idx = direction == SweepDirection::Up ? i : opts.n_steps - 1 - i;
        const double d = linspace_point(delta_lo, delta_hi, opts.n_steps, idx);
        try {
            MeanFieldState st = warm ? advance(rep, p, grid, prev_delta, d, warm, opts.solver,
                                               opts.fold_retries)
                                     : advance(rep, p, grid, d, d, warm, opts.solver, 0);
            if (!br.points.empty()) {
                const double n_prev = photon_number(br.points.back().state);
                const double n_cur = photon_number(st);
                const double gap = std::abs(n_cur - n_prev) / std::max(n_prev, n_cur);
                if (gap > opts.jump_threshold) br.jump_after.push_back(br.points.size() - 1);
            }
            warm = st;
            prev_delta = d;
            br.points.push_back({d, std::move(st)});
        } catch (const SolveError& e) {
            if (!opts.mark_failures)
                throw SolveError("continuation failed at delta_c=" + std::to_string(d) + ": " +
                                     e.what(),
                                 e.residual());
            br.failures.push_back({d, e.what()});
        }
    }
    return br;
}

}  // namespace cavitybec
