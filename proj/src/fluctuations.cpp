#include "cavitybec/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cavitybec {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using std::complex;

int swap_index(int i, int n_atomic, Representation basis) {
    if (i == 0) return 1;
    if (i == 1) return 0;
    const int n = basis == Representation::TwoMode ? 1 : n_atomic;
    return i < 2 + n ? i + n : i - n;
}

// physical rescaling da -> da, dc~ -> sqrt(N) dc~; balances the coupling
// blocks before eigendecomposition
VectorXd balance_scales(const FluctuationMatrix& fm) {
    const int dim = static_cast<int>(fm.m.rows());
    const double sc = fm.n_atoms >= 1.0 ? std::sqrt(fm.n_atoms) : 1.0;
    VectorXd s = VectorXd::Constant(dim, sc);
    s[0] = s[1] = 1.0;
    return s;
}

struct EigPieces {
    VectorXcd w;
    MatrixXcd right;
    MatrixXcd left;
};

// dense eigensystem with biorthonormal left vectors from the inverse of the
// right-eigenvector matrix
EigPieces eig_biorthogonal(const MatrixXcd& m, double biorth_tol) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed to converge");
    EigPieces out;
    out.w = es.eigenvalues();
    out.right = es.eigenvectors();
    Eigen::PartialPivLU<MatrixXcd> lu(out.right);
    out.left = lu.inverse().adjoint();

    const MatrixXcd gram = out.left.adjoint() * out.right;
    const double resid =
        (gram - MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (resid > biorth_tol) {
        // report the tightest eigenvalue cluster; a defective matrix shows up
        // as an unresolvable near-degeneracy
        double best = std::numeric_limits<double>::infinity();
        complex<double> w1 = 0, w2 = 0;
        for (int i = 0; i < out.w.size(); ++i)
            for (int j = i + 1; j < out.w.size(); ++j) {
                const double d = std::abs(out.w[i] - out.w[j]);
                if (d < best) {
                    best = d;
                    w1 = out.w[i];
                    w2 = out.w[j];
                }
            }
        std::ostringstream msg;
        msg << "biorthogonalization failed (residual " << resid
            << "), near-degenerate cluster around omega = " << w1 << " and " << w2;
        throw std::runtime_error(msg.str());
    }
    return out;
}

std::vector<int> match_pairs(const VectorXcd& w) {
    const int m = static_cast<int>(w.size());
    std::vector<int> pair(m, -1);
    for (int k = 0; k < m; ++k) {
        const complex<double> target = -std::conj(w[k]);
        double best = std::numeric_limits<double>::infinity();
        int arg = k;
        for (int l = 0; l < m; ++l) {
            const double d = std::abs(w[l] - target);
            if (d < best) {
                best = d;
                arg = l;
            }
        }
        pair[k] = arg;
    }
    return pair;
}

}  // namespace

FluctuationMatrix build_matrix_grid(const MeanFieldState& state, const PhysicalParams& p,
                                    const GridConfig& grid, const Eigen::VectorXd& v_ext) {
    if (state.representation != Representation::Grid)
        throw std::invalid_argument("build_matrix_grid needs a grid-representation state");
    if (!state.converged) throw std::invalid_argument("state is not converged");
    const int n = grid.n_points;
    if (state.psi.size() != n) throw std::invalid_argument("state/grid size mismatch");
    if (v_ext.size() > 0 && v_ext.size() != n)
        throw std::invalid_argument("v_ext size does not match n_points");

    const double h = kPi / n;
    const VectorXd vx = v_ext.size() > 0 ? v_ext : VectorXd::Zero(n);
    VectorXd u(n);
    for (int j = 0; j < n; ++j) {
        const double c = std::cos(h * j);
        u[j] = p.u0 * c * c;
    }
    const double asq = std::norm(state.alpha_ss);
    const complex<double> alpha = state.alpha_ss;
    const double delta = p.delta_c - p.n_atoms * state.mean_u;

    const MatrixXd lap = spectral_laplacian(n);
    const VectorXd gnl = kPi * p.g_coll * state.psi.array().square();
    MatrixXd h0 = lap;
    h0.diagonal() += vx + asq * u - VectorXd::Constant(n, state.mu) + gnl;

    const int dim = 2 * n + 2;
    FluctuationMatrix fm;
    fm.basis = Representation::Grid;
    fm.n_atomic = n;
    fm.n_atoms = p.n_atoms;
    fm.kappa = p.kappa;
    fm.m = MatrixXcd::Zero(dim, dim);

    fm.m(0, 0) = complex<double>(-delta, -p.kappa);
    fm.m(1, 1) = complex<double>(delta, -p.kappa);

    // X integral functional discretized with the quadrature weights h
    const VectorXd xrow = h * (state.psi.array() * u.array());
    const VectorXd y = u.array() * state.psi.array();
    for (int j = 0; j < n; ++j) {
        fm.m(0, 2 + j) = p.n_atoms * alpha * xrow[j];
        fm.m(0, 2 + n + j) = p.n_atoms * alpha * xrow[j];
        fm.m(1, 2 + j) = -p.n_atoms * std::conj(alpha) * xrow[j];
        fm.m(1, 2 + n + j) = -p.n_atoms * std::conj(alpha) * xrow[j];
        fm.m(2 + j, 0) = std::conj(alpha) * y[j];
        fm.m(2 + j, 1) = alpha * y[j];
        fm.m(2 + n + j, 0) = -std::conj(alpha) * y[j];
        fm.m(2 + n + j, 1) = -alpha * y[j];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            fm.m(2 + i, 2 + j) = h0(i, j);
            fm.m(2 + n + i, 2 + n + j) = -h0(i, j);
        }
        fm.m(2 + i, 2 + i) += gnl[i];
        fm.m(2 + i, 2 + n + i) = gnl[i];
        fm.m(2 + n + i, 2 + i) = -gnl[i];
        fm.m(2 + n + i, 2 + n + i) -= gnl[i];
    }

    bool even = true;
    for (int j = 1; j < n && even; ++j) {
        const int jr = n - j;
        if (std::abs(state.psi[j] - state.psi[jr]) > 1e-8 ||
            std::abs(vx[j] - vx[jr]) > 1e-12 * std::max(1.0, vx.cwiseAbs().maxCoeff()))
            even = false;
    }
    fm.parity_symmetric = even;
    return fm;
}

FluctuationMatrix build_matrix_two_mode(const MeanFieldState& state, const PhysicalParams& p) {
    if (state.representation != Representation::TwoMode)
        throw std::invalid_argument("build_matrix_two_mode needs a two-mode state");
    if (!state.converged) throw std::invalid_argument("state is not converged");

    const Eigen::Vector2d beta(state.psi[0], state.psi[1]);
    const Eigen::Vector2d gamma(-beta[1], beta[0]);  // orthogonal to the condensate
    Eigen::Matrix2d u;
    const double off = p.u0 / (2.0 * std::sqrt(2.0));
    u << p.u0 / 2.0, off, off, p.u0 / 2.0;

    const double asq = std::norm(state.alpha_ss);
    Eigen::Matrix2d k = asq * u;
    k(1, 1) += 4.0;
    k -= state.mu * Eigen::Matrix2d::Identity();

    const double delta = p.delta_c - p.n_atoms * state.mean_u;
    const double cpl = beta.dot(u * gamma);  // (beta U gamma), real
    const double gkg = gamma.dot(k * gamma);
    const complex<double> alpha = state.alpha_ss;

    FluctuationMatrix fm;
    fm.basis = Representation::TwoMode;
    fm.n_atomic = 1;
    fm.n_atoms = p.n_atoms;
    fm.kappa = p.kappa;
    fm.m = MatrixXcd::Zero(4, 4);
    fm.m(0, 0) = complex<double>(-delta, -p.kappa);
    fm.m(0, 2) = p.n_atoms * alpha * cpl;
    fm.m(0, 3) = p.n_atoms * alpha * cpl;
    fm.m(1, 1) = complex<double>(delta, -p.kappa);
    fm.m(1, 2) = -p.n_atoms * std::conj(alpha) * cpl;
    fm.m(1, 3) = -p.n_atoms * std::conj(alpha) * cpl;
    fm.m(2, 0) = std::conj(alpha) * cpl;
    fm.m(2, 1) = alpha * cpl;
    fm.m(2, 2) = gkg;
    fm.m(3, 0) = -std::conj(alpha) * cpl;
    fm.m(3, 1) = -alpha * cpl;
    fm.m(3, 3) = -gkg;
    return fm;
}

double symmetry_residual(const FluctuationMatrix& fm) {
    const int dim = static_cast<int>(fm.m.rows());
    double worst = 0.0;
    for (int i = 0; i < dim; ++i) {
        const int si = swap_index(i, fm.n_atomic, fm.basis);
        for (int j = 0; j < dim; ++j) {
            const int sj = swap_index(j, fm.n_atomic, fm.basis);
            worst = std::max(worst, std::abs(fm.m(si, sj) + std::conj(fm.m(i, j))));
        }
    }
    return worst;
}

double ModeSet::tol_zero() const {
    return 1e-8 * eigenvalues.cwiseAbs().maxCoeff();
}

ModeSet eigendecompose(const FluctuationMatrix& fm, const EigenOptions& opts) {
    if (!fm.m.allFinite()) throw std::invalid_argument("fluctuation matrix is not finite");
    const int dim = static_cast<int>(fm.m.rows());
    const VectorXd s = balance_scales(fm);
    const MatrixXcd m_bal =
        s.asDiagonal() * fm.m * s.cwiseInverse().asDiagonal();

    ModeSet ms;
    ms.basis = fm.basis;
    ms.n_atomic = fm.n_atomic;
    ms.n_atoms = fm.n_atoms;
    ms.kappa = fm.kappa;

    const bool split = fm.basis == Representation::Grid && fm.parity_symmetric &&
                       !opts.force_full;
    if (!split) {
        EigPieces e = eig_biorthogonal(m_bal, opts.biorth_tol);
        ms.eigenvalues = e.w;
        ms.right_vecs = s.cwiseInverse().asDiagonal() * e.right;
        ms.left_vecs = s.asDiagonal() * e.left;
        ms.parity.assign(dim, ModeParity::Unknown);
    } else {
        const int n = fm.n_atomic;
        const int n_even = n / 2 + 1;
        const int n_odd = n / 2 - 1;
        // orthonormal parity combinations of the grid points, applied to both
        // the dPsi~ and dPsi~^dag blocks
        MatrixXd be = MatrixXd::Zero(dim, 2 + 2 * n_even);
        be(0, 0) = 1.0;
        be(1, 1) = 1.0;
        auto fill_even = [&](MatrixXd& b, int row0, int col0) {
            int c = col0;
            b(row0 + 0, c++) = 1.0;
            for (int j = 1; j < n / 2; ++j) {
                b(row0 + j, c) = 1.0 / std::sqrt(2.0);
                b(row0 + n - j, c) = 1.0 / std::sqrt(2.0);
                ++c;
            }
            b(row0 + n / 2, c) = 1.0;
        };
        fill_even(be, 2, 2);
        fill_even(be, 2 + n, 2 + n_even);

        MatrixXcd m_even = be.transpose() * m_bal * be;
        EigPieces ee = eig_biorthogonal(m_even, opts.biorth_tol);

        std::vector<VectorXcd> rights, lefts;
        std::vector<complex<double>> ws;
        std::vector<ModeParity> pars;
        for (int k = 0; k < ee.w.size(); ++k) {
            ws.push_back(ee.w[k]);
            rights.emplace_back(be * ee.right.col(k));
            lefts.emplace_back(be * ee.left.col(k));
            pars.push_back(ModeParity::Even);
        }

        if (opts.include_odd_modes && n_odd > 0) {
            MatrixXd bo = MatrixXd::Zero(dim, 2 * n_odd);
            auto fill_odd = [&](MatrixXd& b, int row0, int col0) {
                int c = col0;
                for (int j = 1; j < n / 2; ++j) {
                    b(row0 + j, c) = 1.0 / std::sqrt(2.0);
                    b(row0 + n - j, c) = -1.0 / std::sqrt(2.0);
                    ++c;
                }
            };
            fill_odd(bo, 2, 0);
            fill_odd(bo, 2 + n, n_odd);
            MatrixXcd m_odd = bo.transpose() * m_bal * bo;
            EigPieces eo = eig_biorthogonal(m_odd, opts.biorth_tol);
            for (int k = 0; k < eo.w.size(); ++k) {
                ws.push_back(eo.w[k]);
                rights.emplace_back(bo * eo.right.col(k));
                lefts.emplace_back(bo * eo.left.col(k));
                pars.push_back(ModeParity::Odd);
            }
        }

        const int m = static_cast<int>(ws.size());
        ms.eigenvalues.resize(m);
        ms.right_vecs.resize(dim, m);
        ms.left_vecs.resize(dim, m);
        for (int k = 0; k < m; ++k) {
            ms.eigenvalues[k] = ws[k];
            ms.right_vecs.col(k) = s.cwiseInverse().asDiagonal() * rights[k];
            ms.left_vecs.col(k) = s.asDiagonal() * lefts[k];
        }
        ms.parity = std::move(pars);
    }

    ms.pair_index = match_pairs(ms.eigenvalues);
    const int m = ms.size();
    ms.zero_mode.assign(m, false);
    ms.photon_coupled.assign(m, false);
    ms.parity_decoupled.assign(m, false);
    ms.unstable.assign(m, false);
    return ms;
}

ModeSet classify_modes(ModeSet ms, const FluctuationMatrix& fm) {
    const double tol_zero = ms.tol_zero();
    const int n = fm.n_atomic;
    for (int k = 0; k < ms.size(); ++k) {
        const double lnorm = ms.left_vecs.col(k).norm();
        const double weight = std::sqrt(std::norm(ms.left_vecs(0, k)) +
                                        std::norm(ms.left_vecs(1, k)));
        ms.photon_coupled[k] = weight > 1e-8 * lnorm;
        ms.zero_mode[k] =
            std::abs(ms.eigenvalues[k]) < tol_zero && weight < 1e-3 * lnorm;
        ms.unstable[k] = ms.eigenvalues[k].imag() > tol_zero;

        if (ms.parity[k] == ModeParity::Unknown && fm.basis == Representation::Grid &&
            fm.parity_symmetric) {
            // parity score of the atomic components under x -> -x
            double odd2 = 0.0, tot2 = 0.0;
            for (int block = 0; block < 2; ++block) {
                const int off = 2 + block * n;
                for (int j = 0; j < n; ++j) {
                    const std::complex<double> a = ms.right_vecs(off + j, k);
                    const std::complex<double> b = ms.right_vecs(off + (n - j) % n, k);
                    odd2 += std::norm(a + b);
                    tot2 += 2.0 * std::norm(a);
                }
            }
            if (tot2 > 0.0)
                ms.parity[k] = odd2 < 1e-16 * tot2 ? ModeParity::Odd : ModeParity::Even;
        }
        ms.parity_decoupled[k] = ms.parity[k] == ModeParity::Odd;
    }
    ms.classified = true;
    return ms;
}

StabilityClass stability(const ModeSet& ms) {
    if (!ms.classified) throw std::invalid_argument("stability needs a classified ModeSet");
    const double tol_zero = ms.tol_zero();
    for (int k = 0; k < ms.size(); ++k) {
        if (ms.photon_coupled[k] && !ms.zero_mode[k] &&
            ms.eigenvalues[k].imag() > tol_zero)
            return StabilityClass::Heating;
    }
    return StabilityClass::Cooling;
}

}  // namespace cavitybec
