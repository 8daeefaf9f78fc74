#include "cavitybec/correlations.hpp"

#include <cmath>
#include <stdexcept>

namespace cavitybec {

namespace {

using Eigen::Matrix2d;
using Eigen::Matrix4cd;
using Eigen::Matrix4d;
using std::complex;

constexpr complex<double> kI{0.0, 1.0};

// u = T R maps (da, da^dag, dc, dc^dag) to (dx, dy, dX, dY)
Matrix4cd quad_transform() {
    Eigen::Matrix2cd t2;
    t2 << 1.0, 1.0, -kI, kI;
    t2 /= std::sqrt(2.0);
    Matrix4cd t = Matrix4cd::Zero();
    t.block<2, 2>(0, 0) = t2;
    t.block<2, 2>(2, 2) = t2;
    return t;
}

Matrix4cd physical_scaling(double n_atoms) {
    Matrix4cd s = Matrix4cd::Identity();
    const double sc = n_atoms >= 1.0 ? std::sqrt(n_atoms) : 1.0;
    s(2, 2) = sc;
    s(3, 3) = sc;
    return s;
}

}  // namespace

OperatorCorrelations steady_correlations(const ModeSet& ms, double kappa) {
    if (!ms.classified)
        throw std::invalid_argument("steady_correlations needs a classified ModeSet");
    if (ms.basis != Representation::TwoMode || ms.size() != 4)
        throw std::invalid_argument(
            "steady_correlations is defined for the two-mode (optomechanical) model");

    const double tol_zero = ms.tol_zero();
    std::vector<int> retained;
    for (int k = 0; k < ms.size(); ++k) {
        if (!ms.photon_coupled[k] || ms.zero_mode[k] || ms.parity_decoupled[k]) continue;
        if (ms.eigenvalues[k].imag() > tol_zero)
            throw std::runtime_error(
                "no steady state exists: a retained mode grows (heating state)");
        retained.push_back(k);
    }

    Matrix4cd g = Matrix4cd::Zero();
    for (int m : retained) {
        const complex<double> lm = std::conj(ms.left_vecs(0, m));
        for (int n : retained) {
            const complex<double> ln = std::conj(ms.left_vecs(1, n));
            const complex<double> denom = kI * (ms.eigenvalues[m] + ms.eigenvalues[n]);
            const complex<double> w = 2.0 * kappa * lm * ln / denom;
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l)
                    g(k, l) += w * ms.right_vecs(k, m) * ms.right_vecs(l, n);
        }
    }
    const Matrix4cd s = physical_scaling(ms.n_atoms);
    OperatorCorrelations oc;
    oc.g = s * g * s;
    if (!oc.g.allFinite())
        throw std::runtime_error("steady correlations are not finite (marginal mode in sum)");
    return oc;
}

QuadCovariance quadrature_covariance(const OperatorCorrelations& oc) {
    const Matrix4cd t = quad_transform();
    const Matrix4cd x = t * oc.g * t.transpose();
    const Matrix4cd sym = 0.5 * (x + x.transpose());
    const double imag_resid = sym.imag().cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, sym.real().cwiseAbs().maxCoeff());
    if (imag_resid > 1e-8 * scale)
        throw std::invalid_argument(
            "operator correlations are inconsistent: residual imaginary part " +
            std::to_string(imag_resid));
    QuadCovariance c;
    c.c = sym.real();
    return c;
}

Eigen::Matrix4d quadrature_drift(const FluctuationMatrix& fm) {
    if (fm.basis != Representation::TwoMode || fm.m.rows() != 4)
        throw std::invalid_argument("quadrature_drift is defined for the two-mode model");
    const Matrix4cd s = physical_scaling(fm.n_atoms);
    const Matrix4cd s_inv = s.inverse();
    const Matrix4cd t = quad_transform();
    const Matrix4cd w = -kI * t * (s * fm.m * s_inv) * t.inverse();
    const double imag_resid = w.imag().cwiseAbs().maxCoeff();
    if (imag_resid > 1e-8 * std::max(1.0, w.real().cwiseAbs().maxCoeff()))
        throw std::invalid_argument("drift matrix violates the C.M.C = -M^* symmetry");
    return w.real();
}

QuadCovariance lyapunov_covariance(const FluctuationMatrix& fm, double kappa) {
    const Matrix4d w = quadrature_drift(fm);

    // exact decoupling: the atomic sector is undriven, report its vacuum
    const double coupling = fm.m.block<2, 2>(0, 2).cwiseAbs().maxCoeff();
    if (coupling == 0.0) {
        const Matrix2d wp = w.block<2, 2>(0, 0);
        // vec equation on the photon block alone
        Eigen::Matrix4d kron = Eigen::Matrix4d::Zero();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                for (int k = 0; k < 2; ++k) {
                    kron(i + 2 * j, k + 2 * j) += wp(i, k);
                    kron(i + 2 * j, i + 2 * k) += wp(j, k);
                }
            }
        Eigen::Vector4d rhs;
        rhs << -kappa, 0.0, 0.0, -kappa;
        const Eigen::Vector4d cp = kron.partialPivLu().solve(rhs);
        QuadCovariance c;
        c.c = 0.5 * Matrix4d::Identity();
        c.c(0, 0) = cp[0];
        c.c(1, 0) = cp[1];
        c.c(0, 1) = cp[2];
        c.c(1, 1) = cp[3];
        c.c.block<2, 2>(0, 0) = 0.5 * (c.photon_block() + c.photon_block().transpose().eval());
        return c;
    }

    const Eigen::EigenSolver<Matrix4d> es(w);
    if (es.eigenvalues().real().maxCoeff() > 0.0)
        throw std::runtime_error("no steady state: drift matrix is unstable");

    Eigen::Matrix<double, 16, 16> a = Eigen::Matrix<double, 16, 16>::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                a(i + 4 * j, k + 4 * j) += w(i, k);  // W C
                a(i + 4 * j, i + 4 * k) += w(j, k);  // C W^T
            }
    Eigen::Matrix<double, 16, 1> d = Eigen::Matrix<double, 16, 1>::Zero();
    d[0] = -kappa;
    d[5] = -kappa;
    const Eigen::Matrix<double, 16, 1> cvec = a.partialPivLu().solve(d);
    QuadCovariance c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c.c(i, j) = cvec[i + 4 * j];
    if (!c.c.allFinite())
        throw std::runtime_error("no steady state: Lyapunov solve is singular");
    c.c = 0.5 * (c.c + c.c.transpose().eval());
    return c;
}

double nonclassical_photon_number(const QuadCovariance& c) {
    return 0.5 * (c.c(0, 0) + c.c(1, 1) - 1.0);
}

double depletion(const QuadCovariance& c) {
    return 0.5 * (c.c(2, 2) + c.c(3, 3) - 1.0);
}

double log_negativity(const QuadCovariance& c) {
    const double det_p = c.photon_block().determinant();
    const double det_a = c.atom_block().determinant();
    const double det_x = c.cross_block().determinant();
    const double det_c = c.c.determinant();
    const double sigma = det_p + det_a - 2.0 * det_x;
    double inner = sigma * sigma - 4.0 * det_c;
    if (inner < 0.0) {
        if (inner < -1e-10)
            throw std::invalid_argument("invalid covariance: Sigma^2 - 4 det C = " +
                                        std::to_string(inner));
        inner = 0.0;  // rounding at a symmetric point
    }
    const double eta_minus = std::sqrt(0.5 * (sigma - std::sqrt(inner)));
    return std::max(0.0, -std::log(2.0 * eta_minus));
}

Eigen::Vector2d symplectic_eigenvalues(const QuadCovariance& c) {
    Matrix4d omega = Matrix4d::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;
    const Eigen::EigenSolver<Matrix4d> es(omega * c.c);
    Eigen::Vector4d im = es.eigenvalues().imag().cwiseAbs();
    std::sort(im.data(), im.data() + 4);
    return Eigen::Vector2d(im[1], im[3]);  // each value appears twice
}

}  // namespace cavitybec
