#include "riqs/gns.hpp"

#include <cmath>

namespace riqs::gns {

GnsSystem build_gns_system(const Matrix& h, double beta, const Tolerances& tols) {
    if (h.rows() != h.cols() || h.rows() < 1) {
        throw std::invalid_argument("build_gns_system: h must be square and non-empty");
    }
    check_finite(h, "build_gns_system");
    if (!is_hermitian(h, tols.hermiticity)) {
        throw std::invalid_argument("build_gns_system: h must be Hermitian");
    }
    if (beta < 0.0) {
        throw std::invalid_argument("build_gns_system: beta must be >= 0");
    }

    GnsSystem sys;
    sys.d = h.rows();
    sys.h = (h + h.adjoint()) / 2.0;
    sys.beta = beta;

    const Index d = sys.d;
    Eigen::SelfAdjointEigenSolver<Matrix> es(sys.h);
    const Eigen::VectorXd energies = es.eigenvalues();
    const Matrix u = es.eigenvectors();

    // Gibbs weights, shifted by the ground energy for stability.
    const double e0 = energies.minCoeff();
    Eigen::VectorXd w(d);
    for (Index i = 0; i < d; ++i) w(i) = std::exp(-beta * (energies(i) - e0) / 2.0);
    const double z = w.squaredNorm();

    sys.omega = Vector::Zero(d * d);
    for (Index i = 0; i < d; ++i) {
        const Vector ui = u.col(i);
        const Vector uic = ui.conjugate();
        for (Index a = 0; a < d; ++a) {
            for (Index b = 0; b < d; ++b) {
                sys.omega(a * d + b) += w(i) / std::sqrt(z) * ui(a) * uic(b);
            }
        }
    }

    const Matrix id = Matrix::Identity(d, d);
    sys.liouvillean = kron(sys.h, id) - kron(id, sys.h.transpose());
    sys.delta_half = expm(-(beta / 2.0) * sys.liouvillean, tols);
    sys.delta_half_inv = expm((beta / 2.0) * sys.liouvillean, tols);

    sys.swap = Matrix::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            sys.swap(j * d + i, i * d + j) = 1.0;
        }
    }

    const double hnorm = op_norm(sys.h);
    if ((sys.liouvillean * sys.omega).norm() > tols.gns_invariance * (1.0 + hnorm)) {
        throw std::runtime_error("build_gns_system: L omega != 0");
    }
    if (std::abs(sys.omega.norm() - 1.0) > 1e-12) {
        throw std::runtime_error("build_gns_system: omega not normalized");
    }
    if ((sys.delta_half * sys.delta_half_inv - Matrix::Identity(d * d, d * d)).norm() > 1e-10) {
        throw std::runtime_error("build_gns_system: Delta^{1/2} Delta^{-1/2} != 1");
    }
    return sys;
}

Matrix left_action(const Matrix& a) {
    return kron(a, Matrix::Identity(a.rows(), a.cols()));
}

Matrix j_conjugate(const Matrix& x, const Matrix& swap) {
    return swap * x.conjugate() * swap;
}

Matrix build_interaction(const std::vector<std::pair<Matrix, Matrix>>& terms,
                         const Tolerances& tols) {
    if (terms.empty()) return Matrix::Zero(0, 0);
    const Index ds = terms.front().first.rows();
    const Index de = terms.front().second.rows();
    Matrix phys = Matrix::Zero(ds * de, ds * de);
    Matrix v = Matrix::Zero(ds * ds * de * de, ds * ds * de * de);
    const Matrix id_s = Matrix::Identity(ds, ds);
    const Matrix id_e = Matrix::Identity(de, de);
    for (const auto& [a, b] : terms) {
        if (a.rows() != ds || a.cols() != ds || b.rows() != de || b.cols() != de) {
            throw std::invalid_argument("build_interaction: inconsistent term dimensions");
        }
        check_finite(a, "build_interaction");
        check_finite(b, "build_interaction");
        phys += kron(a, b);
        v += kron(kron(a, id_s), kron(b, id_e));
    }
    if (!is_hermitian(phys, tols.hermiticity)) {
        throw std::invalid_argument("build_interaction: Sum A_k ⊗ B_k must be Hermitian");
    }
    return v;
}

Vector RepeatedInteractionModel::omega_pair() const {
    Vector out(dim_s() * dim_e());
    for (Index i = 0; i < dim_s(); ++i) {
        for (Index j = 0; j < dim_e(); ++j) {
            out(i * dim_e() + j) = sys_s.omega(i) * sys_e.omega(j);
        }
    }
    return out;
}

CLiouvillean c_liouvillean(const GnsSystem& sys_s, const GnsSystem& sys_e, const Matrix& v,
                           double lambda, const Tolerances& tols) {
    const Index ns = sys_s.d * sys_s.d;
    const Index ne = sys_e.d * sys_e.d;
    const Matrix id_s = Matrix::Identity(ns, ns);
    const Matrix id_e = Matrix::Identity(ne, ne);

    const Matrix l_s = kron(sys_s.liouvillean, id_e);
    const Matrix l_e = kron(id_s, sys_e.liouvillean);
    const Matrix delta_half = kron(sys_s.delta_half, sys_e.delta_half);
    const Matrix delta_half_inv = kron(sys_s.delta_half_inv, sys_e.delta_half_inv);
    const Matrix swap = kron(sys_s.swap, sys_e.swap);

    const Matrix w_raw = delta_half * v * delta_half_inv;
    CLiouvillean out;
    out.w_raw_norm = op_norm(w_raw);
    out.w = -lambda * j_conjugate(w_raw, swap);  // K - L, lives in the commutant
    out.k = l_s + l_e + lambda * v + out.w;
    return out;
}

RepeatedInteractionModel build_model(const GnsSystem& sys_s, const GnsSystem& sys_e,
                                     const std::vector<std::pair<Matrix, Matrix>>& terms,
                                     double lambda, double tau, const Tolerances& tols) {
    if (tau <= 0.0) {
        throw std::invalid_argument("build_model: tau must be > 0");
    }
    RepeatedInteractionModel m;
    m.sys_s = sys_s;
    m.sys_e = sys_e;
    m.terms = terms;
    m.lambda = lambda;
    m.tau = tau;

    const Index ns = m.dim_s();
    const Index ne = m.dim_e();
    m.v_phys = Matrix::Zero(sys_s.d * sys_e.d, sys_s.d * sys_e.d);
    for (const auto& [a, b] : terms) {
        if (a.rows() != sys_s.d || b.rows() != sys_e.d) {
            throw std::invalid_argument("build_model: term dimensions do not match systems");
        }
        m.v_phys += kron(a, b);
    }
    m.v = terms.empty() ? Matrix::Zero(ns * ne, ns * ne) : build_interaction(terms, tols);
    if (!is_hermitian(m.v_phys, tols.hermiticity)) {
        throw std::invalid_argument("build_model: interaction must be Hermitian");
    }

    auto cl = c_liouvillean(sys_s, sys_e, m.v, lambda, tols);
    m.l_total = kron(sys_s.liouvillean, Matrix::Identity(ne, ne)) +
                kron(Matrix::Identity(ns, ns), sys_e.liouvillean) + lambda * m.v;
    m.k_total = std::move(cl.k);
    m.w = std::move(cl.w);
    m.w_raw_norm = cl.w_raw_norm;

    const double budget = 1.0 + op_norm(sys_s.h) + op_norm(sys_e.h) +
                          std::abs(lambda) * op_norm(m.v);
    if ((m.k_total * m.omega_pair()).norm() > tols.k_annihilation * budget) {
        throw std::runtime_error("build_model: K does not annihilate Omega_S ⊗ Omega_E");
    }
    return m;
}

RepeatedInteractionModel build_spin_spin(double e_s, double e_e, double beta_s, double beta_e,
                                         const Matrix& i_mat, double lambda, double tau,
                                         const Tolerances& tols) {
    if (i_mat.rows() != 2 || i_mat.cols() != 2) {
        throw std::invalid_argument("build_spin_spin: I must be 2x2");
    }
    Matrix h_s = Matrix::Zero(2, 2);
    h_s(1, 1) = e_s;
    Matrix h_e = Matrix::Zero(2, 2);
    h_e(1, 1) = e_e;
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;  // annihilation: a phi_2 = phi_1
    const Matrix a_star = a.adjoint();

    auto sys_s = build_gns_system(h_s, beta_s, tols);
    auto sys_e = build_gns_system(h_e, beta_e, tols);
    std::vector<std::pair<Matrix, Matrix>> terms = {{i_mat, a_star}, {i_mat.adjoint(), a}};
    return build_model(sys_s, sys_e, terms, lambda, tau, tols);
}

}  // namespace riqs::gns
