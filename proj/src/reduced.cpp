#include "riqs/reduced.hpp"

#include <cmath>
#include <limits>

namespace riqs::reduced {

namespace {

// Embedding C^{ns} -> C^{ns * ne}, e_c -> e_c ⊗ omega_e.
Matrix omega_embedding(Index ns, const Vector& omega_e) {
    const Index ne = omega_e.size();
    Matrix p = Matrix::Zero(ns * ne, ns);
    for (Index c = 0; c < ns; ++c) {
        p.block(c * ne, c, ne, 1) = omega_e;
    }
    return p;
}

Matrix identity_or(const Matrix& m, Index d) {
    if (m.size() == 0) return Matrix::Identity(d, d);
    if (m.rows() != d || m.cols() != d) {
        throw std::invalid_argument("observable block has wrong dimension");
    }
    return m;
}

}  // namespace

Matrix reduced_propagator(const gns::RepeatedInteractionModel& model, double t,
                          const Tolerances& tols) {
    const Matrix u = expm(Complex(0, t) * model.k_total, tols);
    const Matrix p = omega_embedding(model.dim_s(), model.sys_e.omega);
    return p.adjoint() * u * p;
}

Matrix reduced_map(const gns::RepeatedInteractionModel& model, const Tolerances& tols) {
    return reduced_propagator(model, model.tau, tols);
}

ReducedSpectralData spectral_analysis(const Matrix& m, double tol_circle,
                                      const Vector& omega_s_hint, const Tolerances& tols) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw std::invalid_argument("spectral_analysis: M must be square and non-empty");
    }
    ReducedSpectralData data;
    data.m_matrix = m;

    EigResult es = eig(m, tols);
    data.eigenvalues = es.values;
    const Index n = m.rows();

    // The fixed-point eigenvalue: closest to 1.
    Index i1 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
        const double d = std::abs(es.values(i) - Complex(1.0, 0.0));
        if (d < best) {
            best = d;
            i1 = i;
        }
    }
    if (best > tols.one_equal) {
        throw std::invalid_argument("spectral_analysis: no eigenvalue equal to 1 within " +
                                    std::to_string(tols.one_equal));
    }

    // Ergodicity: 1 must be the only peripheral eigenvalue and simple.
    data.ergodic = true;
    data.gamma = std::numeric_limits<double>::infinity();
    data.subdominant_abs = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (i == i1) continue;
        const Complex z = es.values(i);
        const double az = std::abs(z);
        if (std::abs(z - Complex(1.0, 0.0)) <= tols.one_simple) {
            data.ergodic = false;
            data.not_ergodic_reason = "degenerate-one";
        } else if (az > 1.0 - tol_circle && data.ergodic) {
            data.ergodic = false;
            data.not_ergodic_reason = "peripheral-eigenvalue";
        }
        data.subdominant_abs = std::max(data.subdominant_abs, az);
        data.gamma = std::min(data.gamma, az < 1e-300
                                              ? std::numeric_limits<double>::infinity()
                                              : std::abs(std::log(az)));
    }

    // Fixed vector.
    if (omega_s_hint.size() > 0) {
        if (omega_s_hint.size() != n) {
            throw std::invalid_argument("spectral_analysis: omega_s hint has wrong size");
        }
        if ((m * omega_s_hint - omega_s_hint).norm() > tols.fixed_point) {
            throw std::invalid_argument("spectral_analysis: M omega_s != omega_s for the hint");
        }
        data.omega_s = omega_s_hint;
    } else {
        Vector v = es.right.col(i1);
        Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        v *= std::abs(v(imax)) / v(imax);  // fix the phase
        data.omega_s = v / v.norm();
    }

    // Invariant covector from the null space of (M - 1)^dag; robust also when
    // interior eigenvalues carry Jordan blocks.
    Matrix shifted = m.adjoint() - Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
    Vector w = svd.matrixV().col(n - 1);
    const Complex overlap = w.dot(data.omega_s);
    if (std::abs(overlap) > 1e-12) {
        data.omega_star = w / std::conj(overlap);
    } else {
        data.omega_star = Vector::Zero(n);  // meaningless in the degenerate case
    }
    data.pi_projection = data.omega_s * data.omega_star.adjoint();
    return data;
}

ReducedSpectralData spectral_analysis(const gns::RepeatedInteractionModel& model,
                                      double tol_circle, const Tolerances& tols) {
    return spectral_analysis(reduced_map(model, tols), tol_circle, model.sys_s.omega, tols);
}

Complex asymptotic_expectation(const ReducedSpectralData& data, const Matrix& a_s) {
    data.require_ergodic();
    const auto d = static_cast<Index>(std::llround(std::sqrt(double(data.omega_s.size()))));
    if (d * d != data.omega_s.size() || a_s.rows() != d || a_s.cols() != d) {
        throw std::invalid_argument("asymptotic_expectation: a_s has wrong dimension");
    }
    return data.omega_star.dot(gns::left_action(a_s) * data.omega_s);
}

Matrix asymptotic_density(const ReducedSpectralData& data) {
    data.require_ergodic();
    const auto d = static_cast<Index>(std::llround(std::sqrt(double(data.omega_s.size()))));
    Matrix rho(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            Matrix unit = Matrix::Zero(d, d);
            unit(j, i) = 1.0;  // |j><i|, so Tr(rho |j><i|) = rho(i,j)
            rho(i, j) = asymptotic_expectation(data, unit);
        }
    }
    return rho;
}

Complex rias_expectation(const gns::RepeatedInteractionModel& model,
                         const ReducedSpectralData& data, const InstantObservable& obs,
                         double s, const Tolerances& tols) {
    data.require_ergodic();
    if (!obs.a_probe.empty()) {
        throw std::invalid_argument("rias_expectation: a_probe must be empty");
    }
    const double tau = model.tau;
    s -= std::floor(s / tau) * tau;  // tau-periodic by construction

    const Index ns = model.dim_s();
    const Index ne = model.dim_e();
    const auto ell = static_cast<Index>(obs.b_past.size());

    double log_dim = std::log2(double(ns)) + double(ell + 1) * std::log2(double(ne));
    if (log_dim > 20.0) {
        throw std::invalid_argument("rias_expectation: chain window exceeds 2^20 amplitudes");
    }

    std::vector<Index> dims(static_cast<size_t>(ell + 2), ne);
    dims[0] = ns;
    const FactorShape shape(dims);

    Vector ket(shape.total());
    Vector bra(shape.total());
    {
        // Omega_S ⊗ Omega_E^{⊗(ell+1)} and omega_star ⊗ Omega_E^{⊗(ell+1)}
        Vector chain = Vector::Ones(1);
        for (Index k = 0; k <= ell; ++k) {
            Vector next(chain.size() * ne);
            for (Index i = 0; i < chain.size(); ++i) {
                next.segment(i * ne, ne) = chain(i) * model.sys_e.omega;
            }
            chain = next;
        }
        for (Index i = 0; i < ns; ++i) {
            ket.segment(i * chain.size(), chain.size()) = model.sys_s.omega(i) * chain;
            bra.segment(i * chain.size(), chain.size()) = data.omega_star(i) * chain;
        }
    }

    // U = e^{-i s L_{ell+1}} e^{-i tau L_ell} ... e^{-i tau L_1}, factor-local.
    const Matrix u_tau = expm(Complex(0, -tau) * model.l_total, tols);
    const Matrix u_s = expm(Complex(0, -s) * model.l_total, tols);
    for (Index p = 1; p <= ell; ++p) {
        ket = apply_local(u_tau, ket, shape, {0, p});
        bra = apply_local(u_tau, bra, shape, {0, p});
    }
    ket = apply_local(u_s, ket, shape, {0, ell + 1});
    bra = apply_local(u_s, bra, shape, {0, ell + 1});

    // Observable: A_S on the S factor, past B's freely evolved by their elapsed
    // free time, B_0 as is.
    const Matrix a_s = identity_or(obs.a_s, model.sys_s.d);
    ket = apply_local(gns::left_action(a_s), ket, shape, {0});
    for (Index p = 1; p <= ell; ++p) {
        const Matrix& b = obs.b_past[static_cast<size_t>(p - 1)];
        Matrix bp = identity_or(b, model.sys_e.d);
        const double elapsed = double(ell - p) * tau + s;
        const Matrix rot = expm(Complex(0, elapsed) * model.sys_e.h, tols);
        bp = rot * bp * rot.adjoint();
        ket = apply_local(gns::left_action(bp), ket, shape, {p});
    }
    const Matrix b0 = identity_or(obs.b_zero, model.sys_e.d);
    ket = apply_local(gns::left_action(b0), ket, shape, {ell + 1});

    Complex value = bra.dot(ket);
    for (const Matrix& bj : obs.b_future) {
        const Matrix b = identity_or(bj, model.sys_e.d);
        value *= model.sys_e.omega.dot(gns::left_action(b) * model.sys_e.omega);
    }
    return value;
}

PowerConvergence power_convergence(const ReducedSpectralData& data, int m_max) {
    data.require_ergodic();
    if (m_max < 2) throw std::invalid_argument("power_convergence: m_max must be >= 2");
    PowerConvergence out;
    out.norms.reserve(static_cast<size_t>(m_max));
    Matrix power = data.m_matrix;
    for (int m = 1; m <= m_max; ++m) {
        out.norms.push_back(op_norm(power - data.pi_projection));
        if (m < m_max) power = data.m_matrix * power;
    }
    // Log-linear fit over the last half, ignoring values at rounding level.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int m = m_max / 2; m <= m_max; ++m) {
        const double y = out.norms[static_cast<size_t>(m - 1)];
        if (y < 1e-14) continue;
        const double ly = std::log(y);
        sx += m;
        sy += ly;
        sxx += double(m) * m;
        sxy += m * ly;
        ++count;
    }
    if (count >= 2) {
        const double denom = count * sxx - sx * sx;
        out.fitted_rate = denom != 0.0 ? -(count * sxy - sx * sy) / denom : 0.0;
    }
    return out;
}

double factorization_check(const gns::RepeatedInteractionModel& model, double t1, double t2,
                           const Tolerances& tols) {
    const Index ns = model.dim_s();
    const Index ne = model.dim_e();
    if (double(ns) * ne * ne > double(1 << 16)) {
        throw std::invalid_argument("factorization_check: two-element space exceeds 2^16");
    }
    const FactorShape shape({ns, ne, ne});
    const Matrix u1 = expm(Complex(0, t1) * model.k_total, tols);
    const Matrix u2 = expm(Complex(0, t2) * model.k_total, tols);

    // Omega_E ⊗ Omega_E projection row: contract the chain factors.
    const Vector& oe = model.sys_e.omega;
    Vector oee(ne * ne);
    for (Index i = 0; i < ne; ++i) oee.segment(i * ne, ne) = oe(i) * oe;

    Matrix lhs(ns, ns);
    for (Index c = 0; c < ns; ++c) {
        Vector vec = Vector::Zero(shape.total());
        vec.segment(c * ne * ne, ne * ne) = oee;
        vec = apply_local(u2, vec, shape, {0, 2});
        vec = apply_local(u1, vec, shape, {0, 1});
        Eigen::Map<const Matrix> view(vec.data(), ne * ne, ns);  // column c' = S index
        lhs.col(c) = view.transpose() * oee.conjugate();
    }
    const Matrix m1 = reduced_propagator(model, t1, tols);
    const Matrix m2 = reduced_propagator(model, t2, tols);
    return op_norm(lhs - m1 * m2);
}

double power_bound_check(const gns::RepeatedInteractionModel& model,
                         const std::vector<double>& t_samples, int m_max,
                         const Tolerances& tols) {
    double worst = 0.0;
    for (double t : t_samples) {
        const Matrix mt = reduced_propagator(model, t, tols);
        Matrix power = Matrix::Identity(mt.rows(), mt.cols());
        for (int m = 1; m <= m_max; ++m) {
            power = mt * power;
            worst = std::max(worst, op_norm(power));
        }
    }
    return worst;
}

}  // namespace riqs::reduced
