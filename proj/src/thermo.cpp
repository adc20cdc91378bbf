#include "riqs/thermo.hpp"

#include <cmath>

namespace riqs::thermo {

namespace {

Matrix compress(const Matrix& x, Index ns, const Vector& omega_e) {
    const Index ne = omega_e.size();
    Matrix p = Matrix::Zero(ns * ne, ns);
    for (Index c = 0; c < ns; ++c) p.block(c * ne, c, ne, 1) = omega_e;
    return p.adjoint() * x * p;
}

// Simpson integral of s -> compress(e^{isL} C e^{-isL}) over [0, tau].
Matrix simpson_flux(const Matrix& c, const Eigen::SelfAdjointEigenSolver<Matrix>& es,
                    double tau, int n_panels, Index ns, const Vector& omega_e) {
    const Matrix c_eig = es.eigenvectors().adjoint() * c * es.eigenvectors();
    const Eigen::VectorXd d = es.eigenvalues();
    Matrix acc = Matrix::Zero(ns, ns);
    const double h = tau / n_panels;
    for (int k = 0; k <= n_panels; ++k) {
        const double s = k * h;
        const double w = (k == 0 || k == n_panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        Matrix x = c_eig;
        for (Index i = 0; i < x.rows(); ++i) {
            for (Index j = 0; j < x.cols(); ++j) {
                x(i, j) *= std::exp(Complex(0, s * (d(i) - d(j))));
            }
        }
        acc += w * compress(es.eigenvectors() * x * es.eigenvectors().adjoint(), ns, omega_e);
    }
    return (h / 3.0) * acc;
}

}  // namespace

ThermoReport j_plus_forms(const gns::RepeatedInteractionModel& model, const Tolerances& tols) {
    const Index ns = model.dim_s();
    const Vector& oe = model.sys_e.omega;
    const Matrix v_scaled = model.lambda * model.v;

    ThermoReport rep;
    const Matrix u_tau = expm(Complex(0, model.tau) * model.l_total, tols);
    rep.j_plus_op = compress(v_scaled, ns, oe) -
                    compress(u_tau * v_scaled * u_tau.adjoint(), ns, oe);

    // Commutator-integral form: -i ∫_0^tau P alpha^s([L_S+L_E, lambda V]) P ds.
    const Matrix l_free = model.l_total - v_scaled;
    const Matrix comm = l_free * v_scaled - v_scaled * l_free;
    Eigen::SelfAdjointEigenSolver<Matrix> es(model.l_total);
    const Matrix form_b_400 =
        Complex(0, -1) * simpson_flux(comm, es, model.tau, 400, ns, oe);
    const Matrix form_b_800 =
        Complex(0, -1) * simpson_flux(comm, es, model.tau, 800, ns, oe);
    rep.form_residual = op_norm(rep.j_plus_op - form_b_800);
    rep.richardson_diff = op_norm(form_b_800 - form_b_400);
    return rep;
}

ThermoReport j_plus(const gns::RepeatedInteractionModel& model,
                    const reduced::ReducedSpectralData& data, const Tolerances& tols) {
    data.require_ergodic();
    ThermoReport rep = j_plus_forms(model, tols);
    const Complex val = data.omega_star.dot(rep.j_plus_op * data.omega_s);
    if (std::abs(val.imag()) > 1e-9) {
        throw std::runtime_error("j_plus: flux has a non-real expectation");
    }
    rep.j_plus_value = val.real();
    return rep;
}

ThermoReport productions(ThermoReport report, const gns::RepeatedInteractionModel& model) {
    report.de_plus = report.j_plus_value / model.tau;
    report.ds_plus = model.sys_e.beta * report.j_plus_value / model.tau;
    const double t_e = model.sys_e.beta > 0.0 ? 1.0 / model.sys_e.beta : 0.0;
    report.second_law_residual =
        model.sys_e.beta > 0.0 ? std::abs(report.de_plus - t_e * report.ds_plus)
                               : std::abs(report.ds_plus);
    report.no_invariant_state = report.j_plus_value > 1e-8;
    return report;
}

bool no_invariant_state_certificate(const ThermoReport& report) {
    return report.j_plus_value > 1e-8;
}

}  // namespace riqs::thermo
