// reduced.hpp — the reduced dynamics operator M(tau) = P e^{i tau K} P, its
// spectral analysis (ergodicity, gap, invariant covector), the asymptotic
// state and the tau-periodic asymptotic expectation functional, plus the
// compression/contraction property checks.

#pragma once

#include <string>
#include <vector>

#include "riqs/gns.hpp"

namespace riqs::reduced {

struct NotErgodicError : std::runtime_error {
    explicit NotErgodicError(const std::string& reason)
        : std::runtime_error("model is not ergodic: " + reason), reason(reason) {}
    std::string reason;  // "degenerate-one" or "peripheral-eigenvalue"
};

struct ReducedSpectralData {
    Matrix m_matrix;
    Vector eigenvalues;
    bool ergodic = false;
    std::string not_ergodic_reason;  // empty when ergodic
    double gamma = 0.0;              // min over spec(M)\{1} of |log|z||; +inf if empty
    double subdominant_abs = 0.0;    // largest |z| among the non-fixed eigenvalues
    Vector omega_s;                  // fixed vector, M omega_s = omega_s
    Vector omega_star;               // M^dag omega_star = omega_star, <omega_star, omega_s> = 1
    Matrix pi_projection;            // |omega_s><omega_star|

    void require_ergodic() const {
        if (!ergodic) throw NotErgodicError(not_ergodic_reason);
    }
};

// Observable of the system together with chain elements around the one
// currently in contact: B_{-l}..B_{-1} behind, B_0 in contact, B_1..B_r ahead,
// and probes A_1..A_p on the first chain elements. Empty matrices mean
// identity.
struct InstantObservable {
    Matrix a_s;
    std::vector<Matrix> b_past;
    Matrix b_zero;
    std::vector<Matrix> b_future;
    std::vector<Matrix> a_probe;
};

// M[r,c] = <e_r ⊗ Omega_E | e^{i tau K} | e_c ⊗ Omega_E> on the doubled S space.
Matrix reduced_map(const gns::RepeatedInteractionModel& model,
                   const Tolerances& tols = default_tolerances());

// Same compression at an arbitrary time t (used by the property checks).
Matrix reduced_propagator(const gns::RepeatedInteractionModel& model, double t,
                          const Tolerances& tols = default_tolerances());

// Spectral analysis of a reduced map. When `omega_s_hint` is non-empty it is
// taken as the model's reference vector (and M omega_s = omega_s is enforced);
// otherwise the fixed vector is extracted from M itself.
ReducedSpectralData spectral_analysis(const Matrix& m, double tol_circle = 1e-8,
                                      const Vector& omega_s_hint = Vector(),
                                      const Tolerances& tols = default_tolerances());

ReducedSpectralData spectral_analysis(const gns::RepeatedInteractionModel& model,
                                      double tol_circle = 1e-8,
                                      const Tolerances& tols = default_tolerances());

// omega_plus(a_s) = <omega_star, (a_s ⊗ 1) omega_s>. Throws NotErgodicError.
Complex asymptotic_expectation(const ReducedSpectralData& data, const Matrix& a_s);

// The physical density matrix representing omega_plus: Tr(rho A) = omega_plus(A).
Matrix asymptotic_density(const ReducedSpectralData& data);

// The tau-periodic asymptotic expectation E_+ at in-interval time s of an
// instantaneous observable with empty a_probe. Past factors are freely evolved
// by their elapsed free time; future factors contribute product weights
// <B_j>_{Omega_E}. Factor-local vector propagation, no full-space operators.
Complex rias_expectation(const gns::RepeatedInteractionModel& model,
                         const ReducedSpectralData& data, const InstantObservable& obs,
                         double s, const Tolerances& tols = default_tolerances());

struct PowerConvergence {
    std::vector<double> norms;  // ||M^m - pi|| for m = 1..m_max
    double fitted_rate = 0.0;   // log-linear fit over the last half
};

PowerConvergence power_convergence(const ReducedSpectralData& data, int m_max);

// || P e^{i t1 K_1} e^{i t2 K_2} P - (P e^{i t1 K_1} P)(P e^{i t2 K_2} P) ||
// on the two-element space (Proposition 2 residual).
double factorization_check(const gns::RepeatedInteractionModel& model, double t1, double t2,
                           const Tolerances& tols = default_tolerances());

// max over the t grid and m <= m_max of ||(P e^{itK} P)^m||.
double power_bound_check(const gns::RepeatedInteractionModel& model,
                         const std::vector<double>& t_samples, int m_max,
                         const Tolerances& tols = default_tolerances());

}  // namespace riqs::reduced
