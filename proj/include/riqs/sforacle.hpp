// sforacle.hpp — closed-form perturbative expressions of the example models as
// independent oracles: spin-spin (comparable against the exact reduced map)
// and spin-fermion quadratic/linear (quadrature only).

#pragma once

#include <functional>
#include <string>
#include <utility>

#include "riqs/numerics.hpp"

namespace riqs::sforacle {

// Precondition refusals (resonant interaction times, integrability failures,
// vanishing effective coupling).
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Reservoir form factor: evaluator returns ||g(r)||^2 on r >= 0; the thermally
// weighted ||g_beta(r)||^2 = ||g(r)||^2 / (1 + e^{-beta r}) is derived from it.
struct FormFactor {
    std::string family = "exp";
    double amplitude = 1.0;
    double rate = 0.5;  // g(r) = amplitude * e^{-rate * r}
    double beta = 1.0;
    std::function<double(double)> g_squared;

    double g2(double r) const;
    double g_beta2(double r) const { return g2(r) / (1.0 + std::exp(-beta * r)); }
};

FormFactor make_form_factor(const std::string& family, double amplitude, double rate,
                            double beta);

struct PerturbativeResult {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double gamma_leading = 0.0;         // leading-order spectral gap
    Complex e0{1.0, 0.0};               // eigenvalue expansions at the given lambda
    Complex e_plus{1.0, 0.0};
    Complex e_minus{1.0, 0.0};
    std::pair<double, double> omega_plus_diag{0.0, 0.0};  // (a1, a2)/(a1+a2)
    double ds_plus_leading = 0.0;
    bool validity_warning = false;      // |lambda| above the trusted range
};

// Composite Gauss-Legendre rule on [0, r_max].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_legendre(double r_max, int cells, int degree);

// (1 - sinc(tau x)) / x with the removable singularity handled by a series
// branch for small |x|.
double sinc_kernel(double tau, double x,
                   const Tolerances& tols = default_tolerances());

// Quadratic interaction: the two 2D integrals
// alpha_j = ∫∫ e^{-beta r_j} ||g_b(r1)||^2 ||g_b(r2)||^2 sinc^2(tau(2-r1+r2)/2).
std::pair<double, double> sf_quadratic_alphas(const FormFactor& ff, double tau,
                                              const Tolerances& tols = default_tolerances());

// Eigenvalue expansions of the reduced map to second order in lambda.
PerturbativeResult sf_quadratic_eigs(const FormFactor& ff, double tau, double lambda,
                                     const Tolerances& tols = default_tolerances());

// Leading entropy production, evaluated two independent ways (4D tensor-grid
// quadrature vs separable 2D decomposition); throws on disagreement.
double sf_quadratic_entropy(const FormFactor& ff, double tau, double lambda,
                            const Tolerances& tols = default_tolerances());

// Full result for the quadratic model.
PerturbativeResult sf_quadratic_all(const FormFactor& ff, double tau, double lambda,
                                    const Tolerances& tols = default_tolerances());

// Linear interaction: 1D alphas, eigenvalue expansions, 2D entropy integrals.
PerturbativeResult sf_linear_all(const FormFactor& ff, double tau, double lambda,
                                 const Tolerances& tols = default_tolerances());

// Spin-spin closed forms (alphas, gamma_0, eigenvalue expansions, leading
// asymptotic state and entropy production) for h = diag(0, E) on both sides,
// tracial reference on S, and interaction matrix i_mat = [[a,b],[c,d]].
PerturbativeResult spinspin_oracle(double e_s, double e_e, double beta_e, double tau,
                                   double lambda, const Matrix& i_mat,
                                   const Tolerances& tols = default_tolerances());

}  // namespace riqs::sforacle
