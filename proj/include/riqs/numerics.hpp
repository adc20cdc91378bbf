// numerics.hpp — dense complex linear-algebra kernel: Kronecker products, matrix
// exponential/logarithm, general eigendecomposition with left vectors, partial
// trace, and factor-local operator application on multi-factor states.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace riqs {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Centralized numeric tolerances; every module-level check reads from here.
struct Tolerances {
    double hermiticity = 1e-12;     // input Hermiticity (absolute, scaled by norm)
    double normality = 1e-12;       // expm branch selection
    double eig_residual = 1e-8;     // relative eigenpair residual ||Av - lv|| / ||A||
    double eig_biorth = 1e-8;       // min |<w,v>| of a normalized pair before Defective
    double psd_negative = 1e-10;    // most negative admissible eigenvalue of a PSD input
    double density_herm = 1e-10;    // Hermiticity of density matrices
    double gns_invariance = 1e-10;  // ||L omega||
    double k_annihilation = 1e-9;   // ||K (Omega_S ⊗ Omega_E)||
    double commutant = 1e-9;        // ||[K - L, A⊗1⊗B⊗1]||
    double unit_circle = 1e-8;      // |z| > 1 - tol counts as peripheral
    double one_simple = 1e-8;       // isolation of the eigenvalue 1
    double one_equal = 1e-10;       // |z - 1| for the fixed-point eigenvalue
    double fixed_point = 1e-10;     // ||M Omega_S - Omega_S||
    double quadrature_rel = 1e-7;   // node-doubling convergence gate
    double sinc_branch = 1e-3;      // |x| below which (1 - sinc(tau x))/x uses the series
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tols{};
    return tols;
}

// Throws if any entry is NaN/Inf.
void check_finite(const Matrix& a, const std::string& what);

bool is_hermitian(const Matrix& a, double tol);

// Largest singular value (operator norm). Intended for small dense matrices.
double op_norm(const Matrix& a);

// Kronecker product, row-major index convention: out[(ia*rb+ib),(ja*cb+jb)] = a(ia,ja)*b(ib,jb).
Matrix kron(const Matrix& a, const Matrix& b);

// Matrix exponential. Hermitian and anti-Hermitian inputs (the normal cases that
// occur here: Liouvilleans and i*t*L) go through a spectral decomposition;
// everything else (the C-Liouvillean) uses scaling-and-squaring Pade.
Matrix expm(const Matrix& a, const Tolerances& tols = default_tolerances());

// Spectral logarithm of a PSD Hermitian matrix; eigenvalues below `floor` are
// clamped to floor before taking logs. Throws on eigenvalues < -tols.psd_negative.
Matrix logm_psd(const Matrix& rho, double floor,
                const Tolerances& tols = default_tolerances());

// General complex eigendecomposition with biorthogonal left/right vectors.
// Columns of `right` are right eigenvectors v_i (unit norm); columns of `left`
// are w_i with w_i^dag A = values_i w_i^dag and <w_i, v_j> = delta_ij.
// `defective` is set when residual or biorthogonality checks fail (Jordan
// block); eigenvalues stay valid in that case, the vectors are best-effort.
struct EigResult {
    Vector values;
    Matrix right;
    Matrix left;
    bool defective = false;
};

EigResult eig(const Matrix& a, const Tolerances& tols = default_tolerances());

// Ordered tensor-factor structure of a state space: dims per factor, index
// convention row-major (first factor varies slowest).
struct FactorShape {
    std::vector<Index> dims;

    FactorShape() = default;
    explicit FactorShape(std::vector<Index> d);

    Index total() const;
    Index n_factors() const { return static_cast<Index>(dims.size()); }
};

// Applies `op` (acting on the listed target factors, in target order) to a
// state vector, without materializing the kron-embedded operator.
Vector apply_local(const Matrix& op, const Vector& state, const FactorShape& shape,
                   const std::vector<Index>& targets);

// Same, applied to the row index of a matrix: returns embed(op) * state.
Matrix apply_local_left(const Matrix& op, const Matrix& state, const FactorShape& shape,
                        const std::vector<Index>& targets);

// Applied to the column index: returns state * embed(op)^dag.
Matrix apply_local_right_adjoint(const Matrix& op, const Matrix& state,
                                 const FactorShape& shape, const std::vector<Index>& targets);

// embed(u) * rho * embed(u)^dag, for general (not necessarily Hermitian) rho.
Matrix conjugate_local(const Matrix& u, const Matrix& rho, const FactorShape& shape,
                       const std::vector<Index>& targets);

// Partial trace keeping the listed factors (in the given order).
Matrix partial_trace(const Matrix& rho, const FactorShape& shape,
                     const std::vector<Index>& keep,
                     const Tolerances& tols = default_tolerances());

// sin(x)/x with the removable singularity handled.
double sinc(double x);

}  // namespace riqs
