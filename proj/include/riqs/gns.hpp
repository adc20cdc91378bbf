// gns.hpp — GNS doubling of a finite quantum system at inverse temperature beta
// (reference vector, standard Liouvillean, modular data) and assembly of the
// interacting Liouvillean L and the C-Liouvillean K of a repeated interaction
// model.

#pragma once

#include <utility>
#include <vector>

#include "riqs/numerics.hpp"

namespace riqs::gns {

// A finite system doubled in its thermal representation. The doubled space is
// C^d ⊗ C^d with the physical (left) copy first; observables act as a ⊗ 1.
struct GnsSystem {
    Index d = 0;
    Matrix h;              // d x d Hermitian Hamiltonian
    double beta = 0.0;
    Vector omega;          // KMS vector, ||omega|| = 1, L omega = 0
    Matrix liouvillean;    // h ⊗ 1 - 1 ⊗ h^T
    Matrix delta_half;     // e^{-(beta/2) L}
    Matrix delta_half_inv; // e^{+(beta/2) L}
    Matrix swap;           // x ⊗ y -> y ⊗ x
};

GnsSystem build_gns_system(const Matrix& h, double beta,
                           const Tolerances& tols = default_tolerances());

// Left GNS action a ⊗ 1 on the doubled space of one system.
Matrix left_action(const Matrix& a);

// J x J for a linear operator x on a doubled space: swap ∘ entrywise
// conjugation ∘ swap (J is the antilinear phi ⊗ psi -> conj(psi) ⊗ conj(phi)).
Matrix j_conjugate(const Matrix& x, const Matrix& swap);

// Sum_k A_k ⊗ 1_{d_S} ⊗ B_k ⊗ 1_{d_E} in the fixed GNS factor order
// (S-left, S-right, E-left, E-right). Throws if Sum A_k ⊗ B_k is not Hermitian.
Matrix build_interaction(const std::vector<std::pair<Matrix, Matrix>>& terms,
                         const Tolerances& tols = default_tolerances());

// System + chain-element pair with interaction V, coupling lambda and
// interaction time tau. All operators live on the doubled pair space
// C^{d_S^2} ⊗ C^{d_E^2}; physical-picture ingredients are kept alongside for
// the exact chain simulator.
struct RepeatedInteractionModel {
    GnsSystem sys_s;
    GnsSystem sys_e;
    std::vector<std::pair<Matrix, Matrix>> terms;  // physical (A, B) pairs
    Matrix v;        // GNS-embedded interaction
    double lambda = 0.0;
    double tau = 0.0;
    Matrix l_total;  // L_S + L_E + lambda V
    Matrix k_total;  // C-Liouvillean
    Matrix w;        // k_total - l_total (lives in the commutant)
    double w_raw_norm = 0.0;  // ||Delta^{1/2} V Delta^{-1/2}||, growth bound data
    Matrix v_phys;   // Sum_k A_k ⊗ B_k on C^{d_S d_E}

    Index dim_s() const { return sys_s.d * sys_s.d; }
    Index dim_e() const { return sys_e.d * sys_e.d; }
    Vector omega_pair() const;  // Omega_S ⊗ Omega_E
};

struct CLiouvillean {
    Matrix k;
    Matrix w;
    double w_raw_norm;
};

// K = L_S + L_E + lambda V - lambda J Delta^{1/2} V Delta^{-1/2} J on the pair
// space, with J realized via the double swap and entrywise conjugation.
CLiouvillean c_liouvillean(const GnsSystem& sys_s, const GnsSystem& sys_e, const Matrix& v,
                           double lambda, const Tolerances& tols = default_tolerances());

RepeatedInteractionModel build_model(const GnsSystem& sys_s, const GnsSystem& sys_e,
                                     const std::vector<std::pair<Matrix, Matrix>>& terms,
                                     double lambda, double tau,
                                     const Tolerances& tols = default_tolerances());

// Convenience builder for the two-level / two-level model with h = diag(0, E)
// on both sides and V = I ⊗ a* + I* ⊗ a.
RepeatedInteractionModel build_spin_spin(double e_s, double e_e, double beta_s, double beta_e,
                                         const Matrix& i_mat, double lambda, double tau,
                                         const Tolerances& tols = default_tolerances());

}  // namespace riqs::gns
