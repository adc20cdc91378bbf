// chainsim.hpp — exact density-matrix simulation of the system plus a finite
// chain of N elements in the physical picture. Serves as the brute-force
// oracle for the asymptotic-state, correlation and thermodynamic statements.

#pragma once

#include <memory>
#include <vector>

#include "riqs/gns.hpp"
#include "riqs/reduced.hpp"

namespace riqs::chainsim {

// Gibbs density matrix e^{-beta h} / Z.
Matrix gibbs(const Matrix& h, double beta, const Tolerances& tols = default_tolerances());

struct ChainState {
    Matrix rho;        // density matrix on C^{d_S} ⊗ (C^{d_E})^{⊗N}
    Index n_elements = 0;
    int step = 0;      // completed interactions
    double clock = 0.0;
    std::shared_ptr<const gns::RepeatedInteractionModel> model;
    std::vector<double> jumps;  // j(k) recorded when the clock passed k*tau
    FactorShape shape;

    double in_interval_time() const { return clock - step * model->tau; }
};

ChainState init_chain(const gns::RepeatedInteractionModel& model, Index n_elements,
                      const Matrix& rho_s_init, const Tolerances& tols = default_tolerances());

// Evolves to time t (piecewise constant generator: the pair (S, element m)
// interacts during [(m-1)tau, m tau), everything else evolves freely). Energy
// jumps j(k) are recorded as the clock passes each k*tau with k < N.
ChainState evolve_to(const ChainState& state, double t,
                     const Tolerances& tols = default_tolerances());

// Tr[rho(t) (A_S ⊗ placed factors)], with B_j at element m(t)+j+1 and probes
// A_i at elements 1..p. Requires p < m(t) - l + 1 and all placements within
// the chain.
Complex expect(const ChainState& state, const reduced::InstantObservable& obs);

// j(k) = Tr[rho(k tau) lambda (v_{k+1} - v_k)]; requires clock = k tau, 1 <= k < N.
double energy_jump(const ChainState& state);

// Delta E(t) = sum_{k <= m(t)} j(k) from the recorded jumps (0 for t < tau).
double cumulative_energy(const ChainState& state, double t);

// Ent(rho | gibbs(beta_s, h_S) ⊗ gibbs(beta_e, h_E)^{⊗N}) = Tr rho (log rho - log rho0).
double relative_entropy(const ChainState& state, double beta_s_ref, double beta_e_ref,
                        const Tolerances& tols = default_tolerances());

// Correlation C(t; A, A_S, B_0) = Tr[rho(0) A U(t)^dag (A_S ⊗ theta_{m(t)+1}(B_0)) U(t)],
// with A an observable on S + the first q chain elements.
Complex correlation(const gns::RepeatedInteractionModel& model, Index n_elements,
                    const Matrix& rho_s_init, const Matrix& a_pre, Index q,
                    const reduced::InstantObservable& obs, double t,
                    const Tolerances& tols = default_tolerances());

// One-interaction reduced map: Tr_E[U_tau (rho_s ⊗ gibbs_E) U_tau^dag].
Matrix cptp_step(const gns::RepeatedInteractionModel& model, const Matrix& rho_s,
                 const Tolerances& tols = default_tolerances());

}  // namespace riqs::chainsim
