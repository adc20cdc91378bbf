// thermo.hpp — asymptotic energy flux j_plus in both equivalent forms, energy
// and entropy production rates, and the average second law.

#pragma once

#include "riqs/reduced.hpp"

namespace riqs::thermo {

struct ThermoReport {
    Matrix j_plus_op;          // compressed P(lambda V)P - P alpha^tau(lambda V)P
    double j_plus_value = 0.0; // omega_plus(j_plus)
    double form_residual = 0.0;     // || difference form - commutator-integral form ||
    double richardson_diff = 0.0;   // quadrature node-doubling change
    double de_plus = 0.0;           // j_plus_value / tau
    double ds_plus = 0.0;           // beta_E j_plus_value / tau
    double second_law_residual = 0.0;  // |de_plus - T_E ds_plus|
    bool no_invariant_state = false;
};

// The two equivalent operator forms of the flux: form A = P(lambda V)P -
// P e^{i tau L}(lambda V)e^{-i tau L}P, form B = -i ∫_0^tau P e^{isL}[L_S +
// L_E, lambda V]e^{-isL}P ds via composite Simpson (401 nodes, node-doubling
// Richardson check). No ergodicity needed for the operators themselves.
ThermoReport j_plus_forms(const gns::RepeatedInteractionModel& model,
                          const Tolerances& tols = default_tolerances());

// Forms plus the expectation omega_plus(j_plus). Requires ergodicity.
ThermoReport j_plus(const gns::RepeatedInteractionModel& model,
                    const reduced::ReducedSpectralData& data,
                    const Tolerances& tols = default_tolerances());

// Fills de_plus, ds_plus, the second-law residual and the no-invariant-state
// certificate from the computed flux.
ThermoReport productions(ThermoReport report, const gns::RepeatedInteractionModel& model);

// True iff the flux is strictly positive (no normal invariant state exists).
bool no_invariant_state_certificate(const ThermoReport& report);

}  // namespace riqs::thermo
