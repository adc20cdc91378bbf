// model_config.hpp — JSON model configurations for the command-line front end
// and serialization helpers (complex entries encoded as [re, im] pairs).

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "riqs/gns.hpp"
#include "riqs/sforacle.hpp"

namespace riqs::config {

using Json = nlohmann::json;

struct ModelConfig {
    std::string model_kind;  // spin-spin | custom-finite | sf-quadratic | sf-linear
    double tau = 1.0;
    double lambda = 0.0;
    double beta_s = 0.0;
    double beta_e = 1.0;

    // spin-spin block
    double e_s = 1.0;
    double e_e = 1.5;
    Matrix i_mat;

    // custom-finite block
    Matrix h_s;
    Matrix h_e;
    std::vector<std::pair<Matrix, Matrix>> v_terms;

    // spin-fermion block
    std::string ff_family = "exp";
    double ff_amplitude = 1.0;
    double ff_rate = 0.5;

    bool finite_kind() const {
        return model_kind == "spin-spin" || model_kind == "custom-finite";
    }
};

Json complex_to_json(const Complex& z);
Complex complex_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);

ModelConfig parse_model_config(const Json& j);
ModelConfig load_model_config(const std::string& path);

// Builds the repeated interaction model for the finite kinds; throws
// std::invalid_argument for the spin-fermion kinds.
gns::RepeatedInteractionModel build_from_config(const ModelConfig& cfg,
                                                const Tolerances& tols = default_tolerances());

sforacle::FormFactor form_factor_from_config(const ModelConfig& cfg);

// Applies {"field": value} overrides onto a tolerance record.
Tolerances parse_tol_overrides(const Json& j, Tolerances base);

}  // namespace riqs::config
