#include "riqs/model_config.hpp"

#include <fstream>

namespace riqs::config {

Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw std::invalid_argument("complex entries must be [re, im] arrays");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) {
        throw std::invalid_argument("matrix must be a non-empty array of rows");
    }
    const auto rows = static_cast<Index>(j.size());
    const auto cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        if (static_cast<Index>(j[static_cast<size_t>(r)].size()) != cols) {
            throw std::invalid_argument("matrix rows have inconsistent lengths");
        }
        for (Index c = 0; c < cols; ++c) {
            m(r, c) = complex_from_json(j[static_cast<size_t>(r)][static_cast<size_t>(c)]);
        }
    }
    check_finite(m, "matrix_from_json");
    return m;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

ModelConfig parse_model_config(const Json& j) {
    ModelConfig cfg;
    cfg.model_kind = j.at("model_kind").get<std::string>();
    if (cfg.model_kind != "spin-spin" && cfg.model_kind != "custom-finite" &&
        cfg.model_kind != "sf-quadratic" && cfg.model_kind != "sf-linear") {
        throw std::invalid_argument("unknown model_kind '" + cfg.model_kind + "'");
    }
    cfg.tau = j.at("tau").get<double>();
    if (!(cfg.tau > 0.0)) throw std::invalid_argument("tau must be > 0");
    cfg.lambda = j.value("lambda", 0.0);
    cfg.beta_s = j.value("beta_S", 0.0);
    cfg.beta_e = j.value("beta_E", 1.0);

    if (cfg.model_kind == "spin-spin") {
        const Json& b = j.at("spin_spin");
        cfg.e_s = b.at("E_S").get<double>();
        cfg.e_e = b.at("E_E").get<double>();
        cfg.i_mat = matrix_from_json(b.at("I"));
        if (cfg.i_mat.rows() != 2 || cfg.i_mat.cols() != 2) {
            throw std::invalid_argument("spin_spin.I must be 2x2");
        }
    } else if (cfg.model_kind == "custom-finite") {
        const Json& b = j.at("custom");
        cfg.h_s = matrix_from_json(b.at("h_S"));
        cfg.h_e = matrix_from_json(b.at("h_E"));
        if (!is_hermitian(cfg.h_s, 1e-10) || !is_hermitian(cfg.h_e, 1e-10)) {
            throw std::invalid_argument("custom h_S/h_E must be Hermitian");
        }
        for (const Json& t : b.at("v_terms")) {
            cfg.v_terms.emplace_back(matrix_from_json(t.at("A")), matrix_from_json(t.at("B")));
        }
    } else {
        const Json& b = j.at("sf");
        cfg.ff_family = b.value("family", "exp");
        if (b.contains("params")) {
            cfg.ff_amplitude = b["params"].value("amplitude", 1.0);
            cfg.ff_rate = b["params"].value("rate", 0.5);
        }
    }
    return cfg;
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return parse_model_config(j);
}

gns::RepeatedInteractionModel build_from_config(const ModelConfig& cfg, const Tolerances& tols) {
    if (cfg.model_kind == "spin-spin") {
        return gns::build_spin_spin(cfg.e_s, cfg.e_e, cfg.beta_s, cfg.beta_e, cfg.i_mat,
                                    cfg.lambda, cfg.tau, tols);
    }
    if (cfg.model_kind == "custom-finite") {
        auto sys_s = gns::build_gns_system(cfg.h_s, cfg.beta_s, tols);
        auto sys_e = gns::build_gns_system(cfg.h_e, cfg.beta_e, tols);
        return gns::build_model(sys_s, sys_e, cfg.v_terms, cfg.lambda, cfg.tau, tols);
    }
    throw std::invalid_argument("model_kind '" + cfg.model_kind +
                                "' is not a finite model; this command needs "
                                "spin-spin or custom-finite");
}

sforacle::FormFactor form_factor_from_config(const ModelConfig& cfg) {
    if (cfg.finite_kind()) {
        throw std::invalid_argument("model_kind '" + cfg.model_kind + "' has no form factor");
    }
    return sforacle::make_form_factor(cfg.ff_family, cfg.ff_amplitude, cfg.ff_rate, cfg.beta_e);
}

Tolerances parse_tol_overrides(const Json& j, Tolerances base) {
    for (const auto& [key, value] : j.items()) {
        const double v = value.get<double>();
        if (key == "hermiticity") base.hermiticity = v;
        else if (key == "normality") base.normality = v;
        else if (key == "eig_residual") base.eig_residual = v;
        else if (key == "eig_biorth") base.eig_biorth = v;
        else if (key == "psd_negative") base.psd_negative = v;
        else if (key == "density_herm") base.density_herm = v;
        else if (key == "gns_invariance") base.gns_invariance = v;
        else if (key == "k_annihilation") base.k_annihilation = v;
        else if (key == "commutant") base.commutant = v;
        else if (key == "unit_circle") base.unit_circle = v;
        else if (key == "one_simple") base.one_simple = v;
        else if (key == "one_equal") base.one_equal = v;
        else if (key == "fixed_point") base.fixed_point = v;
        else if (key == "quadrature_rel") base.quadrature_rel = v;
        else if (key == "sinc_branch") base.sinc_branch = v;
        else throw std::invalid_argument("unknown tolerance override '" + key + "'");
    }
    return base;
}

}  // namespace riqs::config
