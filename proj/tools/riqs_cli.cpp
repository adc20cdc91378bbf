// riqs — command-line front end: spectrum / simulate / thermo / oracle / verify.
//
// Exit codes: 0 success, 1 input error, 2 not ergodic, 3 precondition or
// resonance refusal, 4 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "riqs/chainsim.hpp"
#include "riqs/model_config.hpp"
#include "riqs/reduced.hpp"
#include "riqs/sforacle.hpp"
#include "riqs/thermo.hpp"

namespace {

using namespace riqs;
using config::Json;

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file '" + out_path + "'");
    out << text;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

reduced::InstantObservable load_observable(const std::string& path) {
    reduced::InstantObservable obs;
    if (path.empty()) return obs;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open observable file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(std::string("observable parse error: ") + e.what());
    }
    if (j.contains("a_s")) obs.a_s = config::matrix_from_json(j["a_s"]);
    if (j.contains("b_zero")) obs.b_zero = config::matrix_from_json(j["b_zero"]);
    for (const char* key : {"b_past", "b_future", "a_probe"}) {
        if (!j.contains(key)) continue;
        for (const Json& m : j[key]) {
            auto mat = config::matrix_from_json(m);
            if (std::string(key) == "b_past") obs.b_past.push_back(mat);
            else if (std::string(key) == "b_future") obs.b_future.push_back(mat);
            else obs.a_probe.push_back(mat);
        }
    }
    return obs;
}

int cmd_spectrum(const config::ModelConfig& cfg, const std::string& out_path,
                 const Tolerances& tols) {
    auto model = config::build_from_config(cfg, tols);
    auto data = reduced::spectral_analysis(model, tols.unit_circle, tols);
    Json out;
    Json evs = Json::array();
    for (Index i = 0; i < data.eigenvalues.size(); ++i) {
        evs.push_back(config::complex_to_json(data.eigenvalues(i)));
    }
    out["eigenvalues"] = evs;
    out["ergodic"] = data.ergodic;
    if (!data.ergodic) out["not_ergodic_reason"] = data.not_ergodic_reason;
    out["gamma"] = data.gamma;
    out["subdominant_abs"] = data.subdominant_abs;
    out["omega_star"] = config::vector_to_json(data.omega_star);
    write_output(out_path, out.dump(2));
    return data.ergodic ? 0 : 2;
}

int cmd_thermo(const config::ModelConfig& cfg, const std::string& out_path,
               const Tolerances& tols) {
    auto model = config::build_from_config(cfg, tols);
    auto data = reduced::spectral_analysis(model, tols.unit_circle, tols);
    thermo::ThermoReport report;
    if (data.ergodic) {
        report = thermo::j_plus(model, data, tols);
    } else {
        // A vanishing flux operator has expectation zero in every state, so the
        // report stays meaningful without ergodicity (e.g. lambda = 0).
        report = thermo::j_plus_forms(model, tols);
        if (op_norm(report.j_plus_op) > 1e-12) data.require_ergodic();
    }
    report = thermo::productions(report, model);
    Json out;
    out["j_plus_value"] = report.j_plus_value;
    out["form_residual"] = report.form_residual;
    out["richardson_diff"] = report.richardson_diff;
    out["dE_plus"] = report.de_plus;
    out["dS_plus"] = report.ds_plus;
    out["second_law_residual"] = report.second_law_residual;
    out["no_invariant_state"] = report.no_invariant_state;
    out["j_plus_op"] = config::matrix_to_json(report.j_plus_op);
    write_output(out_path, out.dump(2));
    return 0;
}

int cmd_oracle(const config::ModelConfig& cfg, const std::string& out_path,
               const Tolerances& tols) {
    sforacle::PerturbativeResult res;
    if (cfg.model_kind == "spin-spin") {
        res = sforacle::spinspin_oracle(cfg.e_s, cfg.e_e, cfg.beta_e, cfg.tau, cfg.lambda,
                                        cfg.i_mat, tols);
    } else if (cfg.model_kind == "sf-quadratic") {
        res = sforacle::sf_quadratic_all(config::form_factor_from_config(cfg), cfg.tau,
                                         cfg.lambda, tols);
    } else if (cfg.model_kind == "sf-linear") {
        res = sforacle::sf_linear_all(config::form_factor_from_config(cfg), cfg.tau,
                                      cfg.lambda, tols);
    } else {
        throw std::invalid_argument("oracle: no closed forms for model_kind '" +
                                    cfg.model_kind + "'");
    }
    Json out;
    out["model"] = cfg.model_kind;
    Json params;
    params["tau"] = cfg.tau;
    params["lambda"] = cfg.lambda;
    params["beta_E"] = cfg.beta_e;
    if (cfg.model_kind == "spin-spin") {
        params["E_S"] = cfg.e_s;
        params["E_E"] = cfg.e_e;
        params["I"] = config::matrix_to_json(cfg.i_mat);
    } else {
        params["family"] = cfg.ff_family;
        params["amplitude"] = cfg.ff_amplitude;
        params["rate"] = cfg.ff_rate;
    }
    out["params"] = params;
    out["alpha1"] = res.alpha1;
    out["alpha2"] = res.alpha2;
    out["gamma_leading"] = res.gamma_leading;
    out["e0"] = config::complex_to_json(res.e0);
    out["e_plus"] = config::complex_to_json(res.e_plus);
    out["e_minus"] = config::complex_to_json(res.e_minus);
    out["omega_plus_diag"] = Json::array({res.omega_plus_diag.first, res.omega_plus_diag.second});
    out["dS_plus_leading"] = res.ds_plus_leading;
    out["validity_warning"] = res.validity_warning;
    write_output(out_path, out.dump(2));
    return 0;
}

int cmd_simulate(const config::ModelConfig& cfg, Index chain, int steps,
                 const std::string& obs_path, const std::string& out_path,
                 int points_per_interval, const Tolerances& tols) {
    if (chain < steps) {
        throw std::invalid_argument("simulate: chain capacity N*tau is below steps*tau");
    }
    if (steps < 1 || points_per_interval < 1) {
        throw std::invalid_argument("simulate: steps and points-per-interval must be >= 1");
    }
    auto model = config::build_from_config(cfg, tols);
    auto data = reduced::spectral_analysis(model, tols.unit_circle, tols);
    data.require_ergodic();
    auto obs = load_observable(obs_path);

    const Matrix rho0 = chainsim::gibbs(model.sys_s.h, model.sys_s.beta, tols);
    chainsim::ChainState state = chainsim::init_chain(model, chain, rho0, tols);

    std::ostringstream csv;
    csv << "t,re_value,im_value,e_plus_re,e_plus_im,abs_err\n";
    const int total_points = steps * points_per_interval;
    for (int q = 0; q <= total_points; ++q) {
        const double t = model.tau * q / points_per_interval;
        state = chainsim::evolve_to(state, t, tols);
        Complex value;
        try {
            value = chainsim::expect(state, obs);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument(
                "simulate: observable placement exceeds the chain capacity at t = " +
                format_double(t) + "; increase --chain");
        }
        const Complex e_plus =
            reduced::rias_expectation(model, data, obs, state.in_interval_time(), tols);
        csv << format_double(t) << ',' << format_double(value.real()) << ','
            << format_double(value.imag()) << ',' << format_double(e_plus.real()) << ','
            << format_double(e_plus.imag()) << ',' << format_double(std::abs(value - e_plus))
            << '\n';
    }
    write_output(out_path, csv.str());
    return 0;
}

struct VerifyContext {
    int failures = 0;
    void check(const std::string& name, bool pass, double value) {
        std::cout << (pass ? "PASS " : "FAIL ") << name << " (" << format_double(value) << ")\n";
        if (!pass) ++failures;
    }
};

Matrix random_hermitian(Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) a(i, j) = Complex(dist(rng), dist(rng));
    }
    return (a + a.adjoint()) / 2.0;
}

int verify_finite(const config::ModelConfig& cfg, uint64_t seed, const Tolerances& tols) {
    std::mt19937_64 rng(seed);
    VerifyContext v;
    auto model = config::build_from_config(cfg, tols);
    const Index ds = model.sys_s.d, de = model.sys_e.d;
    const Matrix id_s = Matrix::Identity(ds, ds), id_e = Matrix::Identity(de, de);

    v.check("gns: ||L_S Omega_S||",
            (model.sys_s.liouvillean * model.sys_s.omega).norm() <=
                tols.gns_invariance * (1.0 + op_norm(model.sys_s.h)),
            (model.sys_s.liouvillean * model.sys_s.omega).norm());
    const double k_res = (model.k_total * model.omega_pair()).norm();
    v.check("gns: ||K Omega||", k_res <= tols.k_annihilation *
                (1.0 + op_norm(model.sys_s.h) + op_norm(model.sys_e.h) +
                 std::abs(model.lambda) * op_norm(model.v)), k_res);

    // K - L lies in the commutant of the left algebra.
    double comm_worst = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
        const Matrix x = kron(kron(random_hermitian(ds, rng), id_s),
                              kron(random_hermitian(de, rng), id_e));
        comm_worst = std::max(comm_worst, (model.w * x - x * model.w).norm());
    }
    v.check("gns: [K - L, A⊗1⊗B⊗1] = 0", comm_worst <= tols.commutant, comm_worst);

    // e^{itK} and e^{itL} implement the same dynamics on the left algebra.
    std::uniform_real_distribution<double> tdist(-2.0 * model.tau, 2.0 * model.tau);
    double dyn_worst = 0.0, growth_worst = -1e300;
    for (int rep = 0; rep < 3; ++rep) {
        const double t = tdist(rng);
        const Matrix uk = expm(Complex(0, t) * model.k_total, tols);
        const Matrix uki = expm(Complex(0, -t) * model.k_total, tols);
        const Matrix ul = expm(Complex(0, t) * model.l_total, tols);
        const Matrix x = kron(kron(random_hermitian(ds, rng), id_s),
                              kron(random_hermitian(de, rng), id_e));
        dyn_worst = std::max(
            dyn_worst, op_norm(uk * x * uki - ul * x * ul.adjoint()));
        growth_worst = std::max(growth_worst,
                                op_norm(uk) - std::exp(std::abs(t) * std::abs(model.lambda) *
                                                       model.w_raw_norm));
    }
    v.check("gns: e^{itK} implements the L dynamics", dyn_worst <= 1e-8, dyn_worst);
    v.check("gns: ||e^{itK}|| growth bound", growth_worst <= 1e-8, growth_worst);

    const Matrix m = reduced::reduced_map(model, tols);
    const double fp = (m * model.sys_s.omega - model.sys_s.omega).norm();
    v.check("reduced: M Omega_S = Omega_S", fp <= tols.fixed_point, fp);

    auto data = reduced::spectral_analysis(m, tols.unit_circle, model.sys_s.omega, tols);
    double max_abs = 0.0;
    for (Index i = 0; i < data.eigenvalues.size(); ++i) {
        max_abs = std::max(max_abs, std::abs(data.eigenvalues(i)));
    }
    v.check("reduced: spec(M) in the unit disk", max_abs <= 1.0 + tols.unit_circle, max_abs);

    std::vector<double> tgrid;
    for (int i = 0; i <= 8; ++i) tgrid.push_back(4.0 * model.tau * i / 8.0);
    const double pb = reduced::power_bound_check(model, tgrid, 500, tols);
    v.check("reduced: sup_m ||(Pe^{itK}P)^m|| <= 100", pb <= 100.0, pb);

    if (double(ds) * ds * de * de * de * de <= double(1 << 16)) {
        double fr = 0.0;
        std::uniform_real_distribution<double> tpos(0.1, 2.0 * model.tau);
        for (int rep = 0; rep < 3; ++rep) {
            fr = std::max(fr, reduced::factorization_check(model, tpos(rng), tpos(rng), tols));
        }
        v.check("reduced: Prop-2 factorization residual", fr <= 1e-8, fr);
    }

    if (data.ergodic) {
        const Complex one = reduced::asymptotic_expectation(data, id_s);
        v.check("reduced: omega_plus(1) = 1", std::abs(one - Complex(1, 0)) <= 1e-10,
                std::abs(one - Complex(1, 0)));
        double neg = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            Matrix a(ds, ds);
            std::normal_distribution<double> dist(0.0, 1.0);
            for (Index i = 0; i < ds; ++i) {
                for (Index j = 0; j < ds; ++j) a(i, j) = Complex(dist(rng), dist(rng));
            }
            const Complex val = reduced::asymptotic_expectation(data, (a.adjoint() * a).eval());
            neg = std::min(neg, val.real());
        }
        v.check("reduced: omega_plus positivity", neg >= -1e-9, neg);

        auto report = thermo::productions(thermo::j_plus(model, data, tols), model);
        v.check("thermo: j_plus dual-form residual", report.form_residual <= 1e-7,
                report.form_residual);
        v.check("thermo: quadrature Richardson gate", report.richardson_diff <= 1e-9,
                report.richardson_diff);
        v.check("thermo: omega_plus(j_plus) >= 0", report.j_plus_value >= -1e-9,
                report.j_plus_value);
        v.check("thermo: dE+ = T_E dS+", report.second_law_residual <= 1e-12,
                report.second_law_residual);
    } else {
        std::cout << "SKIP asymptotic checks (model not ergodic: " << data.not_ergodic_reason
                  << ")\n";
    }
    return v.failures == 0 ? 0 : 4;
}

int verify_sf(const config::ModelConfig& cfg, uint64_t seed, const Tolerances& tols) {
    std::mt19937_64 rng(seed);
    VerifyContext v;
    const auto ff = config::form_factor_from_config(cfg);
    const bool quadratic = cfg.model_kind == "sf-quadratic";
    const auto res = quadratic ? sforacle::sf_quadratic_all(ff, cfg.tau, cfg.lambda, tols)
                               : sforacle::sf_linear_all(ff, cfg.tau, cfg.lambda, tols);
    v.check("sforacle: alpha_1 > 0", res.alpha1 > 0.0, res.alpha1);
    v.check("sforacle: alpha_2 > 0", res.alpha2 > 0.0, res.alpha2);
    const double conj_res = std::abs(res.e_minus - std::conj(res.e_plus));
    v.check("sforacle: e_- = conj(e_+)", conj_res <= 1e-14, conj_res);
    const double gap_by_pm = -std::log(std::abs(res.e_plus));
    const double gap_rel = cfg.lambda != 0.0
                               ? std::abs(gap_by_pm - res.gamma_leading) /
                                     std::max(res.gamma_leading, 1e-300)
                               : 0.0;
    v.check("sforacle: gamma realized by e_+-", gap_rel <= 0.05 || cfg.lambda == 0.0, gap_rel);
    v.check("sforacle: dS_+ >= 0", res.ds_plus_leading >= 0.0, res.ds_plus_leading);
    // Entropy integrand positivity: (x-y)(e^{-beta y} - e^{-beta x}) >= 0.
    std::uniform_real_distribution<double> rdist(0.0, 40.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double x = rdist(rng), y = rdist(rng);
        worst = std::min(worst, (x - y) * (std::exp(-ff.beta * y) - std::exp(-ff.beta * x)));
    }
    v.check("sforacle: integrand positivity sample", worst >= -1e-15, worst);
    return v.failures == 0 ? 0 : 4;
}

int cmd_verify(const config::ModelConfig& cfg, uint64_t seed, const Tolerances& tols) {
    if (cfg.finite_kind()) return verify_finite(cfg, seed, tols);
    return verify_sf(cfg, seed, tols);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Repeated interaction quantum system toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, obs_path, tol_path;
    Index chain = 0;
    int steps = 0, points_per_interval = 4;
    uint64_t seed = 12345;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "model configuration JSON")->required();
        sub->add_option("--tol-overrides", tol_path, "JSON tolerance overrides");
    };

    CLI::App* spectrum = app.add_subcommand("spectrum", "reduced-map spectrum and gap");
    add_common(spectrum);
    spectrum->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* simulate = app.add_subcommand("simulate", "exact chain trajectory vs E_+");
    add_common(simulate);
    simulate->add_option("--chain", chain, "number of chain elements N")->required();
    simulate->add_option("--steps", steps, "number of interaction intervals M")->required();
    simulate->add_option("--observable", obs_path, "instantaneous observable JSON");
    simulate->add_option("--out", out_path, "CSV output file (default stdout)");
    simulate->add_option("--points-per-interval", points_per_interval,
                         "evaluation points per tau (default 4)");

    CLI::App* thermo_cmd = app.add_subcommand("thermo", "energy flux and productions");
    add_common(thermo_cmd);
    thermo_cmd->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* oracle = app.add_subcommand("oracle", "closed-form perturbative oracle");
    add_common(oracle);
    oracle->add_option("--out", out_path, "output file (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "run the module property suites");
    add_common(verify);
    verify->add_option("--seed", seed, "RNG seed for sampled properties");

    CLI11_PARSE(app, argc, argv);

    try {
        riqs::Tolerances tols = riqs::default_tolerances();
        if (!tol_path.empty()) {
            std::ifstream in(tol_path);
            if (!in) throw std::invalid_argument("cannot open tolerance file '" + tol_path + "'");
            Json j;
            in >> j;
            tols = riqs::config::parse_tol_overrides(j, tols);
        }
        const auto cfg = riqs::config::load_model_config(config_path);
        if (spectrum->parsed()) return cmd_spectrum(cfg, out_path, tols);
        if (simulate->parsed()) {
            return cmd_simulate(cfg, chain, steps, obs_path, out_path, points_per_interval,
                                tols);
        }
        if (thermo_cmd->parsed()) return cmd_thermo(cfg, out_path, tols);
        if (oracle->parsed()) return cmd_oracle(cfg, out_path, tols);
        if (verify->parsed()) return cmd_verify(cfg, seed, tols);
        return 1;
    } catch (const riqs::reduced::NotErgodicError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const riqs::sforacle::PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
