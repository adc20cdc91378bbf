// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured figure of merit. The full run stays within a few
// minutes on a laptop; the Theorem-1 chain comparison is the longest item.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "riqs/chainsim.hpp"
#include "riqs/reduced.hpp"
#include "riqs/sforacle.hpp"
#include "riqs/thermo.hpp"

using namespace riqs;

namespace {

void report(int criterion, bool pass, const std::string& what, double figure) {
    std::printf("ACCEPTANCE %2d %s %s (%.3e)\n", criterion, pass ? "PASS" : "FAIL",
                what.c_str(), figure);
    std::fflush(stdout);
}

Matrix random_hermitian(Index d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) a(i, j) = Complex(dist(rng), dist(rng));
    return (a + a.adjoint()) / 2.0;
}

gns::RepeatedInteractionModel random_model(std::mt19937_64& rng, Index max_dim = 3) {
    std::uniform_int_distribution<Index> ddist(2, max_dim);
    std::uniform_real_distribution<double> beta(0.0, 1.5);
    std::uniform_real_distribution<double> tau(0.5, 2.0);
    std::uniform_real_distribution<double> lam(-0.7, 0.7);
    const Index ds = ddist(rng), de = ddist(rng);
    auto sys_s = gns::build_gns_system(random_hermitian(ds, rng, 0.7), beta(rng));
    auto sys_e = gns::build_gns_system(random_hermitian(de, rng, 0.7), beta(rng));
    return gns::build_model(sys_s, sys_e, {{random_hermitian(ds, rng), random_hermitian(de, rng)}},
                            lam(rng), tau(rng));
}

gns::RepeatedInteractionModel benchmark(double lambda, double beta_s = 0.0) {
    Matrix i_mat(2, 2);
    i_mat << 0, 1, 1, 0;
    return gns::build_spin_spin(1.0, 1.5, beta_s, 1.0, i_mat, lambda, 1.0);
}

Matrix diag_density(double p) {
    Matrix rho = Matrix::Zero(2, 2);
    rho.diagonal() << p, 1.0 - p;
    return rho;
}

Matrix random_density(std::mt19937_64& rng, Index d) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) a(i, j) = Complex(dist(rng), dist(rng));
    Matrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

Matrix i_mat_bench() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

}  // namespace

TEST_CASE("criterion 1: fixed point of the reduced map") {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        auto model = random_model(rng);
        const Matrix m = reduced::reduced_map(model);
        worst = std::max(worst, (m * model.sys_s.omega - model.sys_s.omega).norm());
    }
    const bool pass = worst <= 1e-10;
    report(1, pass, "||M Omega_S - Omega_S|| over 50 random models", worst);
    CHECK(pass);
}

TEST_CASE("criterion 2: contraction and uniform power bound") {
    std::mt19937_64 rng(202);
    double worst_radius = 0.0, worst_power = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        auto model = random_model(rng);
        auto data = reduced::spectral_analysis(reduced::reduced_map(model), 1e-8,
                                               model.sys_s.omega);
        for (Index i = 0; i < data.eigenvalues.size(); ++i) {
            worst_radius = std::max(worst_radius, std::abs(data.eigenvalues(i)));
        }
        std::vector<double> grid;
        for (int i = 0; i <= 8; ++i) grid.push_back(4.0 * model.tau * i / 8.0);
        worst_power = std::max(worst_power, reduced::power_bound_check(model, grid, 500));
    }
    const bool pass = worst_radius <= 1.0 + 1e-8 && worst_power <= 100.0;
    report(2, pass, "spectral radius and sup_m ||(Pe^{itK}P)^m||",
           std::max(worst_radius - 1.0, worst_power / 100.0));
    CHECK(pass);
}

TEST_CASE("criterion 3: factorization of reduced propagators") {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> tdist(0.1, 2.5);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        auto model = random_model(rng, 2);
        worst = std::max(worst,
                         reduced::factorization_check(model, tdist(rng), tdist(rng)));
    }
    const bool pass = worst <= 1e-8;
    report(3, pass, "Prop-2 residual over 20 random (model, t1, t2)", worst);
    CHECK(pass);
}

TEST_CASE("criterion 4: gap law from powers of M") {
    auto data = reduced::spectral_analysis(benchmark(0.3));
    REQUIRE(data.ergodic);
    auto pc = reduced::power_convergence(data, 200);
    const double rel = std::abs(pc.fitted_rate - data.gamma) / data.gamma;
    const bool pass = rel <= 0.2;
    report(4, pass, "fitted decay rate vs gamma (relative)", rel);
    CHECK(pass);
}

TEST_CASE("criterion 5: Theorem 1 at desk scale") {
    std::mt19937_64 rng(505);
    auto model = benchmark(0.6);
    auto data = reduced::spectral_analysis(model);
    REQUIRE(data.ergodic);

    reduced::InstantObservable obs;
    obs.a_s = diag_density(1.0);  // |phi_1><phi_1|
    obs.b_zero = (Matrix(2, 2) << 0.4, 0.2, 0.2, 0.9).finished();

    const Complex e_plus_0 = reduced::rias_expectation(model, data, obs, 0.0);
    const Complex e_plus_half = reduced::rias_expectation(model, data, obs, 0.5);

    // main trajectory: envelope decay at s = 0 and s = tau/2
    auto st = chainsim::init_chain(model, 10, diag_density(0.85));
    bool monotone = true;
    double err_at_8 = 0.0, prev = 1e300;
    for (int m = 1; m <= 9; ++m) {
        st = chainsim::evolve_to(st, double(m));
        const double e1 = std::abs(chainsim::expect(st, obs) - e_plus_0);
        if (m <= 8) {
            auto mid = chainsim::evolve_to(st, double(m) + 0.5);
            const double e2 = std::abs(chainsim::expect(mid, obs) - e_plus_half);
            if (std::max(e1, e2) > prev * 1.05 + 1e-12) monotone = false;
            prev = std::max(e1, e2);
        }
        if (m == 8) err_at_8 = e1;
    }

    // independence of the initial S state
    double spread = 0.0;
    std::vector<double> finals;
    for (int k = 0; k < 5; ++k) {
        auto traj = chainsim::init_chain(model, 10, random_density(rng, 2));
        traj = chainsim::evolve_to(traj, 8.0);
        finals.push_back(std::abs(chainsim::expect(traj, obs)));
    }
    for (double a : finals)
        for (double b : finals) spread = std::max(spread, std::abs(a - b));

    const bool pass = err_at_8 <= 5e-3 && monotone && spread <= 1e-2;
    report(5, pass, "|E - E_+| at m = 8, envelope, initial-state spread",
           std::max(err_at_8, spread));
    CHECK(pass);
}

TEST_CASE("criterion 6: Theorem 3 correlations and state reconstruction") {
    std::mt19937_64 rng(606);
    auto model = benchmark(0.6);
    auto data = reduced::spectral_analysis(model);

    reduced::InstantObservable obs;
    obs.a_s = (Matrix(2, 2) << 1.5, 0, 0, 0.5).finished();
    obs.b_zero = (Matrix(2, 2) << 1.0, 0.1, 0.1, 1.3).finished();

    const Matrix rho0 = random_density(rng, 2);
    const Matrix a_pre =
        kron((Matrix(2, 2) << 0.8, Complex(0.1, 0.2), Complex(0.1, -0.2), 1.4).finished(),
             (Matrix(2, 2) << 1.2, 0, 0, 0.6).finished());

    const Index n = 10;
    const double t = 8.0 + 0.5;
    const Complex c_t = chainsim::correlation(model, n, rho0, a_pre, 1, obs, t);

    auto base = chainsim::init_chain(model, n, rho0);
    const Complex omega_a = apply_local_left(a_pre, base.rho, base.shape, {0, 1}).trace();
    const Complex e_plus = reduced::rias_expectation(model, data, obs, 0.5);

    const double factorization_err = std::abs(c_t - omega_a * e_plus);
    const double reconstruction_err = std::abs(c_t / e_plus - omega_a);

    const bool pass = factorization_err <= 5e-3 && reconstruction_err <= 1e-2;
    report(6, pass, "Thm-3 factorization and Eq.-i11 reconstruction",
           std::max(factorization_err, reconstruction_err));
    CHECK(pass);
}

TEST_CASE("criterion 7: dual-form flux identity and the chain energy jump") {
    auto model = benchmark(0.6);
    auto data = reduced::spectral_analysis(model);
    auto rep = thermo::j_plus(model, data);

    auto st = chainsim::init_chain(model, 9, diag_density(0.85));
    st = chainsim::evolve_to(st, 8.0);
    const double jump_err = std::abs(chainsim::energy_jump(st) - rep.j_plus_value);

    const bool pass = rep.form_residual <= 1e-7 && jump_err <= 5e-3;
    report(7, pass, "j_+ forms and chain jump at k = 8",
           std::max(rep.form_residual, jump_err));
    CHECK(pass);
}

TEST_CASE("criterion 8: entropy balance along a dense grid") {
    const double beta_s = 0.4, beta_e = 1.0;
    auto model = benchmark(0.6, beta_s);
    // one spare element so the jump at k = 6 (needed by Delta E at t = 6 tau)
    // is still recordable
    auto st = chainsim::init_chain(model, 7, diag_density(0.85));
    const double ent0 = chainsim::relative_entropy(st, beta_s, beta_e);

    auto x_expectation = [&](const chainsim::ChainState& s) {
        const Index el = s.step + 1;
        double val = 0.0;
        for (const auto& [a, b] : model.terms) {
            Matrix x = apply_local_left(a, s.rho, s.shape, {0});
            x = apply_local_left(b, x, s.shape, {el});
            val += beta_e * model.lambda * x.trace().real();
        }
        val += (beta_e - beta_s) *
               apply_local_left(model.sys_s.h, s.rho, s.shape, {0}).trace().real();
        return val;
    };
    const double x0 = x_expectation(st);

    double worst = 0.0, worst_jump = 0.0;
    double prev_ent = ent0;
    for (int q = 1; q <= 6 * 40; ++q) {
        const double t = q / 40.0;
        st = chainsim::evolve_to(st, t);
        const double ent = chainsim::relative_entropy(st, beta_s, beta_e);
        const double balance =
            beta_e * chainsim::cumulative_energy(st, t) - x_expectation(st) + x0;
        worst = std::max(worst, std::abs((ent - ent0) - balance));
        worst_jump = std::max(worst_jump, std::abs(ent - prev_ent));  // continuity
        prev_ent = ent;
    }
    const bool pass = worst <= 1e-8 && worst_jump <= 5e-2;
    report(8, pass, "Prop-4 balance residual on a 40/tau grid, 6 intervals", worst);
    CHECK(pass);
}

TEST_CASE("criterion 9: Prop 5 increments, second law, flux positivity") {
    auto model = benchmark(0.6);
    auto data = reduced::spectral_analysis(model);
    auto rep = thermo::productions(thermo::j_plus(model, data), model);

    auto st = chainsim::init_chain(model, 8, diag_density(0.85));
    std::vector<double> ent;
    for (int m = 0; m <= 8; ++m) {
        st = chainsim::evolve_to(st, double(m));
        ent.push_back(chainsim::relative_entropy(st, 0.0, 1.0));
    }
    const double inc_err =
        std::abs((ent[8] - ent[7]) - model.sys_e.beta * rep.j_plus_value);

    const bool pass = inc_err <= 5e-3 && rep.second_law_residual <= 1e-12 &&
                      rep.j_plus_value >= -1e-9 && rep.j_plus_value > 1e-6;
    report(9, pass, "entropy increment, dE_+ = T_E dS_+, flux positivity",
           std::max(inc_err, rep.second_law_residual));
    CHECK(pass);
}

TEST_CASE("criterion 10: spin-spin perturbative oracle agreement") {
    const std::vector<double> lambdas = {0.02, 0.01, 0.005};
    double k_eig = 0.0;       // cubic-remainder constant for the eigenvalues
    double k_state = 0.0;     // quadratic-remainder constant for omega_plus
    std::vector<double> ds_rel;
    double gamma_ratio_002 = 0.0;

    Matrix p11 = Matrix::Zero(2, 2);
    p11(0, 0) = 1.0;

    for (double lambda : lambdas) {
        auto model = benchmark(lambda);
        const auto oracle = sforacle::spinspin_oracle(1.0, 1.5, 1.0, 1.0, lambda, i_mat_bench());
        auto data = reduced::spectral_analysis(model);
        REQUIRE(data.ergodic);

        // match each oracle eigenvalue to the nearest numerical one
        for (const Complex target : {oracle.e0, oracle.e_plus, oracle.e_minus}) {
            double best = 1e300;
            for (Index i = 0; i < data.eigenvalues.size(); ++i) {
                best = std::min(best, std::abs(data.eigenvalues(i) - target));
            }
            k_eig = std::max(k_eig, best / (lambda * lambda * lambda));
        }

        const Complex w_plus = reduced::asymptotic_expectation(data, p11);
        k_state = std::max(k_state, std::abs(w_plus - oracle.omega_plus_diag.first) /
                                        (lambda * lambda));

        auto rep = thermo::productions(thermo::j_plus(model, data), model);
        ds_rel.push_back(std::abs(rep.ds_plus - oracle.ds_plus_leading) / rep.ds_plus);

        if (lambda == 0.02) {
            gamma_ratio_002 = data.gamma / oracle.gamma_leading;
        }
    }
    const bool ds_shrinks = ds_rel[0] > ds_rel[1] && ds_rel[1] > ds_rel[2] &&
                            ds_rel[0] / ds_rel[2] > 2.5;  // ~linear in lambda
    const bool pass = k_eig <= 50.0 && k_state <= 50.0 && ds_shrinks &&
                      std::abs(gamma_ratio_002 - 1.0) <= 0.15;
    report(10, pass, "eigenvalue/state/entropy expansions (fitted constants)",
           std::max(k_eig, k_state));
    CHECK(pass);
}

TEST_CASE("criterion 11: spin-fermion quadrature oracles") {
    std::mt19937_64 rng(1111);
    const auto ff = sforacle::make_form_factor("exp", 1.0, 1.0, 1.0);
    const double tau = 1.0, lambda = 0.05;

    const auto quad = sforacle::sf_quadratic_all(ff, tau, lambda);
    const auto lin = sforacle::sf_linear_all(ff, tau, lambda);

    bool pass = quad.alpha1 > 0 && quad.alpha2 > 0 && lin.alpha1 > 0 && lin.alpha2 > 0;

    // gamma_leading is realized by e_plus/minus at leading order
    const double gap_q = -std::log(std::abs(quad.e_plus));
    const double gap_l = -std::log(std::abs(lin.e_plus));
    pass = pass && std::abs(gap_q - quad.gamma_leading) <= 1e-3 * quad.gamma_leading;
    pass = pass && std::abs(gap_l - lin.gamma_leading) <= 1e-3 * lin.gamma_leading;
    pass = pass && -std::log(std::abs(quad.e0)) > gap_q;

    // dual-method entropy agreement is enforced inside sf_quadratic_entropy
    const double ds_q = sforacle::sf_quadratic_entropy(ff, tau, lambda);
    pass = pass && ds_q > 0.0 && lin.ds_plus_leading > 0.0;

    // integrand positivity sample
    std::uniform_real_distribution<double> rdist(0.0, 40.0);
    for (int i = 0; i < 10000; ++i) {
        const double x = rdist(rng), y = rdist(rng);
        if ((x - y) * (std::exp(-y) - std::exp(-x)) < -1e-15) pass = false;
    }
    report(11, pass, "alphas, gap realization, dual-method entropy, positivity",
           std::min(quad.alpha1, lin.alpha1));
    CHECK(pass);
}

TEST_CASE("criterion 12: CPTP iteration duality") {
    std::mt19937_64 rng(1212);
    auto model = benchmark(0.6);
    auto data = reduced::spectral_analysis(model);

    Matrix state = diag_density(0.2);
    for (int it = 0; it < 500; ++it) state = chainsim::cptp_step(model, state);

    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix a = random_hermitian(2, rng);
        const Complex dual = reduced::asymptotic_expectation(data, a);
        worst = std::max(worst, std::abs((state * a).trace() - dual));
    }
    const bool pass = worst <= 1e-8;
    report(12, pass, "500-step fixed point vs omega_plus on 20 observables", worst);
    CHECK(pass);
}
