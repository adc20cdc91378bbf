#include "riqs/sforacle.hpp"

#include <cmath>
#include <numbers>

namespace riqs::sforacle {

namespace {

constexpr double kResonanceTol = 1e-6;

double r_cutoff(double beta) { return std::max(40.0, 40.0 / std::max(beta, 1e-6)); }

// Refuse interaction times where the unperturbed eigenvalues collide.
void check_sf_tau(double tau) {
    const double x = (tau - std::numbers::pi / 2.0) / std::numbers::pi;
    if (std::abs(x - std::round(x)) * std::numbers::pi < kResonanceTol) {
        throw PreconditionError("spin-fermion oracle: tau in pi/2 + pi N is excluded");
    }
    if (tau <= 0.0) throw PreconditionError("spin-fermion oracle: tau must be > 0");
}

// The integrability condition e^{beta h/2} g in h, checked by truncation: the
// [R, 2R] tail of ∫ e^{beta r} ||g(r)||^2 must be negligible.
void check_sf1(const FormFactor& ff) {
    const double r_max = r_cutoff(ff.beta);
    auto integral = [&](double a, double b) {
        const Quadrature q = gauss_legendre(b, static_cast<int>(std::ceil(b - a)), 12);
        double acc = 0.0;
        for (size_t i = 0; i < q.nodes.size(); ++i) {
            if (q.nodes[i] >= a) acc += q.weights[i] * std::exp(ff.beta * q.nodes[i]) * ff.g2(q.nodes[i]);
        }
        return acc;
    };
    const double head = integral(0.0, r_max);
    const double tail = integral(r_max, 2.0 * r_max);
    if (!(std::isfinite(head) && std::isfinite(tail)) ||
        tail > 1e-8 * (1.0 + std::abs(head))) {
        throw PreconditionError("spin-fermion oracle: (SF1) fails, e^{beta h/2} g not integrable");
    }
}

struct Grid {
    std::vector<double> r;  // nodes
    std::vector<double> wf; // weight * ||g_beta||^2 at each node
    std::vector<double> eb; // e^{-beta r}
};

Grid weighted_grid(const FormFactor& ff, int cells, int degree) {
    const Quadrature q = gauss_legendre(r_cutoff(ff.beta), cells, degree);
    Grid g;
    g.r = q.nodes;
    g.wf.resize(q.nodes.size());
    g.eb.resize(q.nodes.size());
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        g.wf[i] = q.weights[i] * ff.g_beta2(q.nodes[i]);
        g.eb[i] = std::exp(-ff.beta * q.nodes[i]);
    }
    return g;
}

// 2D moments over the weight w(x,y) = ||g_b(x)||^2 ||g_b(y)||^2 sinc^2(tau(2-x+y)/2):
//   p = ∫∫ w e^{-beta x}   (= alpha_1),   q = ∫∫ w e^{-beta y}   (= alpha_2),
//   rm = ∫∫ w (y-x) e^{-beta x},          sm = ∫∫ w (y-x) e^{-beta y}.
struct QuadraticMoments {
    double p = 0, q = 0, rm = 0, sm = 0;
};

QuadraticMoments quadratic_moments(const Grid& g, double tau) {
    QuadraticMoments m;
    const size_t n = g.r.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            const double s = sinc(tau * (2.0 - g.r[i] + g.r[j]) / 2.0);
            const double w = g.wf[i] * g.wf[j] * s * s;
            const double d = g.r[j] - g.r[i];
            m.p += w * g.eb[i];
            m.q += w * g.eb[j];
            m.rm += w * d * g.eb[i];
            m.sm += w * d * g.eb[j];
        }
    }
    return m;
}

void check_converged(double coarse, double fine, const char* what, const Tolerances& tols) {
    if (std::abs(coarse - fine) > tols.quadrature_rel * (1.0 + std::abs(fine))) {
        throw std::runtime_error(std::string("sforacle: quadrature for ") + what +
                                 " did not converge under node doubling");
    }
}

}  // namespace

double FormFactor::g2(double r) const {
    if (g_squared) return g_squared(r);
    const double g = amplitude * std::exp(-rate * r);
    return g * g;
}

FormFactor make_form_factor(const std::string& family, double amplitude, double rate,
                            double beta) {
    if (family != "exp") {
        throw std::invalid_argument("make_form_factor: unknown family '" + family + "'");
    }
    if (beta < 0.0) throw std::invalid_argument("make_form_factor: beta must be >= 0");
    FormFactor ff;
    ff.family = family;
    ff.amplitude = amplitude;
    ff.rate = rate;
    ff.beta = beta;
    return ff;
}

Quadrature gauss_legendre(double r_max, int cells, int degree) {
    if (r_max <= 0.0 || cells < 1 || degree < 2) {
        throw std::invalid_argument("gauss_legendre: bad parameters");
    }
    // Nodes/weights of the degree-point rule on [-1, 1] by Newton iteration.
    std::vector<double> x(static_cast<size_t>(degree)), w(static_cast<size_t>(degree));
    for (int i = 0; i < degree; ++i) {
        double t = std::cos(std::numbers::pi * (i + 0.75) / (degree + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= degree; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double dp = degree * (t * p1 - p0) / (t * t - 1.0);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= degree; ++k) {
            const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = degree * (t * p1 - p0) / (t * t - 1.0);
        x[static_cast<size_t>(i)] = t;
        w[static_cast<size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    Quadrature q;
    q.nodes.reserve(static_cast<size_t>(cells * degree));
    q.weights.reserve(static_cast<size_t>(cells * degree));
    const double h = r_max / cells;
    for (int c = 0; c < cells; ++c) {
        const double a = c * h;
        for (int i = 0; i < degree; ++i) {
            q.nodes.push_back(a + h / 2.0 * (x[static_cast<size_t>(i)] + 1.0));
            q.weights.push_back(h / 2.0 * w[static_cast<size_t>(i)]);
        }
    }
    return q;
}

double sinc_kernel(double tau, double x, const Tolerances& tols) {
    if (std::abs(x) < tols.sinc_branch) {
        // (1 - sinc(tau x))/x = tau^2 x/6 - tau^4 x^3/120 + tau^6 x^5/5040 - ...
        const double t2 = tau * tau;
        const double x2 = x * x;
        return x * t2 *
               (1.0 / 6.0 +
                t2 * x2 *
                    (-1.0 / 120.0 +
                     t2 * x2 *
                         (1.0 / 5040.0 +
                          t2 * x2 * (-1.0 / 362880.0 + t2 * x2 / 39916800.0))));
    }
    return (1.0 - sinc(tau * x)) / x;
}

std::pair<double, double> sf_quadratic_alphas(const FormFactor& ff, double tau,
                                              const Tolerances& tols) {
    check_sf_tau(tau);
    check_sf1(ff);
    const auto m_fine = quadratic_moments(weighted_grid(ff, 40, 20), tau);
    const auto m_coarse = quadratic_moments(weighted_grid(ff, 20, 20), tau);
    check_converged(m_coarse.p, m_fine.p, "alpha_1", tols);
    check_converged(m_coarse.q, m_fine.q, "alpha_2", tols);
    return {m_fine.p, m_fine.q};
}

PerturbativeResult sf_quadratic_eigs(const FormFactor& ff, double tau, double lambda,
                                     const Tolerances& tols) {
    check_sf_tau(tau);
    check_sf1(ff);
    const Grid g = weighted_grid(ff, 40, 20);
    const auto m = quadratic_moments(g, tau);
    const double a1 = m.p, a2 = m.q;

    // ||e^{-beta h/2} g_beta||^4 and the singular-kernel double integral.
    double n2 = 0.0, ik = 0.0;
    const size_t n = g.r.size();
    for (size_t i = 0; i < n; ++i) n2 += g.wf[i] * g.eb[i];
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            ik += (g.eb[i] + g.eb[j]) * g.wf[i] * g.wf[j] *
                  sinc_kernel(tau, g.r[i] - g.r[j] - 2.0, tols);
        }
    }

    PerturbativeResult res;
    res.alpha1 = a1;
    res.alpha2 = a2;
    res.gamma_leading = tau * tau * (a1 + a2) * lambda * lambda / 2.0;
    const double l2 = lambda * lambda;
    res.e0 = 1.0 - l2 * tau * tau * (a1 + a2);
    const Complex bracket =
        1.0 - l2 * tau * tau / 2.0 * (a1 + a2) + Complex(0, 1) * l2 * tau * (n2 * n2 - ik);
    res.e_plus = std::exp(Complex(0, 2.0 * tau)) * bracket;
    res.e_minus = std::exp(Complex(0, -2.0 * tau)) * std::conj(bracket);
    const double total = a1 + a2;
    res.omega_plus_diag = {a1 / total, a2 / total};
    res.validity_warning = std::abs(lambda) > 0.2;
    return res;
}

double sf_quadratic_entropy(const FormFactor& ff, double tau, double lambda,
                            const Tolerances& tols) {
    check_sf_tau(tau);
    check_sf1(ff);
    const Grid fine = weighted_grid(ff, 40, 20);
    const auto m = quadratic_moments(fine, tau);
    const double a1 = m.p, a2 = m.q;
    if (a1 + a2 <= 0.0) {
        throw PreconditionError("sf_quadratic_entropy: alpha_1 + alpha_2 vanishes");
    }

    // (a) separable decomposition: the 4D integrand
    //     w(1,2) w(3,4) (r2+r3-r1-r4)(e^{-b(r1+r4)} - e^{-b(r2+r3)})
    // expands into 2D moments as 2 (rm a2 - sm a1).
    const double four_sep = 2.0 * (m.rm * a2 - m.sm * a1);
    {
        const auto mh = quadratic_moments(weighted_grid(ff, 20, 20), tau);
        check_converged(2.0 * (mh.rm * mh.q - mh.sm * mh.p), four_sep, "entropy moments", tols);
    }

    // (b) direct tensor-grid quadrature on a coarser product grid.
    const Grid cg = weighted_grid(ff, 12, 10);
    const size_t n = cg.r.size();
    std::vector<double> s12(n * n);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            const double s = sinc(tau * (2.0 - cg.r[i] + cg.r[j]) / 2.0);
            s12[i * n + j] = cg.wf[i] * cg.wf[j] * s * s;
        }
    }
    double four_grid = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            const double w12 = s12[i * n + j];
            if (w12 == 0.0) continue;
            for (size_t k = 0; k < n; ++k) {
                for (size_t l = 0; l < n; ++l) {
                    four_grid += w12 * s12[k * n + l] *
                                 (cg.r[j] + cg.r[k] - cg.r[i] - cg.r[l]) *
                                 (cg.eb[i] * cg.eb[l] - cg.eb[j] * cg.eb[k]);
                }
            }
        }
    }
    if (std::abs(four_sep - four_grid) > 1e-5 * std::max(std::abs(four_sep), 1e-12)) {
        throw std::runtime_error(
            "sf_quadratic_entropy: tensor-grid and separable evaluations disagree");
    }
    const double ds =
        lambda * lambda * ff.beta * tau / (2.0 * (a1 + a2)) * four_sep;
    if (ds < -1e-12) {
        throw std::runtime_error("sf_quadratic_entropy: negative entropy production");
    }
    return ds;
}

PerturbativeResult sf_quadratic_all(const FormFactor& ff, double tau, double lambda,
                                    const Tolerances& tols) {
    PerturbativeResult res = sf_quadratic_eigs(ff, tau, lambda, tols);
    res.ds_plus_leading = sf_quadratic_entropy(ff, tau, lambda, tols);
    return res;
}

PerturbativeResult sf_linear_all(const FormFactor& ff, double tau, double lambda,
                                 const Tolerances& tols) {
    check_sf_tau(tau);
    check_sf1(ff);
    auto alphas = [&](const Grid& g) {
        double a1 = 0.0, a2 = 0.0;
        for (size_t i = 0; i < g.r.size(); ++i) {
            const double sm = sinc(tau * (g.r[i] - 2.0) / 2.0);
            const double sp = sinc(tau * (g.r[i] + 2.0) / 2.0);
            a1 += g.wf[i] * (g.eb[i] * sm * sm + sp * sp);
            a2 += g.wf[i] * (g.eb[i] * sp * sp + sm * sm);
        }
        return std::pair<double, double>{a1, a2};
    };
    const Grid fine = weighted_grid(ff, 40, 20);
    const auto [a1, a2] = alphas(fine);
    const auto [c1, c2] = alphas(weighted_grid(ff, 20, 20));
    check_converged(c1, a1, "linear alpha_1", tols);
    check_converged(c2, a2, "linear alpha_2", tols);
    if (a1 + a2 <= 0.0) {
        throw PreconditionError("sf_linear_all: alpha_1 + alpha_2 vanishes");
    }

    // Imaginary second-order coefficient: ∫ ||g(r)||^2 [kernel(2-r) + kernel(2+r)].
    const Quadrature q = gauss_legendre(r_cutoff(ff.beta), 40, 20);
    double ikern = 0.0;
    for (size_t i = 0; i < q.nodes.size(); ++i) {
        ikern += q.weights[i] * ff.g2(q.nodes[i]) *
                 (sinc_kernel(tau, 2.0 - q.nodes[i], tols) +
                  sinc_kernel(tau, 2.0 + q.nodes[i], tols));
    }

    PerturbativeResult res;
    res.alpha1 = a1;
    res.alpha2 = a2;
    const double l2 = lambda * lambda;
    res.gamma_leading = tau * tau * (a1 + a2) * l2 / 2.0;
    res.e0 = 1.0 - l2 * tau * tau * (a1 + a2);
    const Complex bracket =
        1.0 - l2 * tau * tau / 2.0 * (a1 + a2) + Complex(0, 1) * l2 * tau * tau * ikern;
    res.e_plus = std::exp(Complex(0, 2.0 * tau)) * bracket;
    res.e_minus = std::exp(Complex(0, -2.0 * tau)) * std::conj(bracket);
    res.omega_plus_diag = {a1 / (a1 + a2), a2 / (a1 + a2)};
    res.validity_warning = std::abs(lambda) > 0.2;

    // Entropy production, Eq.-level 2D integrals.
    const Grid g = fine;
    double t1 = 0.0, t2 = 0.0;
    for (size_t i = 0; i < g.r.size(); ++i) {
        const double smi = sinc(tau * (g.r[i] - 2.0) / 2.0);
        const double spi = sinc(tau * (g.r[i] + 2.0) / 2.0);
        for (size_t j = 0; j < g.r.size(); ++j) {
            const double smj = sinc(tau * (g.r[j] - 2.0) / 2.0);
            const double spj = sinc(tau * (g.r[j] + 2.0) / 2.0);
            const double w = g.wf[i] * g.wf[j];
            t1 += w * smi * smi * spj * spj * (g.r[i] + g.r[j]) *
                  (1.0 - std::exp(-ff.beta * (g.r[i] + g.r[j])));
            t2 += w * (g.r[j] - g.r[i]) * (g.eb[i] - g.eb[j]) *
                  (smi * smi * smj * smj + spi * spi * spj * spj);
        }
    }
    res.ds_plus_leading =
        l2 * ff.beta * tau / (a1 + a2) * t1 + l2 * ff.beta * tau / (2.0 * (a1 + a2)) * t2;
    return res;
}

PerturbativeResult spinspin_oracle(double e_s, double e_e, double beta_e, double tau,
                                   double lambda, const Matrix& i_mat,
                                   const Tolerances& tols) {
    if (i_mat.rows() != 2 || i_mat.cols() != 2) {
        throw std::invalid_argument("spinspin_oracle: I must be 2x2");
    }
    if (tau <= 0.0) throw PreconditionError("spinspin_oracle: tau must be > 0");
    {
        const double x = tau * e_e / std::numbers::pi;
        if (std::abs(x - std::round(x)) * std::numbers::pi < kResonanceTol) {
            throw PreconditionError("spinspin_oracle: tau E_E in pi Z is excluded");
        }
    }
    const Complex a = i_mat(0, 0), b = i_mat(0, 1), c = i_mat(1, 0), d = i_mat(1, 1);
    const double ebe = std::exp(-beta_e * e_e);
    const double sm = sinc(tau * (e_e - e_s) / 2.0);
    const double sp = sinc(tau * (e_e + e_s) / 2.0);
    const double se = sinc(tau * e_e / 2.0);
    const double b2 = std::norm(b), c2 = std::norm(c), a2 = std::norm(a), d2 = std::norm(d);

    PerturbativeResult res;
    res.alpha1 = b2 * sm * sm + ebe * c2 * sp * sp;
    res.alpha2 = ebe * b2 * sm * sm + c2 * sp * sp;
    const double total = res.alpha1 + res.alpha2;
    if (total < 1e-14) {
        throw PreconditionError(
            "spinspin_oracle: alpha_1 + alpha_2 = 0 (no effective coupling; (SS1) and (SS2) both fail)");
    }
    const double diag_term = a2 + d2 - 2.0 * (std::conj(a) * d).real();
    const double gamma0 =
        std::min(tau * tau * total / (1.0 + ebe),
                 tau * tau * total / (2.0 * (1.0 + ebe)) + tau * tau / 2.0 * se * se * diag_term);
    res.gamma_leading = gamma0 * lambda * lambda;

    const double l2 = lambda * lambda;
    res.e0 = 1.0 - l2 * tau * tau * total / (1.0 + ebe);

    const double k_e = sinc_kernel(tau, e_e, tols) / tau;          // (1-sinc(tau E_E))/(tau E_E)
    const double k_m = sinc_kernel(tau, e_e - e_s, tols) / tau;
    const double k_p = sinc_kernel(tau, e_e + e_s, tols) / tau;
    const double real_part =
        1.0 - l2 * tau * tau / (2.0 * (1.0 + ebe)) * (total + (1.0 + ebe) * se * se * diag_term);
    const double im_plus =
        l2 * tau * tau / (1.0 + ebe) *
        ((1.0 - ebe) * k_e * (a2 - d2) + (1.0 - ebe) * se * se * (std::conj(a) * d).imag() -
         (1.0 + ebe) * k_m * b2 + (1.0 + ebe) * k_p * c2);
    const double im_minus =
        l2 * tau * tau / (1.0 + ebe) *
        ((1.0 - ebe) * k_e * (d2 - a2) + (1.0 - ebe) * se * se * (a * std::conj(d)).imag() +
         (1.0 + ebe) * k_m * b2 - (1.0 + ebe) * k_p * c2);
    res.e_plus = std::exp(Complex(0, tau * e_s)) * Complex(real_part, im_plus);
    res.e_minus = std::exp(Complex(0, -tau * e_s)) * Complex(real_part, im_minus);
    res.omega_plus_diag = {res.alpha1 / total, res.alpha2 / total};

    // Leading entropy production. The printed form of the cross term carries
    // sinc^2(tau(E_E+E_S)/2) twice; the second factor must be the (E_E-E_S)
    // weight for the expansion to match the exact flux as lambda -> 0.
    res.ds_plus_leading = l2 * beta_e * tau * e_e * (1.0 - ebe) / (total * (1.0 + ebe)) *
                          (b2 * (a2 + ebe * d2) * sm * sm * se * se +
                           c2 * (ebe * a2 + d2) * sp * sp * se * se +
                           2.0 * b2 * c2 * (1.0 + ebe) * sp * sp * sm * sm);
    res.validity_warning = std::abs(lambda) > 0.2;
    return res;
}

}  // namespace riqs::sforacle
