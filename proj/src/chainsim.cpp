#include "riqs/chainsim.hpp"

#include <cmath>

namespace riqs::chainsim {

namespace {

constexpr double kClockTol = 1e-12;

Matrix pair_hamiltonian(const gns::RepeatedInteractionModel& m) {
    const Matrix id_s = Matrix::Identity(m.sys_s.d, m.sys_s.d);
    const Matrix id_e = Matrix::Identity(m.sys_e.d, m.sys_e.d);
    return kron(m.sys_s.h, id_e) + kron(id_s, m.sys_e.h) + m.lambda * m.v_phys;
}

// One interval step: the pair (S, element m) under the interacting generator,
// every other element free, applied to an arbitrary (not necessarily
// Hermitian) matrix by conjugation.
void evolve_matrix_interval(Matrix& rho, const gns::RepeatedInteractionModel& model,
                            const FactorShape& shape, Index n_elements, Index m, double delta,
                            const Tolerances& tols) {
    if (delta <= 0.0) return;
    const Matrix u_pair = expm(Complex(0, -delta) * pair_hamiltonian(model), tols);
    rho = conjugate_local(u_pair, rho, shape, {0, m});
    const Matrix u_free = expm(Complex(0, -delta) * model.sys_e.h, tols);
    for (Index k = 1; k <= n_elements; ++k) {
        if (k != m) rho = conjugate_local(u_free, rho, shape, {k});
    }
}

// Placement ops (operator, element site) for an instantaneous observable at
// the state's current m(t).
std::vector<std::pair<Matrix, Index>> placements(const gns::RepeatedInteractionModel& model,
                                                 Index n_elements, int m_t,
                                                 const reduced::InstantObservable& obs) {
    std::vector<std::pair<Matrix, Index>> out;
    auto push = [&](const Matrix& op, Index site, Index dim) {
        if (op.size() == 0) return;  // identity factor
        if (op.rows() != dim || op.cols() != dim) {
            throw std::invalid_argument("expect: observable block has wrong dimension");
        }
        if (site < 0 || site > n_elements) {
            throw std::invalid_argument("expect: placement outside the chain");
        }
        out.emplace_back(op, site);
    };
    const auto ell = static_cast<Index>(obs.b_past.size());
    const auto r = static_cast<Index>(obs.b_future.size());
    const auto p = static_cast<Index>(obs.a_probe.size());
    if (p > 0 && p >= m_t - ell + 1) {
        throw std::invalid_argument("expect: probes require p < m(t) - l + 1");
    }
    push(obs.a_s, 0, model.sys_s.d);
    for (Index i = 0; i < p; ++i) {
        push(obs.a_probe[static_cast<size_t>(i)], i + 1, model.sys_e.d);
    }
    for (Index j = -ell; j <= r; ++j) {
        const Index site = m_t + j + 1;
        const Matrix& op = j < 0    ? obs.b_past[static_cast<size_t>(j + ell)]
                           : j == 0 ? obs.b_zero
                                    : obs.b_future[static_cast<size_t>(j - 1)];
        if (op.size() == 0) continue;
        if (site < 1 || site > n_elements) {
            throw std::invalid_argument("expect: B_j placement outside the chain");
        }
        push(op, site, model.sys_e.d);
    }
    return out;
}

Complex trace_with(const Matrix& rho, const FactorShape& shape,
                   const std::vector<std::pair<Matrix, Index>>& ops) {
    Matrix x = rho;
    for (const auto& [op, site] : ops) {
        x = apply_local_left(op, x, shape, {site});
    }
    return x.trace();
}

double jump_value(const Matrix& rho, const gns::RepeatedInteractionModel& model,
                  const FactorShape& shape, int k) {
    // lambda * Tr[rho (v_{k+1} - v_k)] with v = sum_m A_m ⊗ B_m on (S, element).
    Complex acc = 0;
    for (const auto& [a, b] : model.terms) {
        acc += trace_with(rho, shape, {{a, 0}, {b, k + 1}});
        acc -= trace_with(rho, shape, {{a, 0}, {b, k}});
    }
    return model.lambda * acc.real();
}

}  // namespace

Matrix gibbs(const Matrix& h, double beta, const Tolerances& tols) {
    if (!is_hermitian(h, tols.hermiticity)) {
        throw std::invalid_argument("gibbs: h must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
    Eigen::VectorXd w =
        (-beta * (es.eigenvalues().array() - es.eigenvalues().minCoeff())).exp();
    w /= w.sum();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}

ChainState init_chain(const gns::RepeatedInteractionModel& model, Index n_elements,
                      const Matrix& rho_s_init, const Tolerances& tols) {
    if (n_elements < 0) throw std::invalid_argument("init_chain: N must be >= 0");
    const double log_dim = std::log2(double(model.sys_s.d)) +
                           double(n_elements) * std::log2(double(model.sys_e.d));
    if (log_dim > 14.0) {
        throw std::invalid_argument("init_chain: d_S * d_E^N exceeds 2^14");
    }
    if (rho_s_init.rows() != model.sys_s.d || rho_s_init.cols() != model.sys_s.d) {
        throw std::invalid_argument("init_chain: rho_s has wrong dimension");
    }
    check_finite(rho_s_init, "init_chain");
    if (!is_hermitian(rho_s_init, tols.density_herm) ||
        std::abs(rho_s_init.trace().real() - 1.0) > 1e-10 ||
        std::abs(rho_s_init.trace().imag()) > 1e-10) {
        throw std::invalid_argument("init_chain: rho_s is not a density matrix");
    }
    {
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho_s_init);
        if (es.eigenvalues().minCoeff() < -1e-8) {
            throw std::invalid_argument("init_chain: rho_s has a negative eigenvalue");
        }
    }

    ChainState st;
    st.n_elements = n_elements;
    st.model = std::make_shared<gns::RepeatedInteractionModel>(model);
    std::vector<Index> dims(static_cast<size_t>(n_elements + 1), model.sys_e.d);
    dims[0] = model.sys_s.d;
    st.shape = FactorShape(dims);

    const Matrix rho_e = gibbs(model.sys_e.h, model.sys_e.beta, tols);
    st.rho = rho_s_init;
    for (Index k = 0; k < n_elements; ++k) st.rho = kron(st.rho, rho_e);
    return st;
}

ChainState evolve_to(const ChainState& state, double t, const Tolerances& tols) {
    const auto& model = *state.model;
    const double tau = model.tau;
    if (t < state.clock - kClockTol) {
        throw std::invalid_argument("evolve_to: t is before the current clock");
    }
    if (t > double(state.n_elements) * tau + kClockTol) {
        throw std::invalid_argument("evolve_to: t exceeds the chain capacity");
    }
    ChainState st = state;
    while (t - st.clock > kClockTol) {
        const Index m = st.step + 1;
        const double interval_end = double(m) * tau;
        const double delta = std::min(t, interval_end) - st.clock;
        evolve_matrix_interval(st.rho, model, st.shape, st.n_elements, m, delta, tols);
        st.clock += delta;
        if (std::abs(st.clock - interval_end) <= kClockTol) {
            st.clock = interval_end;
            st.step += 1;
            if (st.step <= state.n_elements - 1 &&
                static_cast<size_t>(st.step) > st.jumps.size()) {
                st.jumps.push_back(jump_value(st.rho, model, st.shape, st.step));
            }
        }
    }
    return st;
}

Complex expect(const ChainState& state, const reduced::InstantObservable& obs) {
    return trace_with(state.rho, state.shape,
                      placements(*state.model, state.n_elements, state.step, obs));
}

double energy_jump(const ChainState& state) {
    const double tau = state.model->tau;
    const double k_real = state.clock / tau;
    const int k = static_cast<int>(std::llround(k_real));
    if (std::abs(state.clock - k * tau) > kClockTol || k < 1 || k >= state.n_elements) {
        throw std::invalid_argument("energy_jump: clock must sit at k tau with 1 <= k < N");
    }
    return jump_value(state.rho, *state.model, state.shape, k);
}

double cumulative_energy(const ChainState& state, double t) {
    if (t < 0.0) throw std::invalid_argument("cumulative_energy: t must be >= 0");
    const auto m_t = static_cast<size_t>(std::floor(t / state.model->tau + kClockTol));
    if (m_t > state.jumps.size()) {
        throw std::invalid_argument("cumulative_energy: jumps not recorded up to m(t)");
    }
    double acc = 0.0;
    for (size_t k = 0; k < m_t; ++k) acc += state.jumps[k];
    return acc;
}

double relative_entropy(const ChainState& state, double beta_s_ref, double beta_e_ref,
                        const Tolerances& tols) {
    const auto& model = *state.model;
    // Tr rho log rho from the spectrum (entropy floor at 1e-300 as in logm_psd).
    Eigen::SelfAdjointEigenSolver<Matrix> es(state.rho, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -tols.psd_negative * 100) {
        throw std::invalid_argument("relative_entropy: state has a negative eigenvalue");
    }
    double tr_rho_log_rho = 0.0;
    for (Index i = 0; i < ev.size(); ++i) {
        tr_rho_log_rho += ev(i) * std::log(std::max(ev(i), 1e-300));
    }
    // log rho0 is a sum of local logs: log gibbs = -beta h - log Z per factor.
    const Matrix log_gs = logm_psd(gibbs(model.sys_s.h, beta_s_ref, tols), 1e-300, tols);
    const Matrix log_ge = logm_psd(gibbs(model.sys_e.h, beta_e_ref, tols), 1e-300, tols);
    Complex tr_rho_log_rho0 = trace_with(state.rho, state.shape, {{log_gs, 0}});
    for (Index k = 1; k <= state.n_elements; ++k) {
        tr_rho_log_rho0 += trace_with(state.rho, state.shape, {{log_ge, k}});
    }
    return tr_rho_log_rho - tr_rho_log_rho0.real();
}

Complex correlation(const gns::RepeatedInteractionModel& model, Index n_elements,
                    const Matrix& rho_s_init, const Matrix& a_pre, Index q,
                    const reduced::InstantObservable& obs, double t, const Tolerances& tols) {
    if (t < 0.0 || t > double(n_elements) * model.tau + kClockTol) {
        throw std::invalid_argument("correlation: t outside [0, N tau]");
    }
    ChainState base = init_chain(model, n_elements, rho_s_init, tols);
    Index d_pre = model.sys_s.d;
    for (Index k = 0; k < q; ++k) d_pre *= model.sys_e.d;
    if (a_pre.rows() != d_pre || a_pre.cols() != d_pre) {
        throw std::invalid_argument("correlation: A has wrong dimension for S + first q elements");
    }

    // sigma = U(t) (rho(0) A) U(t)^dag, then C = Tr[sigma obs].
    std::vector<Index> pre_targets(static_cast<size_t>(q + 1));
    for (Index k = 0; k <= q; ++k) pre_targets[static_cast<size_t>(k)] = k;
    Matrix sigma =
        apply_local_left(a_pre.adjoint(), base.rho.adjoint(), base.shape, pre_targets).adjoint();

    double clock = 0.0;
    int step = 0;
    while (t - clock > kClockTol) {
        const Index m = step + 1;
        const double interval_end = double(m) * model.tau;
        const double delta = std::min(t, interval_end) - clock;
        evolve_matrix_interval(sigma, model, base.shape, n_elements, m, delta, tols);
        clock += delta;
        if (std::abs(clock - interval_end) <= kClockTol) {
            clock = interval_end;
            ++step;
        }
    }
    return trace_with(sigma, base.shape, placements(model, n_elements, step, obs));
}

Matrix cptp_step(const gns::RepeatedInteractionModel& model, const Matrix& rho_s,
                 const Tolerances& tols) {
    if (rho_s.rows() != model.sys_s.d || rho_s.cols() != model.sys_s.d) {
        throw std::invalid_argument("cptp_step: rho_s has wrong dimension");
    }
    const Matrix u = expm(Complex(0, -model.tau) * pair_hamiltonian(model), tols);
    const Matrix big = u * kron(rho_s, gibbs(model.sys_e.h, model.sys_e.beta, tols)) * u.adjoint();
    return partial_trace(big, FactorShape({model.sys_s.d, model.sys_e.d}), {0}, tols);
}

}  // namespace riqs::chainsim
