#include "riqs/numerics.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace riqs {

void check_finite(const Matrix& a, const std::string& what) {
    if (!a.allFinite()) {
        throw std::invalid_argument(what + ": non-finite entries");
    }
}

bool is_hermitian(const Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(a.norm(), 1.0);
    return (a - a.adjoint()).norm() <= tol * scale;
}

double op_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(a.adjoint() * a, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix expm(const Matrix& a, const Tolerances& tols) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    check_finite(a, "expm");
    if (a.rows() == 0) return a;
    const double scale = std::max(a.norm(), 1.0);
    if ((a - a.adjoint()).norm() <= tols.normality * scale) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        return es.eigenvectors() *
               es.eigenvalues().array().exp().matrix().asDiagonal() *
               es.eigenvectors().adjoint();
    }
    if ((a + a.adjoint()).norm() <= tols.normality * scale) {
        // a = i h with h Hermitian
        Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0, -1) * a);
        Vector phases = (Complex(0, 1) * es.eigenvalues().cast<Complex>()).array().exp();
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
    return a.exp();  // scaling-and-squaring Pade
}

Matrix logm_psd(const Matrix& rho, double floor, const Tolerances& tols) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("logm_psd: matrix must be square");
    }
    check_finite(rho, "logm_psd");
    if (!is_hermitian(rho, tols.density_herm)) {
        throw std::invalid_argument("logm_psd: matrix must be Hermitian");
    }
    if (floor <= 0.0) {
        throw std::invalid_argument("logm_psd: floor must be positive");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
    Eigen::VectorXd ev = es.eigenvalues();
    if (ev.minCoeff() < -tols.psd_negative) {
        throw std::invalid_argument("logm_psd: eigenvalue below -" +
                                    std::to_string(tols.psd_negative));
    }
    Eigen::VectorXd logs(ev.size());
    for (Index i = 0; i < ev.size(); ++i) {
        logs(i) = std::log(std::max(ev(i), floor));
    }
    Matrix out = es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().adjoint();
    return (out + out.adjoint()) / 2.0;
}

EigResult eig(const Matrix& a, const Tolerances& tols) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("eig: matrix must be square");
    }
    check_finite(a, "eig");
    const Index n = a.rows();
    EigResult res;
    if (n == 0) return res;

    Eigen::ComplexEigenSolver<Matrix> ces(a, true);
    if (ces.info() != Eigen::Success) {
        throw std::runtime_error("eig: eigensolver did not converge");
    }
    res.values = ces.eigenvalues();
    res.right = ces.eigenvectors();  // unit columns

    Eigen::PartialPivLU<Matrix> lu(res.right);
    Matrix vinv = lu.solve(Matrix::Identity(n, n));
    res.left = vinv.adjoint();  // columns w_i with <w_i, v_j> = delta_ij

    const double anorm = op_norm(a);
    const double scale = std::max(anorm, 1.0);
    for (Index i = 0; i < n; ++i) {
        const double rres = (a * res.right.col(i) - res.values(i) * res.right.col(i)).norm();
        const double wnorm = res.left.col(i).norm();
        if (!(wnorm > 0.0) || !std::isfinite(wnorm)) {
            res.defective = true;
            break;
        }
        const double lres =
            (a.adjoint() * res.left.col(i) - std::conj(res.values(i)) * res.left.col(i)).norm() /
            wnorm;
        // raw <w_i, v_i> = 1 by construction; the normalized overlap is 1/||w_i||
        if (rres > tols.eig_residual * scale || lres > tols.eig_residual * scale ||
            1.0 / wnorm < tols.eig_biorth) {
            res.defective = true;
            break;
        }
    }
    return res;
}

FactorShape::FactorShape(std::vector<Index> d) : dims(std::move(d)) {
    for (Index dk : dims) {
        if (dk < 1) throw std::invalid_argument("FactorShape: dims must be >= 1");
    }
}

Index FactorShape::total() const {
    Index t = 1;
    for (Index dk : dims) t *= dk;
    return t;
}

namespace {

std::vector<Index> strides_of(const std::vector<Index>& dims) {
    std::vector<Index> s(dims.size());
    Index acc = 1;
    for (Index k = static_cast<Index>(dims.size()) - 1; k >= 0; --k) {
        s[static_cast<size_t>(k)] = acc;
        acc *= dims[static_cast<size_t>(k)];
    }
    return s;
}

// Applies op to the `targets` factors of a row-major tensor buffer.
void apply_local_core(const Matrix& op, const Complex* src, Complex* dst,
                      const std::vector<Index>& dims, const std::vector<Index>& targets) {
    const auto n = static_cast<Index>(dims.size());
    const auto strides = strides_of(dims);
    std::vector<bool> is_target(static_cast<size_t>(n), false);
    Index d_t = 1;
    for (Index t : targets) {
        if (t < 0 || t >= n) throw std::invalid_argument("apply_local: target out of range");
        if (is_target[static_cast<size_t>(t)]) {
            throw std::invalid_argument("apply_local: duplicate target");
        }
        is_target[static_cast<size_t>(t)] = true;
        d_t *= dims[static_cast<size_t>(t)];
    }
    if (op.rows() != d_t || op.cols() != d_t) {
        throw std::invalid_argument("apply_local: operator dimension mismatch");
    }

    // Trailing run of non-target factors is contiguous: treat it as one slab axis.
    Index post = 1;
    Index cut = n;
    while (cut > 0 && !is_target[static_cast<size_t>(cut - 1)]) {
        post *= dims[static_cast<size_t>(cut - 1)];
        --cut;
    }

    // Offsets of the d_t rows inside a slab, mixed radix over targets in order.
    std::vector<Index> rowoff(static_cast<size_t>(d_t), 0);
    for (Index r = 0; r < d_t; ++r) {
        Index rem = r;
        for (Index k = static_cast<Index>(targets.size()) - 1; k >= 0; --k) {
            const Index t = targets[static_cast<size_t>(k)];
            const Index dk = dims[static_cast<size_t>(t)];
            rowoff[static_cast<size_t>(r)] += (rem % dk) * strides[static_cast<size_t>(t)];
            rem /= dk;
        }
    }

    // Remaining (outer) non-target factors enumerated by an odometer.
    std::vector<Index> outer_dims, outer_strides;
    for (Index k = 0; k < cut; ++k) {
        if (!is_target[static_cast<size_t>(k)]) {
            outer_dims.push_back(dims[static_cast<size_t>(k)]);
            outer_strides.push_back(strides[static_cast<size_t>(k)]);
        }
    }
    Index n_outer = 1;
    for (Index dk : outer_dims) n_outer *= dk;

    Matrix scratch(d_t, post), prod(d_t, post);
    std::vector<Index> odo(outer_dims.size(), 0);
    for (Index block = 0; block < n_outer; ++block) {
        Index base = 0;
        for (size_t k = 0; k < odo.size(); ++k) base += odo[k] * outer_strides[k];
        for (Index r = 0; r < d_t; ++r) {
            scratch.row(r) = Eigen::Map<const Eigen::RowVectorXcd>(
                src + base + rowoff[static_cast<size_t>(r)], post);
        }
        prod.noalias() = op * scratch;
        for (Index r = 0; r < d_t; ++r) {
            Eigen::Map<Eigen::RowVectorXcd>(dst + base + rowoff[static_cast<size_t>(r)], post) =
                prod.row(r);
        }
        for (Index k = static_cast<Index>(odo.size()) - 1; k >= 0; --k) {
            if (++odo[static_cast<size_t>(k)] < outer_dims[static_cast<size_t>(k)]) break;
            odo[static_cast<size_t>(k)] = 0;
        }
    }
}

}  // namespace

Vector apply_local(const Matrix& op, const Vector& state, const FactorShape& shape,
                   const std::vector<Index>& targets) {
    if (shape.total() != state.size()) {
        throw std::invalid_argument("apply_local: shape does not match state length");
    }
    Vector out(state.size());
    apply_local_core(op, state.data(), out.data(), shape.dims, targets);
    return out;
}

Matrix apply_local_left(const Matrix& op, const Matrix& state, const FactorShape& shape,
                        const std::vector<Index>& targets) {
    if (shape.total() != state.rows()) {
        throw std::invalid_argument("apply_local_left: shape does not match row count");
    }
    // Column-major storage = columns concatenated; view the buffer as a tensor
    // with the column index as the slowest factor.
    std::vector<Index> dims;
    dims.reserve(shape.dims.size() + 1);
    dims.push_back(state.cols());
    dims.insert(dims.end(), shape.dims.begin(), shape.dims.end());
    std::vector<Index> shifted(targets.size());
    for (size_t k = 0; k < targets.size(); ++k) shifted[k] = targets[k] + 1;
    Matrix out(state.rows(), state.cols());
    apply_local_core(op, state.data(), out.data(), dims, shifted);
    return out;
}

Matrix apply_local_right_adjoint(const Matrix& op, const Matrix& state,
                                 const FactorShape& shape, const std::vector<Index>& targets) {
    if (shape.total() != state.cols()) {
        throw std::invalid_argument("apply_local_right_adjoint: shape does not match columns");
    }
    // (state embed(op)^dag)(:, c) = sum_j conj(op)(c, j) state(:, j): apply
    // conj(op) on the column factors; in column-major storage the column index
    // is the slowest tensor factor.
    std::vector<Index> dims;
    dims.reserve(shape.dims.size() + 1);
    dims.insert(dims.end(), shape.dims.begin(), shape.dims.end());
    dims.push_back(state.rows());
    Matrix out(state.rows(), state.cols());
    apply_local_core(op.conjugate(), state.data(), out.data(), dims, targets);
    return out;
}

Matrix conjugate_local(const Matrix& u, const Matrix& rho, const FactorShape& shape,
                       const std::vector<Index>& targets) {
    return apply_local_right_adjoint(u, apply_local_left(u, rho, shape, targets), shape,
                                     targets);
}

Matrix partial_trace(const Matrix& rho, const FactorShape& shape,
                     const std::vector<Index>& keep, const Tolerances& tols) {
    const Index dim = shape.total();
    if (rho.rows() != dim || rho.cols() != dim) {
        throw std::invalid_argument("partial_trace: shape does not match matrix dimension");
    }
    if (!is_hermitian(rho, tols.density_herm)) {
        throw std::invalid_argument("partial_trace: input must be Hermitian");
    }
    const auto n = shape.n_factors();
    const auto strides = strides_of(shape.dims);
    std::vector<bool> kept(static_cast<size_t>(n), false);
    for (Index k : keep) {
        if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: keep index out of range");
        if (kept[static_cast<size_t>(k)]) {
            throw std::invalid_argument("partial_trace: duplicate keep index");
        }
        kept[static_cast<size_t>(k)] = true;
    }

    auto enumerate = [&](const std::vector<Index>& factors) {
        Index count = 1;
        for (Index f : factors) count *= shape.dims[static_cast<size_t>(f)];
        std::vector<Index> addr(static_cast<size_t>(count), 0);
        for (Index x = 0; x < count; ++x) {
            Index rem = x;
            for (Index k = static_cast<Index>(factors.size()) - 1; k >= 0; --k) {
                const Index f = factors[static_cast<size_t>(k)];
                const Index dk = shape.dims[static_cast<size_t>(f)];
                addr[static_cast<size_t>(x)] += (rem % dk) * strides[static_cast<size_t>(f)];
                rem /= dk;
            }
        }
        return addr;
    };

    std::vector<Index> traced;
    for (Index k = 0; k < n; ++k) {
        if (!kept[static_cast<size_t>(k)]) traced.push_back(k);
    }
    const auto kaddr = enumerate(keep);
    const auto taddr = enumerate(traced);

    const auto d_keep = static_cast<Index>(kaddr.size());
    Matrix out = Matrix::Zero(d_keep, d_keep);
    for (Index i = 0; i < d_keep; ++i) {
        for (Index j = 0; j < d_keep; ++j) {
            Complex acc = 0;
            for (Index t : taddr) {
                acc += rho(kaddr[static_cast<size_t>(i)] + t, kaddr[static_cast<size_t>(j)] + t);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

}  // namespace riqs
