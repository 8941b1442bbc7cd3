#pragma once

// Weighted coboundaries and combinatorial Hodge Laplacians.
//
// With the weighted inner products (f, g)_n = sum_s w(s) f(s) g(s) the
// adjoint of the coboundary is d* = W_n^{-1} d^T W_{n+1}, so
//
//     Delta_q = W_q^{-1} d_q^T W_{q+1} d_q + d_{q-1} W_{q-1}^{-1} d_{q-1}^T W_q.
//
// Conjugating by W_q^{1/2} gives the symmetric matrix L = B^T B + C C^T with
// B = W_{q+1}^{1/2} d_q W_q^{-1/2} and C = W_q^{1/2} d_{q-1} W_{q-1}^{-1/2},
// which has the same spectrum and kernel dimension as Delta_q.

#include "complex.hpp"
#include "error.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

namespace cohest {

/// Signed incidence matrix of the coboundary C^n -> C^{n+1}: rows are
/// (n+1)-simplices, columns n-simplices, entries +-1.
using CoboundaryMatrix = Eigen::SparseMatrix<int, Eigen::RowMajor>;

/// (df)(s) = sum_i (-1)^i f(s minus its i-th vertex).
inline CoboundaryMatrix coboundary(const WeightedComplex& K, int n)
{
    const auto rows = static_cast<Eigen::Index>(K.count(n + 1));
    const auto cols = static_cast<Eigen::Index>(K.count(n));
    CoboundaryMatrix d(rows, cols);
    if (rows == 0 || cols == 0)
        return d;

    std::vector<Eigen::Triplet<int>> triplets;
    triplets.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(n + 2));
    const auto upper = K.skeleton(n + 1);
    for (std::size_t r = 0; r < upper.size(); ++r) {
        const Simplex& s = upper[r];
        for (std::size_t i = 0; i < s.vertices.size(); ++i) {
            const auto col = K.index_of(s.face(i));
            if (!col)
                throw ValidationError("complex is not closed under faces");
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(*col), (i % 2 == 0) ? 1 : -1);
        }
    }
    d.setFromTriplets(triplets.begin(), triplets.end());
    return d;
}

/// The Hodge Laplacian of dimension q in symmetrized coordinates.
struct SymmetrizedLaplacian
{
    Eigen::MatrixXd matrix;
    int q = 0;
    /// Weights of the q-simplices (the W_q that conjugates back to Delta_q).
    std::vector<double> weights;

    std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
    bool empty() const noexcept { return matrix.rows() == 0; }
};

namespace detail {

/// Face positions and orientation signs of every simplex of dimension d+1.
struct FaceTable
{
    std::vector<std::size_t> index; // row-major, (d+2) entries per simplex
    std::size_t stride = 0;
};

inline FaceTable face_table(const WeightedComplex& K, int upper_dim)
{
    FaceTable t;
    t.stride = static_cast<std::size_t>(upper_dim) + 1;
    const auto upper = K.skeleton(upper_dim);
    t.index.resize(upper.size() * t.stride);
    for (std::size_t r = 0; r < upper.size(); ++r)
        for (std::size_t i = 0; i < t.stride; ++i) {
            const auto pos = K.index_of(upper[r].face(i));
            if (!pos)
                throw ValidationError("complex is not closed under faces");
            t.index[r * t.stride + i] = *pos;
        }
    return t;
}

} // namespace detail

/// L = B^T B + C C^T (see file comment). For q = 0 the down term is absent;
/// a missing (q+1)-skeleton makes the up term zero.
inline SymmetrizedLaplacian symmetrized_laplacian(const WeightedComplex& K, int q)
{
    if (q < 0)
        throw ValidationError("q must be >= 0");
    SymmetrizedLaplacian out;
    out.q = q;
    const std::size_t m = K.count(q);
    out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    if (m == 0)
        return out;

    const auto wq = K.weights(q);
    out.weights.assign(wq.begin(), wq.end());
    std::vector<double> inv_sqrt(m);
    for (std::size_t i = 0; i < m; ++i)
        inv_sqrt[i] = 1.0 / std::sqrt(wq[i]);
    auto& L = out.matrix;

    // Up term: each (q+1)-simplex couples its q+2 faces.
    if (K.count(q + 1) > 0) {
        const auto table = detail::face_table(K, q + 1);
        const auto wu = K.weights(q + 1);
        for (std::size_t r = 0; r < wu.size(); ++r) {
            const std::size_t* f = &table.index[r * table.stride];
            for (std::size_t a = 0; a < table.stride; ++a)
                for (std::size_t b = 0; b < table.stride; ++b) {
                    const double sign = ((a + b) % 2 == 0) ? 1.0 : -1.0;
                    L(static_cast<Eigen::Index>(f[a]), static_cast<Eigen::Index>(f[b])) +=
                        sign * wu[r] * inv_sqrt[f[a]] * inv_sqrt[f[b]];
                }
        }
    }

    // Down term: q-simplices sharing a (q-1)-face are coupled through it.
    if (q >= 1) {
        const auto table = detail::face_table(K, q);
        const auto wd = K.weights(q - 1);
        std::vector<std::vector<std::pair<std::size_t, double>>> cofaces(wd.size());
        for (std::size_t s = 0; s < m; ++s)
            for (std::size_t i = 0; i < table.stride; ++i) {
                const std::size_t rho = table.index[s * table.stride + i];
                const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                cofaces[rho].emplace_back(s, sign * std::sqrt(wq[s] / wd[rho]));
            }
        for (const auto& list : cofaces)
            for (const auto& [a, ca] : list)
                for (const auto& [b, cb] : list)
                    L(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += ca * cb;
    }
    // Accumulation order differs between (a, b) and (b, a); mirror the lower
    // triangle so the matrix is symmetric bit for bit.
    L.triangularView<Eigen::StrictlyUpper>() = L.transpose();
    return out;
}

/// Delta_q in the original cochain basis (not symmetric in general). Kept for
/// cross-checking the symmetrization and for the unweighted Frobenius norm.
inline Eigen::MatrixXd weighted_hodge_laplacian(const WeightedComplex& K, int q)
{
    const std::size_t m = K.count(q);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    if (m == 0)
        return out;
    auto diag = [&](int d) {
        const auto w = K.weights(d);
        Eigen::VectorXd v(static_cast<Eigen::Index>(w.size()));
        for (std::size_t i = 0; i < w.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = w[i];
        return v;
    };
    const Eigen::VectorXd wq = diag(q);
    if (K.count(q + 1) > 0) {
        const Eigen::MatrixXd d = Eigen::MatrixXd(coboundary(K, q).cast<double>());
        out += wq.cwiseInverse().asDiagonal() * d.transpose() * diag(q + 1).asDiagonal() * d;
    }
    if (q >= 1 && K.count(q - 1) > 0) {
        const Eigen::MatrixXd d = Eigen::MatrixXd(coboundary(K, q - 1).cast<double>());
        out += d * diag(q - 1).cwiseInverse().asDiagonal() * d.transpose() * wq.asDiagonal();
    }
    return out;
}

/// Ascending eigenvalues of a symmetrized Laplacian.
struct Spectrum
{
    std::vector<double> eigenvalues;
    /// Smallest eigenvalue before clamping small negatives to zero.
    double min_raw = 0.0;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    bool empty() const noexcept { return eigenvalues.empty(); }
    double max() const noexcept { return eigenvalues.empty() ? 0.0 : eigenvalues.back(); }

    bool operator==(const Spectrum&) const = default;
};

/// Eigenvalues below zero by at most this much (relative to max(1, lambda_max))
/// are treated as rounding and clamped.
inline constexpr double kNegativeEigenvalueSlack = 1e-10;

namespace detail {

/// Connected blocks of the sparsity pattern of a symmetric matrix, each as a
/// sorted index list. Blocks are ordered by their smallest index.
inline std::vector<std::vector<Eigen::Index>> symmetric_blocks(const Eigen::MatrixXd& A)
{
    const Eigen::Index n = A.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    };
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i)
            if (A(i, j) != 0.0) {
                const auto a = find(i);
                const auto b = find(j);
                if (a != b)
                    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
            }
    std::vector<std::vector<Eigen::Index>> blocks;
    std::vector<Eigen::Index> block_of(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto root = find(i);
        auto& b = block_of[static_cast<std::size_t>(root)];
        if (b < 0) {
            b = static_cast<Eigen::Index>(blocks.size());
            blocks.emplace_back();
        }
        blocks[static_cast<std::size_t>(b)].push_back(i);
    }
    return blocks;
}

inline Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& A)
{
    if (A.rows() == 1)
        return A.diagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver failed on a " + std::to_string(A.rows()) + "x" +
                             std::to_string(A.cols()) + " Laplacian block");
    return solver.eigenvalues();
}

} // namespace detail

/// Full spectrum of L. The matrix is split into its decoupled blocks (the
/// connected pieces of the complex) and each block is solved separately.
inline Spectrum spectrum(const SymmetrizedLaplacian& L)
{
    Spectrum sp;
    const Eigen::MatrixXd& A = L.matrix;
    if (A.rows() == 0)
        return sp;

    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(A.rows()));
    const auto blocks = detail::symmetric_blocks(A);
    if (blocks.size() == 1) {
        const Eigen::VectorXd ev = detail::symmetric_eigenvalues(A);
        values.assign(ev.data(), ev.data() + ev.size());
    } else {
        for (const auto& idx : blocks) {
            const auto k = static_cast<Eigen::Index>(idx.size());
            Eigen::MatrixXd sub(k, k);
            for (Eigen::Index j = 0; j < k; ++j)
                for (Eigen::Index i = 0; i < k; ++i)
                    sub(i, j) = A(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            const Eigen::VectorXd ev = detail::symmetric_eigenvalues(sub);
            values.insert(values.end(), ev.data(), ev.data() + ev.size());
        }
        std::sort(values.begin(), values.end());
    }

    sp.min_raw = values.front();
    const double slack = kNegativeEigenvalueSlack * std::max(1.0, std::abs(values.back()));
    if (sp.min_raw < -slack)
        throw NumericalError("Laplacian of size " + std::to_string(A.rows()) +
                             " is not positive semidefinite (min eigenvalue " + std::to_string(sp.min_raw) + ")");
    for (double& v : values)
        if (v < 0.0)
            v = 0.0;
    sp.eigenvalues = std::move(values);
    return sp;
}

/// Eigenvalues at most rel * max(lambda_max, scale_floor) count as zero.
struct ZeroTolerance
{
    double rel = 1e-8;
    double scale_floor = 1.0;

    double threshold(double lambda_max) const noexcept { return rel * std::max(lambda_max, scale_floor); }
};

inline std::size_t kernel_dimension(const Spectrum& sp, const ZeroTolerance& tol = {})
{
    if (sp.empty())
        return 0;
    const double tau = tol.threshold(sp.max());
    return static_cast<std::size_t>(
        std::upper_bound(sp.eigenvalues.begin(), sp.eigenvalues.end(), tau) - sp.eigenvalues.begin());
}

/// Numerical rank by column-pivoted QR with the same relative rule as
/// kernel_dimension.
inline std::size_t matrix_rank(const Eigen::MatrixXd& A, const ZeroTolerance& tol = {})
{
    if (A.rows() == 0 || A.cols() == 0)
        return 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    const Eigen::Index k = std::min(A.rows(), A.cols());
    const auto R = qr.matrixQR().diagonal().head(k).cwiseAbs();
    const double tau = tol.threshold(R.maxCoeff());
    return static_cast<std::size_t>((R.array() > tau).count());
}

/// Betti number over R by rank-nullity on the unweighted coboundaries:
/// beta_q = |S_q| - rank d_q - rank d_{q-1}. Independent of the weights and
/// of the Laplacian route.
inline std::size_t betti_bruteforce(const WeightedComplex& K, int q, const ZeroTolerance& tol = {})
{
    if (q < 0)
        throw ValidationError("q must be >= 0");
    const std::size_t m = K.count(q);
    if (m == 0)
        return 0;
    std::size_t rank_up = 0;
    if (K.count(q + 1) > 0)
        rank_up = matrix_rank(Eigen::MatrixXd(coboundary(K, q).cast<double>()), tol);
    std::size_t rank_down = 0;
    if (q >= 1 && K.count(q - 1) > 0)
        rank_down = matrix_rank(Eigen::MatrixXd(coboundary(K, q - 1).cast<double>()), tol);
    return m - rank_up - rank_down;
}

} // namespace cohest
