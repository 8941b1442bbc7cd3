#pragma once

// Comparison criteria between the short-time heat operator exp(-s L) and the
// long-time one exp(-t0 L). Both are functions of the same symmetric L, so
// they commute and every criterion reduces to a function of the spectrum.

#include "error.hpp"
#include "hodge.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cohest {

/// Diffusion times. t0 may be +infinity, in which case exp(-t0 L) is the
/// orthogonal projector onto ker L (decided with kernel_tol).
struct CriterionParams
{
    double s = 1.0;
    double t0 = 250.0;
    ZeroTolerance kernel_tol{};

    bool infinite_t0() const noexcept { return std::isinf(t0); }

    void validate() const
    {
        if (!(s > 0.0) || !std::isfinite(s))
            throw ValidationError("s must be finite and > 0");
        if (!(t0 > s))
            throw ValidationError("t0 must be greater than s");
    }
};

enum class CriterionKind
{
    RelativeEntropy,
    HilbertSchmidt,
    TraceDifference,
};

inline constexpr CriterionKind kAllCriteria[] = {CriterionKind::RelativeEntropy, CriterionKind::HilbertSchmidt,
                                                 CriterionKind::TraceDifference};

/// Short CLI name: entropy | hs | trace.
inline std::string_view to_string(CriterionKind k) noexcept
{
    switch (k) {
    case CriterionKind::RelativeEntropy: return "entropy";
    case CriterionKind::HilbertSchmidt: return "hs";
    case CriterionKind::TraceDifference: return "trace";
    }
    return "?";
}

inline std::optional<CriterionKind> parse_criterion(std::string_view name) noexcept
{
    for (auto k : kAllCriteria)
        if (to_string(k) == name)
            return k;
    return std::nullopt;
}

/// exp(-t lambda_i); underflow to 0 is allowed.
inline std::vector<double> heat_eigenvalues(const Spectrum& sp, double t)
{
    std::vector<double> out;
    out.reserve(sp.size());
    for (double l : sp.eigenvalues)
        out.push_back(std::exp(-t * l));
    return out;
}

namespace detail {

inline double log_sum_exp(std::span<const double> x)
{
    const double m = *std::max_element(x.begin(), x.end());
    if (std::isinf(m))
        return m;
    double acc = 0.0;
    for (double v : x)
        acc += std::exp(v - m);
    return m + std::log(acc);
}

/// exp(-s l) - exp(-t0 l), accurate for small l; t0 = inf uses the kernel
/// projector convention.
inline double heat_gap(double l, const CriterionParams& p, double kernel_threshold)
{
    if (p.infinite_t0())
        return std::exp(-p.s * l) - (l <= kernel_threshold ? 1.0 : 0.0);
    return -std::exp(-p.s * l) * std::expm1(-(p.t0 - p.s) * l);
}

} // namespace detail

/// H(rho || sigma) with rho = exp(-s L)/Tr, sigma = exp(-t0 L)/Tr, evaluated
/// as sum_i p_i (log p_i - log q_i) entirely in log space. With t0 = inf,
/// sigma is supported on ker L only and the value is +inf unless L = 0.
inline double relative_entropy(const Spectrum& sp, const CriterionParams& p)
{
    if (sp.empty())
        return 0.0;
    const std::size_t n = sp.size();

    std::vector<double> log_p(n);
    for (std::size_t i = 0; i < n; ++i)
        log_p[i] = -p.s * sp.eigenvalues[i];
    const double zs = detail::log_sum_exp(log_p);
    for (double& v : log_p)
        v -= zs;

    if (p.infinite_t0()) {
        const std::size_t z = kernel_dimension(sp, p.kernel_tol);
        return z == n ? 0.0 : std::numeric_limits<double>::infinity();
    }

    std::vector<double> log_q(n);
    for (std::size_t i = 0; i < n; ++i)
        log_q[i] = -p.t0 * sp.eigenvalues[i];
    const double zt = detail::log_sum_exp(log_q);

    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        h += std::exp(log_p[i]) * (log_p[i] - (log_q[i] - zt));
    return h;
}

/// Frobenius norm of exp(-s L) - exp(-t0 L) in symmetrized coordinates, i.e.
/// the Hilbert-Schmidt norm for the weighted inner product.
inline double hilbert_schmidt_distance(const Spectrum& sp, const CriterionParams& p)
{
    const double tau = p.kernel_tol.threshold(sp.max());
    double acc = 0.0;
    for (double l : sp.eigenvalues) {
        const double g = detail::heat_gap(l, p, tau);
        acc += g * g;
    }
    return std::sqrt(acc);
}

/// Tr(exp(-s L) - exp(-t0 L)).
inline double trace_difference(const Spectrum& sp, const CriterionParams& p)
{
    const double tau = p.kernel_tol.threshold(sp.max());
    double acc = 0.0;
    for (double l : sp.eigenvalues)
        acc += detail::heat_gap(l, p, tau);
    return acc;
}

/// Frobenius norm of exp(-s Delta) - exp(-t0 Delta) in the plain cochain
/// basis (unit weights). Needs eigenvectors, so it takes the matrix.
inline double hilbert_schmidt_distance_standard(const SymmetrizedLaplacian& L, const CriterionParams& p)
{
    if (L.empty())
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L.matrix);
    if (solver.info() != Eigen::Success)
        throw NumericalError("symmetric eigensolver failed on a " + std::to_string(L.size()) + "x" +
                             std::to_string(L.size()) + " Laplacian");
    Eigen::VectorXd lambda = solver.eigenvalues().cwiseMax(0.0);
    const double tau = p.kernel_tol.threshold(lambda.maxCoeff());
    Eigen::VectorXd g(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        g(i) = detail::heat_gap(lambda(i), p, tau);
    const Eigen::MatrixXd& V = solver.eigenvectors();
    const Eigen::MatrixXd M = V * g.asDiagonal() * V.transpose();
    // Delta-basis operator is W^{-1/2} M W^{1/2}.
    double acc = 0.0;
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            const double v = M(i, j) * std::sqrt(L.weights[static_cast<std::size_t>(j)] /
                                                 L.weights[static_cast<std::size_t>(i)]);
            acc += v * v;
        }
    return std::sqrt(acc);
}

struct CriterionValue
{
    double value = 0.0;
    /// Set when the spectrum was empty; the value is then 0 by convention.
    bool empty = false;
};

inline CriterionValue criterion_value(CriterionKind kind, const Spectrum& sp, const CriterionParams& p)
{
    if (sp.empty())
        return {0.0, true};
    switch (kind) {
    case CriterionKind::RelativeEntropy: return {relative_entropy(sp, p), false};
    case CriterionKind::HilbertSchmidt: return {hilbert_schmidt_distance(sp, p), false};
    case CriterionKind::TraceDifference: return {trace_difference(sp, p), false};
    }
    return {0.0, true};
}

} // namespace cohest
