#pragma once

// Finite metric spaces: point clouds, distance matrices and the synthetic
// samplers used by the experiment harness.

#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace cohest {

/// A non-empty sample of points in R^n, one row per point.
class PointCloud
{
public:
    PointCloud() = default;

    explicit PointCloud(Eigen::MatrixXd points)
        : points_(std::move(points))
    {
        if (points_.rows() == 0)
            throw ValidationError("no points");
        if (points_.cols() == 0)
            throw ValidationError("points must have at least one coordinate");
        if (!points_.allFinite())
            throw ValidationError("point coordinates must be finite");
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
    std::size_t ambient_dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }

    auto point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)); }
    const Eigen::MatrixXd& matrix() const noexcept { return points_; }

    bool operator==(const PointCloud&) const = default;

private:
    Eigen::MatrixXd points_;
};

/// Symmetric, zero-diagonal, non-negative matrix of pairwise distances.
class DistanceMatrix
{
public:
    DistanceMatrix() = default;

    /// Validates symmetry, zero diagonal and non-negativity. The triangle
    /// inequality is not checked here; see triangle_violations().
    explicit DistanceMatrix(Eigen::MatrixXd d)
        : d_(std::move(d))
    {
        if (d_.rows() != d_.cols())
            throw ValidationError("distance matrix must be square, got " + std::to_string(d_.rows()) + "x" +
                                  std::to_string(d_.cols()));
        if (d_.rows() == 0)
            throw ValidationError("no points");
        if (!d_.allFinite())
            throw ValidationError("distance matrix entries must be finite");
        for (Eigen::Index i = 0; i < d_.rows(); ++i) {
            if (d_(i, i) != 0.0)
                throw ValidationError("distance matrix diagonal must be zero (row " + std::to_string(i) + ")");
            for (Eigen::Index j = 0; j < i; ++j) {
                if (d_(i, j) != d_(j, i))
                    throw ValidationError("distance matrix is not symmetric at (" + std::to_string(i) + ", " +
                                          std::to_string(j) + ")");
                if (d_(i, j) < 0.0)
                    throw ValidationError("distance matrix has a negative entry at (" + std::to_string(i) + ", " +
                                          std::to_string(j) + ")");
            }
        }
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(d_.rows()); }

    double operator()(std::size_t i, std::size_t j) const
    {
        return d_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    const Eigen::MatrixXd& matrix() const noexcept { return d_; }

    bool operator==(const DistanceMatrix&) const = default;

private:
    Eigen::MatrixXd d_;
};

/// Euclidean distances. Only the upper triangle is computed and mirrored, so
/// the result is exactly symmetric.
inline DistanceMatrix pairwise_distances(const PointCloud& pc)
{
    const auto n = static_cast<Eigen::Index>(pc.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    const auto& x = pc.matrix();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dij = (x.row(i) - x.row(j)).norm();
            d(i, j) = dij;
            d(j, i) = dij;
        }
    return DistanceMatrix(std::move(d));
}

inline double diameter(const DistanceMatrix& dm)
{
    return dm.matrix().maxCoeff();
}

/// Number of ordered triples (i, j, k), i < j, with d(i,j) > d(i,k) + d(k,j) + slack.
inline std::size_t triangle_violations(const DistanceMatrix& dm, double slack = 1e-9)
{
    const std::size_t n = dm.size();
    std::size_t violations = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (k != i && k != j && dm(i, j) > dm(i, k) + dm(k, j) + slack)
                    ++violations;
    return violations;
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

struct CircleShape
{
    double radius = 1.0;
};

/// Two circles in parallel planes z = 0 and z = separation, both centred on
/// the z-axis. A non-zero density_param tilts both angular densities.
struct TwoCirclesShape
{
    double radius = 0.5;
    double separation = 2.0;
    double density_param = 0.0;
};

/// Single circle with angular density (1 + a cos t) / 2pi, a in [0, 1).
struct NonuniformCircleShape
{
    double radius = 1.0;
    double density_param = 0.9;
};

using Shape = std::variant<CircleShape, TwoCirclesShape, NonuniformCircleShape>;

struct SamplerConfig
{
    Shape shape = CircleShape{};
    std::size_t n_points = 50;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (n_points < 1)
            throw ValidationError("n_points must be >= 1");
        if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
            throw ValidationError("noise_sigma must be finite and >= 0");
        std::visit(
            [](const auto& s) {
                if (!(s.radius > 0.0) || !std::isfinite(s.radius))
                    throw ValidationError("radius must be finite and > 0");
                using S = std::decay_t<decltype(s)>;
                if constexpr (!std::is_same_v<S, CircleShape>) {
                    if (!(s.density_param >= 0.0 && s.density_param < 1.0))
                        throw ValidationError("density_param must lie in [0, 1), got " +
                                              std::to_string(s.density_param));
                }
                if constexpr (std::is_same_v<S, TwoCirclesShape>) {
                    if (!(s.separation >= 0.0) || !std::isfinite(s.separation))
                        throw ValidationError("separation must be finite and >= 0");
                }
            },
            shape);
    }
};

namespace detail {

/// Angle from the density (1 + a cos t) / 2pi by rejection against the uniform
/// envelope; a = 0 consumes exactly one uniform draw per angle.
inline double draw_angle(std::mt19937_64& rng, double a)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    if (a == 0.0)
        return angle(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (;;) {
        const double t = angle(rng);
        if (unit(rng) * (1.0 + a) <= 1.0 + a * std::cos(t))
            return t;
    }
}

} // namespace detail

/// Deterministic given cfg (including seed).
inline PointCloud sample(const SamplerConfig& cfg)
{
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    const auto n = static_cast<Eigen::Index>(cfg.n_points);

    Eigen::MatrixXd x = std::visit(
        [&](const auto& s) -> Eigen::MatrixXd {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, TwoCirclesShape>) {
                Eigen::MatrixXd p(n, 3);
                const Eigen::Index first = n / 2;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double t = detail::draw_angle(rng, s.density_param);
                    p(i, 0) = s.radius * std::cos(t);
                    p(i, 1) = s.radius * std::sin(t);
                    p(i, 2) = i < first ? 0.0 : s.separation;
                }
                return p;
            } else {
                double a = 0.0;
                if constexpr (std::is_same_v<S, NonuniformCircleShape>)
                    a = s.density_param;
                Eigen::MatrixXd p(n, 2);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double t = detail::draw_angle(rng, a);
                    p(i, 0) = s.radius * std::cos(t);
                    p(i, 1) = s.radius * std::sin(t);
                }
                return p;
            }
        },
        cfg.shape);

    if (cfg.noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                x(i, j) += noise(rng);
    }
    return PointCloud(std::move(x));
}

} // namespace cohest
