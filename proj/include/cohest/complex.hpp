#pragma once

// Weighted Vietoris-Rips complexes.
//
// A simplex {x_0..x_n} is present at scale r iff every pairwise distance is
// <= r, so simplices are exactly the cliques of the r-neighbourhood graph.
// Vertices carry weight 1, edges their length and higher simplices the
// Euclidean volume determined by their edge lengths (Cayley-Menger).

#include "metric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cohest {

using Vertex = std::uint32_t;

/// Oriented simplex; vertices are strictly increasing and the orientation is
/// the one induced by that order.
struct Simplex
{
    std::vector<Vertex> vertices;

    int dim() const noexcept { return static_cast<int>(vertices.size()) - 1; }

    /// Face opposite vertex i.
    Simplex face(std::size_t i) const
    {
        Simplex f;
        f.vertices.reserve(vertices.size() - 1);
        for (std::size_t k = 0; k < vertices.size(); ++k)
            if (k != i)
                f.vertices.push_back(vertices[k]);
        return f;
    }

    auto operator<=>(const Simplex&) const = default;
    bool operator==(const Simplex&) const = default;
};

inline constexpr double kDefaultWeightFloor = 1e-12;

/// Volume of a Euclidean k-simplex with the given squared edge lengths via the
/// Cayley-Menger determinant. `sq` is the (k+1)x(k+1) matrix of squared
/// distances. Returns the signed squared volume so callers can detect
/// non-Euclidean inputs.
inline long double cayley_menger_squared_volume(const Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>& sq)
{
    using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index m = sq.rows();
    const Eigen::Index k = m - 1;
    if (k <= 0)
        return 1.0L;

    MatrixL cm(m + 1, m + 1);
    cm(0, 0) = 0.0L;
    cm.row(0).tail(m).setOnes();
    cm.col(0).tail(m).setOnes();
    cm.bottomRightCorner(m, m) = sq;

    long double denom = 1.0L;
    for (Eigen::Index i = 1; i <= k; ++i)
        denom *= static_cast<long double>(i) * static_cast<long double>(i) * 2.0L;
    const long double sign = (k % 2 == 0) ? -1.0L : 1.0L;
    return sign * cm.fullPivLu().determinant() / denom;
}

/// Weight of a simplex: 1 for vertices, the length for edges, the Euclidean
/// volume above that, floored at `weight_floor`. Sets *degenerate when the
/// edge lengths are not Euclidean-realizable (negative squared volume).
inline double simplex_weight(const DistanceMatrix& dm, std::span<const Vertex> vertices,
                             double weight_floor = kDefaultWeightFloor, bool* degenerate = nullptr)
{
    if (degenerate)
        *degenerate = false;
    const std::size_t m = vertices.size();
    if (m <= 1)
        return 1.0;
    if (m == 2)
        return std::max(dm(vertices[0], vertices[1]), weight_floor);

    using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    MatrixL sq = MatrixL::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const long double d = dm(vertices[i], vertices[j]);
            sq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d * d;
            sq(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d * d;
        }
    long double v2 = cayley_menger_squared_volume(sq);
    if (v2 < 0.0L) {
        if (degenerate)
            *degenerate = true;
        v2 = 0.0L;
    }
    return std::max(static_cast<double>(std::sqrt(v2)), weight_floor);
}

inline double simplex_weight(const DistanceMatrix& dm, const Simplex& s, double weight_floor = kDefaultWeightFloor,
                             bool* degenerate = nullptr)
{
    return simplex_weight(dm, std::span<const Vertex>(s.vertices), weight_floor, degenerate);
}

/// Largest pairwise distance among the vertices of a simplex.
inline double simplex_diameter(const DistanceMatrix& dm, std::span<const Vertex> vertices)
{
    double d = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            d = std::max(d, dm(vertices[i], vertices[j]));
    return d;
}

/// Vietoris-Rips skeleta 0..max_dim at one scale with per-simplex weights.
/// Each skeleton is sorted lexicographically; index_of() relies on that.
class WeightedComplex
{
public:
    WeightedComplex() = default;

    WeightedComplex(double scale, std::vector<std::vector<Simplex>> skeleta, std::vector<std::vector<double>> weights,
                    std::size_t degenerate_volumes = 0)
        : scale_(scale)
        , skeleta_(std::move(skeleta))
        , weights_(std::move(weights))
        , degenerate_volumes_(degenerate_volumes)
    {
        if (skeleta_.size() != weights_.size())
            throw ValidationError("skeleta and weights must have the same number of dimensions");
        for (std::size_t d = 0; d < skeleta_.size(); ++d)
            if (skeleta_[d].size() != weights_[d].size())
                throw ValidationError("weights not aligned with skeleton " + std::to_string(d));
    }

    double scale() const noexcept { return scale_; }
    int max_dim() const noexcept { return static_cast<int>(skeleta_.size()) - 1; }

    /// Number of simplices of dimension d; 0 outside 0..max_dim.
    std::size_t count(int d) const noexcept
    {
        return (d < 0 || d > max_dim()) ? 0 : skeleta_[static_cast<std::size_t>(d)].size();
    }

    /// Simplices of dimension d; empty outside 0..max_dim.
    std::span<const Simplex> skeleton(int d) const noexcept
    {
        if (d < 0 || d > max_dim())
            return {};
        return skeleta_[static_cast<std::size_t>(d)];
    }

    std::span<const double> weights(int d) const noexcept
    {
        if (d < 0 || d > max_dim())
            return {};
        return weights_[static_cast<std::size_t>(d)];
    }

    /// Position of s in its skeleton, if present.
    std::optional<std::size_t> index_of(const Simplex& s) const
    {
        const auto sk = skeleton(s.dim());
        const auto it = std::lower_bound(sk.begin(), sk.end(), s);
        if (it == sk.end() || *it != s)
            return std::nullopt;
        return static_cast<std::size_t>(it - sk.begin());
    }

    /// Simplices whose volume came out negative (non-Euclidean edge lengths).
    std::size_t degenerate_volumes() const noexcept { return degenerate_volumes_; }

    /// Every codimension-one face of every simplex is present; weights are
    /// positive and vertex weights are 1.
    bool is_closed() const
    {
        for (int d = 0; d <= max_dim(); ++d) {
            for (std::size_t i = 0; i < count(d); ++i) {
                const Simplex& s = skeleta_[static_cast<std::size_t>(d)][i];
                const double w = weights_[static_cast<std::size_t>(d)][i];
                if (!(w > 0.0) || (d == 0 && w != 1.0))
                    return false;
                if (d == 0)
                    continue;
                for (std::size_t k = 0; k < s.vertices.size(); ++k)
                    if (!index_of(s.face(k)))
                        return false;
            }
        }
        return true;
    }

    bool operator==(const WeightedComplex&) const = default;

private:
    double scale_ = 0.0;
    std::vector<std::vector<Simplex>> skeleta_;
    std::vector<std::vector<double>> weights_;
    std::size_t degenerate_volumes_ = 0;
};

namespace detail {

/// Upper adjacency lists of the r-neighbourhood graph: for each v the
/// ascending list of u > v with d(v, u) <= r.
inline std::vector<std::vector<Vertex>> upper_neighbours(const DistanceMatrix& dm, double r)
{
    const std::size_t n = dm.size();
    std::vector<std::vector<Vertex>> nbrs(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = v + 1; u < n; ++u)
            if (dm(v, u) <= r)
                nbrs[v].push_back(static_cast<Vertex>(u));
    return nbrs;
}

/// Ordered backtracking over cliques with at most max_dim + 1 vertices.
/// Visits cliques so that within each dimension they appear in
/// lexicographic order. The visitor returns false to stop the enumeration.
template <typename Visitor>
class CliqueWalker
{
public:
    CliqueWalker(const std::vector<std::vector<Vertex>>& nbrs, int max_dim, Visitor& visit)
        : nbrs_(nbrs)
        , max_size_(static_cast<std::size_t>(max_dim) + 1)
        , visit_(visit)
    {
    }

    bool run()
    {
        std::vector<Vertex> current;
        current.reserve(max_size_);
        for (std::size_t v = 0; v < nbrs_.size(); ++v) {
            current.assign(1, static_cast<Vertex>(v));
            if (!expand(current, nbrs_[v]))
                return false;
        }
        return true;
    }

private:
    bool expand(std::vector<Vertex>& current, std::span<const Vertex> candidates)
    {
        if (!visit_(std::span<const Vertex>(current)))
            return false;
        if (current.size() == max_size_)
            return true;
        std::vector<Vertex> next;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const Vertex c = candidates[i];
            next.clear();
            const auto& nc = nbrs_[c];
            std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(i) + 1, candidates.end(),
                                  nc.begin(), nc.end(), std::back_inserter(next));
            current.push_back(c);
            const bool go_on = expand(current, next);
            current.pop_back();
            if (!go_on)
                return false;
        }
        return true;
    }

    const std::vector<std::vector<Vertex>>& nbrs_;
    std::size_t max_size_;
    Visitor& visit_;
};

} // namespace detail

/// Weighted Vietoris-Rips complex at scale r with skeleta 0..max_dim.
inline WeightedComplex build_vr(const DistanceMatrix& dm, double r, int max_dim,
                                double weight_floor = kDefaultWeightFloor)
{
    if (!(r >= 0.0))
        throw ValidationError("scale must be >= 0");
    if (max_dim < 0)
        throw ValidationError("max_dim must be >= 0");

    const auto nbrs = detail::upper_neighbours(dm, r);
    std::vector<std::vector<Simplex>> skeleta(static_cast<std::size_t>(max_dim) + 1);
    std::vector<std::vector<double>> weights(skeleta.size());
    std::size_t degenerate = 0;

    auto visit = [&](std::span<const Vertex> clique) {
        const std::size_t d = clique.size() - 1;
        bool bad = false;
        weights[d].push_back(simplex_weight(dm, clique, weight_floor, &bad));
        degenerate += bad ? 1 : 0;
        skeleta[d].push_back(Simplex{{clique.begin(), clique.end()}});
        return true;
    };
    detail::CliqueWalker walker(nbrs, max_dim, visit);
    walker.run();
    return WeightedComplex(r, std::move(skeleta), std::move(weights), degenerate);
}

/// Number of dim-dimensional simplices at scale r, counting stops once it
/// exceeds `limit`.
inline std::size_t count_simplices(const DistanceMatrix& dm, double r, int dim, std::size_t limit)
{
    const auto nbrs = detail::upper_neighbours(dm, r);
    std::size_t found = 0;
    auto visit = [&](std::span<const Vertex> clique) {
        if (static_cast<int>(clique.size()) - 1 == dim)
            ++found;
        return found <= limit;
    };
    detail::CliqueWalker walker(nbrs, dim, visit);
    walker.run();
    return found;
}

/// The sorted distinct positive pairwise distances: every scale at which the
/// complex changes. Empty for fewer than two points.
inline std::vector<double> scale_grid(const DistanceMatrix& dm)
{
    std::vector<double> grid;
    const std::size_t n = dm.size();
    grid.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (dm(i, j) > 0.0)
                grid.push_back(dm(i, j));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

/// All simplices up to max_dim present at scale r_max, with their diameters
/// and weights. Restricting to any r <= r_max gives the same complex as
/// build_vr(dm, r, max_dim) without recomputing volumes.
class VrFiltration
{
public:
    VrFiltration(const DistanceMatrix& dm, double r_max, int max_dim, double weight_floor = kDefaultWeightFloor)
        : r_max_(r_max)
    {
        if (max_dim < 0)
            throw ValidationError("max_dim must be >= 0");
        const auto nbrs = detail::upper_neighbours(dm, r_max);
        simplices_.resize(static_cast<std::size_t>(max_dim) + 1);
        auto visit = [&](std::span<const Vertex> clique) {
            bool bad = false;
            Entry e{Simplex{{clique.begin(), clique.end()}}, simplex_diameter(dm, clique), 0.0, false};
            e.weight = simplex_weight(dm, clique, weight_floor, &bad);
            e.degenerate = bad;
            simplices_[clique.size() - 1].push_back(std::move(e));
            return true;
        };
        detail::CliqueWalker walker(nbrs, max_dim, visit);
        walker.run();
    }

    double r_max() const noexcept { return r_max_; }
    int max_dim() const noexcept { return static_cast<int>(simplices_.size()) - 1; }

    WeightedComplex at(double r) const
    {
        if (r > r_max_)
            throw ValidationError("scale exceeds the filtration range");
        std::vector<std::vector<Simplex>> skeleta(simplices_.size());
        std::vector<std::vector<double>> weights(simplices_.size());
        std::size_t degenerate = 0;
        for (std::size_t d = 0; d < simplices_.size(); ++d)
            for (const auto& e : simplices_[d])
                if (e.diameter <= r) {
                    skeleta[d].push_back(e.simplex);
                    weights[d].push_back(e.weight);
                    degenerate += e.degenerate ? 1 : 0;
                }
        return WeightedComplex(r, std::move(skeleta), std::move(weights), degenerate);
    }

private:
    struct Entry
    {
        Simplex simplex;
        double diameter;
        double weight;
        bool degenerate;
    };

    double r_max_;
    std::vector<std::vector<Entry>> simplices_;
};

} // namespace cohest
