#pragma once

// Reference computations for the tests. Everything here is written from the
// definitions and shares no code with the library beyond the DistanceMatrix
// container.

#include <cohest/metric.hpp>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <limits>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;
using rational = boost::multiprecision::cpp_rational;
using Tuple = std::vector<std::uint32_t>;

/// Kahan's cancellation-safe Heron formula.
inline double heron_area(double a, double b, double c)
{
    std::array<long double, 3> s{a, b, c};
    std::sort(s.begin(), s.end(), std::greater<>());
    const long double x = s[0], y = s[1], z = s[2];
    const long double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    return static_cast<double>(0.25L * std::sqrt(std::max(p, 0.0L)));
}

/// Volume of the simplex with squared-distance matrix derived from `d`, by
/// 50-digit Gaussian elimination on the Cayley-Menger determinant.
inline double cayley_menger_volume_mp(const Eigen::MatrixXd& d)
{
    const int m = static_cast<int>(d.rows());
    const int k = m - 1;
    std::vector<std::vector<mp>> a(m + 1, std::vector<mp>(m + 1, mp(1)));
    a[0][0] = 0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            a[i + 1][j + 1] = mp(d(i, j)) * mp(d(i, j));
    mp det = 1;
    const int n = m + 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (abs(a[r][c]) > abs(a[piv][c]))
                piv = r;
        if (a[piv][c] == 0)
            return 0.0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            const mp f = a[r][c] / a[c][c];
            for (int j = c; j < n; ++j)
                a[r][j] -= f * a[c][j];
        }
    }
    mp fact = 1;
    for (int i = 2; i <= k; ++i)
        fact *= i;
    const mp sign = (k % 2 == 0) ? mp(-1) : mp(1);
    const mp v2 = sign * det / (pow(mp(2), k) * fact * fact);
    return v2 <= 0 ? 0.0 : static_cast<double>(sqrt(v2));
}

inline cohest::DistanceMatrix random_cloud(std::mt19937_64& rng, int n, int dim)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd p(n, dim);
    for (Eigen::Index i = 0; i < p.size(); ++i)
        p.data()[i] = u(rng);
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            d(i, j) = (p.row(i) - p.row(j)).norm();
    return cohest::DistanceMatrix(d);
}

/// All (d+1)-subsets with pairwise distances <= r, by bitmask enumeration.
inline std::vector<Tuple> vr_subsets(const cohest::DistanceMatrix& dm, double r, int d)
{
    const int n = static_cast<int>(dm.size());
    std::vector<Tuple> out;
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        if (std::popcount(mask) != d + 1)
            continue;
        Tuple t;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1)
                t.push_back(static_cast<std::uint32_t>(i));
        bool ok = true;
        for (std::size_t a = 0; a < t.size() && ok; ++a)
            for (std::size_t b = a + 1; b < t.size() && ok; ++b)
                ok = dm(t[a], t[b]) <= r;
        if (ok)
            out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Coboundary d: C^{q} -> C^{q+1} over the listed simplices, as a dense
/// matrix with rows indexed by `upper` and columns by `lower`.
inline Eigen::MatrixXd coboundary(const std::vector<Tuple>& lower, const std::vector<Tuple>& upper)
{
    std::map<Tuple, Eigen::Index> pos;
    for (std::size_t i = 0; i < lower.size(); ++i)
        pos[lower[i]] = static_cast<Eigen::Index>(i);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(upper.size()),
                                              static_cast<Eigen::Index>(lower.size()));
    for (std::size_t r = 0; r < upper.size(); ++r)
        for (std::size_t i = 0; i < upper[r].size(); ++i) {
            Tuple f = upper[r];
            f.erase(f.begin() + static_cast<std::ptrdiff_t>(i));
            D(static_cast<Eigen::Index>(r), pos.at(f)) += (i % 2 == 0) ? 1.0 : -1.0;
        }
    return D;
}

/// Exact rank over Q.
inline std::size_t rank_exact(const Eigen::MatrixXd& A)
{
    const auto rows = static_cast<std::size_t>(A.rows());
    const auto cols = static_cast<std::size_t>(A.cols());
    std::vector<std::vector<rational>> m(rows, std::vector<rational>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m[i][j] = static_cast<long long>(A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t piv = rank;
        while (piv < rows && m[piv][c] == 0)
            ++piv;
        if (piv == rows)
            continue;
        std::swap(m[piv], m[rank]);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            if (m[r][c] == 0)
                continue;
            const rational f = m[r][c] / m[rank][c];
            for (std::size_t j = c; j < cols; ++j)
                m[r][j] -= f * m[rank][j];
        }
        ++rank;
    }
    return rank;
}

/// beta_q of the VR complex at r, by exact rank-nullity.
inline std::size_t betti_exact(const cohest::DistanceMatrix& dm, double r, int q)
{
    const auto sq = vr_subsets(dm, r, q);
    if (sq.empty())
        return 0;
    std::size_t rank_up = 0;
    if (const auto up = vr_subsets(dm, r, q + 1); !up.empty())
        rank_up = rank_exact(coboundary(sq, up));
    std::size_t rank_down = 0;
    if (q > 0)
        rank_down = rank_exact(coboundary(vr_subsets(dm, r, q - 1), sq));
    return sq.size() - rank_up - rank_down;
}

/// Eigenvalues of the weighted Laplacian
/// W_q^{-1} d_q^T W_{q+1} d_q + d_{q-1} W_{q-1}^{-1} d_{q-1}^T W_q
/// from its non-symmetric form, given weights per skeleton.
inline std::vector<double> weighted_laplacian_eigenvalues(const std::vector<Tuple>& lower, const std::vector<Tuple>& mid,
                                                          const std::vector<Tuple>& upper,
                                                          const std::vector<double>& w_lower,
                                                          const std::vector<double>& w_mid,
                                                          const std::vector<double>& w_upper)
{
    const auto n = static_cast<Eigen::Index>(mid.size());
    Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(n, n);
    const Eigen::VectorXd wm = Eigen::Map<const Eigen::VectorXd>(w_mid.data(), n);
    if (!upper.empty()) {
        const Eigen::MatrixXd D = coboundary(mid, upper);
        const Eigen::VectorXd wu =
            Eigen::Map<const Eigen::VectorXd>(w_upper.data(), static_cast<Eigen::Index>(w_upper.size()));
        delta += wm.cwiseInverse().asDiagonal() * D.transpose() * wu.asDiagonal() * D;
    }
    if (!lower.empty()) {
        const Eigen::MatrixXd D = coboundary(lower, mid);
        const Eigen::VectorXd wl =
            Eigen::Map<const Eigen::VectorXd>(w_lower.data(), static_cast<Eigen::Index>(w_lower.size()));
        delta += D * wl.cwiseInverse().asDiagonal() * D.transpose() * wm.asDiagonal();
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(delta, false);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < n; ++i)
        ev.push_back(es.eigenvalues()(i).real());
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// 50-digit reference values of the three criteria from a spectrum.
struct Criteria
{
    double entropy;
    double hs;
    double trace;
};

inline Criteria criteria_mp(const std::vector<double>& lambda, double s_, double t0_)
{
    const mp s = s_;
    const mp t0 = t0_;
    mp zs = 0, zt = 0;
    for (double l : lambda) {
        zs += exp(-s * l);
        zt += exp(-t0 * l);
    }
    mp h = 0, hs = 0, tr = 0;
    for (double l : lambda) {
        const mp ps = exp(-s * l) / zs;
        const mp lq = -t0 * l - log(zt);
        h += ps * (log(ps) - lq);
        const mp g = exp(-s * l) - exp(-t0 * l);
        hs += g * g;
        tr += g;
    }
    return {static_cast<double>(h), static_cast<double>(sqrt(hs)), static_cast<double>(tr)};
}

/// Simplex weight from the definition: 1, edge length, Heron area, or the
/// 50-digit Cayley-Menger volume; floored at 1e-12.
inline double weight(const cohest::DistanceMatrix& dm, const Tuple& t)
{
    double w = 1.0;
    if (t.size() == 2)
        w = dm(t[0], t[1]);
    else if (t.size() == 3)
        w = heron_area(dm(t[0], t[1]), dm(t[0], t[2]), dm(t[1], t[2]));
    else if (t.size() > 3) {
        Eigen::MatrixXd d(t.size(), t.size());
        for (std::size_t i = 0; i < t.size(); ++i)
            for (std::size_t j = 0; j < t.size(); ++j)
                d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dm(t[i], t[j]);
        w = cayley_menger_volume_mp(d);
    }
    return std::max(w, 1e-12);
}

struct Selection
{
    double r = 0.0;
    std::size_t betti = 0;
    std::vector<double> grid;
    std::vector<double> values;
};

/// Algorithm 1 from scratch over the distinct distances below the diameter.
/// kind: 0 entropy, 1 Hilbert-Schmidt, 2 trace difference.
inline Selection select(const cohest::DistanceMatrix& dm, int q, int kind, double s = 1.0, double t0 = 250.0)
{
    std::vector<double> dist;
    for (std::size_t i = 0; i < dm.size(); ++i)
        for (std::size_t j = i + 1; j < dm.size(); ++j)
            dist.push_back(dm(i, j));
    std::sort(dist.begin(), dist.end());
    dist.erase(std::unique(dist.begin(), dist.end()), dist.end());
    Selection out;
    for (double r : dist)
        if (r < dist.back())
            out.grid.push_back(r);

    double best = -std::numeric_limits<double>::infinity();
    for (double r : out.grid) {
        const auto mid = vr_subsets(dm, r, q);
        if (mid.empty()) {
            out.values.push_back(0.0);
            continue;
        }
        const auto lower = q > 0 ? vr_subsets(dm, r, q - 1) : std::vector<Tuple>{};
        const auto upper = vr_subsets(dm, r, q + 1);
        auto weights = [&](const std::vector<Tuple>& ts) {
            std::vector<double> w;
            for (const auto& t : ts)
                w.push_back(weight(dm, t));
            return w;
        };
        auto ev = weighted_laplacian_eigenvalues(lower, mid, upper, weights(lower), weights(mid), weights(upper));
        for (double& v : ev)
            v = std::max(v, 0.0);
        const auto c = criteria_mp(ev, s, t0);
        const double v = kind == 0 ? c.entropy : kind == 1 ? c.hs : c.trace;
        out.values.push_back(v);
        if (v > best) {
            best = v;
            out.r = r;
        }
    }
    out.betti = betti_exact(dm, out.r, q);
    return out;
}

} // namespace oracle
