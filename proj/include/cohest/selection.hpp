#pragma once

// Scale selection: sweep the Vietoris-Rips scale, score each scale by how far
// the short- and long-time heat operators of Delta_q are apart, pick the
// maximizing scale and read the Betti number off its kernel.

#include "complex.hpp"
#include "error.hpp"
#include "hodge.hpp"
#include "metric.hpp"
#include "semigroup.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

namespace cohest {

enum class GridKind
{
    Breakpoints, ///< distinct pairwise distances
    Uniform,     ///< `points` equally spaced values in (0, diameter)
    Explicit,    ///< caller-supplied values
};

struct GridSpec
{
    GridKind kind = GridKind::Breakpoints;
    std::size_t points = 100;
    std::vector<double> values;
};

struct ScanConfig
{
    int q = 1;
    CriterionKind kind = CriterionKind::RelativeEntropy;
    CriterionParams params{};
    ZeroTolerance tol{};
    GridSpec grid{};
    /// Keep grid values equal to the diameter (the default loop bound is strict).
    bool include_diameter = false;
    /// Scales whose (q+1)-skeleton would exceed this many simplices are skipped.
    std::size_t max_simplices = 200'000;
    double weight_floor = kDefaultWeightFloor;
    /// Hilbert-Schmidt distance in the unweighted cochain basis instead of the
    /// weighted one. Needs eigenvectors at every scale.
    bool standard_hs = false;
    unsigned jobs = 1;
    /// Retain the spectrum of every scale in the result.
    bool keep_spectra = false;

    void validate() const
    {
        if (q < 0)
            throw ValidationError("q must be >= 0");
        params.validate();
        if (!(tol.rel > 0.0) || !(tol.scale_floor > 0.0))
            throw ValidationError("zero tolerance must be positive");
        if (!(weight_floor > 0.0))
            throw ValidationError("weight floor must be positive");
        if (grid.kind == GridKind::Uniform && grid.points == 0)
            throw ValidationError("uniform grid needs at least one point");
        if (grid.kind == GridKind::Explicit) {
            if (grid.values.empty())
                throw ValidationError("explicit grid is empty");
            for (double r : grid.values)
                if (!(r >= 0.0) || !std::isfinite(r))
                    throw ValidationError("grid values must be finite and >= 0");
        }
    }
};

struct ScanEntry
{
    double r = 0.0;
    double value = 0.0;
    /// |S_{q-1}|, |S_q|, |S_{q+1}|.
    std::array<std::size_t, 3> n_simplices{};
    std::size_t kernel_dim = 0;
    /// No q-simplices at this scale; value is 0 by convention.
    bool empty = false;
    /// Skipped by the simplex cap; value and kernel_dim are meaningless.
    bool skipped = false;

    bool operator==(const ScanEntry&) const = default;
};

struct ScanResult
{
    int q = 0;
    CriterionKind kind = CriterionKind::RelativeEntropy;
    CriterionParams params{};
    std::vector<ScanEntry> entries;
    double r_hat = 0.0;
    std::size_t r_hat_index = 0;
    std::size_t betti_hat = 0;
    /// Every grid value attaining the maximum (r_hat is the smallest).
    std::vector<double> ties;
    /// Consecutive evaluated grid points around r_hat sharing its kernel
    /// dimension. Diagnostic only.
    std::size_t plateau = 0;
    /// Per-scale spectra when ScanConfig::keep_spectra is set.
    std::vector<Spectrum> spectra;

    bool operator==(const ScanResult& o) const
    {
        return q == o.q && kind == o.kind && entries == o.entries && r_hat == o.r_hat && betti_hat == o.betti_hat &&
               ties == o.ties && plateau == o.plateau && spectra == o.spectra;
    }
};

struct BettiEstimate
{
    std::size_t betti_hat = 0;
    double r_hat = 0.0;
    std::vector<std::pair<double, double>> curve;
};

/// Scales to evaluate. A single point gets the trivial grid {0}. If the strict
/// diameter bound removes every breakpoint the diameter itself is kept.
inline std::vector<double> resolve_grid(const DistanceMatrix& dm, const ScanConfig& cfg)
{
    if (dm.size() < 2)
        return {0.0};
    const double diam = diameter(dm);
    std::vector<double> grid;
    switch (cfg.grid.kind) {
    case GridKind::Breakpoints: grid = scale_grid(dm); break;
    case GridKind::Uniform:
        for (std::size_t j = 1; j <= cfg.grid.points; ++j)
            grid.push_back(diam * static_cast<double>(j) / static_cast<double>(cfg.grid.points + 1));
        if (cfg.include_diameter)
            grid.push_back(diam);
        break;
    case GridKind::Explicit:
        grid = cfg.grid.values;
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        break;
    }
    if (!cfg.include_diameter) {
        std::vector<double> strict;
        std::copy_if(grid.begin(), grid.end(), std::back_inserter(strict), [&](double r) { return r < diam; });
        if (strict.empty() && !grid.empty())
            strict.push_back(std::min(grid.front(), diam));
        grid = std::move(strict);
    }
    return grid;
}

namespace detail {

/// Number of leading grid values whose (q+1)-skeleton fits under the cap.
inline std::size_t admissible_prefix(const DistanceMatrix& dm, std::span<const double> grid, int dim,
                                     std::size_t cap)
{
    if (grid.empty())
        return 0;
    if (count_simplices(dm, grid.back(), dim, cap) <= cap)
        return grid.size();
    std::size_t lo = 0;
    std::size_t hi = grid.size() - 1; // grid[hi] is known to exceed the cap
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (count_simplices(dm, grid[mid], dim, cap) <= cap)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

struct ScaleOutcome
{
    ScanEntry entry;
    std::vector<double> values; // one per requested criterion
    Spectrum spectrum;
};

inline ScaleOutcome evaluate_scale(const VrFiltration& filt, double r, const ScanConfig& cfg,
                                   std::span<const CriterionKind> kinds)
{
    ScaleOutcome out;
    const WeightedComplex K = filt.at(r);
    out.entry.r = r;
    out.entry.n_simplices = {K.count(cfg.q - 1), K.count(cfg.q), K.count(cfg.q + 1)};
    const SymmetrizedLaplacian L = symmetrized_laplacian(K, cfg.q);
    out.spectrum = spectrum(L);
    out.entry.empty = out.spectrum.empty();
    out.entry.kernel_dim = kernel_dimension(out.spectrum, cfg.tol);
    for (auto kind : kinds) {
        if (kind == CriterionKind::HilbertSchmidt && cfg.standard_hs)
            out.values.push_back(hilbert_schmidt_distance_standard(L, cfg.params));
        else
            out.values.push_back(criterion_value(kind, out.spectrum, cfg.params).value);
    }
    return out;
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// is rethrown after all workers finish.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

inline void select_scale(ScanResult& res)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < res.entries.size(); ++i) {
        const auto& e = res.entries[i];
        if (e.empty || e.skipped)
            continue;
        if (!best || e.value > res.entries[*best].value)
            best = i;
    }
    if (!best)
        throw NoStructureError(res.q);

    const auto& top = res.entries[*best];
    res.r_hat_index = *best;
    res.r_hat = top.r;
    res.betti_hat = top.kernel_dim;
    res.ties.clear();
    for (const auto& e : res.entries)
        if (!e.empty && !e.skipped && e.value == top.value)
            res.ties.push_back(e.r);

    auto same = [&](std::size_t i) {
        const auto& e = res.entries[i];
        return !e.skipped && !e.empty && e.kernel_dim == top.kernel_dim;
    };
    std::size_t lo = *best;
    std::size_t hi = *best;
    while (lo > 0 && same(lo - 1))
        --lo;
    while (hi + 1 < res.entries.size() && same(hi + 1))
        ++hi;
    res.plateau = hi - lo + 1;
}

} // namespace detail

/// One sweep over the grid shared by several criteria; the spectra are
/// computed once. Results are in the order of `kinds`.
inline std::vector<ScanResult> scan_criteria(const DistanceMatrix& dm, const ScanConfig& cfg,
                                             std::span<const CriterionKind> kinds)
{
    cfg.validate();
    const std::vector<double> grid = resolve_grid(dm, cfg);
    const int max_dim = cfg.q + 1;
    const std::size_t admissible = detail::admissible_prefix(dm, grid, max_dim, cfg.max_simplices);

    std::vector<detail::ScaleOutcome> outcomes(grid.size());
    if (admissible > 0) {
        const VrFiltration filt(dm, grid[admissible - 1], max_dim, cfg.weight_floor);
        detail::parallel_for(admissible, cfg.jobs, [&](std::size_t i) {
            outcomes[i] = detail::evaluate_scale(filt, grid[i], cfg, kinds);
        });
    }
    for (std::size_t i = admissible; i < grid.size(); ++i) {
        outcomes[i].entry.r = grid[i];
        outcomes[i].entry.skipped = true;
        outcomes[i].values.assign(kinds.size(), std::numeric_limits<double>::quiet_NaN());
    }

    std::vector<ScanResult> results(kinds.size());
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        ScanResult& res = results[k];
        res.q = cfg.q;
        res.kind = kinds[k];
        res.params = cfg.params;
        res.entries.reserve(grid.size());
        for (const auto& o : outcomes) {
            ScanEntry e = o.entry;
            e.value = o.values[k];
            res.entries.push_back(e);
        }
        if (cfg.keep_spectra)
            for (const auto& o : outcomes)
                res.spectra.push_back(o.spectrum);
    }
    bool any_structure = false;
    for (const auto& o : outcomes)
        any_structure = any_structure || (!o.entry.empty && !o.entry.skipped);
    if (!any_structure)
        throw NoStructureError(cfg.q);
    for (auto& res : results)
        detail::select_scale(res);
    return results;
}

inline ScanResult scan(const DistanceMatrix& dm, const ScanConfig& cfg)
{
    const CriterionKind kinds[] = {cfg.kind};
    return std::move(scan_criteria(dm, cfg, kinds).front());
}

inline BettiEstimate estimate_betti(const DistanceMatrix& dm, const ScanConfig& cfg)
{
    const ScanResult res = scan(dm, cfg);
    BettiEstimate est;
    est.betti_hat = res.betti_hat;
    est.r_hat = res.r_hat;
    est.curve.reserve(res.entries.size());
    for (const auto& e : res.entries)
        est.curve.emplace_back(e.r, e.value);
    return est;
}

} // namespace cohest
