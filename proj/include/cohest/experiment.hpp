#pragma once

// Monte-Carlo harness: sample synthetic data with consecutive seeds, run the
// scale selection for several criteria on the same sample, and tabulate how
// often each criterion recovers the expected Betti number.

#include "error.hpp"
#include "metric.hpp"
#include "selection.hpp"
#include "serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace cohest {

struct ExperimentSpec
{
    std::string name;
    SamplerConfig sampler;
    ScanConfig scan;
    std::vector<CriterionKind> criteria{std::begin(kAllCriteria), std::end(kAllCriteria)};
    std::size_t trials = 50;
    std::size_t expected_betti = 1;
    std::uint64_t seed_base = 0;

    void validate() const
    {
        sampler.validate();
        scan.validate();
        if (trials < 1)
            throw ValidationError("trials must be >= 1");
        if (criteria.empty())
            throw ValidationError("at least one criterion is required");
    }
};

struct TrialRecord
{
    std::uint64_t seed = 0;
    bool ok = false;
    double r_hat = 0.0;
    std::size_t betti_hat = 0;
    std::string error;
    /// Wall time of the shared sweep; not part of the JSON report by default.
    double seconds = 0.0;
};

struct CriterionReport
{
    CriterionKind kind{};
    std::map<std::size_t, std::size_t> histogram;
    std::size_t failed = 0;
    std::size_t correct = 0;
    double percent_correct = 0.0;
    std::vector<TrialRecord> trials;
};

struct ExperimentReport
{
    std::string name;
    std::size_t trials = 0;
    std::size_t expected_betti = 0;
    std::vector<CriterionReport> criteria;

    const CriterionReport* find(CriterionKind k) const
    {
        for (const auto& c : criteria)
            if (c.kind == k)
                return &c;
        return nullptr;
    }
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback)
{
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

inline double parse_time(const nlohmann::json& j, const char* key, double fallback)
{
    if (!j.contains(key))
        return fallback;
    const auto& v = j.at(key);
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
        return std::numeric_limits<double>::infinity();
    return v.get<double>();
}

inline Shape parse_shape(const nlohmann::json& s)
{
    const auto kind = s.at("shape").get<std::string>();
    if (kind == "circle")
        return CircleShape{get_or(s, "radius", 1.0)};
    if (kind == "two_circles")
        return TwoCirclesShape{get_or(s, "radius", 0.5), get_or(s, "separation", 2.0), get_or(s, "density_param", 0.0)};
    if (kind == "nonuniform_circle")
        return NonuniformCircleShape{get_or(s, "radius", 1.0), get_or(s, "density_param", 0.9)};
    throw ValidationError("unknown shape '" + kind + "'");
}

} // namespace detail

inline GridSpec parse_grid(const nlohmann::json& g)
{
    GridSpec grid;
    const auto kind = g.at("kind").get<std::string>();
    if (kind == "breakpoints")
        grid.kind = GridKind::Breakpoints;
    else if (kind == "uniform") {
        grid.kind = GridKind::Uniform;
        grid.points = g.at("points").get<std::size_t>();
    } else if (kind == "explicit") {
        grid.kind = GridKind::Explicit;
        grid.values = g.at("values").get<std::vector<double>>();
    } else
        throw ValidationError("unknown grid kind '" + kind + "'");
    return grid;
}

inline ExperimentSpec parse_experiment(const nlohmann::json& j)
{
    ExperimentSpec spec;
    try {
        spec.name = detail::get_or<std::string>(j, "name", "experiment");
        const auto& s = j.at("sampler");
        spec.sampler.shape = detail::parse_shape(s);
        spec.sampler.n_points = s.at("n_points").get<std::size_t>();
        spec.sampler.noise_sigma = detail::get_or(s, "noise_sigma", 0.0);
        spec.trials = j.at("trials").get<std::size_t>();
        spec.expected_betti = j.at("expected_betti").get<std::size_t>();
        spec.seed_base = detail::get_or<std::uint64_t>(j, "seed_base", 0);
        spec.scan.q = j.at("q").get<int>();
        spec.scan.params.s = detail::parse_time(j, "s", 1.0);
        spec.scan.params.t0 = detail::parse_time(j, "t0", 250.0);
        spec.scan.tol.rel = detail::get_or(j, "tol_rel", 1e-8);
        spec.scan.params.kernel_tol = spec.scan.tol;
        spec.scan.include_diameter = detail::get_or(j, "include_diameter", false);
        spec.scan.max_simplices = detail::get_or<std::size_t>(j, "max_simplices", 200'000);
        spec.scan.standard_hs = detail::get_or<std::string>(j, "hs_inner", "weighted") == "standard";
        if (j.contains("grid"))
            spec.scan.grid = parse_grid(j.at("grid"));
        if (j.contains("criteria")) {
            spec.criteria.clear();
            for (const auto& c : j.at("criteria")) {
                const auto k = parse_criterion(c.get<std::string>());
                if (!k)
                    throw ValidationError("unknown criterion '" + c.get<std::string>() + "'");
                spec.criteria.push_back(*k);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("experiment spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

/// Trials use seeds seed_base + i; each trial samples once and evaluates all
/// criteria on that sample. A failing trial is recorded and the run goes on.
inline ExperimentReport run_experiment(const ExperimentSpec& spec, unsigned jobs = 1)
{
    spec.validate();
    const std::size_t nk = spec.criteria.size();
    std::vector<std::vector<TrialRecord>> records(spec.trials, std::vector<TrialRecord>(nk));

    detail::parallel_for(spec.trials, jobs, [&](std::size_t i) {
        SamplerConfig cfg = spec.sampler;
        cfg.seed = spec.seed_base + i;
        ScanConfig scan_cfg = spec.scan;
        scan_cfg.jobs = 1;
        const auto start = std::chrono::steady_clock::now();
        auto& row = records[i];
        for (auto& rec : row)
            rec.seed = cfg.seed;
        try {
            const DistanceMatrix dm = pairwise_distances(sample(cfg));
            const auto results = scan_criteria(dm, scan_cfg, spec.criteria);
            for (std::size_t k = 0; k < nk; ++k) {
                row[k].ok = true;
                row[k].r_hat = results[k].r_hat;
                row[k].betti_hat = results[k].betti_hat;
            }
        } catch (const std::exception& e) {
            for (auto& rec : row)
                rec.error = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (auto& rec : row)
            rec.seconds = secs;
    });

    ExperimentReport report;
    report.name = spec.name;
    report.trials = spec.trials;
    report.expected_betti = spec.expected_betti;
    for (std::size_t k = 0; k < nk; ++k) {
        CriterionReport cr;
        cr.kind = spec.criteria[k];
        for (std::size_t i = 0; i < spec.trials; ++i) {
            const auto& rec = records[i][k];
            if (rec.ok) {
                ++cr.histogram[rec.betti_hat];
                cr.correct += rec.betti_hat == spec.expected_betti ? 1 : 0;
            } else
                ++cr.failed;
            cr.trials.push_back(rec);
        }
        cr.percent_correct = 100.0 * static_cast<double>(cr.correct) / static_cast<double>(spec.trials);
        report.criteria.push_back(std::move(cr));
    }
    return report;
}

inline nlohmann::json to_json(const ExperimentReport& r, bool include_timing = false)
{
    nlohmann::json crit = nlohmann::json::array();
    for (const auto& c : r.criteria) {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [b, n] : c.histogram)
            hist[std::to_string(b)] = n;
        nlohmann::json trials = nlohmann::json::array();
        for (const auto& t : c.trials) {
            nlohmann::json row = {{"seed", t.seed}};
            if (t.ok) {
                row["r_hat"] = t.r_hat;
                row["betti_hat"] = t.betti_hat;
            } else
                row["error"] = t.error;
            if (include_timing)
                row["seconds"] = t.seconds;
            trials.push_back(std::move(row));
        }
        crit.push_back({{"criterion", std::string(to_string(c.kind))},
                        {"histogram", std::move(hist)},
                        {"failed", c.failed},
                        {"total", r.trials},
                        {"correct", c.correct},
                        {"percent_correct", c.percent_correct},
                        {"trials", std::move(trials)}});
    }
    return {{"name", r.name},
            {"trials", r.trials},
            {"expected_betti", r.expected_betti},
            {"criteria", std::move(crit)}};
}

/// Counts per estimated value 0..B and > B with B = max(2, expected), then
/// total and percent correct.
inline void render_table(std::ostream& out, const ExperimentReport& r)
{
    const std::size_t top = std::max<std::size_t>(2, r.expected_betti);
    const auto label = [](CriterionKind k) -> std::string {
        switch (k) {
        case CriterionKind::RelativeEntropy: return "Relative Entropy";
        case CriterionKind::HilbertSchmidt: return "Hilbert-Schmidt";
        case CriterionKind::TraceDifference: return "Difference of Traces";
        }
        return "?";
    };
    std::ostringstream head;
    head << std::left << std::setw(22) << "Method" << std::right;
    for (std::size_t b = 0; b <= top; ++b)
        head << std::setw(6) << b;
    head << std::setw(6) << (">" + std::to_string(top)) << std::setw(8) << "failed" << std::setw(8) << "total"
         << std::setw(10) << "correct";
    out << head.str() << '\n' << std::string(head.str().size(), '-') << '\n';
    for (const auto& c : r.criteria) {
        out << std::left << std::setw(22) << label(c.kind) << std::right;
        std::size_t above = 0;
        for (const auto& [b, n] : c.histogram)
            above += b > top ? n : 0;
        for (std::size_t b = 0; b <= top; ++b) {
            const auto it = c.histogram.find(b);
            out << std::setw(6) << (it == c.histogram.end() ? 0 : it->second);
        }
        out << std::setw(6) << above << std::setw(8) << c.failed << std::setw(8) << r.trials << std::setw(9)
            << std::fixed << std::setprecision(0) << c.percent_correct << "%\n";
        out.unsetf(std::ios::fixed);
    }
}

} // namespace cohest
