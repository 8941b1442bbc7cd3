#pragma once

// JSON and CSV renderings of complexes, scans and spectra.

#include "complex.hpp"
#include "hodge.hpp"
#include "io.hpp"
#include "selection.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>
#include <string>

namespace cohest {

/// Finite numbers as-is, +-inf as the strings "inf"/"-inf", NaN as null.
inline nlohmann::json json_number(double v)
{
    if (std::isnan(v))
        return nullptr;
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

inline nlohmann::json to_json(const WeightedComplex& K)
{
    nlohmann::json skeleta = nlohmann::json::array();
    nlohmann::json weights = nlohmann::json::array();
    for (int d = 0; d <= K.max_dim(); ++d) {
        nlohmann::json sk = nlohmann::json::array();
        for (const auto& s : K.skeleton(d))
            sk.push_back(s.vertices);
        skeleta.push_back(std::move(sk));
        const auto w = K.weights(d);
        weights.push_back(std::vector<double>(w.begin(), w.end()));
    }
    return {{"scale", K.scale()}, {"skeleta", std::move(skeleta)}, {"weights", std::move(weights)}};
}

inline nlohmann::json to_json(const ScanResult& res)
{
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& e : res.entries) {
        nlohmann::json row = {{"r", e.r},
                              {"D", json_number(e.value)},
                              {"n_simplices", {e.n_simplices[0], e.n_simplices[1], e.n_simplices[2]}},
                              {"kernel_dim", e.kernel_dim}};
        if (e.skipped)
            row["flag"] = "skipped";
        else if (e.empty)
            row["flag"] = "empty";
        curve.push_back(std::move(row));
    }
    return {{"q", res.q},
            {"criterion", std::string(to_string(res.kind))},
            {"s", res.params.s},
            {"t0", json_number(res.params.t0)},
            {"r_hat", res.r_hat},
            {"betti_hat", res.betti_hat},
            {"ties", res.ties},
            {"plateau", res.plateau},
            {"curve", std::move(curve)}};
}

/// One row per grid point: r, D, kernel_dim, |S_{q-1}|, |S_q|, |S_{q+1}|, flag.
inline void write_scan_csv(std::ostream& out, const ScanResult& res)
{
    out << "r,D,kernel_dim,n_q_minus_1,n_q,n_q_plus_1,flag\n";
    for (const auto& e : res.entries) {
        out << format_double(e.r) << ',' << (e.skipped ? std::string("nan") : format_double(e.value)) << ','
            << e.kernel_dim << ',' << e.n_simplices[0] << ',' << e.n_simplices[1] << ',' << e.n_simplices[2] << ','
            << (e.skipped ? "skipped" : e.empty ? "empty" : "") << '\n';
    }
}

/// One row per grid point: r followed by the ascending eigenvalues.
inline void write_spectra_csv(std::ostream& out, const ScanResult& res)
{
    for (std::size_t i = 0; i < res.entries.size(); ++i) {
        out << format_double(res.entries[i].r);
        if (i < res.spectra.size())
            for (double l : res.spectra[i].eigenvalues)
                out << ',' << format_double(l);
        out << '\n';
    }
}

} // namespace cohest
