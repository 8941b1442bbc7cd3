#pragma once

// CSV input/output for point clouds, distance matrices and scan curves.
// Files are plain numeric CSV without a header; LF or CRLF line endings.

#include "error.hpp"
#include "metric.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace cohest {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n\xEF\xBB\xBF";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view field, std::size_t line, std::size_t col)
{
    field = trim(field);
    if (!field.empty() && field.front() == '+')
        field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
        throw ValidationError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                              ": not a number: '" + std::string(field) + "'");
    return v;
}

} // namespace detail

/// Numeric CSV rows; blank lines are ignored, every row must have the same
/// number of fields.
inline Eigen::MatrixXd read_numeric_csv(std::istream& in)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view body = detail::trim(line);
        if (body.empty())
            continue;
        std::vector<double> row;
        std::size_t start = 0;
        for (;;) {
            const auto comma = body.find(',', start);
            row.push_back(detail::parse_number(body.substr(start, comma - start), lineno, row.size() + 1));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError("line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(rows.front().size()) + " fields, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw ValidationError("no points");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

inline Eigen::MatrixXd read_numeric_csv_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot open '" + path + "'");
    try {
        return read_numeric_csv(in);
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

inline PointCloud read_point_cloud(const std::string& path)
{
    return PointCloud(read_numeric_csv_file(path));
}

inline DistanceMatrix read_distance_matrix(const std::string& path)
{
    try {
        return DistanceMatrix(read_numeric_csv_file(path));
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        if (msg.rfind(path, 0) == 0)
            throw;
        throw ValidationError(path + ": " + msg);
    }
}

/// Round-trippable decimal representation.
inline std::string format_double(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_point_cloud(std::ostream& out, const PointCloud& pc)
{
    const auto& x = pc.matrix();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (j > 0)
                out << ',';
            out << format_double(x(i, j));
        }
        out << '\n';
    }
}

inline void write_point_cloud(const std::string& path, const PointCloud& pc)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    write_point_cloud(out, pc);
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

} // namespace cohest
