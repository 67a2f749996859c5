#include "heatctl/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace heatctl {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

} // namespace

void write_field_csv(const std::filesystem::path& path, const Field& field) {
    auto out = open_out(path);
    out << "x,value\n";
    const auto x = field.domain().nodes();
    const auto v = field.values();
    for (std::size_t m = 0; m < x.size(); ++m)
        out << format_double(x[m]) << ',' << format_double(v[m]) << '\n';
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& headers,
                       const std::vector<std::vector<double>>& columns) {
    if (columns.empty() || headers.size() != columns.size())
        throw std::invalid_argument("write_columns_csv: header/column mismatch");
    auto out = open_out(path);
    for (std::size_t c = 0; c < headers.size(); ++c)
        out << headers[c] << (c + 1 < headers.size() ? ',' : '\n');
    const std::size_t rows = columns.front().size();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << format_double(columns[c][r]) << (c + 1 < columns.size() ? ',' : '\n');
}

void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& row_labels,
                      const std::vector<double>& col_labels, const std::vector<double>& data,
                      int rows, int cols) {
    if (static_cast<int>(data.size()) != rows * cols)
        throw std::invalid_argument("write_matrix_csv: size mismatch");
    auto out = open_out(path);
    out << "row\\col";
    for (int c = 0; c < cols; ++c)
        out << ',' << (col_labels.empty() ? format_double(c) : format_double(col_labels[static_cast<std::size_t>(c)]));
    out << '\n';
    for (int r = 0; r < rows; ++r) {
        out << (row_labels.empty() ? format_double(r) : format_double(row_labels[static_cast<std::size_t>(r)]));
        for (int c = 0; c < cols; ++c)
            out << ',' << format_double(data[static_cast<std::size_t>(r) * cols + c]);
        out << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<double>& times,
                          const std::vector<Field>& states) {
    if (times.size() != states.size()) throw std::invalid_argument("write_trajectory_csv: size mismatch");
    auto out = open_out(path);
    out << "t";
    if (!states.empty())
        for (double x : states.front().domain().nodes()) out << ',' << format_double(x);
    out << '\n';
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << format_double(times[k]);
        for (double v : states[k].values()) out << ',' << format_double(v);
        out << '\n';
    }
}

nlohmann::json domain_descriptor(const SpectralDomain& domain) {
    nlohmann::json j;
    j["kind"] = to_string(domain.kind());
    j["length"] = domain.length();
    j["modes"] = domain.modes();
    j["grid"] = domain.grid_points();
    j["eigenvalues"] = std::vector<double>(domain.eigenvalues().begin(), domain.eigenvalues().end());
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace heatctl
