#pragma once

#include "heatctl/domain.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace heatctl {

/// All writers emit UTF-8, LF line endings, doubles with 17 significant
/// digits, so repeated runs with the same config are byte-identical.

std::string format_double(double v);

void write_field_csv(const std::filesystem::path& path, const Field& field);

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& headers,
                       const std::vector<std::vector<double>>& columns);

/// Matrix with optional row labels (first column) and a header row.
void write_matrix_csv(const std::filesystem::path& path, const std::vector<double>& row_labels,
                      const std::vector<double>& col_labels, const std::vector<double>& data,
                      int rows, int cols);

/// Trajectory: one row per time, one column per grid node (t first).
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<double>& times,
                          const std::vector<Field>& states);

nlohmann::json domain_descriptor(const SpectralDomain& domain);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace heatctl
