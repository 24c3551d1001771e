#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "tw/geometry.hpp"
#include "tw/modes.hpp"
#include "tw/smearing.hpp"
#include "tw/wigner.hpp"

namespace tw {

using json = nlohmann::json;

/// %.17g, with "null" for non-finite values.
std::string format_number(double x);

/// Deterministic JSON text. Object keys keep their sorted order, floating
/// point values are printed with 17 significant digits.
std::string dump_json(const json& value, int indent = 2);

/// Layout document: n, m, hbar, t0, epsilon, corridor, l_uv, l_ir, N, profile
/// and per-tile centre, half widths and (when pairs are given) the stored
/// normalization constant.
json layout_to_json(const TilingLayout& layout, const BumpProfile& profile,
                    const std::vector<LocalModePair>* pairs = nullptr);
TilingLayout layout_from_json(const json& doc);
BumpProfile profile_from_json(const json& doc);
json profile_to_json(const BumpProfile& profile);

/// Row-major text with a header naming the matrix and the momentum grid.
std::string matrix_text(const Eigen::MatrixXd& m, const std::string& label,
                        const std::string& grid_fingerprint);
Eigen::MatrixXd parse_matrix_text(const std::string& text);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& doc);

/// One row per grid point: x1,p1,...,value.
std::string distribution_csv(const QuasiDistribution& dist);
json distribution_summary(const QuasiDistribution& dist);

/// Writes to a temporary file in the same directory, then renames it into place.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace tw
