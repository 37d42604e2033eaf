#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>
#include <vector>

namespace greenlab {

/// Byte-stable float formatting shared by every CSV/JSON artifact.
std::string format_double(double v);

void write_csv(const std::string& path, const Eigen::MatrixXd& m,
               const std::vector<std::string>& header = {});
Eigen::MatrixXd read_csv(const std::string& path);

/// Ordered JSON so repeated runs serialize byte-identically.
using ojson = nlohmann::ordered_json;

void write_json(const std::string& path, const ojson& j);
ojson read_json(const std::string& path);

void ensure_dir(const std::string& path);

/// FNV-1a over the raw bytes of a matrix; used for geometry hashes.
std::string hash_matrix(const Eigen::MatrixXd& m);

}  // namespace greenlab
