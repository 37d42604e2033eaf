#include "greenlab/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace greenlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const Eigen::MatrixXd& m,
               const std::vector<std::string>& header) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  if (!header.empty()) {
    for (size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << "\n";
  }
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c)
      os << (c ? "," : "") << format_double(m(r, c));
    os << "\n";
  }
}

Eigen::MatrixXd read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (!line.empty() && !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '+' ||
                           line[0] == '.'))
      continue;  // header
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

void write_json(const std::string& path, const ojson& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << j.dump(2) << "\n";
}

ojson read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  ojson j;
  is >> j;
  return j;
}

void ensure_dir(const std::string& path) {
  std::filesystem::create_directories(path);
}

std::string hash_matrix(const Eigen::MatrixXd& m) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(m.data());
  size_t n = static_cast<size_t>(m.size()) * sizeof(double);
  unsigned long long h = 14695981039346656037ull;
  for (size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", h);
  return buf;
}

}  // namespace greenlab
