#include "core/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mucogarch {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // Trim surrounding spaces.
    size_t a = field.find_first_not_of(" \t\r");
    size_t b = field.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? std::string() : field.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  char* end = nullptr;
  *out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ReturnsSample read_returns_csv(const std::string& path, double delta_override) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);

  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  Eigen::Index width = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (size_t i = 0; i < fields.size(); ++i) {
      if (!parse_double(fields[i], &row[i])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && header.empty()) {
        header = fields;
        width = static_cast<Eigen::Index>(fields.size());
        continue;
      }
      fail(ErrorCode::ParseError,
           path + ": line " + std::to_string(lineno) + ": non-numeric field");
    }
    if (width < 0) width = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != width) {
      fail(ErrorCode::ParseError, path + ": line " + std::to_string(lineno) + ": expected " +
                                      std::to_string(width) + " fields, got " +
                                      std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::ParseError, path + ": no data rows");

  const bool has_time = !header.empty() && (header[0] == "t" || header[0] == "T");
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index first_col = has_time ? 1 : 0;
  const Eigen::Index d = width - first_col;
  if (d < 1) fail(ErrorCode::ParseError, path + ": no return columns");

  ReturnsSample s;
  s.d = static_cast<int>(d);
  s.returns.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) s.returns(i, k) = rows[static_cast<size_t>(i)][static_cast<size_t>(first_col + k)];
  }
  if (has_time) {
    if (n < 2) fail(ErrorCode::ParseError, path + ": need at least 2 rows to infer delta");
    const double dt = rows[1][0] - rows[0][0];
    if (!(dt > 0.0)) fail(ErrorCode::ParseError, path + ": time column not increasing");
    for (Eigen::Index i = 1; i < n; ++i) {
      const double step = rows[static_cast<size_t>(i)][0] - rows[static_cast<size_t>(i) - 1][0];
      if (std::abs(step - dt) > 1e-6 * std::max(1.0, std::abs(dt))) {
        fail(ErrorCode::ParseError,
             path + ": line " + std::to_string(i + (header.empty() ? 1 : 2)) +
                 ": time grid not uniform");
      }
    }
    s.delta = dt;
  } else {
    if (!(delta_override > 0.0)) {
      fail(ErrorCode::InvalidConfig, path + ": no time column; pass the sampling interval");
    }
    s.delta = delta_override;
  }
  if (delta_override > 0.0) s.delta = delta_override;
  return s;
}

void write_returns_csv(const std::string& path, const ReturnsSample& sample) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << "t";
  for (int k = 1; k <= sample.d; ++k) out << ",g" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < sample.returns.rows(); ++i) {
    out << fmt17(static_cast<double>(i + 1) * sample.delta);
    for (Eigen::Index k = 0; k < sample.returns.cols(); ++k) {
      out << ',' << fmt17(sample.returns(i, k));
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::ParseError, "short write to " + path);
}

void write_vol_csv(const std::string& path, const ReturnsSample& sample) {
  if (sample.vol_Y.empty() || sample.vol_Y.size() != sample.vol_times.size()) {
    fail(ErrorCode::InvalidConfig, "sample carries no volatility path");
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::ParseError, "cannot open " + path + " for writing");
  const int d = sample.d;
  out << "t";
  for (int c = 1; c <= d; ++c)
    for (int r = 1; r <= d; ++r) out << ",y" << r << c;
  out << '\n';
  for (size_t i = 0; i < sample.vol_Y.size(); ++i) {
    out << fmt17(sample.vol_times[i]);
    const Vec v = vec(sample.vol_Y[i]);
    for (Eigen::Index k = 0; k < v.size(); ++k) out << ',' << fmt17(v(k));
    out << '\n';
  }
  if (!out) fail(ErrorCode::ParseError, "short write to " + path);
}

}  // namespace mucogarch
