#pragma once

#include "frechet/stats.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace frechet {

/// Binary stats file, versioned and bit-specified:
///   bytes  0..7   magic "FSTATS01"
///   bytes  8..11  u32 LE  d (feature dimension)
///   bytes 12..15  u32 LE  n (source sample count, 0 if unknown)
///   byte  16      repr: 0 = full Sigma, 1 = centered factor
///   bytes 17..19  reserved, zero
///   then          d doubles LE: mu
///   then          repr 0: d*d doubles LE, row-major Sigma
///                 repr 1: d*n doubles LE, column-major C
inline constexpr char kStatsMagic[8] = {'F', 'S', 'T', 'A', 'T', 'S', '0', '1'};

namespace detail {

inline void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64_le(std::string& out, double v) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

inline double get_f64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

}  // namespace detail

inline void write_stats_file(const std::string& path, const GaussianStats& stats) {
  const index_t d = stats.dim();
  std::string buf;
  buf.append(kStatsMagic, sizeof(kStatsMagic));
  detail::put_u32_le(buf, static_cast<std::uint32_t>(d));
  detail::put_u32_le(buf, static_cast<std::uint32_t>(stats.sample_count() < 0 ? 0 : stats.sample_count()));
  buf.push_back(stats.has_factor() ? char(1) : char(0));
  buf.append(3, char(0));
  for (double v : stats.mu()) detail::put_f64_le(buf, v);
  if (stats.has_factor()) {
    const Matrix& c = stats.factor().values();
    for (index_t j = 0; j < c.cols(); ++j)
      for (index_t i = 0; i < c.rows(); ++i) detail::put_f64_le(buf, c(i, j));
  } else {
    const Matrix& s = stats.full_cov();
    for (index_t i = 0; i < s.rows(); ++i)
      for (index_t j = 0; j < s.cols(); ++j) detail::put_f64_le(buf, s(i, j));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::invalid_argument("write failed: " + path);
}

inline GaussianStats read_stats_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open stats file: " + path);
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(raw.data());

  if (raw.size() < 20) throw std::invalid_argument(path + ": truncated header");
  if (std::memcmp(raw.data(), kStatsMagic, sizeof(kStatsMagic)) != 0)
    throw std::invalid_argument(path + ": bad magic, not a stats file");
  const std::uint32_t d = detail::get_u32_le(p + 8);
  const std::uint32_t n = detail::get_u32_le(p + 12);
  const unsigned char repr = p[16];
  if (d == 0) throw std::invalid_argument(path + ": dimension d is zero");
  if (repr != 0 && repr != 1)
    throw std::invalid_argument(path + ": unknown representation byte " + std::to_string(repr));
  if (p[17] != 0 || p[18] != 0 || p[19] != 0)
    throw std::invalid_argument(path + ": reserved bytes are not zero");

  const std::size_t dd = static_cast<std::size_t>(d);
  const std::size_t payload_count = repr == 0 ? dd * dd : dd * static_cast<std::size_t>(n);
  if (repr == 1 && n == 0)
    throw std::invalid_argument(path + ": factor representation with sample count 0");
  const std::size_t expected = 20 + 8 * (dd + payload_count);
  if (raw.size() != expected)
    throw std::invalid_argument(path + ": size " + std::to_string(raw.size()) +
                                " does not match header (expected " + std::to_string(expected) + ")");

  std::vector<double> mu(dd);
  for (std::size_t i = 0; i < dd; ++i) mu[i] = detail::get_f64_le(p + 20 + 8 * i);
  const unsigned char* payload = p + 20 + 8 * dd;

  if (repr == 0) {
    Matrix sigma(d, d);
    for (std::size_t i = 0; i < dd; ++i)
      for (std::size_t j = 0; j < dd; ++j)
        sigma(static_cast<index_t>(i), static_cast<index_t>(j)) =
            detail::get_f64_le(payload + 8 * (i * dd + j));
    require_finite(sigma, (path + ": covariance").c_str());
    if (asymmetry(sigma) > 1e-9)
      throw std::invalid_argument(path + ": covariance asymmetry exceeds 1e-9 relative");
    return GaussianStats(std::move(mu), FullCov{symmetrize(sigma)},
                         static_cast<std::int64_t>(n));
  }
  Matrix c(static_cast<index_t>(d), static_cast<index_t>(n));
  for (std::size_t idx = 0; idx < payload_count; ++idx)
    c.data()[idx] = detail::get_f64_le(payload + 8 * idx);
  return GaussianStats(std::move(mu), CenteredFactor::from_matrix(std::move(c)),
                       static_cast<std::int64_t>(n));
}

/// CSV of samples, one sample per row, d numeric columns, optional header
/// row auto-detected. Returns the d x k matrix with samples as columns.
inline Matrix read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open samples file: " + path);

  auto parse_cell = [](const std::string& cell, double& out) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
    return *end == '\0';
  };

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r");
      const auto e = cell.find_last_not_of(" \t\r");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  index_t d = -1;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank
    const std::vector<std::string> cells = split(line);
    std::vector<double> values(cells.size());
    bool all_numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i)
      if (!parse_cell(cells[i], values[i])) {
        all_numeric = false;
        if (!first_content_line)
          throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                      ": cell '" + cells[i] + "' is not a number");
        break;
      }
    if (first_content_line) {
      first_content_line = false;
      if (!all_numeric) continue;  // header row
    }
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i]))
        throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                    ": non-finite value in column " + std::to_string(i + 1));
    if (d < 0) d = static_cast<index_t>(values.size());
    if (static_cast<index_t>(values.size()) != d)
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": row has " +
                                  std::to_string(values.size()) + " columns, expected " +
                                  std::to_string(d));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::invalid_argument(path + ": no data rows");
  if (d == 0) throw std::invalid_argument(path + ": rows have no columns");

  Matrix m(d, static_cast<index_t>(rows.size()));
  for (index_t j = 0; j < m.cols(); ++j)
    for (index_t i = 0; i < d; ++i) m(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  return m;
}

/// Writes a sample matrix (columns) as CSV rows with an optional header.
inline void write_samples_csv(const std::string& path, const Matrix& samples, bool header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  if (header) {
    for (index_t i = 0; i < samples.rows(); ++i)
      out << (i ? ",f" : "f") << i;
    out << "\n";
  }
  char buf[64];
  for (index_t j = 0; j < samples.cols(); ++j) {
    for (index_t i = 0; i < samples.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", samples(i, j));
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw std::invalid_argument("write failed: " + path);
}

/// Shortest-round-trip-safe float formatting for CSV output.
inline std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace frechet
