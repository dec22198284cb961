#pragma once

// CSV and JSON input/output. Numbers are written with 17 significant digits so
// every double round-trips. Files are written to a temporary sibling and
// renamed into place, so a failed run never leaves a partial file behind.

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unistd.h>
#include <vector>

#include "json.hpp"

#include "cyclic/errors.hpp"
#include "cyclic/estimator.hpp"
#include "cyclic/experiments.hpp"
#include "cyclic/kernels.hpp"
#include "cyclic/solver.hpp"

namespace cyclic {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(where + ": cannot parse '" + std::string(text) + "' as a number");
  }
  if (!std::isfinite(v)) throw ValidationError(where + ": non-finite value");
  return v;
}

inline std::vector<double> parse_row(const std::string& line, const std::string& where) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view cell(line.data() + start,
                                (comma == std::string::npos ? line.size() : comma) - start);
    row.push_back(parse_double(cell, where));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return row;
}

struct CsvTable {
  std::size_t cols = 0;
  std::vector<std::vector<double>> rows;
};

// Blank lines are ignored. Every row must have the same number of columns.
inline CsvTable read_csv(const std::filesystem::path& path, bool skip_header = false) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header_pending = skip_header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    auto row = parse_row(line, path.string() + ":" + std::to_string(lineno));
    if (t.rows.empty()) {
      t.cols = row.size();
    } else if (row.size() != t.cols) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.cols) + " columns, found " + std::to_string(row.size()));
    }
    t.rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  if (t.rows.empty()) throw ValidationError("'" + path.string() + "' contains no data rows");
  return t;
}

inline SampleMatrix read_samples(const std::filesystem::path& path, bool skip_header = false) {
  const auto t = read_csv(path, skip_header);
  std::vector<double> data;
  data.reserve(t.rows.size() * t.cols);
  for (const auto& r : t.rows) data.insert(data.end(), r.begin(), r.end());
  return {t.rows.size(), t.cols, std::move(data)};
}

namespace detail {

inline std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("output directory '" + dir.string() + "' does not exist");
  }
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  return tmp;
}

inline void write_plain(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

inline void remove_quietly(const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::remove(path, ec);
}

}  // namespace detail

// Stages files next to their targets and renames them into place only once
// every one of them was written.
class OutputBatch {
 public:
  void add(std::filesystem::path path, std::string content) {
    files_.emplace_back(std::move(path), std::move(content));
  }

  void commit() const {
    std::vector<std::filesystem::path> temps;
    try {
      for (const auto& [path, content] : files_) {
        temps.push_back(detail::temp_sibling(path));
        detail::write_plain(temps.back(), content);
      }
    } catch (...) {
      for (const auto& t : temps) detail::remove_quietly(t);
      throw;
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
      std::error_code ec;
      std::filesystem::rename(temps[i], files_[i].first, ec);
      if (ec) {
        for (std::size_t j = i; j < temps.size(); ++j) detail::remove_quietly(temps[j]);
        throw IoError("cannot move output into '" + files_[i].first.string() + "': " + ec.message());
      }
    }
  }

 private:
  std::vector<std::pair<std::filesystem::path, std::string>> files_;
};

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  OutputBatch b;
  b.add(path, content);
  b.commit();
}

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// JSON numbers keep full precision: nlohmann prints the shortest round-trip
// representation.
inline nlohmann::ordered_json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Kernels and solutions

inline std::string kernel_tabulation_csv(const CyclicKernel& k, std::size_t points = kTabulationSize) {
  if (points < 2) throw ValidationError("kernel tabulation needs at least 2 points");
  std::ostringstream os;
  os << "x,phi\n";
  for (double x : tabulation_nodes(points)) os << format_double(x) << ',' << format_double(k.phi(x)) << '\n';
  return os.str();
}

// Reads an `x,phi` tabulation on the uniform grid x_j = 2 pi j / N. If the
// result misses the constraints it is rescaled numerically.
inline CyclicKernel read_kernel_tabulation(const std::filesystem::path& path) {
  const auto t = read_csv(path, true);
  if (t.cols != 2) throw ValidationError("'" + path.string() + "': kernel file needs columns x,phi");
  const std::size_t n = t.rows.size();
  if (n < 8) throw ValidationError("'" + path.string() + "': kernel file needs at least 8 rows");
  const auto nodes = tabulation_nodes(n);
  std::vector<double> values(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(t.rows[j][0] - nodes[j]) > 1e-9 * kTwoPi) {
      throw ValidationError("'" + path.string() + "': row " + std::to_string(j + 1) +
                            " is not on the uniform grid 2*pi*j/N");
    }
    values[j] = t.rows[j][1];
  }
  if (std::abs(values[0]) > 1e-12) {
    throw ValidationError("'" + path.string() + "': phi(0) must be 0");
  }
  values[0] = 0.0;
  return normalize_kernel(tabulated_kernel(path.stem().string(), values));
}

inline std::string solution_csv(const OptimalKernelSolution& s) {
  std::ostringstream os;
  os << "x,phi,beta_m\n";
  for (std::size_t j = 0; j < s.grid_x.size(); ++j) {
    os << format_double(s.grid_x[j]) << ',' << format_double(s.kernel.phi(s.grid_x[j])) << ','
       << format_double(s.beta_m_grid[j]) << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json solution_json(const OptimalKernelSolution& s) {
  nlohmann::ordered_json j;
  j["lambda1"] = s.lambda1;
  j["lambda2"] = s.lambda2;
  j["objective_value"] = s.objective_value;
  j["m_name"] = s.m_name;
  return j;
}

// ---------------------------------------------------------------------------
// Experiment outputs

inline nlohmann::ordered_json spec_json(const ExperimentSpec& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["seed"] = s.seed;
  if (s.name == "convergence") {
    j["density"] = s.density;
    j["y"] = s.y;
    j["R_list"] = s.R_list;
    j["kernels"] = s.kernels;
    return j;
  }
  j["n"] = s.n;
  j["R"] = s.R;
  j["reps"] = s.reps;
  if (s.name == "theta") {
    j["kernel"] = s.kernel;
    j["theta0"] = s.theta0;
  } else if (s.name == "banana") {
    j["sigma1"] = s.banana.sigma1;
    j["b"] = s.banana.b;
  } else if (s.name == "variance") {
    j["density"] = s.density;
    j["y"] = s.y;
    j["kernels"] = s.kernels;
  }
  return j;
}

inline nlohmann::ordered_json replication_json(const ReplicationResult& r) {
  nlohmann::ordered_json j;
  j["mean"] = r.mean;
  j["sd"] = r.sd;
  j["se"] = r.se();
  return j;
}

inline std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    os << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
  }
  return os.str();
}

// One row per replication; one column per named series.
inline std::string estimates_csv(const std::vector<std::string>& names,
                                 const std::vector<const std::vector<double>*>& series) {
  std::ostringstream os;
  os << "rep";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  const std::size_t reps = series.empty() ? 0 : series.front()->size();
  for (std::size_t i = 0; i < reps; ++i) {
    os << i;
    for (const auto* s : series) os << ',' << format_double((*s)[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace cyclic
