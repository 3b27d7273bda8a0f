#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "splr/admm.hpp"
#include "splr/types.hpp"

namespace splr {
namespace io {

// Text formats, all UTF-8 with LF endings:
//  - matrices: one-line header "# rows=<R> cols=<C>", then one row per line,
//    comma-separated, 17 significant digits (lossless for binary64);
//  - datasets: n x d CSV, no header;
//  - traces: CSV with a fixed header row.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open for reading: " + path.string());
  return in;
}

inline void write_rows(std::ofstream& out, const Matrix& m,
                       const std::filesystem::path& path) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

inline std::vector<double> parse_csv_line(const std::string& line,
                                          const std::filesystem::path& path) {
  std::vector<double> row;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string cell = line.substr(pos, comma - pos);
    try {
      row.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InputError("bad numeric cell '" + cell + "' in " + path.string());
    }
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return row;
}

}  // namespace detail

inline void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  auto out = detail::open_out(path);
  out << "# rows=" << m.rows() << " cols=" << m.cols() << '\n';
  detail::write_rows(out, m, path);
}

inline Matrix read_matrix(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  std::string header;
  if (!std::getline(in, header))
    throw InputError("empty matrix file: " + path.string());
  Index rows = 0, cols = 0;
  if (std::sscanf(header.c_str(), "# rows=%td cols=%td", &rows, &cols) != 2)
    throw InputError("bad matrix header in " + path.string());
  Matrix m(rows, cols);
  std::string line;
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line))
      throw InputError("truncated matrix file: " + path.string());
    const auto row = detail::parse_csv_line(line, path);
    if (Index(row.size()) != cols)
      throw InputError("row width mismatch in " + path.string());
    for (Index j = 0; j < cols; ++j) m(i, j) = row[j];
  }
  return m;
}

inline void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  auto out = detail::open_out(path);
  detail::write_rows(out, data.samples(), path);
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(detail::parse_csv_line(line, path));
    if (rows.back().size() != rows.front().size())
      throw InputError("ragged dataset rows in " + path.string());
  }
  if (rows.empty()) throw InputError("empty dataset file: " + path.string());
  Matrix m(Index(rows.size()), Index(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[std::size_t(i)][std::size_t(j)];
  return Dataset(std::move(m));
}

inline std::string trace_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : "nan";
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const FitTrace& trace) {
  auto out = detail::open_out(path);
  out << "iter,objective,err_S,err_L,err_Omega,time_ms\n";
  for (const auto& rec : trace) {
    out << rec.iteration << ',' << format_double(rec.objective) << ','
        << trace_cell(rec.err_sparse) << ',' << trace_cell(rec.err_low_rank)
        << ',' << trace_cell(rec.err_precision) << ','
        << format_double(rec.time_ms) << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

inline void write_admm_trace_csv(const std::filesystem::path& path,
                                 const std::vector<AdmmTraceRecord>& trace) {
  auto out = detail::open_out(path);
  out << "iter,objective,err_S,err_L,err_Omega,time_ms,primal_res,dual_res\n";
  for (const auto& rec : trace) {
    out << rec.iteration << ',' << format_double(rec.objective) << ','
        << trace_cell(rec.err_sparse) << ',' << trace_cell(rec.err_low_rank)
        << ',' << trace_cell(rec.err_precision) << ','
        << format_double(rec.time_ms) << ',' << format_double(rec.primal_res)
        << ',' << format_double(rec.dual_res) << '\n';
  }
  if (!out) throw InputError("write failed: " + path.string());
}

}  // namespace io
}  // namespace splr
