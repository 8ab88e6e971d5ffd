#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rdsurv/data.hpp"
#include "rdsurv/errors.hpp"

namespace rdsurv {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

//! Parses a numeric field; empty fields and "NA" become NaN so that
//! validation can report them with their row index.
inline double parse_field(std::string_view s, std::size_t row) {
  if (s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan")
    return std::numeric_limits<double>::quiet_NaN();
  if (s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc::result_out_of_range)
    return std::numeric_limits<double>::infinity();
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw RowError(ErrorCode::InvalidValue, row, "cannot parse '" + std::string(s) + "' as a number");
  return v;
}

} // namespace detail

//! Reads a comma-delimited table with a header row. Blank lines are skipped;
//! data rows are indexed from 0 in error messages.
inline RawTable parse_csv(std::istream& in) {
  RawTable table;
  std::string line;
  bool have_header = false;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!have_header && line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
        static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
      line.erase(0, 3);
    if (detail::trim(line).empty())
      continue;
    auto fields = detail::split_commas(line);
    if (!have_header) {
      for (auto f : fields)
        table.columns.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw RowError(ErrorCode::InvalidValue, row,
                     "expected " + std::to_string(table.columns.size()) + " fields, got " +
                         std::to_string(fields.size()));
    std::vector<double> values;
    values.reserve(fields.size());
    for (auto f : fields)
      values.push_back(detail::parse_field(f, row));
    table.rows.push_back(std::move(values));
    ++row;
  }
  if (!have_header)
    throw Error(ErrorCode::MissingColumn, "input has no header row");
  return table;
}

inline RawTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return parse_csv(in);
}

//! Writes a dataset in the input schema (time, event, z, x1..xd[, w]).
inline void write_dataset_csv(std::ostream& out, const SurvivalDataset& ds) {
  out.precision(17);
  out << "time,event,z";
  for (const auto& name : ds.covariate_names())
    out << ',' << name;
  const bool fuzzy = ds.design() == Design::Fuzzy;
  if (fuzzy)
    out << ",w";
  out << '\n';
  for (const auto& u : ds.units()) {
    out << u.y << ',' << (u.delta ? 1 : 0) << ',' << u.z;
    for (double v : u.x)
      out << ',' << v;
    if (fuzzy)
      out << ',' << (u.w.value_or(false) ? 1 : 0);
    out << '\n';
  }
}

} // namespace rdsurv
