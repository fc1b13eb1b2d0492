#include "ddml/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddml::synth {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace and a trailing CR
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || cell.empty()) {
    throw InputError("load_csv: non-numeric cell '" + cell + "' at data row " +
                     std::to_string(row) + ", column '" + column + "'");
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw InputError("load_csv: '" + path + "' is empty");
  const std::vector<std::string> header = split_line(line);

  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw InputError("load_csv: column '" + name + "' not found in '" + path + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  const std::size_t t_idx = column_index(schema.treatment_column);
  const std::size_t y_idx = column_index(schema.outcome_column);
  std::vector<std::size_t> x_idx;
  if (schema.covariate_columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i != t_idx && i != y_idx) x_idx.push_back(i);
    }
  } else {
    for (const auto& name : schema.covariate_columns) x_idx.push_back(column_index(name));
  }
  if (x_idx.empty()) throw InputError("load_csv: no covariate columns");

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row_no;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw InputError("load_csv: data row " + std::to_string(row_no) + " has " +
                       std::to_string(fields.size()) + " fields, header has " +
                       std::to_string(header.size()));
    }
    std::vector<double> parsed(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      parsed[i] = parse_cell(fields[i], row_no, header[i]);
    }
    rows.push_back(std::move(parsed));
  }
  if (rows.empty()) throw InputError("load_csv: '" + path + "' has a header but no data rows");

  Dataset data;
  data.kind = schema.kind;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  data.x.resize(n, static_cast<Eigen::Index>(x_idx.size()));
  data.t.resize(n);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    data.t[i] = r[t_idx];
    data.y[i] = r[y_idx];
    for (std::size_t j = 0; j < x_idx.size(); ++j) {
      data.x(i, static_cast<Eigen::Index>(j)) = r[x_idx[j]];
    }
    if (schema.kind == TreatmentKind::kBinary && data.t[i] != 0.0 && data.t[i] != 1.0) {
      throw InputError("load_csv: binary treatment column '" + schema.treatment_column +
                       "' has value outside {0,1} at data row " + std::to_string(i + 1));
    }
  }
  return data;
}

void save_csv(const Dataset& data, const std::string& path) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw InputError("save_csv: cannot open '" + path + "' for writing");

  out << "t,y";
  for (Eigen::Index j = 0; j < data.d(); ++j) out << ",x" << j;
  out << "\n";

  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    put(data.t[i]);
    out << ',';
    put(data.y[i]);
    for (Eigen::Index j = 0; j < data.d(); ++j) {
      out << ',';
      put(data.x(i, j));
    }
    out << "\n";
  }
  if (!out) throw InputError("save_csv: write to '" + path + "' failed");
}

}  // namespace ddml::synth
