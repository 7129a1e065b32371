#include "mbal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mbal/errors.hpp"

namespace mbal {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Index Sample::group_size(int t) const {
  Index c = 0;
  for (Index i = 0; i < treatment.size(); ++i)
    if (treatment[i] == t) ++c;
  return c;
}

Sample Sample::make(Matrix covariates, IntVector treatment,
                    std::optional<Vector> outcome,
                    std::vector<std::string> ids) {
  const Index n = covariates.rows();
  if (treatment.size() != n)
    throw DimensionMismatch("treatment length does not match covariate rows");
  if (n < 4) throw ValidationError("need at least 4 subjects");
  Index n1 = 0, n0 = 0;
  for (Index i = 0; i < n; ++i) {
    if (treatment[i] == 1)
      ++n1;
    else if (treatment[i] == 0)
      ++n0;
    else
      throw NonBinaryTreatment("treatment entries must be 0 or 1");
  }
  if (n1 == 0 || n0 == 0) throw EmptyGroup("one treatment group is empty");
  if (n1 < 2 || n0 < 2)
    throw GroupTooSmall("each treatment group needs at least 2 subjects");
  if (!covariates.allFinite())
    throw ValidationError("covariates contain non-finite values");
  if (outcome) {
    if (outcome->size() != n)
      throw DimensionMismatch("outcome length does not match covariate rows");
    if (!outcome->allFinite())
      throw ValidationError("outcome contains non-finite values");
  }
  if (!ids.empty() && static_cast<Index>(ids.size()) != n)
    throw DimensionMismatch("id count does not match covariate rows");

  Sample s;
  s.covariates = std::move(covariates);
  s.treatment = std::move(treatment);
  s.outcome = std::move(outcome);
  s.ids = std::move(ids);
  return s;
}

GroupView group_view(const Sample& sample, int t) {
  if (t != 0 && t != 1) throw ValidationError("group must be 0 or 1");
  GroupView v;
  v.parent = &sample;
  v.group = t;
  for (Index i = 0; i < sample.n(); ++i)
    if (sample.treatment[i] == t) v.indices.push_back(i);
  if (v.indices.empty())
    throw EmptyGroup("no subject with treatment " + std::to_string(t));
  return v;
}

Sample load_csv(const std::string& path, const std::string& treatment_col,
                const std::optional<std::string>& outcome_col,
                const std::optional<std::vector<std::string>>& covariate_cols) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open file: " + path);

  std::string line;
  if (!std::getline(is, line)) throw ValidationError("empty file: " + path);
  if (!line.empty() && line.back() == '\n') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  auto column_index = [&](const std::string& name) -> Index {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw MissingColumn(name);
    return static_cast<Index>(it - header.begin());
  };

  const Index t_col = column_index(treatment_col);
  std::optional<Index> y_col;
  if (outcome_col) y_col = column_index(*outcome_col);

  std::vector<std::vector<std::string>> rows;
  long line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != header.size())
      throw ValidationError("row " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
    rows.push_back(std::move(fields));
  }
  const Index n = static_cast<Index>(rows.size());
  if (n == 0) throw ValidationError("no data rows in " + path);

  // Resolve covariate columns: explicit list, or every other column whose
  // entries all parse as numbers.
  std::vector<Index> x_cols;
  if (covariate_cols) {
    for (const auto& name : *covariate_cols) {
      Index c = column_index(name);
      if (c == t_col || (y_col && c == *y_col))
        throw ValidationError("covariate column '" + name +
                              "' duplicates treatment/outcome");
      x_cols.push_back(c);
    }
  } else {
    for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
      if (c == t_col || (y_col && c == *y_col)) continue;
      bool numeric = true;
      for (Index i = 0; i < n && numeric; ++i) {
        double v;
        numeric = parse_double(rows[i][c], v);
      }
      if (numeric) x_cols.push_back(c);
    }
  }
  if (x_cols.empty()) throw ValidationError("no covariate columns found");

  Matrix X(n, static_cast<Index>(x_cols.size()));
  IntVector T(n);
  std::optional<Vector> Y;
  if (y_col) Y = Vector(n);

  for (Index i = 0; i < n; ++i) {
    const long row_no = i + 2;  // 1-based, after the header
    const std::string& t_raw = rows[i][t_col];
    if (t_raw == "0" || t_raw == "0.0")
      T[i] = 0;
    else if (t_raw == "1" || t_raw == "1.0")
      T[i] = 1;
    else
      throw NonBinaryTreatment("row " + std::to_string(row_no) +
                               ": treatment value '" + t_raw +
                               "' is not 0/1");
    for (size_t j = 0; j < x_cols.size(); ++j) {
      double v;
      if (!parse_double(rows[i][x_cols[j]], v) || !std::isfinite(v))
        throw NonNumericValue(row_no, header[x_cols[j]]);
      X(i, static_cast<Index>(j)) = v;
    }
    if (y_col) {
      double v;
      if (!parse_double(rows[i][*y_col], v) || !std::isfinite(v))
        throw NonNumericValue(row_no, header[*y_col]);
      (*Y)[i] = v;
    }
  }

  return Sample::make(std::move(X), std::move(T), std::move(Y));
}

void write_csv(const Sample& sample, const std::string& path,
               const std::string& treatment_col,
               const std::string& outcome_col) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path);

  for (Index j = 0; j < sample.p(); ++j) {
    if (j) os << ',';
    os << "x" << (j + 1);
  }
  os << ',' << treatment_col;
  if (sample.outcome) os << ',' << outcome_col;
  os << '\n';

  char buf[40];
  for (Index i = 0; i < sample.n(); ++i) {
    for (Index j = 0; j < sample.p(); ++j) {
      if (j) os << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", sample.covariates(i, j));
      os << buf;
    }
    os << ',' << sample.treatment[i];
    if (sample.outcome) {
      std::snprintf(buf, sizeof(buf), "%.17g", (*sample.outcome)[i]);
      os << ',' << buf;
    }
    os << '\n';
  }
  if (!os.good()) throw IoError("write failed: " + path);
}

}  // namespace mbal
