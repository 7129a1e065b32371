#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mbal/types.hpp"

namespace mbal {

// Observed data: covariate matrix, binary treatment, optional outcome.
// Immutable after construction and safe to share across threads.
struct Sample {
  Matrix covariates;     // n x p
  IntVector treatment;   // entries in {0, 1}
  std::optional<Vector> outcome;
  std::vector<std::string> ids;  // optional row labels, empty if absent

  Index n() const { return covariates.rows(); }
  Index p() const { return covariates.cols(); }
  Index group_size(int t) const;

  // Validates all invariants: n >= 4, groups of size >= 2, finite entries.
  static Sample make(Matrix covariates, IntVector treatment,
                     std::optional<Vector> outcome = std::nullopt,
                     std::vector<std::string> ids = {});
};

struct GroupView {
  const Sample* parent;
  int group;  // 0 or 1
  std::vector<Index> indices;

  Index size() const { return static_cast<Index>(indices.size()); }
};

GroupView group_view(const Sample& sample, int t);

// CSV ingestion.  Comma-separated, UTF-8, header row, '.' decimal separator.
// Treatment entries must be literally "0", "1", "0.0" or "1.0".  When
// covariate_cols is absent, all other numeric columns are used in header
// order.
Sample load_csv(const std::string& path, const std::string& treatment_col,
                const std::optional<std::string>& outcome_col = std::nullopt,
                const std::optional<std::vector<std::string>>& covariate_cols =
                    std::nullopt);

// Writes covariates/treatment/outcome with 17 significant digits; a reload
// through load_csv reproduces the sample bit-exactly.
void write_csv(const Sample& sample, const std::string& path,
               const std::string& treatment_col = "treatment",
               const std::string& outcome_col = "outcome");

}  // namespace mbal
