#pragma once

#include <string>
#include <vector>

#include "ddml/data.hpp"

namespace ddml::synth {

/// Column mapping for loading an external dataset. An empty covariate list
/// means "every column other than treatment and outcome, in header order".
struct CsvSchema {
  std::string treatment_column = "t";
  std::string outcome_column = "y";
  std::vector<std::string> covariate_columns;
  TreatmentKind kind = TreatmentKind::kBinary;
};

/// Comma-separated, header row, decimal floats, no missing values. Errors
/// name the offending row/column. The loaded dataset carries no ground truth.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

/// Writes header "t,y,x0,..,x{d-1}" with 17 significant digits, which
/// round-trips doubles exactly.
void save_csv(const Dataset& data, const std::string& path);

}  // namespace ddml::synth
