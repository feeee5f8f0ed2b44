#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spsense/classification.hpp"
#include "spsense/classifiers.hpp"
#include "spsense/reconstruction.hpp"
#include "spsense/utils.hpp"

namespace spsense {

using Json = nlohmann::ordered_json;

inline constexpr const char* kResultSchemaVersion = "1.0";
inline constexpr const char* kModelSchemaVersion = "1.0";

// ---------------------------------------------------------------------------
// Delimited text

struct Dataset {
  Matrix values;
  std::optional<LabelList> labels;
  std::vector<std::string> header;
};

struct CsvOptions {
  char delimiter = ',';
  /// First column holds integer class labels.
  bool labeled = false;
};

/// Reads a rectangular delimited-text table. A first line that does not parse
/// as numbers is taken as a header. Blank lines are skipped. Errors name the
/// 1-based line number.
Dataset parse_delimited(std::istream& in, const std::string& source, const CsvOptions& options = {});
Dataset read_delimited(const std::string& path, const CsvOptions& options = {});

/// 17 significant digits; round-trips every finite double.
std::string format_real(double value);

void write_delimited(std::ostream& out, const Matrix& values, const LabelList* labels = nullptr,
                     const std::vector<std::string>& header = {}, char delimiter = ',');
void write_delimited(const std::string& path, const Matrix& values,
                     const LabelList* labels = nullptr,
                     const std::vector<std::string>& header = {}, char delimiter = ',');

/// Cost file: one value per candidate location, in one row or one column.
Vector read_costs(const std::string& path);

// ---------------------------------------------------------------------------
// Result documents

struct ResultDocument {
  std::string schema_version = kResultSchemaVersion;
  std::string command;
  Json parameters = Json::object();
  IndexList selected_sensors;
  std::optional<std::vector<std::pair<Index, double>>> error_curve;
  std::optional<double> accuracy;
  std::vector<std::string> warnings;
  /// Command-specific extras (ranking, training accuracy, output paths).
  Json extra = Json::object();
  long long timing_ms = 0;
};

Json to_json(const ResultDocument& doc);
ResultDocument result_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Model persistence

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json basis_to_json(const FittedBasis& basis);
FittedBasis basis_from_json(const Json& j);

Json sspor_to_json(const SsporModel& model);
SsporModel sspor_from_json(const Json& j, WarningSink warnings = stderr_warnings());

/// Only LDA-backed models can be stored.
Json sspoc_to_json(const SspocModel& model);
SspocModel sspoc_from_json(const Json& j, WarningSink warnings = stderr_warnings());

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace spsense
