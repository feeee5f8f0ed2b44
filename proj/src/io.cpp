#include "spsense/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spsense {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  for (char ch : line) {
    if (ch == delimiter) {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

bool parse_real(const std::string& field, double& value) {
  if (field.empty()) return false;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end && std::isfinite(value);
}

bool parse_label(const std::string& field, Label& value) {
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec == std::errc() && ptr == field.data() + field.size()) return true;
  // Accept integer-valued reals such as "3.0".
  double real = 0.0;
  if (!parse_real(field, real) || real != std::floor(real) || std::abs(real) > 1e9) return false;
  value = static_cast<Label>(real);
  return true;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

}  // namespace

Dataset parse_delimited(std::istream& in, const std::string& source, const CsvOptions& options) {
  Dataset out;
  std::vector<double> values;
  LabelList labels;
  Index cols = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, options.delimiter);

    if (first_content) {
      first_content = false;
      bool numeric = true;
      double tmp = 0.0;
      for (const auto& f : fields) numeric = numeric && parse_real(f, tmp);
      if (!numeric) {
        bool looks_like_data = false;
        for (const auto& f : fields) looks_like_data = looks_like_data || parse_real(f, tmp);
        if (!looks_like_data) {
          out.header = fields;
          continue;
        }
      }
    }

    std::size_t start = 0;
    if (options.labeled) {
      Label label = 0;
      require(fields.size() >= 2, ErrorCode::LabelColumnMissing,
              where(source, line_no) + "expected a label column followed by values");
      require(parse_label(fields[0], label), ErrorCode::LabelColumnMissing,
              where(source, line_no) + "first column '" + fields[0] + "' is not an integer label");
      labels.push_back(label);
      start = 1;
    }
    const auto width = static_cast<Index>(fields.size() - start);
    if (cols < 0) cols = width;
    require(width == cols, ErrorCode::ParseError,
            where(source, line_no) + "expected " + std::to_string(cols) + " values, found " +
                std::to_string(width));
    for (std::size_t k = start; k < fields.size(); ++k) {
      double v = 0.0;
      require(parse_real(fields[k], v), ErrorCode::ParseError,
              where(source, line_no) + "field " + std::to_string(k + 1) + " ('" + fields[k] +
                  "') is not a finite number");
      values.push_back(v);
    }
    ++rows;
  }
  require(rows > 0, ErrorCode::ParseError, source + ": no data rows");

  out.values.resize(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      out.values(i, j) = values[static_cast<std::size_t>(i * cols + j)];
  if (options.labeled) out.labels = std::move(labels);
  return out;
}

Dataset read_delimited(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::FileNotFound, "cannot open '" + path + "'");
  return parse_delimited(in, path, options);
}

std::string format_real(double value) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

void write_delimited(std::ostream& out, const Matrix& values, const LabelList* labels,
                     const std::vector<std::string>& header, char delimiter) {
  require(labels == nullptr || static_cast<Index>(labels->size()) == values.rows(),
          ErrorCode::DimensionMismatch, "write_delimited: label count differs from row count");
  if (!header.empty()) {
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? std::string(1, delimiter) : "") << header[k];
    out << '\n';
  }
  for (Index i = 0; i < values.rows(); ++i) {
    bool first = true;
    if (labels) {
      out << (*labels)[static_cast<std::size_t>(i)];
      first = false;
    }
    for (Index j = 0; j < values.cols(); ++j) {
      if (!first) out << delimiter;
      out << format_real(values(i, j));
      first = false;
    }
    out << '\n';
  }
}

void write_delimited(const std::string& path, const Matrix& values, const LabelList* labels,
                     const std::vector<std::string>& header, char delimiter) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::FileNotFound, "cannot write '" + path + "'");
  write_delimited(out, values, labels, header, delimiter);
}

Vector read_costs(const std::string& path) {
  const Dataset data = read_delimited(path);
  require(data.values.rows() == 1 || data.values.cols() == 1, ErrorCode::ParseError,
          path + ": costs must be a single row or a single column");
  return data.values.rows() == 1 ? Vector(data.values.row(0).transpose())
                                 : Vector(data.values.col(0));
}

// ---------------------------------------------------------------------------

Json to_json(const ResultDocument& doc) {
  Json j;
  j["schema_version"] = doc.schema_version;
  j["command"] = doc.command;
  j["parameters"] = doc.parameters;
  j["selected_sensors"] = doc.selected_sensors;
  if (doc.error_curve) {
    Json curve = Json::array();
    for (const auto& [p, err] : *doc.error_curve) curve.push_back({{"n_sensors", p}, {"rmse", err}});
    j["error_curve"] = std::move(curve);
  }
  if (doc.accuracy) j["accuracy"] = *doc.accuracy;
  j["warnings"] = doc.warnings;
  for (const auto& [key, value] : doc.extra.items()) j[key] = value;
  j["timing_ms"] = doc.timing_ms;
  return j;
}

ResultDocument result_from_json(const Json& j) {
  try {
    ResultDocument doc;
    doc.schema_version = j.at("schema_version").get<std::string>();
    doc.command = j.at("command").get<std::string>();
    doc.parameters = j.at("parameters");
    doc.selected_sensors = j.at("selected_sensors").get<IndexList>();
    if (j.contains("error_curve")) {
      doc.error_curve.emplace();
      for (const auto& point : j.at("error_curve"))
        doc.error_curve->emplace_back(point.at("n_sensors").get<Index>(),
                                      point.at("rmse").get<double>());
    }
    if (j.contains("accuracy")) doc.accuracy = j.at("accuracy").get<double>();
    if (j.contains("warnings")) doc.warnings = j.at("warnings").get<std::vector<std::string>>();
    doc.timing_ms = j.at("timing_ms").get<long long>();
    static const char* const known[] = {"schema_version", "command",  "parameters", "selected_sensors",
                                        "error_curve",    "accuracy", "warnings",   "timing_ms"};
    for (const auto& [key, value] : j.items()) {
      bool is_known = false;
      for (const char* k : known) is_known = is_known || key == k;
      if (!is_known) doc.extra[key] = value;
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("result document: ") + e.what());
  }
}

Json matrix_to_json(const Matrix& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  require(rows >= 0 && cols >= 0 && static_cast<Index>(data.size()) == rows * cols,
          ErrorCode::ParseError, "matrix: data length does not match its shape");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  return m;
}

namespace {

Json spec_to_json(const BasisSpec& spec) {
  Json j{{"kind", basis_kind_name(spec.kind)},
         {"randomized", spec.randomized},
         {"seed", spec.seed},
         {"n_oversamples", spec.n_oversamples},
         {"n_power_iters", spec.n_power_iters}};
  j["n_basis_modes"] = spec.n_basis_modes ? Json(*spec.n_basis_modes) : Json(nullptr);
  return j;
}

BasisSpec spec_from_json(const Json& j) {
  BasisSpec spec;
  spec.kind = parse_basis_kind(j.at("kind").get<std::string>());
  spec.randomized = j.at("randomized").get<bool>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.n_oversamples = j.at("n_oversamples").get<Index>();
  spec.n_power_iters = j.at("n_power_iters").get<Index>();
  if (!j.at("n_basis_modes").is_null()) spec.n_basis_modes = j.at("n_basis_modes").get<Index>();
  return spec;
}

Json lda_to_json(const LdaModel& m) {
  return Json{{"classes", m.classes},
              {"class_means", matrix_to_json(m.class_means)},
              {"directions", matrix_to_json(m.directions)},
              {"centroids", matrix_to_json(m.centroids)},
              {"eigenvalues", matrix_to_json(m.eigenvalues)},
              {"n_degenerate", m.n_degenerate},
              {"shrinkage", m.shrinkage}};
}

LdaModel lda_from_json(const Json& j) {
  LdaModel m;
  m.classes = j.at("classes").get<LabelList>();
  m.class_means = matrix_from_json(j.at("class_means"));
  m.directions = matrix_from_json(j.at("directions"));
  m.centroids = matrix_from_json(j.at("centroids"));
  m.eigenvalues = matrix_from_json(j.at("eigenvalues")).col(0);
  m.n_degenerate = j.at("n_degenerate").get<Index>();
  m.shrinkage = j.at("shrinkage").get<double>();
  return m;
}

template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json basis_to_json(const FittedBasis& basis) {
  Json j{{"spec", spec_to_json(basis.spec())},
         {"modes", matrix_to_json(basis.modes())},
         {"active_modes", basis.active_modes()}};
  j["singular_values"] =
      basis.singular_values() ? Json(std::vector<double>(basis.singular_values()->data(),
                                                         basis.singular_values()->data() +
                                                             basis.singular_values()->size()))
                              : Json(nullptr);
  return j;
}

FittedBasis basis_from_json(const Json& j) {
  return guarded("basis", [&] {
    std::optional<Vector> sv;
    if (!j.at("singular_values").is_null()) {
      const auto values = j.at("singular_values").get<std::vector<double>>();
      sv = Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
    }
    return FittedBasis(spec_from_json(j.at("spec")), matrix_from_json(j.at("modes")), sv,
                       j.at("active_modes").get<Index>());
  });
}

Json sspor_to_json(const SsporModel& model) {
  Json j{{"schema_version", kModelSchemaVersion},
         {"model", "sspor"},
         {"basis", basis_to_json(model.basis())},
         {"ranking",
          {{"order", model.ranking().order},
           {"n_meaningful", model.ranking().n_meaningful},
           {"seed", model.ranking().seed},
           {"pivot_scores", model.ranking().pivot_scores}}},
         {"n_sensors", model.n_sensors()},
         {"seed", model.seed()}};
  if (model.cost()) {
    const auto& c = *model.cost();
    j["optimizer"] = {{"kind", "ccqr"},
                      {"weight", c.weight},
                      {"costs", std::vector<double>(c.costs.data(), c.costs.data() + c.costs.size())}};
  } else {
    j["optimizer"] = {{"kind", "qr"}};
  }
  return j;
}

SsporModel sspor_from_json(const Json& j, WarningSink warnings) {
  return guarded("sspor model", [&] {
    require(j.at("model").get<std::string>() == "sspor", ErrorCode::ParseError,
            "model document is not an sspor model");
    SensorRanking ranking;
    ranking.order = j.at("ranking").at("order").get<IndexList>();
    ranking.n_meaningful = j.at("ranking").at("n_meaningful").get<Index>();
    ranking.seed = j.at("ranking").at("seed").get<std::uint64_t>();
    ranking.pivot_scores = j.at("ranking").at("pivot_scores").get<std::vector<double>>();
    std::optional<CostVector> cost;
    if (j.at("optimizer").at("kind").get<std::string>() == "ccqr") {
      const auto costs = j.at("optimizer").at("costs").get<std::vector<double>>();
      cost = CostVector{Eigen::Map<const Vector>(costs.data(), static_cast<Index>(costs.size())),
                        j.at("optimizer").at("weight").get<double>()};
    }
    return SsporModel(basis_from_json(j.at("basis")), std::move(ranking),
                      j.at("n_sensors").get<Index>(), std::move(cost),
                      j.at("seed").get<std::uint64_t>(), std::move(warnings));
  });
}

Json sspoc_to_json(const SspocModel& model) {
  const auto* refit = dynamic_cast<const LdaClassifier*>(&model.refit_classifier());
  const auto* proto = dynamic_cast<const LdaClassifier*>(&model.prototype());
  require(refit != nullptr && proto != nullptr, ErrorCode::InvalidParams,
          "only LDA-backed SSPOC models can be saved");
  const auto& opt = model.options();
  Json options{{"threshold", opt.threshold},
               {"l1_penalty", opt.l1_penalty},
               {"lasso_max_iter", opt.lasso_max_iter},
               {"lasso_tol", opt.lasso_tol},
               {"omp_residual_tol", opt.omp_residual_tol}};
  options["n_sensors"] = opt.n_sensors ? Json(*opt.n_sensors) : Json(nullptr);
  return Json{{"schema_version", kModelSchemaVersion},
              {"model", "sspoc"},
              {"basis", basis_to_json(model.basis())},
              {"options", std::move(options)},
              {"classifier", {{"kind", "lda"}, {"shrinkage", proto->shrinkage()}}},
              {"weights", matrix_to_json(model.weights())},
              {"solution",
               {{"s", matrix_to_json(model.solution().s)},
                {"iterations", model.solution().iterations},
                {"converged", model.solution().converged}}},
              {"selected_sensors", model.selected_sensors()},
              {"refit", lda_to_json(refit->model())}};
}

SspocModel sspoc_from_json(const Json& j, WarningSink warnings) {
  return guarded("sspoc model", [&] {
    require(j.at("model").get<std::string>() == "sspoc", ErrorCode::ParseError,
            "model document is not an sspoc model");
    const Json& o = j.at("options");
    SspocOptions options;
    options.threshold = o.at("threshold").get<double>();
    options.l1_penalty = o.at("l1_penalty").get<double>();
    options.lasso_max_iter = o.at("lasso_max_iter").get<Index>();
    options.lasso_tol = o.at("lasso_tol").get<double>();
    options.omp_residual_tol = o.at("omp_residual_tol").get<double>();
    if (!o.at("n_sensors").is_null()) options.n_sensors = o.at("n_sensors").get<Index>();

    SparseSolution<double> solution;
    solution.s = matrix_from_json(j.at("solution").at("s"));
    solution.iterations = j.at("solution").at("iterations").get<Index>();
    solution.converged = j.at("solution").at("converged").get<bool>();
    solution.row_support = rows_above<double>(solution.s, kSupportTolerance);

    return SspocModel(basis_from_json(j.at("basis")),
                      std::make_unique<LdaClassifier>(
                          j.at("classifier").at("shrinkage").get<double>()),
                      options, matrix_from_json(j.at("weights")), std::move(solution),
                      j.at("selected_sensors").get<IndexList>(),
                      std::make_unique<LdaClassifier>(lda_from_json(j.at("refit"))),
                      std::move(warnings));
  });
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::FileNotFound, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::FileNotFound, "cannot write '" + path + "'");
  out << text;
}

}  // namespace spsense
