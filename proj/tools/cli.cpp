#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "spsense/classification.hpp"
#include "spsense/datasets.hpp"
#include "spsense/io.hpp"
#include "spsense/reconstruction.hpp"

namespace spsense::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BasisOptions {
  std::string basis = "identity";
  std::optional<Index> modes;
  Index oversamples = 10;
  Index power_iters = 2;
};

struct CommonOptions {
  std::uint64_t seed = 0;
  std::string delimiter = ",";
  std::string output;
};

void add_basis_options(CLI::App* cmd, BasisOptions& b) {
  cmd->add_option("--basis", b.basis, "identity | svd | rsvd | randproj")
      ->check(CLI::IsMember({"identity", "svd", "rsvd", "randproj"}))
      ->capture_default_str();
  cmd->add_option("--modes", b.modes, "number of basis modes r");
  cmd->add_option("--oversamples", b.oversamples, "rsvd oversampling columns")->capture_default_str();
  cmd->add_option("--power-iters", b.power_iters, "rsvd power iterations")->capture_default_str();
}

void add_common_options(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--seed", c.seed, std::string("random seed (default from ") + kSeedEnvVar + ")")
      ->capture_default_str();
  cmd->add_option("--delimiter", c.delimiter, "field delimiter for delimited-text input")
      ->capture_default_str();
  cmd->add_option("--output,-o", c.output, "write the result document here instead of stdout");
}

char delimiter_of(const CommonOptions& c) {
  if (c.delimiter == "\\t" || c.delimiter == "tab") return '\t';
  if (c.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
  return c.delimiter[0];
}

BasisSpec make_basis_spec(const BasisOptions& b, std::uint64_t seed) {
  BasisSpec spec;
  spec.kind = parse_basis_kind(b.basis);
  spec.randomized = b.basis == "rsvd";
  spec.n_basis_modes = b.modes;
  spec.seed = seed;
  spec.n_oversamples = b.oversamples;
  spec.n_power_iters = b.power_iters;
  return spec;
}

Json basis_parameters(const BasisOptions& b) {
  Json j{{"basis", b.basis}};
  j["modes"] = b.modes ? Json(*b.modes) : Json(nullptr);
  if (b.basis == "rsvd") {
    j["oversamples"] = b.oversamples;
    j["power_iters"] = b.power_iters;
  }
  return j;
}

void merge(Json& into, const Json& from) {
  for (const auto& [k, v] : from.items()) into[k] = v;
}

std::vector<Index> parse_sensor_range(const std::string& text) {
  std::vector<Index> out;
  const auto dots = text.find("..");
  auto to_index = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used != s.size()) throw UsageError("");
      return static_cast<Index>(v);
    } catch (const std::exception&) {
      throw UsageError("--sensor-range: '" + text + "' is not 'a..b' or a comma list");
    }
  };
  if (dots != std::string::npos) {
    const Index lo = to_index(text.substr(0, dots));
    const Index hi = to_index(text.substr(dots + 2));
    if (hi < lo) throw UsageError("--sensor-range: empty range '" + text + "'");
    for (Index p = lo; p <= hi; ++p) out.push_back(p);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(to_index(item));
  }
  if (out.empty()) throw UsageError("--sensor-range is empty");
  return out;
}

// ---------------------------------------------------------------------------

struct RankArgs {
  std::string data;
  BasisOptions basis;
  CommonOptions common;
  std::string optimizer = "qr";
  std::string costs;
  double cost_weight = 0.0;
  std::optional<Index> n_sensors;
  std::string save_model;
};

std::optional<CostVector> load_cost(const std::string& optimizer, const std::string& costs_path,
                                    double weight) {
  if (optimizer != "ccqr") return std::nullopt;
  if (costs_path.empty()) throw UsageError("--optimizer ccqr requires --costs");
  return CostVector{read_costs(costs_path), weight};
}

ResultDocument run_rank(const RankArgs& a, const WarningSink& warn) {
  const Dataset data = read_delimited(a.data, {delimiter_of(a.common), false});
  auto cost = load_cost(a.optimizer, a.costs, a.cost_weight);
  const SsporModel model = sspor_fit(data.values, make_basis_spec(a.basis, a.common.seed), cost,
                                     a.n_sensors, a.common.seed, warn);
  if (!a.save_model.empty()) write_text_file(a.save_model, sspor_to_json(model).dump(2) + "\n");

  ResultDocument doc;
  doc.command = "rank";
  doc.parameters = {{"data", a.data}};
  merge(doc.parameters, basis_parameters(a.basis));
  doc.parameters["optimizer"] = a.optimizer;
  if (a.optimizer == "ccqr") {
    doc.parameters["costs"] = a.costs;
    doc.parameters["cost_weight"] = a.cost_weight;
  }
  doc.parameters["n_sensors"] = model.n_sensors();
  doc.parameters["seed"] = a.common.seed;
  doc.selected_sensors = model.selected_sensors();
  doc.extra["ranked_sensors"] = model.ranking().order;
  doc.extra["n_meaningful"] = model.ranking().n_meaningful;
  doc.extra["pivot_scores"] = model.ranking().pivot_scores;
  if (!a.save_model.empty()) doc.extra["model_path"] = a.save_model;
  return doc;
}

struct ReconstructArgs : RankArgs {
  std::string model;
  std::string sensor_range;
  std::string test;
  std::string curve_csv;
};

ResultDocument run_reconstruct(const ReconstructArgs& a, const WarningSink& warn) {
  const std::vector<Index> range = parse_sensor_range(a.sensor_range);
  if (a.data.empty() && a.model.empty()) throw UsageError("reconstruct needs training data or --model");
  if (a.model.empty() == false && a.test.empty() && a.data.empty())
    throw UsageError("reconstruct --model needs --test data");

  const char delim = delimiter_of(a.common);
  std::optional<Dataset> training;
  if (!a.data.empty()) training = read_delimited(a.data, {delim, false});

  std::optional<SsporModel> model;
  if (!a.model.empty()) {
    model.emplace(sspor_from_json(read_json_file(a.model), warn));
  } else {
    model.emplace(sspor_fit(training->values, make_basis_spec(a.basis, a.common.seed),
                            load_cost(a.optimizer, a.costs, a.cost_weight), a.n_sensors,
                            a.common.seed, warn));
  }
  const Matrix test =
      a.test.empty() ? training->values : read_delimited(a.test, {delim, false}).values;
  const std::vector<double> errors = model->reconstruction_error(test, range);

  ResultDocument doc;
  doc.command = "reconstruct";
  if (!a.model.empty()) {
    doc.parameters = {{"model", a.model}};
  } else {
    doc.parameters = {{"data", a.data}};
    merge(doc.parameters, basis_parameters(a.basis));
    doc.parameters["optimizer"] = a.optimizer;
    if (a.optimizer == "ccqr") {
      doc.parameters["costs"] = a.costs;
      doc.parameters["cost_weight"] = a.cost_weight;
    }
    doc.parameters["seed"] = a.common.seed;
  }
  doc.parameters["n_sensors"] = model->n_sensors();
  doc.parameters["test"] = a.test.empty() ? a.data : a.test;
  doc.parameters["sensor_range"] = range;
  doc.selected_sensors = model->selected_sensors();
  doc.error_curve.emplace();
  for (std::size_t k = 0; k < range.size(); ++k) doc.error_curve->emplace_back(range[k], errors[k]);

  std::string csv_path = a.curve_csv;
  if (csv_path.empty() && !a.common.output.empty())
    csv_path = std::filesystem::path(a.common.output).replace_extension(".csv").string();
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    require(static_cast<bool>(csv), ErrorCode::FileNotFound, "cannot write '" + csv_path + "'");
    csv << "n_sensors,rmse\n";
    for (const auto& [p, e] : *doc.error_curve) csv << p << ',' << format_real(e) << '\n';
    doc.extra["curve_csv"] = csv_path;
  }
  return doc;
}

struct ClassifyArgs {
  std::string data;
  BasisOptions basis;
  CommonOptions common;
  std::optional<Index> n_sensors;
  double l1_penalty = 0.1;
  double threshold = 1e-10;
  double train_frac = 0.75;
  double shrinkage = kDefaultShrinkage;
  std::string save_model;
};

ResultDocument run_classify(const ClassifyArgs& a, const WarningSink& warn) {
  if (!(a.train_frac > 0.0 && a.train_frac <= 1.0))
    fail(ErrorCode::InvalidParams, "--train-frac must lie in (0, 1]");
  const Dataset data = read_delimited(a.data, {delimiter_of(a.common), true});
  const Index m = data.values.rows();
  const LabelList& labels = *data.labels;

  SeededRng rng(a.common.seed);
  const IndexList order = shuffled_complement(m, {}, rng);
  Index n_train = static_cast<Index>(std::floor(a.train_frac * static_cast<double>(m)));
  n_train = std::clamp<Index>(n_train, 1, m);
  const bool all_train = n_train == m;
  if (all_train) warn("no held-out rows (train fraction covers all data); accuracy is on training data");
  const IndexList train_rows(order.begin(), order.begin() + n_train);
  const IndexList test_rows = all_train ? train_rows : IndexList(order.begin() + n_train, order.end());

  auto take = [&](const IndexList& rows) {
    LabeledData out;
    out.values.resize(static_cast<Index>(rows.size()), data.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.values.row(static_cast<Index>(i)) = data.values.row(rows[i]);
      out.labels.push_back(labels[static_cast<std::size_t>(rows[i])]);
    }
    return out;
  };
  const LabeledData train = take(train_rows);
  const LabeledData test = take(test_rows);

  SspocOptions options;
  options.n_sensors = a.n_sensors;
  options.l1_penalty = a.l1_penalty;
  options.threshold = a.threshold;
  const SspocModel model =
      sspoc_fit(train.values, train.labels, make_basis_spec(a.basis, a.common.seed), options,
                std::make_unique<LdaClassifier>(a.shrinkage), warn);
  if (!a.save_model.empty()) write_text_file(a.save_model, sspoc_to_json(model).dump(2) + "\n");

  const auto& sensors = model.selected_sensors();
  const LabelList test_pred = model.predict(sample_columns(test.values, sensors));
  const LabelList train_pred = model.predict(sample_columns(train.values, sensors));

  ResultDocument doc;
  doc.command = "classify";
  doc.parameters = {{"data", a.data}};
  merge(doc.parameters, basis_parameters(a.basis));
  doc.parameters["n_sensors"] = a.n_sensors ? Json(*a.n_sensors) : Json(nullptr);
  doc.parameters["l1_penalty"] = a.l1_penalty;
  doc.parameters["threshold"] = a.threshold;
  doc.parameters["shrinkage"] = a.shrinkage;
  doc.parameters["train_frac"] = a.train_frac;
  doc.parameters["seed"] = a.common.seed;
  doc.selected_sensors = sensors;
  doc.accuracy = accuracy(test.labels, test_pred);
  doc.extra["train_accuracy"] = accuracy(train.labels, train_pred);
  doc.extra["n_train"] = train_rows.size();
  doc.extra["n_test"] = test_rows.size();
  if (!a.save_model.empty()) doc.extra["model_path"] = a.save_model;
  return doc;
}

struct GenerateArgs {
  std::string kind;
  CommonOptions common;
  Index n = 1001;
  Index r = 11;
  Index rows = 100;
  Index cols = 50;
  Index rank = 3;
  Index per_class = 500;
  Index dim = 2;
  double separation = 6.0;
  std::string out;
};

ResultDocument run_generate(const GenerateArgs& a) {
  if (a.out.empty()) throw UsageError("generate needs an output path");
  ResultDocument doc;
  doc.command = "generate";
  doc.parameters = {{"kind", a.kind}};
  Matrix values;
  LabelList labels;
  bool labeled = false;
  if (a.kind == "vandermonde") {
    values = vandermonde_rows(unit_grid(a.n), a.r);
    doc.parameters["n"] = a.n;
    doc.parameters["r"] = a.r;
  } else if (a.kind == "abs-quadratic") {
    values = abs_quadratic(unit_grid(a.n));
    doc.parameters["n"] = a.n;
  } else if (a.kind == "lowrank") {
    values = low_rank_matrix(a.rows, a.cols, a.rank, a.common.seed);
    doc.parameters["rows"] = a.rows;
    doc.parameters["cols"] = a.cols;
    doc.parameters["rank"] = a.rank;
    doc.parameters["seed"] = a.common.seed;
  } else {
    LabeledData d = two_gaussians(a.per_class, a.dim, a.separation, a.common.seed);
    values = std::move(d.values);
    labels = std::move(d.labels);
    labeled = true;
    doc.parameters["per_class"] = a.per_class;
    doc.parameters["dim"] = a.dim;
    doc.parameters["separation"] = a.separation;
    doc.parameters["seed"] = a.common.seed;
  }
  write_delimited(a.out, values, labeled ? &labels : nullptr, {}, delimiter_of(a.common));
  doc.parameters["out"] = a.out;
  doc.extra["rows"] = values.rows();
  doc.extra["cols"] = values.cols();
  return doc;
}

Json error_document(const std::string& command, ErrorCode code, int exit_code,
                    const std::string& message) {
  return Json{{"schema_version", kResultSchemaVersion},
              {"command", command},
              {"error", {{"code", error_name(code)}, {"exit_code", exit_code}, {"message", message}}}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Data-driven sparse sensor placement for reconstruction and classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "spsense 1.0");

  const std::uint64_t seed_default = default_seed();

  RankArgs rank;
  rank.common.seed = seed_default;
  auto* rank_cmd = app.add_subcommand("rank", "rank candidate sensor locations for reconstruction");
  rank_cmd->add_option("data", rank.data, "snapshot matrix (rows = examples)")->required();
  add_basis_options(rank_cmd, rank.basis);
  add_common_options(rank_cmd, rank.common);
  rank_cmd->add_option("--optimizer", rank.optimizer, "qr | ccqr")
      ->check(CLI::IsMember({"qr", "ccqr"}))
      ->capture_default_str();
  rank_cmd->add_option("--costs", rank.costs, "per-location costs (one row or column)");
  rank_cmd->add_option("--cost-weight", rank.cost_weight, "cost penalty weight")->capture_default_str();
  rank_cmd->add_option("--n-sensors", rank.n_sensors, "number of sensors to select");
  rank_cmd->add_option("--save-model", rank.save_model, "write the fitted model as JSON");

  ReconstructArgs recon;
  recon.common.seed = seed_default;
  auto* recon_cmd =
      app.add_subcommand("reconstruct", "reconstruction error as a function of sensor count");
  recon_cmd->add_option("data", recon.data, "training snapshot matrix");
  recon_cmd->add_option("--model", recon.model, "fitted model JSON from rank --save-model");
  recon_cmd->add_option("--sensor-range", recon.sensor_range, "a..b or comma list")->required();
  recon_cmd->add_option("--test", recon.test, "test snapshots (default: training data)");
  recon_cmd->add_option("--curve-csv", recon.curve_csv, "plot-ready n_sensors,rmse CSV");
  add_basis_options(recon_cmd, recon.basis);
  add_common_options(recon_cmd, recon.common);
  recon_cmd->add_option("--optimizer", recon.optimizer, "qr | ccqr")
      ->check(CLI::IsMember({"qr", "ccqr"}))
      ->capture_default_str();
  recon_cmd->add_option("--costs", recon.costs, "per-location costs");
  recon_cmd->add_option("--cost-weight", recon.cost_weight, "cost penalty weight");
  recon_cmd->add_option("--n-sensors", recon.n_sensors, "model sensor count");

  ClassifyArgs cls;
  cls.common.seed = seed_default;
  auto* cls_cmd = app.add_subcommand("classify", "select sensors for classification (SSPOC)");
  cls_cmd->add_option("data", cls.data, "labeled data, first column = integer label")->required();
  add_basis_options(cls_cmd, cls.basis);
  add_common_options(cls_cmd, cls.common);
  cls_cmd->add_option("--n-sensors", cls.n_sensors, "number of sensors (default: automatic)");
  cls_cmd->add_option("--l1-penalty", cls.l1_penalty, "multi-task lasso penalty")->capture_default_str();
  cls_cmd->add_option("--threshold", cls.threshold, "row-norm selection threshold")->capture_default_str();
  cls_cmd->add_option("--train-frac", cls.train_frac, "training fraction")->capture_default_str();
  cls_cmd->add_option("--shrinkage", cls.shrinkage, "LDA shrinkage")->capture_default_str();
  cls_cmd->add_option("--save-model", cls.save_model, "write the fitted model as JSON");

  GenerateArgs gen;
  gen.common.seed = seed_default;
  auto* gen_cmd = app.add_subcommand("generate", "write a synthetic fixture");
  gen_cmd->add_option("--kind", gen.kind, "vandermonde | abs-quadratic | lowrank | two-gaussians")
      ->check(CLI::IsMember({"vandermonde", "abs-quadratic", "lowrank", "two-gaussians"}))
      ->required();
  gen_cmd->add_option("out", gen.out, "output file")->required();
  gen_cmd->add_option("--n", gen.n, "grid points")->capture_default_str();
  gen_cmd->add_option("--r", gen.r, "number of monomials")->capture_default_str();
  gen_cmd->add_option("--rows", gen.rows, "lowrank rows")->capture_default_str();
  gen_cmd->add_option("--cols", gen.cols, "lowrank columns")->capture_default_str();
  gen_cmd->add_option("--rank", gen.rank, "lowrank rank")->capture_default_str();
  gen_cmd->add_option("--per-class", gen.per_class, "two-gaussians rows per class")->capture_default_str();
  gen_cmd->add_option("--dim", gen.dim, "two-gaussians dimension")->capture_default_str();
  gen_cmd->add_option("--separation", gen.separation, "two-gaussians mean separation")->capture_default_str();
  gen_cmd->add_option("--seed", gen.common.seed, "random seed")->capture_default_str();
  gen_cmd->add_option("--delimiter", gen.common.delimiter, "field delimiter")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  std::string command = "unknown";
  const CommonOptions* common = nullptr;
  if (rank_cmd->parsed()) command = "rank", common = &rank.common;
  if (recon_cmd->parsed()) command = "reconstruct", common = &recon.common;
  if (cls_cmd->parsed()) command = "classify", common = &cls.common;
  if (gen_cmd->parsed()) command = "generate", common = &gen.common;

  std::vector<std::string> warnings;
  const WarningSink warn = [&](const std::string& msg) {
    warnings.push_back(msg);
    err << "warning: " << msg << '\n';
  };

  const auto start = std::chrono::steady_clock::now();
  try {
    ResultDocument doc;
    if (command == "rank") doc = run_rank(rank, warn);
    if (command == "reconstruct") doc = run_reconstruct(recon, warn);
    if (command == "classify") doc = run_classify(cls, warn);
    if (command == "generate") doc = run_generate(gen);
    doc.warnings = warnings;
    doc.timing_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    const std::string text = to_json(doc).dump(2) + "\n";
    if (common && !common->output.empty()) {
      write_text_file(common->output, text);
    } else {
      out << text;
    }
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    out << error_document(command, ErrorCode::InvalidParams, kExitUsage, e.what()).dump(2) << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    const int exit_code = kExitErrorBase + static_cast<int>(e.code());
    err << "error: " << error_name(e.code()) << ": " << e.what() << '\n';
    out << error_document(command, e.code(), exit_code, e.what()).dump(2) << '\n';
    return exit_code;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace spsense::cli
