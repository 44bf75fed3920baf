#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wltls/arow.hpp"
#include "wltls/common.hpp"
#include "wltls/dataset.hpp"
#include "wltls/evaluation.hpp"
#include "wltls/model.hpp"

namespace wltls::cli {

namespace {

using nlohmann::json;

LossKind loss_from_name(const std::string& name) {
  const auto kind = parse_loss(name);
  if (!kind) {
    throw error("unknown loss '" + name + "' (use exp, squared, log, hinge, "
                "squaredhinge or hamming)");
  }
  return *kind;
}

IndexBase base_from_flag(uint32_t flag) {
  if (flag > 1) {
    throw error("--index-base must be 0 or 1");
  }
  return flag == 0 ? IndexBase::zero : IndexBase::one;
}

// --threads wins, then WLTLS_THREADS, then the hardware count.
unsigned pick_threads(std::optional<uint32_t> flag) {
  if (flag.has_value()) return detail::resolve_threads(*flag);
  if (const char* env = std::getenv("WLTLS_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0') {
      throw error("WLTLS_THREADS is not a number: '" + std::string(env) + "'");
    }
    return detail::resolve_threads(static_cast<uint32_t>(v));
  }
  return detail::resolve_threads(0);
}

std::vector<uint32_t> parse_width_list(const std::string& text) {
  std::vector<uint32_t> widths;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    widths.push_back(static_cast<uint32_t>(std::stoul(tok)));
  }
  if (widths.empty()) {
    throw error("--b needs a comma separated list of slice widths");
  }
  return widths;
}

struct DataFlags {
  uint32_t index_base = 1;
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--index-base", flags.index_base,
                  "Feature index base of libsvm files (0 or 1)")
      ->default_val(1);
}

// Extends the label space to `override_classes` by minting labels beyond the
// largest one seen, so codes can be sized for classes absent from the file.
std::vector<int64_t> extended_label_map(const Dataset& data, uint32_t override_classes) {
  std::vector<int64_t> map = data.label_map();
  if (override_classes < map.size()) {
    throw error("--classes " + std::to_string(override_classes) + " is below the " +
                std::to_string(map.size()) + " labels present in the data");
  }
  int64_t next = 0;
  for (int64_t l : map) next = std::max(next, l);
  while (map.size() < override_classes) {
    map.push_back(++next);
  }
  return map;
}

int cmd_train(const std::string& data_path, const std::string& model_path,
              uint32_t b, const std::string& loss_name_arg, uint32_t epochs, double r,
              uint64_t seed, std::optional<uint32_t> threads_flag, const DataFlags& df,
              uint32_t override_classes, const std::string& log_path) {
  const LossKind kind = loss_from_name(loss_name_arg);
  const unsigned threads = pick_threads(threads_flag);

  Dataset data = Dataset::load_file(data_path, base_from_flag(df.index_base));
  std::vector<int64_t> label_map = data.label_map();
  uint32_t num_classes = data.num_classes();
  if (override_classes > 0) {
    label_map = extended_label_map(data, override_classes);
    num_classes = override_classes;
  }
  if (num_classes < 2) {
    throw error("training needs at least 2 classes, found " + std::to_string(num_classes));
  }

  const TrellisGraph graph = TrellisGraph::build(num_classes, b);
  const ClassAssignment assignment = ClassAssignment::random(num_classes, seed);

  // Labels above the file's own class count never occur in the samples, so
  // training with the extended map is safe.
  Dataset train_data = override_classes > 0
                           ? Dataset::from_samples(
                                 [&] {
                                   std::vector<SparseVector> xs;
                                   xs.reserve(data.size());
                                   for (std::size_t i = 0; i < data.size(); ++i)
                                     xs.push_back(data.x(i));
                                   return xs;
                                 }(),
                                 [&] {
                                   std::vector<uint32_t> ys;
                                   ys.reserve(data.size());
                                   for (std::size_t i = 0; i < data.size(); ++i)
                                     ys.push_back(data.y(i));
                                   return ys;
                                 }(),
                                 data.num_features(), label_map)
                           : std::move(data);

  TrainConfig config;
  config.epochs = epochs;
  config.r = r;
  config.seed = seed;
  config.threads = threads;

  const auto t0 = std::chrono::steady_clock::now();
  const MarginModel learners = train_all(train_data, graph, assignment, config);
  const auto t1 = std::chrono::steady_clock::now();
  const double train_s = std::chrono::duration<double>(t1 - t0).count();

  const WltlsModel model =
      WltlsModel::assemble(graph, assignment, learners, kind, label_map);
  model.save(model_path);

  const DatasetStats stats = train_data.stats();
  json log = {
      {"data", data_path},
      {"model", model_path},
      {"samples", stats.samples},
      {"features", stats.features},
      {"classes", num_classes},
      {"avg_nonzeros", stats.avg_nonzeros},
      {"b", b},
      {"edges", model.edge_count()},
      {"loss", loss_name(kind)},
      {"epochs", epochs},
      {"r", r},
      {"seed", seed},
      {"threads", threads},
      {"train_s", train_s},
  };
  if (!log_path.empty()) {
    std::ofstream out(log_path);
    if (!out) {
      throw error("cannot open '" + log_path + "' for writing");
    }
    out << log.dump() << '\n';
  }
  std::cerr << "trained " << model.edge_count() << " learners over " << stats.samples
            << " samples in " << train_s << "s, model written to " << model_path
            << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path, bool scores,
                std::optional<uint32_t> threads_flag, const DataFlags& df) {
  const WltlsModel model = WltlsModel::load(model_path);
  const Dataset data = Dataset::load_file(data_path, base_from_flag(df.index_base));
  const unsigned threads = pick_threads(threads_flag);

  std::vector<DecodeResult> results(data.size());
  detail::parallel_for(data.size(), threads, [&](std::size_t i) {
    results[i] = model.decode(data.x(i));
  });

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty() && out_path != "-") {
    file.open(out_path);
    if (!file) {
      throw error("cannot open '" + out_path + "' for writing");
    }
    out = &file;
  }
  for (std::size_t i = 0; i < results.size(); ++i) {
    *out << model.label_map()[results[i].class_id];
    if (scores) *out << ' ' << results[i].total_loss;
    *out << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& loss_override, const std::string& bound_loss_name,
             uint32_t rho, std::optional<uint32_t> threads_flag, const DataFlags& df) {
  const WltlsModel model = WltlsModel::load(model_path);
  const Dataset data = Dataset::load_file(data_path, base_from_flag(df.index_base));
  const unsigned threads = pick_threads(threads_flag);

  const LossKind decode_kind =
      loss_override.empty() ? model.loss_kind() : loss_from_name(loss_override);
  const LossKind bound_kind = loss_from_name(bound_loss_name);

  const double acc = accuracy(model, data, decode_kind, threads);
  const double eps = avg_binary_loss(model, data, bound_kind, threads);
  const double bound = error_bound(model.edge_count(), eps, rho, bound_kind);

  json out = {
      {"samples", data.size()},
      {"classes", model.num_classes()},
      {"b", model.slice_width()},
      {"edges", model.edge_count()},
      {"decode_loss", loss_name(decode_kind)},
      {"accuracy", acc},
      {"bound_loss", loss_name(bound_kind)},
      {"eps", eps},
      {"rho", rho},
      {"bound", bound},
  };
  std::cout << out.dump() << '\n';
  return 0;
}

int cmd_sweep(const std::string& train_path, const std::string& test_path,
              const std::string& width_list, const std::string& out_path,
              const std::string& loss_name_arg, const std::string& bound_loss_name,
              uint32_t epochs, double r, uint64_t seed,
              std::optional<uint32_t> threads_flag, const DataFlags& df) {
  const Dataset train_data = Dataset::load_file(train_path, base_from_flag(df.index_base));
  const Dataset test_data = Dataset::load_file(test_path, base_from_flag(df.index_base));

  SweepConfig config;
  config.slice_widths = parse_width_list(width_list);
  config.train.epochs = epochs;
  config.train.r = r;
  config.train.seed = seed;
  config.train.threads = pick_threads(threads_flag);
  config.decode_loss = loss_from_name(loss_name_arg);
  config.bound_loss = loss_from_name(bound_loss_name);

  const SweepReport report = sweep(train_data, test_data, config);

  if (!out_path.empty() && out_path != "-") {
    std::ofstream out(out_path);
    if (!out) {
      throw error("cannot open '" + out_path + "' for writing");
    }
    write_csv(report, out);
  } else {
    write_csv(report, std::cout);
  }
  std::cerr << "selected_b=" << select_b(report) << "\n";
  return 0;
}

int cmd_prune(const std::string& model_path, const std::string& out_path,
              std::optional<double> lambda, const std::string& data_path,
              double max_drop, double holdout_fraction, bool use_all, uint64_t seed,
              std::optional<uint32_t> threads_flag, const DataFlags& df) {
  const WltlsModel model = WltlsModel::load(model_path);
  const unsigned threads = pick_threads(threads_flag);

  json report;
  WltlsModel pruned = model;
  if (lambda.has_value()) {
    pruned = prune(model, *lambda);
    const ModelStats before = model_stats(model);
    const ModelStats after = model_stats(pruned);
    report = {
        {"lambda", *lambda},
        {"nnz_before", before.nnz},
        {"nnz_after", after.nnz},
        {"bytes_before", before.bytes_sparse},
        {"bytes_after", after.bytes_sparse},
    };
    if (!data_path.empty()) {
      const Dataset data = Dataset::load_file(data_path, base_from_flag(df.index_base));
      report["accuracy_before"] = accuracy(model, data, threads);
      report["accuracy_after"] = accuracy(pruned, data, threads);
    }
  } else {
    if (data_path.empty()) {
      throw error("prune needs either --lambda or --data to tune on");
    }
    const Dataset data = Dataset::load_file(data_path, base_from_flag(df.index_base));
    const Dataset validation =
        use_all ? data : data.split_validation(holdout_fraction, seed).second;
    auto [result, tuned] = tune_prune(model, validation, max_drop, threads);
    pruned = std::move(result);
    report = {
        {"lambda", tuned.lambda},
        {"nnz_before", tuned.nnz_before},
        {"nnz_after", tuned.nnz_after},
        {"accuracy_before", tuned.accuracy_before},
        {"accuracy_after", tuned.accuracy_after},
        {"bytes_before", tuned.bytes_before},
        {"bytes_after", tuned.bytes_after},
        {"validation_samples", validation.size()},
        {"max_drop", max_drop},
    };
  }
  pruned.save(out_path);
  std::cout << report.dump() << '\n';
  return 0;
}

int cmd_inspect(const std::string& model_path, const std::string& data_path,
                const DataFlags& df) {
  const WltlsModel model = WltlsModel::load(model_path);
  double avg_nonzeros = 0.0;
  if (!data_path.empty()) {
    avg_nonzeros =
        Dataset::load_file(data_path, base_from_flag(df.index_base)).stats().avg_nonzeros;
  }
  const ModelStats stats = model_stats(model, avg_nonzeros);

  std::size_t sparse_vectors = 0;
  for (uint32_t j = 0; j < model.edge_count(); ++j) {
    sparse_vectors += model.edge_vector(j).is_sparse;
  }

  json header = {
      {"magic", "WLTLS"},
      {"version", kModelFormatVersion},
      {"classes", model.num_classes()},
      {"b", model.slice_width()},
      {"features", model.dim()},
      {"edges", model.edge_count()},
      {"loss", loss_name(model.loss_kind())},
      {"assignment_seed", model.assignment().seed},
  };
  json stats_line = {
      {"nnz", stats.nnz},
      {"bytes_dense", stats.bytes_dense},
      {"bytes_sparse", stats.bytes_sparse},
      {"sparse_vectors", sparse_vectors},
      {"avg_sample_nonzeros", avg_nonzeros},
      {"decode_cost_estimate", stats.decode_cost_estimate},
  };
  std::cout << header.dump() << '\n' << stats_line.dump() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Log-time log-space extreme multiclass classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wltls 1.0.0");

  // train
  auto* train = app.add_subcommand("train", "Train a model");
  std::string tr_data, tr_model, tr_loss = "exp", tr_log;
  uint32_t tr_b = 2, tr_epochs = 5, tr_classes = 0;
  double tr_r = 1.0;
  uint64_t tr_seed = 0;
  std::optional<uint32_t> tr_threads;
  DataFlags tr_df;
  train->add_option("--data", tr_data, "Training data (libsvm, .gz ok)")->required();
  train->add_option("--model", tr_model, "Output model path")->required();
  train->add_option("--b", tr_b, "Slice width of the trellis")->required();
  train->add_option("--loss", tr_loss, "Decode loss stored in the model")->default_val("exp");
  train->add_option("--epochs", tr_epochs)->default_val(5);
  train->add_option("--r", tr_r, "Regularization of the learners")->default_val(1.0);
  train->add_option("--seed", tr_seed)->default_val(0);
  train->add_option("--threads", tr_threads, "Worker threads (default: WLTLS_THREADS or all cores)");
  train->add_option("--classes", tr_classes, "Override the class count (>= labels present)");
  train->add_option("--log", tr_log, "Write a JSON training log here");
  add_data_flags(train, tr_df);

  // predict
  auto* predict = app.add_subcommand("predict", "Predict labels");
  std::string pr_model, pr_data, pr_out = "-";
  bool pr_scores = false;
  std::optional<uint32_t> pr_threads;
  DataFlags pr_df;
  predict->add_option("--model", pr_model)->required();
  predict->add_option("--data", pr_data)->required();
  predict->add_option("--out", pr_out, "Output path, '-' for stdout")->default_val("-");
  predict->add_flag("--scores", pr_scores, "Append the winning path loss to each line");
  predict->add_option("--threads", pr_threads);
  add_data_flags(predict, pr_df);

  // eval
  auto* eval = app.add_subcommand("eval", "Accuracy, average binary loss and bound");
  std::string ev_model, ev_data, ev_loss, ev_bound_loss = "squaredhinge";
  uint32_t ev_rho = 4;
  std::optional<uint32_t> ev_threads;
  DataFlags ev_df;
  eval->add_option("--model", ev_model)->required();
  eval->add_option("--data", ev_data)->required();
  eval->add_option("--loss", ev_loss, "Decode loss (default: the model's)");
  eval->add_option("--bound-loss", ev_bound_loss)->default_val("squaredhinge");
  eval->add_option("--rho", ev_rho, "Minimum code distance used in the bound")->default_val(4);
  eval->add_option("--threads", ev_threads);
  add_data_flags(eval, ev_df);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate several slice widths");
  std::string sw_train, sw_test, sw_b, sw_out, sw_loss = "exp", sw_bound_loss = "squaredhinge";
  uint32_t sw_epochs = 5;
  double sw_r = 1.0;
  uint64_t sw_seed = 0;
  std::optional<uint32_t> sw_threads;
  DataFlags sw_df;
  sweep_cmd->add_option("--train", sw_train)->required();
  sweep_cmd->add_option("--test", sw_test)->required();
  sweep_cmd->add_option("--b", sw_b, "Comma separated slice widths, e.g. 2,4,10")->required();
  sweep_cmd->add_option("--out", sw_out, "CSV output path, '-' for stdout");
  sweep_cmd->add_option("--loss", sw_loss)->default_val("exp");
  sweep_cmd->add_option("--bound-loss", sw_bound_loss)->default_val("squaredhinge");
  sweep_cmd->add_option("--epochs", sw_epochs)->default_val(5);
  sweep_cmd->add_option("--r", sw_r)->default_val(1.0);
  sweep_cmd->add_option("--seed", sw_seed)->default_val(0);
  sweep_cmd->add_option("--threads", sw_threads);
  add_data_flags(sweep_cmd, sw_df);

  // prune
  auto* prune_cmd = app.add_subcommand("prune", "Sparsify a model");
  std::string pn_model, pn_out, pn_data;
  std::optional<double> pn_lambda;
  double pn_max_drop = 0.01, pn_holdout = 0.1;
  bool pn_use_all = false;
  uint64_t pn_seed = 0;
  std::optional<uint32_t> pn_threads;
  DataFlags pn_df;
  prune_cmd->add_option("--model", pn_model)->required();
  prune_cmd->add_option("--out", pn_out, "Output model path")->required();
  prune_cmd->add_option("--lambda", pn_lambda, "Fixed threshold; skips tuning");
  prune_cmd->add_option("--data", pn_data, "Data to tune or score the threshold on");
  prune_cmd->add_option("--max-drop", pn_max_drop, "Accuracy drop budget when tuning")
      ->default_val(0.01);
  prune_cmd->add_option("--holdout-fraction", pn_holdout,
                        "Validation share split off --data when tuning")
      ->default_val(0.1);
  prune_cmd->add_flag("--use-all", pn_use_all, "Tune on all of --data instead of a holdout");
  prune_cmd->add_option("--seed", pn_seed)->default_val(0);
  prune_cmd->add_option("--threads", pn_threads);
  add_data_flags(prune_cmd, pn_df);

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Print model header and stats as JSON lines");
  std::string in_model, in_data;
  DataFlags in_df;
  inspect->add_option("--model", in_model)->required();
  inspect->add_option("--data", in_data, "Data whose density makes the cost estimate concrete");
  add_data_flags(inspect, in_df);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (train->parsed()) {
      return cmd_train(tr_data, tr_model, tr_b, tr_loss, tr_epochs, tr_r, tr_seed,
                       tr_threads, tr_df, tr_classes, tr_log);
    }
    if (predict->parsed()) {
      return cmd_predict(pr_model, pr_data, pr_out, pr_scores, pr_threads, pr_df);
    }
    if (eval->parsed()) {
      return cmd_eval(ev_model, ev_data, ev_loss, ev_bound_loss, ev_rho, ev_threads, ev_df);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sw_train, sw_test, sw_b, sw_out, sw_loss, sw_bound_loss,
                       sw_epochs, sw_r, sw_seed, sw_threads, sw_df);
    }
    if (prune_cmd->parsed()) {
      return cmd_prune(pn_model, pn_out, pn_lambda, pn_data, pn_max_drop, pn_holdout,
                       pn_use_all, pn_seed, pn_threads, pn_df);
    }
    if (inspect->parsed()) {
      return cmd_inspect(in_model, in_data, in_df);
    }
  } catch (const std::exception& e) {
    std::cerr << "wltls: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace wltls::cli
