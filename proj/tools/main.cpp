// bdfusion: batch front-end for the multimodal mood-state classification
// pipeline. Every subcommand exits 0 on success and 1 with a one-line
// diagnostic on error.

#include "commands.hpp"

#include <bdfusion/config.hpp>
#include <bdfusion/csv.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace bdfusion;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Flat key = value configuration file");
    app->add_option("--set", overrides, "Override a configuration key (key=value)");
    app->add_option("--seed", seed, "Random seed (overrides config)");
  }

  pipeline::PipelineConfig resolve() const {
    config::KeyValues kv;
    if (!config_path.empty()) kv = config::load(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || eq == 0) throw Error("--set expects key=value, got '" + o + "'");
      kv[o.substr(0, eq)] = o.substr(eq + 1);
    }
    if (seed) kv["seed"] = std::to_string(*seed);
    return config::apply(kv);
  }
};

std::vector<cli::FeatureInput> parse_inputs(const std::vector<std::string>& specs) {
  std::vector<cli::FeatureInput> out;
  for (std::size_t i = 0; i < specs.size(); ++i) out.push_back(cli::FeatureInput::parse(specs[i], i));
  return out;
}

std::string one_line(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal mood-state classification with kernel ELMs"};
  app.require_subcommand(1);

  // synth
  synth::SynthSpec spec;
  std::string synth_out;
  std::string synth_modalities = "acoustic,linguistic,visual";
  std::string synth_dims = "8,6,5";
  std::optional<std::uint64_t> synth_seed;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic manifest with frame-level LLD files");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();
  synth_cmd->add_option("--classes", spec.n_classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--per-class", spec.samples_per_class, "Clips per class")->capture_default_str();
  synth_cmd->add_option("--modalities", synth_modalities, "Comma-separated modality names")->capture_default_str();
  synth_cmd->add_option("--dims", synth_dims, "Descriptors per modality")->capture_default_str();
  synth_cmd->add_option("--separation", spec.separation, "Class-mean spread in noise units")->capture_default_str();
  synth_cmd->add_option("--noise", spec.noise_sigma, "Noise standard deviation")->capture_default_str();
  synth_cmd->add_option("--tasks", spec.task_count, "Tasks per clip (0 = untasked)")->capture_default_str();
  synth_cmd->add_option("--missing-rate", spec.missing_task_rate, "Probability a task is skipped")->capture_default_str();
  synth_cmd->add_option("--frames", spec.frames_per_task, "Frames per task")->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed, "Random seed");

  // summarize
  Common sum_common;
  std::string sum_manifest, sum_out, sum_segment = "clip";
  auto* sum_cmd = app.add_subcommand("summarize", "Summarize LLD files into BD10 feature tables");
  sum_common.attach(sum_cmd);
  sum_cmd->add_option("--manifest", sum_manifest, "Dataset manifest CSV")->required();
  sum_cmd->add_option("--out", sum_out, "Output directory")->required();
  sum_cmd->add_option("--segment", sum_segment, "clip, task or emotion")->capture_default_str();

  // train
  Common train_common;
  std::vector<std::string> train_features, train_dev;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "Fit preprocessing and kernel ELM models into a container");
  train_common.attach(train_cmd);
  train_cmd->add_option("--features", train_features, "[name=]table.csv[,more.csv] per modality")->required();
  train_cmd->add_option("--dev", train_dev, "Development tables, same order as --features");
  train_cmd->add_option("--out", train_out, "Model container path")->required();

  // predict
  std::string pred_model, pred_features, pred_modality, pred_out, pred_manifest, pred_split = "test";
  bool pred_aggregate = false;
  auto* pred_cmd = app.add_subcommand("predict", "Write class probabilities for a feature table");
  pred_cmd->add_option("--model", pred_model, "Model container")->required();
  pred_cmd->add_option("--features", pred_features, "[name=]table.csv[,more.csv]")->required();
  pred_cmd->add_option("--modality", pred_modality, "Modality inside the container");
  pred_cmd->add_option("--out", pred_out, "Prediction CSV")->required();
  pred_cmd->add_flag("--aggregate-tasks", pred_aggregate, "Average task rows (<clip>#...) per clip");
  pred_cmd->add_option("--manifest", pred_manifest, "Manifest listing the clips to report");
  pred_cmd->add_option("--split", pred_split, "Manifest split used with --manifest")->capture_default_str();

  // cv
  Common cv_common;
  std::vector<std::string> cv_features;
  std::string cv_out, cv_pred;
  auto* cv_cmd = app.add_subcommand("cv", "Grid search scored by pooled k-fold cross-validation");
  cv_common.attach(cv_cmd);
  cv_cmd->add_option("--features", cv_features, "[name=]table.csv[,more.csv]")->required();
  cv_cmd->add_option("--out", cv_out, "EvalReport JSON path")->required();
  cv_cmd->add_option("--predictions", cv_pred, "Pooled held-out prediction CSV");

  // fuse
  Common fuse_common;
  std::vector<std::string> fuse_probs;
  std::string fuse_out, fuse_truth, fuse_report, fuse_method;
  std::optional<double> fuse_alpha;
  std::vector<double> fuse_weights;
  auto* fuse_cmd = app.add_subcommand("fuse", "Decision-level fusion of prediction CSVs");
  fuse_common.attach(fuse_cmd);
  fuse_cmd->add_option("--probs", fuse_probs, "name=predictions.csv (2 or 3 of them)")->required();
  fuse_cmd->add_option("--method", fuse_method, "majority, wsum2 or wsum3 (overrides config 'fusion')");
  fuse_cmd->add_option("--truth", fuse_truth, "CSV with sample_id and label for weight selection and scoring");
  fuse_cmd->add_option("--alpha", fuse_alpha, "Fixed wsum2 coefficient");
  fuse_cmd->add_option("--weights", fuse_weights, "Fixed wsum3 coefficients")->expected(3)->delimiter(',');
  fuse_cmd->add_option("--out", fuse_out, "Fused prediction CSV")->required();
  fuse_cmd->add_option("--report", fuse_report, "EvalReport JSON path (needs --truth)");

  // report
  std::string rep_pred, rep_truth, rep_out;
  std::vector<double> rep_unimodal;
  auto* rep_cmd = app.add_subcommand("report", "Score a prediction CSV against ground truth");
  rep_cmd->add_option("--predictions", rep_pred, "Prediction CSV")->required();
  rep_cmd->add_option("--truth", rep_truth, "CSV with sample_id and label")->required();
  rep_cmd->add_option("--unimodal-uar", rep_unimodal, "Unimodal UARs for MM1")->delimiter(',');
  rep_cmd->add_option("--out", rep_out, "EvalReport JSON path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*synth_cmd) {
      if (synth_seed) spec.seed = *synth_seed;
      spec.modalities = csv::split(synth_modalities, ',');
      spec.dims.clear();
      for (const auto& d : csv::split(synth_dims, ',')) spec.dims.push_back(static_cast<int>(csv::parse_int(d, 0)));
      const auto man = synth::write(synth_out, spec);
      std::cout << "wrote " << man.entries.size() << " clips to " << synth_out << "\n";
    } else if (*sum_cmd) {
      cli::SummarizeOptions opt{sum_manifest, sum_out, cli::segmentation_from_string(sum_segment),
                                sum_common.resolve()};
      for (const auto& p : cli::cmd_summarize(opt)) std::cout << "wrote " << p.string() << "\n";
    } else if (*train_cmd) {
      cli::TrainOptions opt{parse_inputs(train_features), parse_inputs(train_dev), train_common.resolve(), train_out};
      const auto c = cli::cmd_train(opt);
      for (const auto& m : c.modalities) {
        std::cout << m.name << ":";
        for (const auto& [k, v] : m.model.params.describe(m.model.kind)) std::cout << ' ' << k << '=' << v;
        std::cout << "\n";
      }
    } else if (*pred_cmd) {
      cli::PredictOptions opt;
      opt.model = pred_model;
      opt.features = cli::FeatureInput::parse(pred_features, 0);
      opt.modality = pred_modality;
      opt.out = pred_out;
      opt.aggregate_tasks = pred_aggregate;
      if (!pred_manifest.empty()) opt.manifest = pred_manifest;
      opt.split = pred_split;
      const auto p = cli::cmd_predict(opt);
      cli::write_predictions(pred_out, p);
      std::cout << "wrote " << p.sample_ids.size() << " predictions to " << pred_out << "\n";
    } else if (*cv_cmd) {
      cli::CvOptions opt{parse_inputs(cv_features), cv_common.resolve(), cv_out, std::nullopt};
      if (!cv_pred.empty()) opt.out_predictions = cv_pred;
      const auto r = cli::cmd_cv(opt);
      std::cout << "uar " << csv::format_real(r.grid.cv.report.uar);
      for (const auto& [k, v] : r.grid.cv.report.params) std::cout << ' ' << k << '=' << v;
      std::cout << "\n";
    } else if (*fuse_cmd) {
      cli::FuseOptions opt;
      opt.cfg = fuse_common.resolve();
      if (!fuse_method.empty()) opt.cfg.fusion = pipeline::fusion_method_from_string(fuse_method);
      opt.probs = parse_inputs(fuse_probs);
      if (!fuse_truth.empty()) opt.truth = fuse_truth;
      opt.alpha = fuse_alpha;
      if (!fuse_weights.empty()) opt.weights = std::array<double, 3>{fuse_weights[0], fuse_weights[1], fuse_weights[2]};
      opt.out = fuse_out;
      if (!fuse_report.empty()) opt.out_report = fuse_report;
      const auto r = cli::cmd_fuse(opt);
      if (r.report) {
        std::cout << "uar " << csv::format_real(r.report->uar) << " mm1 "
                  << csv::format_real(r.report->extras.at("mm1")) << "\n";
      } else {
        std::cout << "wrote " << r.fused.sample_ids.size() << " fused predictions\n";
      }
    } else if (*rep_cmd) {
      cli::ReportOptions opt{rep_pred, rep_truth, rep_unimodal, std::nullopt};
      if (!rep_out.empty()) opt.out = rep_out;
      const auto r = cli::cmd_report(opt);
      if (rep_out.empty()) std::cout << r.to_json();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
