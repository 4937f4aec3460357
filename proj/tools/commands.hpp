#pragma once

#include "tables.hpp"

#include <bdfusion/container.hpp>
#include <bdfusion/eval.hpp>
#include <bdfusion/pipeline.hpp>
#include <bdfusion/synth.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bdfusion::cli {

/// `[name=]file[,file...]`: one modality, optionally spread over several
/// row-concatenated tables.
struct FeatureInput {
  std::string name;
  std::vector<std::filesystem::path> files;

  static FeatureInput parse(const std::string& spec, std::size_t position);
};

enum class Segmentation { clip, task, emotion };
Segmentation segmentation_from_string(const std::string& s);

struct SummarizeOptions {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  Segmentation segment = Segmentation::clip;
  pipeline::PipelineConfig cfg;
};

/// Writes `<out>/<modality>_<split>.csv` for every modality and split present.
/// Task rows are named `<clip>#t<k>`, emotion-group rows `<clip>#<group>`.
std::vector<std::filesystem::path> cmd_summarize(const SummarizeOptions& opt);

struct TrainOptions {
  std::vector<FeatureInput> features;
  std::vector<FeatureInput> dev;
  pipeline::PipelineConfig cfg;
  std::filesystem::path out;
};

/// Trains one model per input (or one model on the concatenated inputs when
/// the fusion method is early). Without fixed parameters, hyperparameters
/// come from grid search: on the dev rows when --dev is given, otherwise by
/// k-fold CV over the training rows.
container::ModelContainer cmd_train(const TrainOptions& opt);

struct PredictOptions {
  std::filesystem::path model;
  FeatureInput features;
  std::string modality;
  std::filesystem::path out;
  bool aggregate_tasks = false;
  std::optional<std::filesystem::path> manifest;
  std::string split = "test";
};

PredictionTable cmd_predict(const PredictOptions& opt);

struct CvOptions {
  std::vector<FeatureInput> features;
  pipeline::PipelineConfig cfg;
  std::optional<std::filesystem::path> out_report;
  std::optional<std::filesystem::path> out_predictions;
};

struct CvOutcome {
  eval::GridResult grid;
  std::vector<std::string> sample_ids;
};

/// Grid search scored by pooled k-fold CV; writes the EvalReport JSON and
/// the pooled held-out predictions.
CvOutcome cmd_cv(const CvOptions& opt);

struct FuseOptions {
  std::vector<FeatureInput> probs;
  pipeline::PipelineConfig cfg;
  std::optional<std::filesystem::path> truth;
  std::optional<double> alpha;
  std::optional<std::array<double, 3>> weights;
  std::filesystem::path out;
  std::optional<std::filesystem::path> out_report;
};

struct FuseOutcome {
  PredictionTable fused;
  std::optional<eval::EvalReport> report;
};

FuseOutcome cmd_fuse(const FuseOptions& opt);

struct ReportOptions {
  std::filesystem::path predictions;
  std::filesystem::path truth;
  std::vector<double> unimodal_uars;
  std::optional<std::filesystem::path> out;
};

eval::EvalReport cmd_report(const ReportOptions& opt);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace bdfusion::cli
