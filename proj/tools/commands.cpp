#include "commands.hpp"

#include <bdfusion/config.hpp>
#include <bdfusion/csv.hpp>
#include <bdfusion/features.hpp>
#include <bdfusion/fusion.hpp>
#include <bdfusion/manifest.hpp>
#include <bdfusion/metrics.hpp>

#include <fstream>
#include <map>
#include <numeric>

namespace bdfusion::cli {

FeatureInput FeatureInput::parse(const std::string& spec, std::size_t position) {
  FeatureInput in;
  std::string files = spec;
  const auto eq = spec.find('=');
  if (eq != std::string::npos) {
    in.name = spec.substr(0, eq);
    files = spec.substr(eq + 1);
  }
  if (in.name.empty()) in.name = "m" + std::to_string(position);
  for (const auto& f : csv::split(files, ',')) {
    if (!f.empty()) in.files.emplace_back(f);
  }
  if (in.files.empty()) throw Error("input '" + spec + "' names no files");
  return in;
}

Segmentation segmentation_from_string(const std::string& s) {
  if (s == "clip") return Segmentation::clip;
  if (s == "task") return Segmentation::task;
  if (s == "emotion") return Segmentation::emotion;
  throw Error("unknown segmentation '" + s + "' (expected clip, task or emotion)");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::vector<std::filesystem::path> cmd_summarize(const SummarizeOptions& opt) {
  opt.cfg.validate();
  const auto man = manifest::load(opt.manifest);
  if (man.entries.empty()) throw Error("manifest '" + opt.manifest.string() + "' has no samples");

  std::map<std::filesystem::path, std::vector<features::TaskTimestamps>> ts_cache;
  auto timestamps_for = [&](const manifest::Entry& e) -> features::TaskTimestamps {
    if (!e.timestamps) throw Error("sample " + e.sample_id + " has no timestamp file; needed for task segmentation");
    auto it = ts_cache.find(*e.timestamps);
    if (it == ts_cache.end()) it = ts_cache.emplace(*e.timestamps, features::load_timestamps_csv(*e.timestamps)).first;
    for (const auto& t : it->second) {
      if (t.clip_id == e.sample_id) return t;
    }
    return features::TaskTimestamps{e.sample_id, {}};
  };

  std::filesystem::create_directories(opt.out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& modality : man.modalities) {
    for (const char* split : {"train", "dev", "test"}) {
      const auto entries = man.in_split(split);
      if (entries.empty()) continue;
      std::vector<std::string> ids, labels;
      std::vector<features::FeatureVector> rows;
      for (const auto* e : entries) {
        auto series = features::load_lld_csv(e->lld.at(modality));
        series.clip_id = e->sample_id;
        const std::string label = opt.cfg.classes.name(man.class_of(*e, opt.cfg.classes));
        auto emit = [&](std::string id, const features::LldSeries& s) {
          ids.push_back(std::move(id));
          labels.push_back(label);
          rows.push_back(features::summarize(s, opt.cfg.functional_set));
        };
        switch (opt.segment) {
          case Segmentation::clip:
            emit(e->sample_id, series);
            break;
          case Segmentation::task:
            for (const auto& t : features::segment_tasks(series, timestamps_for(*e))) {
              emit(e->sample_id + "#t" + std::to_string(*t.task_id), t);
            }
            break;
          case Segmentation::emotion:
            for (const auto& [group, s] :
                 features::group_tasks_by_emotion(features::segment_tasks(series, timestamps_for(*e)))) {
              emit(e->sample_id + "#" + features::to_string(group), s);
            }
            break;
        }
      }
      FeatureTable table;
      if (!rows.empty()) {
        table.features.feature_names = rows.front().names;
        table.features.values.resize(static_cast<Eigen::Index>(rows.size()), rows.front().values.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].names != rows.front().names) {
            throw DimensionError("modality " + modality + ": sample " + ids[i] + " has different descriptors");
          }
          table.features.values.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
        }
      }
      table.features.sample_ids = std::move(ids);
      table.labels = std::move(labels);
      const auto path = opt.out_dir / (modality + "_" + split + ".csv");
      write_feature_table(path, table);
      written.push_back(path);
    }
  }
  return written;
}

namespace {

struct NamedTable {
  std::string name;
  FeatureTable table;
};

// Loads inputs; early fusion collapses them into one prefixed table.
std::vector<NamedTable> load_inputs(const std::vector<FeatureInput>& inputs, const pipeline::PipelineConfig& cfg) {
  if (inputs.empty()) throw Error("no feature inputs given");
  std::vector<NamedTable> out;
  for (const auto& in : inputs) out.push_back({in.name, read_feature_tables(in.files)});
  if (cfg.fusion == pipeline::FusionMethod::early && out.size() > 1) {
    std::vector<FeatureMatrix> mats;
    std::vector<std::string> names;
    for (const auto& t : out) {
      mats.push_back(t.table.features);
      names.push_back(t.name);
      if (t.table.labels != out.front().table.labels) {
        throw Error("early fusion inputs disagree on labels for input '" + t.name + "'");
      }
    }
    NamedTable fused;
    fused.name = "early";
    fused.table.features = fusion::early_fuse(mats, names);
    fused.table.labels = out.front().table.labels;
    return {std::move(fused)};
  }
  return out;
}

}  // namespace

container::ModelContainer cmd_train(const TrainOptions& opt) {
  opt.cfg.validate();
  const auto train_inputs = load_inputs(opt.features, opt.cfg);
  std::vector<NamedTable> dev_inputs;
  if (!opt.dev.empty()) {
    dev_inputs = load_inputs(opt.dev, opt.cfg);
    if (dev_inputs.size() != train_inputs.size()) throw Error("--dev must name the same inputs as --features");
  }

  container::ModelContainer c;
  c.config = config::describe(opt.cfg);
  for (std::size_t i = 0; i < train_inputs.size(); ++i) {
    const auto& in = train_inputs[i];
    const Dataset train = in.table.to_dataset(opt.cfg.classes);
    pipeline::KernelParams params;
    if (opt.cfg.fixed_params) {
      params = *opt.cfg.fixed_params;
    } else if (!dev_inputs.empty()) {
      if (dev_inputs[i].name != in.name) throw Error("--dev inputs must be given in the same order as --features");
      const Dataset dev = dev_inputs[i].table.to_dataset(opt.cfg.classes);
      if (dev.features.feature_names != train.features.feature_names) {
        throw DimensionError("dev features for '" + in.name + "' have different columns");
      }
      Dataset all = train;
      all.features.values.conservativeResize(train.features.rows() + dev.features.rows(), Eigen::NoChange);
      all.features.values.bottomRows(dev.features.rows()) = dev.features.values;
      all.features.sample_ids.insert(all.features.sample_ids.end(), dev.features.sample_ids.begin(),
                                     dev.features.sample_ids.end());
      all.labels.insert(all.labels.end(), dev.labels.begin(), dev.labels.end());
      std::vector<int> dev_idx(dev.size());
      std::iota(dev_idx.begin(), dev_idx.end(), static_cast<int>(train.size()));
      params = eval::grid_search(all, opt.cfg, eval::holdout_plan(all.size(), dev_idx)).best;
    } else {
      const auto plan = eval::make_folds(train.labels, opt.cfg.folds, opt.cfg.seed, opt.cfg.stratified);
      params = eval::grid_search(train, opt.cfg, plan).best;
    }
    container::ModalityModel mm;
    mm.name = in.name;
    mm.feature_names = train.features.feature_names;
    mm.model = pipeline::fit(train, opt.cfg, params);
    c.modalities.push_back(std::move(mm));
  }
  if (!opt.out.empty()) {
    if (opt.out.has_parent_path()) std::filesystem::create_directories(opt.out.parent_path());
    container::save(opt.out, c);
  }
  return c;
}

PredictionTable cmd_predict(const PredictOptions& opt) {
  const auto c = container::load(opt.model);
  std::string name = opt.modality;
  if (name.empty()) {
    if (c.modalities.size() != 1) throw Error("model holds several modalities; pick one with --modality");
    name = c.modalities.front().name;
  }
  const auto& mm = c.modality(name);

  FeatureTable table = read_feature_tables(opt.features.files);
  if (table.features.feature_names != mm.feature_names) {
    if (table.features.cols() != static_cast<Eigen::Index>(mm.feature_names.size())) {
      throw DimensionError("model '" + name + "' expects " + std::to_string(mm.feature_names.size()) +
                           " features, got " + std::to_string(table.features.cols()));
    }
    throw DimensionError("feature columns do not match the columns model '" + name + "' was trained on");
  }
  ProbMatrix probs = pipeline::predict_probs(mm.model, table.features);
  if (!opt.aggregate_tasks) return make_predictions(table.features.sample_ids, mm.model.classes, std::move(probs));

  std::vector<std::string> order;
  std::map<std::string, std::map<int, RowVector>> per_clip;
  for (std::size_t i = 0; i < table.features.sample_ids.size(); ++i) {
    const auto& id = table.features.sample_ids[i];
    const std::string clip = id.substr(0, id.find('#'));
    auto [it, fresh] = per_clip.try_emplace(clip);
    if (fresh) order.push_back(clip);
    const int slot = static_cast<int>(it->second.size());
    it->second.emplace(slot, probs.row(static_cast<Eigen::Index>(i)));
  }
  if (opt.manifest) {
    const auto man = manifest::load(*opt.manifest);
    order.clear();
    for (const auto* e : man.in_split(opt.split)) order.push_back(e->sample_id);
  }
  const auto& classes = mm.model.classes;
  ProbMatrix out(static_cast<Eigen::Index>(order.size()), static_cast<Eigen::Index>(classes.size()));
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = per_clip.find(order[i]);
    const auto decision =
        metrics::aggregate_task_probs(it == per_clip.end() ? std::map<int, RowVector>{} : it->second, classes.middle());
    if (decision.probs) {
      out.row(static_cast<Eigen::Index>(i)) = *decision.probs;
    } else {
      out.row(static_cast<Eigen::Index>(i)).setZero();
      out(static_cast<Eigen::Index>(i), decision.label) = 1.0;
    }
  }
  return make_predictions(std::move(order), classes, std::move(out));
}

CvOutcome cmd_cv(const CvOptions& opt) {
  opt.cfg.validate();
  const auto inputs = load_inputs(opt.features, opt.cfg);
  if (inputs.size() != 1) throw Error("cv takes one modality (or several with fusion = early)");
  const Dataset data = inputs.front().table.to_dataset(opt.cfg.classes);
  const auto plan = eval::make_folds(data.labels, opt.cfg.folds, opt.cfg.seed, opt.cfg.stratified);
  CvOutcome out;
  out.grid = eval::grid_search(data, opt.cfg, plan);
  out.grid.cv.report.config = config::describe(opt.cfg);
  out.grid.cv.report.extras["candidates_evaluated"] = static_cast<double>(out.grid.candidates_evaluated);
  out.grid.cv.report.extras["candidates_failed"] = static_cast<double>(out.grid.candidates_failed);
  out.sample_ids = data.features.sample_ids;
  if (opt.out_report) write_text(*opt.out_report, out.grid.cv.report.to_json());
  if (opt.out_predictions) {
    write_predictions(*opt.out_predictions, make_predictions(out.sample_ids, data.classes, out.grid.cv.pooled_probs));
  }
  return out;
}

FuseOutcome cmd_fuse(const FuseOptions& opt) {
  using pipeline::FusionMethod;
  opt.cfg.validate();
  if (opt.cfg.fusion == FusionMethod::early) {
    throw Error("early fusion concatenates features; run train or cv with fusion = early");
  }
  std::vector<PredictionTable> inputs;
  std::vector<std::string> names;
  for (const auto& in : opt.probs) {
    if (in.files.size() != 1) throw Error("each --probs input takes exactly one file");
    inputs.push_back(read_predictions(in.files.front()));
    names.push_back(in.name);
  }
  const std::size_t want = opt.cfg.fusion == FusionMethod::wsum2 ? 2 : 3;
  if (inputs.size() != want) {
    throw Error(std::string(pipeline::to_string(opt.cfg.fusion)) + " fusion needs " + std::to_string(want) +
                " probability inputs, got " + std::to_string(inputs.size()));
  }
  for (const auto& p : inputs) {
    if (p.sample_ids != inputs.front().sample_ids) throw DimensionError("probability inputs differ in sample ids");
    if (!(p.classes == inputs.front().classes)) throw DimensionError("probability inputs differ in class sets");
  }
  const auto& ids = inputs.front().sample_ids;
  const auto& classes = inputs.front().classes;
  std::optional<std::vector<int>> truth;
  if (opt.truth) truth = read_truth(*opt.truth, ids, classes);

  std::map<std::string, std::string> params;
  params["method"] = pipeline::to_string(opt.cfg.fusion);
  ProbMatrix fused;
  switch (opt.cfg.fusion) {
    case FusionMethod::majority: {
      std::vector<fusion::ModalityOutput> outs;
      for (std::size_t i = 0; i < inputs.size(); ++i) outs.push_back(fusion::ModalityOutput::from_probs(names[i], inputs[i].probs));
      const auto labels = fusion::majority_vote(outs, opt.cfg.fallback_modality);
      fused = ProbMatrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(classes.size()));
      for (std::size_t i = 0; i < labels.size(); ++i) fused(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
      params["fallback"] = opt.cfg.fallback_modality;
      break;
    }
    case FusionMethod::wsum2: {
      double alpha = 0.0;
      if (opt.alpha) {
        alpha = *opt.alpha;
        fused = fusion::apply_weights2(inputs[0].probs, inputs[1].probs, alpha);
      } else {
        if (!truth) throw Error("wsum2 needs --truth to select alpha, or a fixed --alpha");
        auto b = fusion::weighted_sum2(inputs[0].probs, inputs[1].probs, opt.cfg.alpha_grid, *truth);
        alpha = b.alpha;
        fused = std::move(b.probs);
      }
      params["alpha"] = csv::format_real(alpha);
      break;
    }
    case FusionMethod::wsum3: {
      fusion::DirichletWeights w;
      if (opt.weights) {
        w.alphas = *opt.weights;
        fused = fusion::apply_weights3(inputs[0].probs, inputs[1].probs, inputs[2].probs, w);
      } else {
        if (!truth) throw Error("wsum3 needs --truth to search weights, or fixed --weights");
        auto b = fusion::weighted_sum3_search(inputs[0].probs, inputs[1].probs, inputs[2].probs, *truth,
                                              opt.cfg.dirichlet_draws, opt.cfg.seed);
        w = b.weights;
        fused = std::move(b.probs);
      }
      params["weights"] = csv::format_real(w.alphas[0]) + "," + csv::format_real(w.alphas[1]) + "," +
                          csv::format_real(w.alphas[2]);
      params["dirichlet_draws"] = std::to_string(opt.cfg.dirichlet_draws);
      break;
    }
    case FusionMethod::early:
      break;
  }

  FuseOutcome out;
  out.fused = make_predictions(ids, classes, std::move(fused));
  if (truth) {
    auto report = eval::make_report(*truth, out.fused.predicted, classes);
    report.params = params;
    report.seed = opt.cfg.seed;
    report.config = config::describe(opt.cfg);
    std::vector<double> unimodal;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const double u = metrics::uar(metrics::confusion(*truth, inputs[i].predicted, static_cast<int>(classes.size())));
      report.extras["uar_" + names[i]] = u;
      unimodal.push_back(u);
    }
    report.extras["mm1"] = fusion::mm1(report.uar, unimodal);
    out.report = std::move(report);
  }
  if (!opt.out.empty()) write_predictions(opt.out, out.fused);
  if (opt.out_report) {
    if (!out.report) throw Error("--report needs --truth");
    write_text(*opt.out_report, out.report->to_json());
  }
  return out;
}

eval::EvalReport cmd_report(const ReportOptions& opt) {
  const auto pred = read_predictions(opt.predictions);
  const auto truth = read_truth(opt.truth, pred.sample_ids, pred.classes);
  auto report = eval::make_report(truth, pred.predicted, pred.classes);
  if (!opt.unimodal_uars.empty()) report.extras["mm1"] = fusion::mm1(report.uar, opt.unimodal_uars);
  if (opt.out) write_text(*opt.out, report.to_json());
  return report;
}

}  // namespace bdfusion::cli
