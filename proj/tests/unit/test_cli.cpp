#include "commands.hpp"

#include <bdfusion/csv.hpp>
#include <bdfusion/eval.hpp>
#include <bdfusion/preprocess.hpp>
#include <bdfusion/manifest.hpp>
#include <bdfusion/synth.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace bdfusion;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bdf_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(const std::string& args, const fs::path& err_file = {}) {
  std::string cmd = std::string(BDFUSION_CLI_PATH) + " " + args + " > /dev/null";
  cmd += err_file.empty() ? " 2>/dev/null" : " 2> " + err_file.string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Synth, CountsAndDeterminism) {
  synth::SynthSpec spec;
  const auto clips = synth::generate(spec);
  ASSERT_EQ(clips.size(), 120u);
  int per[3] = {0, 0, 0};
  for (const auto& c : clips) {
    ++per[c.label];
    EXPECT_EQ(metrics::ymrs_to_class(c.ymrs), c.label);
  }
  EXPECT_EQ(per[0], 40);
  EXPECT_EQ(per[2], 40);
  const auto a = scratch("synth_a"), b = scratch("synth_b");
  synth::write(a, spec);
  synth::write(b, spec);
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    EXPECT_EQ(slurp(e.path()), slurp(b / fs::relative(e.path(), a))) << e.path();
  }
  spec.n_classes = 1;
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Synth, MissingTasks) {
  synth::SynthSpec spec;
  spec.task_count = 7;
  spec.missing_task_rate = 0.3;
  spec.samples_per_class = 5;
  std::size_t dropped = 0;
  for (const auto& c : synth::generate(spec)) {
    EXPECT_NO_THROW(c.timestamps.validate());
    dropped += 7 - c.timestamps.entries.size();
  }
  EXPECT_GT(dropped, 0u);
}

TEST(Synth, WideSeparationTrainsToNinetyOnDev) {
  const auto dir = scratch("synth_sep");
  synth::SynthSpec spec;
  spec.separation = 5.0;
  synth::write(dir / "data", spec);
  cli::cmd_summarize({dir / "data" / "manifest.csv", dir / "f", cli::Segmentation::clip, {}});
  const auto classes = ClassSet::bipolar_default();
  const auto train = cli::read_feature_table(dir / "f" / "acoustic_train.csv").to_dataset(classes);
  const auto dev = cli::read_feature_table(dir / "f" / "acoustic_dev.csv").to_dataset(classes);

  // Separability check first: nearest centroid on train-standardized features.
  const auto z = preprocess::fit_z(train.features);
  ASSERT_GT(oracle::nearest_centroid_holdout_uar(preprocess::apply_z(train.features, z).values, train.labels,
                                                 preprocess::apply_z(dev.features, z).values, dev.labels, 3),
            0.95);

  pipeline::PipelineConfig cfg;
  const auto g = eval::grid_search(train, cfg, eval::make_folds(train.labels, 4, 42, true));
  const auto model = pipeline::fit(train, cfg, g.best);
  EXPECT_GE(metrics::uar_of_probs(dev.labels, pipeline::predict_probs(model, dev.features)), 0.90);
}

TEST(Manifest, LoadValidates) {
  const auto dir = scratch("manifest");
  std::ofstream(dir / "x.csv") << "a\n1\n";
  std::ofstream(dir / "ok.csv") << "sample_id,split,ymrs,acoustic\nc1,train,5,x.csv\nc2,dev,25,x.csv\n";
  const auto m = manifest::load(dir / "ok.csv");
  EXPECT_EQ(m.modalities, (std::vector<std::string>{"acoustic"}));
  EXPECT_EQ(m.class_of(m.entries[1], ClassSet::bipolar_default()), 2);
  EXPECT_EQ(m.in_split("dev").size(), 1u);
  std::ofstream(dir / "dup.csv") << "sample_id,split,ymrs,acoustic\nc1,train,5,x.csv\nc1,dev,25,x.csv\n";
  EXPECT_THROW(manifest::load(dir / "dup.csv"), Error);
  std::ofstream(dir / "split.csv") << "sample_id,split,ymrs,acoustic\nc1,holdout,5,x.csv\n";
  EXPECT_THROW(manifest::load(dir / "split.csv"), Error);
  std::ofstream(dir / "path.csv") << "sample_id,split,ymrs,acoustic\nc1,train,5,missing.csv\n";
  EXPECT_THROW(manifest::load(dir / "path.csv"), Error);
}

TEST(Commands, SummarizeDimensionsAndEmptyManifest) {
  const auto dir = scratch("summ");
  synth::SynthSpec spec;
  spec.samples_per_class = 5;
  spec.dims = {23, 39, 76};
  synth::write(dir / "data", spec);
  cli::SummarizeOptions opt{dir / "data" / "manifest.csv", dir / "feats", cli::Segmentation::clip, {}};
  cli::cmd_summarize(opt);
  const auto a = cli::read_feature_table(dir / "feats" / "acoustic_train.csv");
  const auto l = cli::read_feature_table(dir / "feats" / "linguistic_train.csv");
  const auto v = cli::read_feature_table(dir / "feats" / "visual_train.csv");
  EXPECT_EQ(a.features.cols(), 230);
  EXPECT_EQ(l.features.cols(), 390);
  EXPECT_EQ(v.features.cols(), 760);
  std::ofstream(dir / "empty.csv") << "sample_id,split,label,acoustic\n";
  EXPECT_THROW(cli::cmd_summarize({dir / "empty.csv", dir / "e", cli::Segmentation::clip, {}}), Error);
}

TEST(Commands, TrainPredictMatchesInMemory) {
  const auto dir = scratch("train");
  synth::SynthSpec spec;
  spec.samples_per_class = 10;
  synth::write(dir / "data", spec);
  cli::cmd_summarize({dir / "data" / "manifest.csv", dir / "f", cli::Segmentation::clip, {}});
  pipeline::PipelineConfig cfg;
  cfg.fixed_params = pipeline::KernelParams{10, 100, pipeline::GammaChoice::median_heuristic(), 0.4};
  const auto c = cli::cmd_train({{cli::FeatureInput::parse("acoustic=" + (dir / "f" / "acoustic_train.csv").string(), 0)},
                                 {}, cfg, dir / "m.bdf"});
  cli::PredictOptions popt;
  popt.model = dir / "m.bdf";
  popt.features = cli::FeatureInput::parse((dir / "f" / "acoustic_test.csv").string(), 0);
  const auto p = cli::cmd_predict(popt);
  const auto test = cli::read_feature_table(dir / "f" / "acoustic_test.csv");
  const ProbMatrix mem = pipeline::predict_probs(c.modalities[0].model, test.features);
  EXPECT_LE((p.probs - mem).cwiseAbs().maxCoeff(), 1e-12);
  cli::write_predictions(dir / "p.csv", p);
  const auto back = cli::read_predictions(dir / "p.csv");
  EXPECT_EQ(back.probs, p.probs);
  EXPECT_EQ(back.sample_ids, p.sample_ids);
}

TEST(Commands, FuseIdenticalReturnsInput) {
  const auto dir = scratch("fuse");
  ProbMatrix probs(3, 3);
  probs << 0.2, 0.5, 0.3, 0.6, 0.3, 0.1, 0.1, 0.1, 0.8;
  const auto p = cli::make_predictions({"a", "b", "c"}, ClassSet::bipolar_default(), probs);
  cli::write_predictions(dir / "p.csv", p);
  for (auto method : {pipeline::FusionMethod::majority, pipeline::FusionMethod::wsum3}) {
    cli::FuseOptions opt;
    opt.cfg.fusion = method;
    for (const char* m : {"acoustic", "linguistic", "visual"})
      opt.probs.push_back(cli::FeatureInput::parse(std::string(m) + "=" + (dir / "p.csv").string(), 0));
    opt.weights = std::array<double, 3>{0.2, 0.3, 0.5};
    opt.out = dir / "f.csv";
    const auto r = cli::cmd_fuse(opt);
    EXPECT_EQ(r.fused.predicted, p.predicted);
    if (method == pipeline::FusionMethod::wsum3) {
      EXPECT_LT((r.fused.probs - probs).cwiseAbs().maxCoeff(), 1e-15);
    }
  }
}

TEST(Binary, ExitCodesAndSingleLineErrors) {
  const auto dir = scratch("bin");
  EXPECT_EQ(run("synth --out " + (dir / "d").string() + " --per-class 5"), 0);
  EXPECT_EQ(run("summarize --manifest " + (dir / "d" / "manifest.csv").string() + " --out " + (dir / "f").string()),
            0);
  EXPECT_EQ(run("train --features " + (dir / "nope.csv").string() + " --out " + (dir / "m.bdf").string(),
                dir / "err.txt"),
            1);
  const auto err = slurp(dir / "err.txt");
  EXPECT_EQ(err.rfind("error: ", 0), 0u) << err;
  EXPECT_EQ(std::count(err.begin(), err.end(), '\n'), 1);
  EXPECT_EQ(run("cv --set nonsense=1 --features " + (dir / "f" / "acoustic_train.csv").string() + " --out " +
                (dir / "r.json").string()),
            1);
  std::ofstream(dir / "bad.bdf") << "BDFMODEL garbage";
  EXPECT_EQ(run("predict --model " + (dir / "bad.bdf").string() + " --features " +
                (dir / "f" / "acoustic_test.csv").string() + " --out " + (dir / "p.csv").string()),
            1);
}

TEST(Binary, TaskAggregationFillsMissingClips) {
  const auto dir = scratch("tasks");
  ASSERT_EQ(run("synth --out " + (dir / "d").string() + " --per-class 5 --tasks 7 --missing-rate 0.2"), 0);
  ASSERT_EQ(run("summarize --segment task --manifest " + (dir / "d" / "manifest.csv").string() + " --out " +
                (dir / "f").string()),
            0);
  ASSERT_EQ(run("train --set C=10 --features " + (dir / "f" / "acoustic_train.csv").string() + " --out " +
                (dir / "m.bdf").string()),
            0);
  // Drop every row of one test clip to force the missing-clip rule.
  const auto table = cli::read_feature_table(dir / "f" / "acoustic_test.csv");
  const std::string victim = table.features.sample_ids.front().substr(0, table.features.sample_ids.front().find('#'));
  cli::FeatureTable kept;
  std::vector<int> idx;
  for (std::size_t i = 0; i < table.labels.size(); ++i)
    if (table.features.sample_ids[i].rfind(victim + "#", 0) != 0) idx.push_back(static_cast<int>(i));
  kept.features = table.features.select_rows(idx);
  for (int i : idx) kept.labels.push_back(table.labels[i]);
  cli::write_feature_table(dir / "partial.csv", kept);
  ASSERT_EQ(run("predict --aggregate-tasks --manifest " + (dir / "d" / "manifest.csv").string() + " --model " +
                (dir / "m.bdf").string() + " --features " + (dir / "partial.csv").string() + " --out " +
                (dir / "p.csv").string()),
            0);
  const auto p = cli::read_predictions(dir / "p.csv");
  const auto man = manifest::load(dir / "d" / "manifest.csv");
  EXPECT_EQ(p.sample_ids.size(), man.in_split("test").size());
  const auto it = std::find(p.sample_ids.begin(), p.sample_ids.end(), victim);
  ASSERT_NE(it, p.sample_ids.end());
  EXPECT_EQ(p.classes.name(p.predicted[static_cast<std::size_t>(it - p.sample_ids.begin())]), "hypomania");
  EXPECT_NO_THROW(check_simplex(p.probs));
}
