#include "bdfusion/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

namespace bdfusion::synth {

void SynthSpec::validate() const {
  if (n_classes < 2) throw Error("synthetic data needs at least 2 classes");
  if (samples_per_class < 1) throw Error("samples_per_class must be positive");
  if (modalities.empty()) throw Error("synthetic data needs at least one modality");
  if (dims.size() != modalities.size()) throw Error("one dimension count per modality is required");
  for (int d : dims) {
    if (d < 1) throw Error("modality dimensions must be at least 1");
  }
  if (task_count < 0 || task_count > 7) throw Error("task_count must lie in 0..7");
  if (!(missing_task_rate >= 0.0 && missing_task_rate <= 1.0)) throw Error("missing_task_rate must lie in [0, 1]");
  if (frames_per_task < 1) throw Error("frames_per_task must be positive");
  if (!(noise_sigma >= 0.0)) throw Error("noise_sigma must be non-negative");
}

ClassSet class_set_for(const SynthSpec& spec) {
  if (spec.n_classes == 3) return ClassSet::bipolar_default();
  std::vector<std::string> names;
  for (int c = 0; c < spec.n_classes; ++c) names.push_back("c" + std::to_string(c));
  return ClassSet(std::move(names));
}

std::vector<Clip> generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool bipolar = spec.n_classes == 3;

  // class_means[m] is n_classes x d.
  std::vector<Matrix> class_means;
  for (std::size_t m = 0; m < spec.modalities.size(); ++m) {
    const int d = spec.dims[m];
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const int informative = std::max(1, (d + 1) / 2);
    Matrix mu = Matrix::Zero(spec.n_classes, d);
    for (int k = 0; k < informative; ++k) {
      for (int c = 0; c < spec.n_classes; ++c) mu(c, order[static_cast<std::size_t>(k)]) = normal(rng);
    }
    // Rescale so the closest pair of class means is `separation` noise units apart.
    double closest = std::numeric_limits<double>::infinity();
    for (int a = 0; a < spec.n_classes; ++a)
      for (int b = a + 1; b < spec.n_classes; ++b) closest = std::min(closest, (mu.row(a) - mu.row(b)).norm());
    if (closest > 0.0) mu *= spec.separation * spec.noise_sigma / closest;
    class_means.push_back(std::move(mu));
  }

  const int segments = spec.task_count == 0 ? 1 : spec.task_count;
  constexpr int kGapFrames = 3;
  std::vector<Clip> clips;
  int serial = 0;
  for (int c = 0; c < spec.n_classes; ++c) {
    for (int i = 0; i < spec.samples_per_class; ++i) {
      Clip clip;
      char id[32];
      std::snprintf(id, sizeof(id), "clip%04d", ++serial);
      clip.sample_id = id;
      const int pos = i % 5;
      clip.split = pos < 3 ? "train" : (pos == 3 ? "dev" : "test");
      clip.label = c;
      if (bipolar) {
        const int lo[3] = {0, 8, 20}, hi[3] = {7, 19, 40};
        clip.ymrs = std::uniform_int_distribution<int>(lo[c], hi[c])(rng);
      }
      clip.timestamps.clip_id = clip.sample_id;

      std::vector<bool> present(static_cast<std::size_t>(segments), true);
      if (spec.task_count > 0) {
        for (auto&& p : present) p = unit(rng) >= spec.missing_task_rate;
      }
      // Layout: gap, task, gap, task, ..., gap. Missing tasks contribute no frames.
      Eigen::Index frames = kGapFrames;
      for (int s = 0; s < segments; ++s) {
        if (!present[static_cast<std::size_t>(s)]) continue;
        if (spec.task_count > 0) {
          clip.timestamps.entries.push_back({s + 1, frames, frames + spec.frames_per_task});
        }
        frames += spec.frames_per_task + kGapFrames;
      }
      if (spec.task_count == 0) frames = spec.frames_per_task;

      for (std::size_t m = 0; m < spec.modalities.size(); ++m) {
        const int d = spec.dims[m];
        features::LldSeries s;
        s.clip_id = clip.sample_id;
        for (int j = 0; j < d; ++j) s.descriptor_names.push_back(spec.modalities[m] + "_d" + std::to_string(j));
        RowVector centre = class_means[m].row(c);
        for (int j = 0; j < d; ++j) centre(j) += spec.noise_sigma * normal(rng);
        s.frames.resize(frames, d);
        for (Eigen::Index f = 0; f < frames; ++f) {
          for (int j = 0; j < d; ++j) s.frames(f, j) = centre(j) + spec.noise_sigma * normal(rng);
        }
        clip.lld.emplace(spec.modalities[m], std::move(s));
      }
      clips.push_back(std::move(clip));
    }
  }
  return clips;
}

manifest::Manifest write(const std::filesystem::path& dir, const SynthSpec& spec) {
  const auto clips = generate(spec);
  const auto classes = class_set_for(spec);
  std::filesystem::create_directories(dir);
  manifest::Manifest man;
  man.modalities = spec.modalities;

  std::ofstream ts;
  const auto ts_path = dir / "timestamps.csv";
  if (spec.task_count > 0) {
    ts.open(ts_path, std::ios::binary);
    if (!ts) throw IngestError("cannot write '" + ts_path.string() + "'");
    ts << "clip_id,task_id,start_frame,end_frame\n";
  }
  for (const auto& m : spec.modalities) std::filesystem::create_directories(dir / "lld" / m);

  for (const auto& clip : clips) {
    manifest::Entry e;
    e.sample_id = clip.sample_id;
    e.split = clip.split;
    e.label = classes.name(clip.label);
    if (clip.ymrs >= 0) e.ymrs = clip.ymrs;
    for (const auto& m : spec.modalities) {
      const auto p = dir / "lld" / m / (clip.sample_id + ".csv");
      features::write_lld_csv(p, clip.lld.at(m));
      e.lld[m] = p;
    }
    if (spec.task_count > 0) {
      for (const auto& t : clip.timestamps.entries) {
        ts << clip.sample_id << ',' << t.task_id << ',' << t.start_frame << ',' << t.end_frame << '\n';
      }
      e.timestamps = ts_path;
    }
    man.entries.push_back(std::move(e));
  }
  manifest::save(dir / "manifest.csv", man);
  return man;
}

}  // namespace bdfusion::synth
