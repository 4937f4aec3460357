#pragma once

#include "bdfusion/features.hpp"
#include "bdfusion/manifest.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bdfusion::synth {

/// Desk-scale stand-in for a clinical corpus.
///
/// Each modality has its own class-dependent descriptor means on a random half
/// of its descriptors. The means are Gaussian draws rescaled so the closest
/// pair of classes sits `separation` noise units apart,
/// so modalities carry complementary, independently noisy evidence. Every
/// clip gets a clip-level offset and per-frame noise, both with standard
/// deviation `noise_sigma`.
struct SynthSpec {
  int n_classes = 3;
  int samples_per_class = 40;
  std::vector<std::string> modalities = {"acoustic", "linguistic", "visual"};
  std::vector<int> dims = {8, 6, 5};
  double separation = 3.0;
  double noise_sigma = 1.0;
  /// 0 means one untasked segment per clip.
  int task_count = 0;
  double missing_task_rate = 0.0;
  int frames_per_task = 40;
  std::uint64_t seed = 42;

  void validate() const;
};

/// One generated clip, before anything touches disk.
struct Clip {
  std::string sample_id;
  std::string split;
  int label = 0;
  int ymrs = -1;
  std::map<std::string, features::LldSeries> lld;
  features::TaskTimestamps timestamps;
};

ClassSet class_set_for(const SynthSpec& spec);

/// Deterministic in `spec.seed`. Splits are assigned per class by position:
/// three of every five clips train, one dev, one test.
std::vector<Clip> generate(const SynthSpec& spec);

/// Writes `<dir>/manifest.csv`, `<dir>/lld/<modality>/<clip>.csv` and, with
/// tasks, `<dir>/timestamps.csv`. Returns the manifest as written.
manifest::Manifest write(const std::filesystem::path& dir, const SynthSpec& spec);

}  // namespace bdfusion::synth
