#pragma once

#include "bdfusion/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdfusion::features {

/// Frame-level low-level descriptors for one clip or task segment.
/// `frames` is F x d; every value is finite.
struct LldSeries {
  Matrix frames;
  std::vector<std::string> descriptor_names;
  std::string clip_id;
  std::optional<int> task_id;

  Eigen::Index frame_count() const { return frames.rows(); }
  Eigen::Index descriptor_count() const { return frames.cols(); }
};

/// Half-open frame interval [start_frame, end_frame) belonging to one task.
struct TaskInterval {
  int task_id = 0;
  Eigen::Index start_frame = 0;
  Eigen::Index end_frame = 0;
};

/// Per-clip task boundaries. Entries are ordered by task id; a missing id
/// means the task was skipped in that clip.
struct TaskTimestamps {
  std::string clip_id;
  std::vector<TaskInterval> entries;

  /// Checks ordering, ranges and non-overlap; throws Error.
  void validate() const;
};

struct FeatureVector {
  Vector values;
  std::vector<std::string> names;
};

enum class EmotionGroup { negative, neutral, positive };

const char* to_string(EmotionGroup g);
/// Tasks 1-3 negative, 4-5 neutral, 6-7 positive.
EmotionGroup emotion_of_task(int task_id);

/// Reads an LLD table: header of descriptor names, then one numeric row per
/// frame. Errors name the offending line.
LldSeries load_lld_csv(const std::filesystem::path& path);
LldSeries parse_lld_csv(std::istream& in, std::string clip_id = {});
void write_lld_csv(const std::filesystem::path& path, const LldSeries& series);

/// Reads a timestamp table (clip_id,task_id,start_frame,end_frame) and
/// returns one TaskTimestamps per clip, in first-seen order.
std::vector<TaskTimestamps> load_timestamps_csv(const std::filesystem::path& path);
std::vector<TaskTimestamps> parse_timestamps_csv(std::istream& in);

/// One sub-series per interval, tagged with its task id. Frames outside all
/// intervals are dropped.
std::vector<LldSeries> segment_tasks(const LldSeries& series, const TaskTimestamps& ts);

/// Row-concatenates tasks by emotion group. Groups with no task present are
/// absent from the result.
std::map<EmotionGroup, LldSeries> group_tasks_by_emotion(const std::vector<LldSeries>& tasks);

/// Number of functionals emitted per descriptor by summarize_bd10.
inline constexpr int kBd10Count = 10;

/// Names of the BD10 functionals, in output order.
const std::vector<std::string>& bd10_functional_names();

/// Summarizes each descriptor contour with ten functionals, in order:
/// mean, std, curvature, slope, offset, min, min_relpos, max, max_relpos,
/// range. Regression functionals use normalized time t_i = i/(F-1) (t = 0
/// when F = 1); std is the population deviation; relative positions are
/// argindex/(F-1) with ties resolved to the first occurrence.
FeatureVector summarize_bd10(const LldSeries& series);

/// Functional-set dispatch for configuration strings. Only "bd10" exists.
FeatureVector summarize(const LldSeries& series, const std::string& functional_set);

}  // namespace bdfusion::features
