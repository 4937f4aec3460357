#include "bdfusion/features.hpp"

#include "bdfusion/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace bdfusion::features {

void TaskTimestamps::validate() const {
  int prev_task = 0;
  Eigen::Index prev_end = 0;
  for (const auto& e : entries) {
    if (e.task_id < 1 || e.task_id > 7) {
      throw Error("clip " + clip_id + ": task id " + std::to_string(e.task_id) + " outside 1..7");
    }
    if (e.task_id <= prev_task) {
      throw Error("clip " + clip_id + ": task ids must be strictly increasing");
    }
    if (e.start_frame < 0 || e.start_frame >= e.end_frame) {
      throw Error("clip " + clip_id + ": task " + std::to_string(e.task_id) + " has empty or negative interval");
    }
    if (e.start_frame < prev_end) {
      throw Error("clip " + clip_id + ": task " + std::to_string(e.task_id) + " overlaps the previous task");
    }
    prev_task = e.task_id;
    prev_end = e.end_frame;
  }
}

const char* to_string(EmotionGroup g) {
  switch (g) {
    case EmotionGroup::negative: return "negative";
    case EmotionGroup::neutral: return "neutral";
    case EmotionGroup::positive: return "positive";
  }
  return "?";
}

EmotionGroup emotion_of_task(int task_id) {
  if (task_id >= 1 && task_id <= 3) return EmotionGroup::negative;
  if (task_id >= 4 && task_id <= 5) return EmotionGroup::neutral;
  if (task_id >= 6 && task_id <= 7) return EmotionGroup::positive;
  throw Error("task id " + std::to_string(task_id) + " outside 1..7");
}

LldSeries parse_lld_csv(std::istream& in, std::string clip_id) {
  auto table = csv::read(in);
  LldSeries s;
  s.clip_id = std::move(clip_id);
  s.descriptor_names = table.header;
  const auto d = static_cast<Eigen::Index>(table.header.size());
  if (table.rows.empty()) throw IngestError("no frames");
  s.frames.resize(static_cast<Eigen::Index>(table.rows.size()), d);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (static_cast<Eigen::Index>(row.fields.size()) != d) {
      throw IngestError("line " + std::to_string(row.line) + ": expected " + std::to_string(d) +
                        " values, got " + std::to_string(row.fields.size()));
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      s.frames(static_cast<Eigen::Index>(r), j) = csv::parse_real(row.fields[static_cast<std::size_t>(j)], row.line);
    }
  }
  return s;
}

LldSeries load_lld_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  try {
    return parse_lld_csv(in, path.stem().string());
  } catch (const IngestError& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

void write_lld_csv(const std::filesystem::path& path, const LldSeries& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write '" + path.string() + "'");
  out << csv::join(series.descriptor_names) << '\n';
  for (Eigen::Index i = 0; i < series.frames.rows(); ++i) {
    for (Eigen::Index j = 0; j < series.frames.cols(); ++j) {
      if (j) out << ',';
      out << csv::format_real(series.frames(i, j));
    }
    out << '\n';
  }
}

std::vector<TaskTimestamps> parse_timestamps_csv(std::istream& in) {
  auto table = csv::read(in);
  const int c_clip = table.require_column("clip_id");
  const int c_task = table.require_column("task_id");
  const int c_start = table.require_column("start_frame");
  const int c_end = table.require_column("end_frame");
  std::vector<TaskTimestamps> out;
  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      throw IngestError("line " + std::to_string(row.line) + ": wrong number of fields");
    }
    const auto& clip = row.fields[static_cast<std::size_t>(c_clip)];
    TaskInterval e;
    e.task_id = static_cast<int>(csv::parse_int(row.fields[static_cast<std::size_t>(c_task)], row.line));
    e.start_frame = csv::parse_int(row.fields[static_cast<std::size_t>(c_start)], row.line);
    e.end_frame = csv::parse_int(row.fields[static_cast<std::size_t>(c_end)], row.line);
    auto it = std::find_if(out.begin(), out.end(), [&](const TaskTimestamps& t) { return t.clip_id == clip; });
    if (it == out.end()) {
      out.push_back(TaskTimestamps{clip, {}});
      it = out.end() - 1;
    }
    it->entries.push_back(e);
  }
  for (const auto& t : out) t.validate();
  return out;
}

std::vector<TaskTimestamps> load_timestamps_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  try {
    return parse_timestamps_csv(in);
  } catch (const Error& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
}

std::vector<LldSeries> segment_tasks(const LldSeries& series, const TaskTimestamps& ts) {
  ts.validate();
  std::vector<LldSeries> out;
  out.reserve(ts.entries.size());
  for (const auto& e : ts.entries) {
    if (e.end_frame > series.frame_count()) {
      throw Error("clip " + series.clip_id + ": task " + std::to_string(e.task_id) + " interval [" +
                  std::to_string(e.start_frame) + "," + std::to_string(e.end_frame) + ") exceeds " +
                  std::to_string(series.frame_count()) + " frames");
    }
    LldSeries part;
    part.frames = series.frames.middleRows(e.start_frame, e.end_frame - e.start_frame);
    part.descriptor_names = series.descriptor_names;
    part.clip_id = series.clip_id;
    part.task_id = e.task_id;
    out.push_back(std::move(part));
  }
  return out;
}

std::map<EmotionGroup, LldSeries> group_tasks_by_emotion(const std::vector<LldSeries>& tasks) {
  std::map<EmotionGroup, std::vector<const LldSeries*>> members;
  for (const auto& t : tasks) {
    if (!t.task_id) throw Error("series without task id cannot be grouped by emotion");
    if (t.descriptor_names != tasks.front().descriptor_names) {
      throw DimensionError("task series have mismatched descriptor sets");
    }
    members[emotion_of_task(*t.task_id)].push_back(&t);
  }
  std::map<EmotionGroup, LldSeries> out;
  for (auto& [group, list] : members) {
    std::stable_sort(list.begin(), list.end(),
                     [](const LldSeries* a, const LldSeries* b) { return *a->task_id < *b->task_id; });
    Eigen::Index total = 0;
    for (const auto* s : list) total += s->frame_count();
    LldSeries g;
    g.descriptor_names = list.front()->descriptor_names;
    g.clip_id = list.front()->clip_id;
    g.frames.resize(total, static_cast<Eigen::Index>(g.descriptor_names.size()));
    Eigen::Index at = 0;
    for (const auto* s : list) {
      g.frames.middleRows(at, s->frame_count()) = s->frames;
      at += s->frame_count();
    }
    out.emplace(group, std::move(g));
  }
  return out;
}

const std::vector<std::string>& bd10_functional_names() {
  static const std::vector<std::string> names = {"mean", "std", "curvature", "slope", "offset",
                                                 "min", "min_relpos", "max", "max_relpos", "range"};
  return names;
}

FeatureVector summarize_bd10(const LldSeries& series) {
  const Eigen::Index F = series.frame_count();
  const Eigen::Index d = series.descriptor_count();
  if (F == 0) throw Error("cannot summarize an empty series");
  if (static_cast<Eigen::Index>(series.descriptor_names.size()) != d) {
    throw DimensionError("descriptor name count does not match frame width");
  }

  Vector t = Vector::Zero(F);
  if (F > 1) {
    for (Eigen::Index i = 0; i < F; ++i) t(i) = static_cast<double>(i) / static_cast<double>(F - 1);
  }

  // Least-squares fits shared by every descriptor column.
  Matrix linear = Matrix::Zero(2, d);  // rows: offset, slope
  if (F == 1) {
    linear.row(0) = series.frames.row(0);
  } else {
    Matrix v(F, 2);
    v.col(0).setOnes();
    v.col(1) = t;
    linear = v.colPivHouseholderQr().solve(series.frames);
  }
  RowVector curvature = RowVector::Zero(d);
  if (F >= 3) {
    Matrix v(F, 3);
    v.col(0).setOnes();
    v.col(1) = t;
    v.col(2) = t.array().square();
    curvature = v.colPivHouseholderQr().solve(series.frames).row(2);
  }

  const auto& fnames = bd10_functional_names();
  FeatureVector out;
  out.values.resize(d * kBd10Count);
  out.names.reserve(static_cast<std::size_t>(d * kBd10Count));
  const double denom = F > 1 ? static_cast<double>(F - 1) : 1.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    auto col = series.frames.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(F);
    Eigen::Index imin = 0, imax = 0;
    for (Eigen::Index i = 1; i < F; ++i) {
      if (col(i) < col(imin)) imin = i;
      if (col(i) > col(imax)) imax = i;
    }
    const double vals[kBd10Count] = {mean,
                                     std::sqrt(var),
                                     curvature(j),
                                     linear(1, j),
                                     linear(0, j),
                                     col(imin),
                                     F > 1 ? static_cast<double>(imin) / denom : 0.0,
                                     col(imax),
                                     F > 1 ? static_cast<double>(imax) / denom : 0.0,
                                     col(imax) - col(imin)};
    for (int k = 0; k < kBd10Count; ++k) {
      out.values(j * kBd10Count + k) = vals[k];
      out.names.push_back(series.descriptor_names[static_cast<std::size_t>(j)] + "_" + fnames[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

FeatureVector summarize(const LldSeries& series, const std::string& functional_set) {
  if (functional_set == "bd10") return summarize_bd10(series);
  throw Error("unknown functional set '" + functional_set + "'");
}

}  // namespace bdfusion::features
