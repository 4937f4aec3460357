#include "bdfusion/manifest.hpp"

#include "bdfusion/csv.hpp"
#include "bdfusion/metrics.hpp"

#include <fstream>
#include <set>

namespace bdfusion::manifest {

bool valid_split(const std::string& s) { return s == "train" || s == "dev" || s == "test"; }

int Manifest::class_of(const Entry& e, const ClassSet& classes) const {
  if (!e.label.empty()) return classes.id_of(e.label);
  if (e.ymrs) return classes.id_of(ClassSet::bipolar_default().name(metrics::ymrs_to_class(*e.ymrs)));
  throw Error("sample " + e.sample_id + " has neither a label nor a YMRS score");
}

std::vector<const Entry*> Manifest::in_split(const std::string& split) const {
  std::vector<const Entry*> out;
  for (const auto& e : entries) {
    if (e.split == split) out.push_back(&e);
  }
  return out;
}

Manifest load(const std::filesystem::path& path) {
  const auto table = csv::read_file(path);
  const auto base = path.parent_path();
  const int c_id = table.require_column("sample_id");
  const int c_split = table.require_column("split");
  const int c_label = table.column("label");
  const int c_ymrs = table.column("ymrs");
  const int c_ts = table.column("timestamps");

  Manifest m;
  std::vector<int> modality_cols;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    const int c = static_cast<int>(i);
    if (c == c_id || c == c_split || c == c_label || c == c_ymrs || c == c_ts) continue;
    m.modalities.push_back(table.header[i]);
    modality_cols.push_back(c);
  }
  if (m.modalities.empty()) throw IngestError(path.string() + ": manifest names no modality columns");

  auto resolve = [&](const std::string& p, std::size_t line) {
    std::filesystem::path fp(p);
    if (fp.is_relative()) fp = base / fp;
    if (!std::filesystem::exists(fp)) {
      throw IngestError(path.string() + ": line " + std::to_string(line) + ": path '" + p + "' does not exist");
    }
    return fp;
  };

  std::set<std::string> seen;
  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": wrong number of fields");
    }
    auto field = [&](int c) -> const std::string& { return row.fields[static_cast<std::size_t>(c)]; };
    Entry e;
    e.sample_id = field(c_id);
    if (e.sample_id.empty()) throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": empty sample id");
    if (!seen.insert(e.sample_id).second) {
      throw IngestError(path.string() + ": duplicate sample id '" + e.sample_id + "'");
    }
    e.split = field(c_split);
    if (!valid_split(e.split)) {
      throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": invalid split '" + e.split + "'");
    }
    if (c_label >= 0) e.label = field(c_label);
    if (c_ymrs >= 0 && !field(c_ymrs).empty()) {
      e.ymrs = static_cast<int>(csv::parse_int(field(c_ymrs), row.line));
      metrics::ymrs_to_class(*e.ymrs);
    }
    if (e.label.empty() && !e.ymrs) {
      throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": no label or ymrs score");
    }
    if (c_ts >= 0 && !field(c_ts).empty()) e.timestamps = resolve(field(c_ts), row.line);
    for (std::size_t k = 0; k < modality_cols.size(); ++k) {
      const auto& p = field(modality_cols[k]);
      if (p.empty()) {
        throw IngestError(path.string() + ": line " + std::to_string(row.line) + ": missing path for modality '" +
                          m.modalities[k] + "'");
      }
      e.lld[m.modalities[k]] = resolve(p, row.line);
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save(const std::filesystem::path& path, const Manifest& m) {
  const auto base = path.parent_path();
  auto rel = [&](const std::filesystem::path& p) {
    auto r = p.lexically_relative(base.empty() ? std::filesystem::path(".") : base);
    return (r.empty() ? p : r).generic_string();
  };
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write '" + path.string() + "'");
  bool any_ymrs = false, any_ts = false;
  for (const auto& e : m.entries) {
    any_ymrs = any_ymrs || e.ymrs.has_value();
    any_ts = any_ts || e.timestamps.has_value();
  }
  std::vector<std::string> header = {"sample_id", "split", "label"};
  if (any_ymrs) header.push_back("ymrs");
  if (any_ts) header.push_back("timestamps");
  for (const auto& mod : m.modalities) header.push_back(mod);
  out << csv::join(header) << '\n';
  for (const auto& e : m.entries) {
    std::vector<std::string> f = {e.sample_id, e.split, e.label};
    if (any_ymrs) f.push_back(e.ymrs ? std::to_string(*e.ymrs) : "");
    if (any_ts) f.push_back(e.timestamps ? rel(*e.timestamps) : "");
    for (const auto& mod : m.modalities) f.push_back(rel(e.lld.at(mod)));
    out << csv::join(f) << '\n';
  }
}

}  // namespace bdfusion::manifest
