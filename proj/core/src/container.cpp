#include "bdfusion/container.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace bdfusion::container {
namespace {

using nlohmann::ordered_json;

constexpr char kMagic[8] = {'B', 'D', 'F', 'M', 'O', 'D', 'E', 'L'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffU) << (8 * (7 - i));
    return r;
  }
  return v;
}

class PayloadWriter {
 public:
  void add(ordered_json& table, const std::string& name, const Matrix& m) {
    ordered_json e;
    e["name"] = name;
    e["rows"] = m.rows();
    e["cols"] = m.cols();
    e["dtype"] = "f64le";
    table.push_back(e);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const auto bits = to_le(std::bit_cast<std::uint64_t>(m(i, j)));
        char buf[8];
        std::memcpy(buf, &bits, 8);
        bytes_.append(buf, 8);
      }
    }
  }
  void add(ordered_json& table, const std::string& name, const Vector& v) { add(table, name, Matrix(v)); }

  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class PayloadReader {
 public:
  PayloadReader(const ordered_json& table, std::string bytes) : bytes_(std::move(bytes)) {
    std::size_t offset = 0;
    for (const auto& e : table) {
      if (e.at("dtype") != "f64le") throw Error("model container: unsupported dtype");
      Entry en{e.at("rows").get<Eigen::Index>(), e.at("cols").get<Eigen::Index>(), offset};
      if (en.rows < 0 || en.cols < 0) throw Error("model container: negative array shape");
      offset += static_cast<std::size_t>(en.rows * en.cols) * 8;
      entries_[e.at("name").get<std::string>()] = en;
    }
    if (offset != bytes_.size()) {
      throw Error("model container: payload is " + std::to_string(bytes_.size()) + " bytes, header declares " +
                  std::to_string(offset));
    }
  }

  bool has(const std::string& name) const { return entries_.count(name) != 0; }

  Matrix matrix(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw Error("model container: missing array '" + name + "'");
    const auto& e = it->second;
    Matrix m(e.rows, e.cols);
    std::size_t at = e.offset;
    for (Eigen::Index i = 0; i < e.rows; ++i) {
      for (Eigen::Index j = 0; j < e.cols; ++j) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, bytes_.data() + at, 8);
        m(i, j) = std::bit_cast<double>(to_le(bits));
        at += 8;
      }
    }
    return m;
  }

  Vector vector(const std::string& name) const {
    Matrix m = matrix(name);
    if (m.cols() != 1) throw Error("model container: array '" + name + "' is not a vector");
    return m.col(0);
  }

 private:
  struct Entry {
    Eigen::Index rows = 0, cols = 0;
    std::size_t offset = 0;
  };
  std::map<std::string, Entry> entries_;
  std::string bytes_;
};

ordered_json params_json(const pipeline::KernelParams& p) {
  ordered_json j;
  j["C"] = p.C;
  j["C_weighted"] = p.C_weighted;
  j["gamma"] = p.gamma.to_string();
  j["alpha"] = p.alpha;
  return j;
}

pipeline::KernelParams params_from(const ordered_json& j) {
  pipeline::KernelParams p;
  p.C = j.at("C").get<double>();
  p.C_weighted = j.at("C_weighted").get<double>();
  p.gamma = pipeline::GammaChoice::parse(j.at("gamma").get<std::string>());
  p.alpha = j.at("alpha").get<double>();
  return p;
}

}  // namespace

const ModalityModel& ModelContainer::modality(const std::string& name) const {
  for (const auto& m : modalities) {
    if (m.name == name) return m;
  }
  throw Error("model container has no modality '" + name + "'");
}

void save(std::ostream& out, const ModelContainer& c) {
  ordered_json header;
  header["format_version"] = c.format_version;
  header["config"] = c.config;
  ordered_json table = ordered_json::array();
  PayloadWriter payload;
  ordered_json mods = ordered_json::array();
  for (const auto& mm : c.modalities) {
    const auto& tm = mm.model;
    const std::string p = mm.name + ".";
    ordered_json j;
    j["name"] = mm.name;
    j["kind"] = pipeline::to_string(tm.kind);
    j["classes"] = tm.classes.names();
    j["feature_names"] = mm.feature_names;
    j["params"] = params_json(tm.params);
    j["gamma_value"] = tm.gamma_value;

    ordered_json chain;
    chain["raw"] = tm.prep.input_dim;
    chain["pca"] = tm.prep.pca ? ordered_json(tm.prep.pca->output_dim()) : ordered_json(nullptr);
    chain["selected"] = tm.prep.selection ? ordered_json(tm.prep.selection->kept_indices.size()) : ordered_json(nullptr);
    chain["model_input"] = tm.prep.output_dim();
    j["chain"] = chain;
    j["zscore"] = tm.prep.z.has_value();
    j["l2"] = tm.prep.l2;

    if (tm.prep.pca) {
      payload.add(table, p + "pca.components", tm.prep.pca->components);
      payload.add(table, p + "pca.column_means", tm.prep.pca->column_means);
      payload.add(table, p + "pca.explained", tm.prep.pca->explained_variance_fractions);
      payload.add(table, p + "pca.variances", tm.prep.pca->variances);
    }
    if (tm.prep.selection) {
      j["selection_kept"] = tm.prep.selection->kept_indices;
      payload.add(table, p + "selection.importances", tm.prep.selection->importances);
    }
    if (tm.prep.z) {
      j["z_fitted_on"] = tm.prep.z->fitted_on;
      payload.add(table, p + "z.means", tm.prep.z->means);
      payload.add(table, p + "z.stds", tm.prep.z->stds);
    }
    if (const auto* k = std::get_if<kelm::KelmModel>(&tm.model)) {
      j["weighting"] = kelm::to_string(k->weighting);
      j["C_model"] = k->C;
      payload.add(table, p + "train_matrix", k->train_matrix);
      payload.add(table, p + "beta", k->beta);
    } else {
      const auto& f = std::get<kelm::FusedElm>(tm.model);
      j["alpha"] = f.alpha;
      j["C_unweighted"] = f.unweighted.C;
      j["C_weighted"] = f.weighted.C;
      payload.add(table, p + "train_matrix", f.unweighted.train_matrix);
      payload.add(table, p + "beta_unweighted", f.unweighted.beta);
      payload.add(table, p + "beta_weighted", f.weighted.beta);
    }
    mods.push_back(std::move(j));
  }
  header["modalities"] = mods;
  header["arrays"] = table;

  const std::string text = header.dump();
  const auto len = to_le(static_cast<std::uint64_t>(text.size()));
  char lenbuf[8];
  std::memcpy(lenbuf, &len, 8);
  out.write(kMagic, 8);
  out.write(lenbuf, 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(payload.bytes().data(), static_cast<std::streamsize>(payload.bytes().size()));
  if (!out) throw Error("failed writing model container");
}

void save(const std::filesystem::path& path, const ModelContainer& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  save(out, c);
}

ModelContainer load(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw Error("not a model container (bad magic)");
  std::uint64_t len = 0;
  char lenbuf[8];
  if (!in.read(lenbuf, 8)) throw Error("model container truncated in header length");
  std::memcpy(&len, lenbuf, 8);
  len = to_le(len);
  if (len > (1ULL << 32)) throw Error("model container header length is implausible");
  std::string text(static_cast<std::size_t>(len), '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw Error("model container truncated in header");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  ordered_json header;
  try {
    header = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("model container header is not valid JSON: ") + e.what());
  }

  ModelContainer c;
  try {
    c.format_version = header.at("format_version").get<int>();
    if (c.format_version != kFormatVersion) {
      throw Error("model container version " + std::to_string(c.format_version) + " is not supported (expected " +
                  std::to_string(kFormatVersion) + ")");
    }
    c.config = header.at("config").get<config::KeyValues>();
    PayloadReader payload(header.at("arrays"), std::move(bytes));

    for (const auto& j : header.at("modalities")) {
      ModalityModel mm;
      mm.name = j.at("name").get<std::string>();
      const std::string p = mm.name + ".";
      mm.feature_names = j.at("feature_names").get<std::vector<std::string>>();
      auto& tm = mm.model;
      tm.kind = pipeline::model_kind_from_string(j.at("kind").get<std::string>());
      tm.classes = ClassSet(j.at("classes").get<std::vector<std::string>>());
      tm.params = params_from(j.at("params"));
      tm.gamma_value = j.at("gamma_value").get<double>();

      const auto& chain = j.at("chain");
      tm.prep.input_dim = chain.at("raw").get<Eigen::Index>();
      tm.prep.l2 = j.at("l2").get<bool>();
      if (payload.has(p + "pca.components")) {
        preprocess::PcaModel pca;
        pca.components = payload.matrix(p + "pca.components");
        pca.column_means = payload.vector(p + "pca.column_means");
        pca.explained_variance_fractions = payload.vector(p + "pca.explained");
        pca.variances = payload.vector(p + "pca.variances");
        tm.prep.pca = std::move(pca);
      }
      if (payload.has(p + "selection.importances")) {
        preprocess::FeatureSelection sel;
        sel.importances = payload.vector(p + "selection.importances");
        sel.kept_indices = j.at("selection_kept").get<std::vector<int>>();
        for (int k : sel.kept_indices) {
          if (k < 0 || k >= sel.importances.size()) throw Error("model container: selected index out of range");
        }
        tm.prep.selection = std::move(sel);
      }
      if (j.at("zscore").get<bool>()) {
        preprocess::ZStats z;
        z.means = payload.vector(p + "z.means");
        z.stds = payload.vector(p + "z.stds");
        z.fitted_on = j.at("z_fitted_on").get<std::size_t>();
        tm.prep.z = std::move(z);
      }

      const Matrix train = payload.matrix(p + "train_matrix");
      const int t = static_cast<int>(tm.classes.size());
      if (tm.kind == pipeline::ModelKind::fused) {
        kelm::FusedElm f;
        f.alpha = j.at("alpha").get<double>();
        f.unweighted = kelm::KelmModel{train, payload.matrix(p + "beta_unweighted"), tm.gamma_value,
                                       j.at("C_unweighted").get<double>(), kelm::Weighting::unweighted, t};
        f.weighted = kelm::KelmModel{train, payload.matrix(p + "beta_weighted"), tm.gamma_value,
                                     j.at("C_weighted").get<double>(), kelm::Weighting::class_weighted, t};
        tm.model = std::move(f);
      } else {
        tm.model = kelm::KelmModel{train, payload.matrix(p + "beta"), tm.gamma_value, j.at("C_model").get<double>(),
                                   kelm::weighting_from_string(j.at("weighting").get<std::string>()), t};
      }

      // Dimension chain: raw -> pca -> selection -> model input.
      Eigen::Index d = tm.prep.input_dim;
      if (static_cast<Eigen::Index>(mm.feature_names.size()) != d) {
        throw DimensionError("model container: feature name count does not match raw dimension");
      }
      if (tm.prep.pca) {
        if (tm.prep.pca->components.rows() != d || tm.prep.pca->column_means.size() != d) {
          throw DimensionError("model container: PCA input dimension breaks the chain");
        }
        d = tm.prep.pca->output_dim();
        if (chain.at("pca").get<Eigen::Index>() != d) throw DimensionError("model container: PCA output mismatch");
      }
      if (tm.prep.selection) {
        if (tm.prep.selection->importances.size() != d) {
          throw DimensionError("model container: selection input dimension breaks the chain");
        }
        d = static_cast<Eigen::Index>(tm.prep.selection->kept_indices.size());
        if (chain.at("selected").get<Eigen::Index>() != d) {
          throw DimensionError("model container: selection output mismatch");
        }
      }
      if (tm.prep.z && (tm.prep.z->means.size() != d || tm.prep.z->stds.size() != d)) {
        throw DimensionError("model container: z-normalization dimension breaks the chain");
      }
      if (chain.at("model_input").get<Eigen::Index>() != d || train.cols() != d) {
        throw DimensionError("model container: model input dimension breaks the chain");
      }
      std::visit(
          [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, kelm::KelmModel>) {
              if (m.beta.rows() != train.rows() || m.beta.cols() != t) {
                throw DimensionError("model container: beta shape mismatch");
              }
            } else {
              if (m.unweighted.beta.rows() != train.rows() || m.weighted.beta.rows() != train.rows() ||
                  m.unweighted.beta.cols() != t || m.weighted.beta.cols() != t) {
                throw DimensionError("model container: beta shape mismatch");
              }
            }
          },
          tm.model);
      c.modalities.push_back(std::move(mm));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("model container header is malformed: ") + e.what());
  }
  return c;
}

ModelContainer load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path.string() + "'");
  return load(in);
}

}  // namespace bdfusion::container
