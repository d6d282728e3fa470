#include "sealkit/corpus.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "sealkit/error.hpp"

namespace sealkit {
namespace fs = std::filesystem;
namespace {

using nlohmann::json;

json points_to_json(const PointSet& points) {
  json out = json::array();
  for (const Point& p : points) out.push_back({p.x, p.y});
  return out;
}

json features_to_json(const FeatureOptions& f) {
  return {
      {"standard_size", kStandardSize},
      {"hog_input", to_string(f.hog_input)},
      {"hog",
       {{"cell_size", HogLayout::kCellSize},
        {"cells", HogLayout::kCells},
        {"bins", HogLayout::kBins},
        {"length", HogLayout::kLength}}},
      {"harris",
       {{"k", f.harris.k},
        {"rel_threshold", f.harris.rel_threshold},
        {"nms_radius", f.harris.nms_radius},
        {"sigma", f.harris.sigma}}},
  };
}

json kpca_to_json(const KpcaModel& m) {
  return {
      {"kernel", to_string(m.kernel.type)},
      {"gamma", m.kernel.gamma},
      {"input_dim", m.input_dim()},
      {"target_dim", m.target_dim},
      {"eigenvalues", m.eigenvalues},
      {"alphas", m.alphas},
      {"gram_row_means", m.gram_row_means},
      {"gram_mean", m.gram_mean},
      {"training", m.training},
  };
}

json manifest_to_json(const DbManifest& m) {
  json out = {
      {"format_version", m.format_version},
      {"created_by", "sealkit"},
      {"record_count", m.record_count},
      {"seed", m.seed},
      {"features", features_to_json(m.features)},
  };
  if (m.kpca) {
    out["embedding"] = {{"provider_id", m.provider_id.value_or("")},
                        {"kpca", kpca_to_json(*m.kpca)}};
  } else {
    out["embedding"] = nullptr;
  }
  return out;
}

// HOG vectors are mostly zero on skeleton input; only non-zero bins are kept.
json record_to_json(const GlyphRecord& r) {
  json hog_idx = json::array();
  json hog_val = json::array();
  const auto& values = r.geometric.hog.values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 0.0) {
      hog_idx.push_back(i);
      hog_val.push_back(values[i]);
    }
  }
  json out = {
      {"glyph_id", r.glyph_id},
      {"label", r.label},
      {"skeleton", points_to_json(r.geometric.skeleton.points)},
      {"corners",
       {{"points", points_to_json(r.geometric.corners.points)},
        {"responses", r.geometric.corners.responses}}},
      {"hog", {{"indices", hog_idx}, {"values", hog_val}}},
  };
  if (r.embedding) out["embedding"] = *r.embedding;
  return out;
}

PointSet points_from_json(const json& j, const std::string& field) {
  PointSet out;
  for (const json& p : j) {
    const auto xy = p.get<std::vector<int>>();
    if (xy.size() != 2) fail(ErrorCode::kDataError, field + " entries must be [x, y]");
    const Point pt{xy[0], xy[1]};
    if (pt.x < 0 || pt.y < 0 || pt.x >= kStandardSize || pt.y >= kStandardSize) {
      fail(ErrorCode::kDataError, field + " point outside the standard canvas");
    }
    if (!out.points.empty() && !RowMajorLess{}(out.points.back(), pt)) {
      fail(ErrorCode::kDataError, field + " points must be unique and row-major ordered");
    }
    out.points.push_back(pt);
  }
  return out;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

GlyphRecord record_from_json(const json& j, const std::optional<KpcaModel>& kpca) {
  GlyphRecord r;
  r.glyph_id = j.at("glyph_id").get<std::string>();
  r.label = j.at("label").get<std::string>();
  if (r.glyph_id.empty()) fail(ErrorCode::kDataError, "empty glyph_id");
  const std::string who = "glyph " + r.glyph_id + ": ";

  auto& skel = r.geometric.skeleton;
  skel.points = points_from_json(j.at("skeleton"), who + "skeleton");
  skel.mask = points_to_mask(skel.points, kStandardSize, kStandardSize);

  auto& corners = r.geometric.corners;
  corners.points = points_from_json(j.at("corners").at("points"), who + "corner");
  corners.responses = j.at("corners").at("responses").get<std::vector<double>>();
  if (corners.responses.size() != corners.points.size() || !all_finite(corners.responses)) {
    fail(ErrorCode::kDataError, who + "corner responses must be finite, one per point");
  }

  const auto idx = j.at("hog").at("indices").get<std::vector<std::size_t>>();
  const auto val = j.at("hog").at("values").get<std::vector<double>>();
  if (idx.size() != val.size()) {
    fail(ErrorCode::kDataError, who + "HOG indices and values differ in length");
  }
  auto& hog = r.geometric.hog;
  hog.values.assign(HogLayout::kLength, 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= HogLayout::kLength || (i > 0 && idx[i] <= idx[i - 1])) {
      fail(ErrorCode::kDataError, who + "HOG indices must be increasing and in range");
    }
    if (!(val[i] > 0.0 && val[i] <= 1.0)) {
      fail(ErrorCode::kDataError, who + "HOG values must lie in (0, 1]");
    }
    hog.values[idx[i]] = val[i];
  }

  if (j.contains("embedding")) {
    if (!kpca) fail(ErrorCode::kDataError, who + "embedding present but database has no model");
    auto e = j["embedding"].get<std::vector<double>>();
    if (e.size() != kpca->target_dim || !all_finite(e)) {
      fail(ErrorCode::kDataError, who + "embedding must have " +
                                      std::to_string(kpca->target_dim) + " finite values");
    }
    r.embedding = std::move(e);
  }
  return r;
}

FeatureOptions features_from_json(const json& j) {
  const json& hog = j.at("hog");
  if (j.at("standard_size").get<int>() != kStandardSize ||
      hog.at("cell_size").get<int>() != HogLayout::kCellSize ||
      hog.at("cells").get<int>() != HogLayout::kCells ||
      hog.at("bins").get<int>() != HogLayout::kBins ||
      hog.at("length").get<std::size_t>() != HogLayout::kLength) {
    fail(ErrorCode::kVersionMismatch, "feature layout differs from this build; rebuild required");
  }
  FeatureOptions f;
  f.hog_input = parse_hog_input(j.at("hog_input").get<std::string>());
  const json& h = j.at("harris");
  f.harris.k = h.at("k").get<double>();
  f.harris.rel_threshold = h.at("rel_threshold").get<double>();
  f.harris.nms_radius = h.at("nms_radius").get<int>();
  f.harris.sigma = h.at("sigma").get<double>();
  return f;
}

KpcaModel kpca_from_json(const json& j) {
  KpcaModel m;
  m.kernel.type = parse_kernel_type(j.at("kernel").get<std::string>());
  m.kernel.gamma = j.at("gamma").get<double>();
  m.target_dim = j.at("target_dim").get<std::size_t>();
  m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  m.alphas = j.at("alphas").get<std::vector<double>>();
  m.gram_row_means = j.at("gram_row_means").get<std::vector<double>>();
  m.gram_mean = j.at("gram_mean").get<double>();
  m.training = j.at("training").get<std::vector<std::vector<double>>>();
  const std::size_t n = m.training.size();
  const std::size_t dim = j.at("input_dim").get<std::size_t>();
  const bool shapes_ok =
      n >= 2 && m.target_dim >= 1 && m.eigenvalues.size() == m.target_dim &&
      m.alphas.size() == n * m.target_dim && m.gram_row_means.size() == n &&
      std::all_of(m.training.begin(), m.training.end(),
                  [dim](const std::vector<double>& v) { return v.size() == dim; });
  if (!shapes_ok) fail(ErrorCode::kDataError, "kernel PCA model has inconsistent shapes");
  return m;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kNotFound, "cannot open for writing: " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kDataError, "write failed: " + path.string());
}

}  // namespace

const GlyphRecord* GlyphDatabase::find(const std::string& glyph_id) const {
  for (const auto& r : records) {
    if (r.glyph_id == glyph_id) return &r;
  }
  return nullptr;
}

std::vector<LabeledImage> list_labeled_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kNotFound, "directory not found: " + dir.string());
  std::vector<LabeledImage> out;
  for (const auto& label_dir : fs::directory_iterator(dir)) {
    if (!label_dir.is_directory()) continue;
    for (const auto& file : fs::directory_iterator(label_dir.path())) {
      if (!file.is_regular_file() || file.path().extension() != ".png") continue;
      out.push_back({label_dir.path().filename().string(), file.path().stem().string(),
                     file.path()});
    }
  }
  std::sort(out.begin(), out.end(), [](const LabeledImage& a, const LabeledImage& b) {
    return a.label != b.label ? a.label < b.label : a.glyph_id < b.glyph_id;
  });
  return out;
}

BinaryMask load_glyph_mask(const fs::path& path) { return binarize_dark(load_image(path)); }

GlyphRecord make_record(std::string glyph_id, std::string label, const BinaryMask& mask,
                        const FeatureOptions& features, GlyphOrigin origin) {
  GlyphRecord r;
  r.glyph_id = std::move(glyph_id);
  r.label = std::move(label);
  r.geometric = extract_features(standardize(mask, origin), features);
  return r;
}

GlyphDatabase ingest_glyph_dir(const fs::path& dir, const IngestOptions& options,
                               IngestReport* report) {
  IngestReport local;
  IngestReport& rep = report ? *report : local;

  std::vector<LabeledImage> images = list_labeled_images(dir);
  if (images.empty()) fail(ErrorCode::kDataError, "no <label>/<glyph_id>.png images in " + dir.string());

  std::set<std::string> seen;
  std::vector<LabeledImage> accepted;
  for (auto& img : images) {
    if (!seen.insert(img.glyph_id).second) {
      rep.skipped.push_back({img.path.string(), "duplicate glyph id " + img.glyph_id});
    } else {
      accepted.push_back(std::move(img));
    }
  }

  std::optional<EmbeddingManifest> embeddings;
  if (options.embeddings) embeddings = load_embeddings(*options.embeddings);

  // Each worker writes only its own slots, so the output order is fixed.
  std::vector<std::optional<GlyphRecord>> slots(accepted.size());
  std::vector<std::string> errors(accepted.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < accepted.size(); i = next++) {
      try {
        const BinaryMask mask = load_glyph_mask(accepted[i].path);
        if (mask.count() == 0) {
          errors[i] = "no foreground pixels";
          continue;
        }
        slots[i] = make_record(accepted[i].glyph_id, accepted[i].label, mask, options.features);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const std::size_t n_threads =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, accepted.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  GlyphDatabase db;
  db.manifest.features = options.features;
  db.manifest.seed = options.seed;
  for (std::size_t i = 0; i < accepted.size(); ++i) {
    if (slots[i]) {
      db.records.push_back(std::move(*slots[i]));
    } else {
      rep.skipped.push_back({accepted[i].path.string(), errors[i]});
    }
  }
  if (db.records.empty()) fail(ErrorCode::kDataError, "no readable glyph images in " + dir.string());

  if (embeddings) {
    std::vector<std::vector<double>> training;
    training.reserve(embeddings->entries.size());
    for (const auto& e : embeddings->entries) training.push_back(e.values);
    KpcaModel model = kpca_fit(training, options.kernel, options.target_dim, true);
    for (auto& r : db.records) {
      if (const EmbeddingVector* e = embeddings->find(r.glyph_id)) {
        r.embedding = kpca_project(model, e->values);
      } else {
        rep.missing_embeddings.push_back(r.glyph_id);
      }
    }
    db.manifest.provider_id = embeddings->provider_id;
    db.manifest.kpca = std::move(model);
  }
  db.manifest.record_count = db.records.size();
  return db;
}

std::pair<fs::path, fs::path> db_paths(const fs::path& name) {
  return {fs::path(name.string() + ".manifest.json"), fs::path(name.string() + ".records.jsonl")};
}

void save_db(const GlyphDatabase& db, const fs::path& name) {
  if (db.manifest.record_count != db.records.size()) {
    fail(ErrorCode::kInvalidArgument, "manifest record_count does not match the records");
  }
  const auto [manifest_path, records_path] = db_paths(name);
  std::string records;
  for (const auto& r : db.records) {
    records += record_to_json(r).dump();
    records += '\n';
  }
  write_file(records_path, records);
  write_file(manifest_path, manifest_to_json(db.manifest).dump(2) + "\n");
}

GlyphDatabase load_db(const fs::path& name) {
  const auto [manifest_path, records_path] = db_paths(name);
  GlyphDatabase db;
  {
    std::ifstream in(manifest_path);
    if (!in) fail(ErrorCode::kNotFound, "file not found: " + manifest_path.string());
    json header;
    try {
      header = json::parse(in);
    } catch (const json::parse_error& e) {
      fail(ErrorCode::kDataError, manifest_path.string() + ": " + e.what());
    }
    try {
      const int version = header.at("format_version").get<int>();
      if (version != kDbFormatVersion) {
        fail(ErrorCode::kVersionMismatch,
             manifest_path.string() + ": database format version " + std::to_string(version) +
                 " but this build reads version " + std::to_string(kDbFormatVersion) +
                 "; rebuild required");
      }
      db.manifest.format_version = version;
      db.manifest.record_count = header.at("record_count").get<std::size_t>();
      db.manifest.seed = header.at("seed").get<std::uint64_t>();
      db.manifest.features = features_from_json(header.at("features"));
      const json& emb = header.at("embedding");
      if (!emb.is_null()) {
        db.manifest.provider_id = emb.at("provider_id").get<std::string>();
        db.manifest.kpca = kpca_from_json(emb.at("kpca"));
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::kDataError, manifest_path.string() + ": " + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kVersionMismatch) throw;
      fail(e.code(), manifest_path.string() + ": " + e.what());
    }
  }

  std::ifstream in(records_path);
  if (!in) fail(ErrorCode::kNotFound, "file not found: " + records_path.string());
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = records_path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      GlyphRecord r = record_from_json(json::parse(line), db.manifest.kpca);
      if (!ids.insert(r.glyph_id).second) {
        fail(ErrorCode::kDataError, "duplicate glyph " + r.glyph_id);
      }
      db.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      fail(ErrorCode::kDataError, where + e.what());
    } catch (const Error& e) {
      fail(ErrorCode::kDataError, where + e.what());
    }
  }
  if (db.records.size() != db.manifest.record_count) {
    fail(ErrorCode::kDataError,
         records_path.string() + ":" + std::to_string(lineno + 1) + ": expected " +
             std::to_string(db.manifest.record_count) + " records, found " +
             std::to_string(db.records.size()) + " (file truncated?)");
  }
  return db;
}

GlyphSource directory_glyph_source(const fs::path& dir) {
  std::map<std::string, fs::path> paths;
  for (const auto& img : list_labeled_images(dir)) paths.emplace(img.glyph_id, img.path);
  return [paths = std::move(paths)](const std::string& id) {
    const auto it = paths.find(id);
    if (it == paths.end()) fail(ErrorCode::kNotFound, "no glyph image for id: " + id);
    return load_glyph_mask(it->second);
  };
}

}  // namespace sealkit
