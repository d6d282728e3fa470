#include "json_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "sealkit/error.hpp"

namespace seal {

using sealkit::ErrorCode;
using sealkit::fail;

json to_json(const sealkit::BoundingBox& box) {
  return {{"x_min", box.x_min}, {"y_min", box.y_min}, {"x_max", box.x_max}, {"y_max", box.y_max}};
}

sealkit::BoundingBox box_from_json(const json& j) {
  return {j.at("x_min").get<int>(), j.at("y_min").get<int>(), j.at("x_max").get<int>(),
          j.at("y_max").get<int>()};
}

json segmentation_debug_json(const sealkit::SegmentationResult& seg) {
  json curve = json::array();
  for (const auto& s : seg.curve.samples) {
    curve.push_back({{"bandwidth", s.bandwidth}, {"n_clusters", s.n_clusters}});
  }
  const auto& sel = seg.selection;
  json hyps = json::array();
  for (const auto& h : seg.hypotheses) {
    hyps.push_back({{"bbox", to_json(h.bbox)},
                    {"pixel_count", h.pixels.size()},
                    {"source_bandwidth", h.source_bandwidth},
                    {"cluster_label", h.cluster_label}});
  }
  return {
      {"curve", std::move(curve)},
      {"fit",
       {{"degree", sel.fit.degree},
        {"center", sel.fit.center},
        {"scale", sel.fit.scale},
        {"coefficients", sel.fit.coefficients}}},
      {"selection_rule", sealkit::to_string(sel.rule)},
      {"used_fallback", sel.used_fallback},
      {"descent_band", sel.descent_band},
      {"candidates", seg.candidate_bandwidths},
      {"hypotheses", std::move(hyps)},
  };
}

json rank_to_json(const sealkit::RankResult& result, std::size_t top,
                  const sealkit::Weights& weights) {
  json matches = json::array();
  for (std::size_t i = 0; i < result.matches.size() && i < top; ++i) {
    const auto& m = result.matches[i];
    const auto& b = m.breakdown;
    json cnn = b.distances.cnn ? json(*b.distances.cnn) : json(nullptr);
    matches.push_back({{"rank", m.rank},
                       {"glyph_id", m.glyph_id},
                       {"label", m.label},
                       {"s_total", b.s_total},
                       {"breakdown",
                        {{"s_cnn", b.s_cnn},
                         {"s_geo", b.s_geo},
                         {"harris", b.harris},
                         {"hog", b.hog},
                         {"skeleton", b.skeleton},
                         {"distances",
                          {{"harris", b.distances.harris},
                           {"hog", b.distances.hog},
                           {"skeleton", b.distances.skeleton},
                           {"cnn", cnn}}}}}});
  }
  return {{"weights", {{"w_cf", weights.w_cf}, {"w_gf", weights.w_gf}}},
          {"embedding_ignored", result.embedding_ignored},
          {"warnings", result.warnings},
          {"candidates", result.matches.size()},
          {"matches", std::move(matches)}};
}

json feature_report_to_json(const sealkit::FeatureReport& report) {
  return {{"feature", report.feature},
          {"average_similarity", report.average.overall},
          {"per_class", report.average.per_class},
          {"distinction", report.distinction},
          {"score", report.score},
          {"within_pairs", report.within_pairs},
          {"cross_pairs", report.cross_pairs}};
}

sealkit::SyntheticSealSpec spec_from_json(const json& j) {
  static const std::set<std::string> kKeys = {
      "name",   "rows",   "cols",  "offsets",     "glyph_ids", "canvas", "scales", "jitter",
      "shape",  "seed",   "handwriting", "cell_size", "fill",    "noise"};
  if (!j.is_object()) fail(ErrorCode::kDataError, "seal spec must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) fail(ErrorCode::kDataError, "unknown seal spec field: " + key);
  }
  sealkit::SyntheticSealSpec s;
  try {
    s.rows = j.value("rows", s.rows);
    s.cols = j.value("cols", s.cols);
    if (j.contains("offsets")) {
      for (const auto& p : j["offsets"]) {
        const auto xy = p.get<std::vector<int>>();
        if (xy.size() != 2) fail(ErrorCode::kDataError, "offsets entries must be [x, y]");
        s.offsets.push_back({xy[0], xy[1]});
      }
    }
    s.glyph_ids = j.at("glyph_ids").get<std::vector<std::string>>();
    if (j.contains("canvas")) {
      const auto wh = j["canvas"].get<std::vector<int>>();
      if (wh.size() != 2) fail(ErrorCode::kDataError, "canvas must be [width, height]");
      s.canvas_width = wh[0];
      s.canvas_height = wh[1];
    }
    s.scales = j.value("scales", s.scales);
    s.jitter = j.value("jitter", s.jitter);
    if (j.contains("shape")) s.shape = sealkit::parse_seal_shape(j["shape"].get<std::string>());
    s.seed = j.value("seed", s.seed);
    s.handwriting = j.value("handwriting", s.handwriting);
    s.cell_size = j.value("cell_size", s.cell_size);
    s.fill = j.value("fill", s.fill);
    s.noise = j.value("noise", s.noise);
  } catch (const json::exception& e) {
    fail(ErrorCode::kDataError, std::string("seal spec: ") + e.what());
  } catch (const sealkit::Error& e) {
    fail(ErrorCode::kDataError, std::string("seal spec: ") + e.what());
  }
  return s;
}

json spec_to_json(const sealkit::SyntheticSealSpec& s) {
  json offsets = json::array();
  for (const auto& p : s.offsets) offsets.push_back({p.x, p.y});
  json out = {{"rows", s.rows},
              {"cols", s.cols},
              {"glyph_ids", s.glyph_ids},
              {"scales", s.scales},
              {"jitter", s.jitter},
              {"shape", sealkit::to_string(s.shape)},
              {"seed", s.seed},
              {"handwriting", s.handwriting},
              {"cell_size", s.cell_size},
              {"fill", s.fill},
              {"noise", s.noise}};
  if (!s.offsets.empty()) out["offsets"] = offsets;
  if (s.canvas_width > 0 || s.canvas_height > 0) {
    out["canvas"] = {s.canvas_width, s.canvas_height};
  }
  return out;
}

json truth_to_json(const sealkit::GroundTruth& truth) {
  json glyphs = json::array();
  for (const auto& g : truth.glyphs) {
    glyphs.push_back(
        {{"glyph_id", g.glyph_id}, {"bbox", to_json(g.box)}, {"pixel_count", g.pixels.size()}});
  }
  return {{"width", truth.width},
          {"height", truth.height},
          {"border_pixels", truth.border.size()},
          {"glyphs", std::move(glyphs)}};
}

std::vector<NamedSpec> load_spec_file(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  const std::string stem = path.stem().string();
  auto default_name = [&](std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "_%03zu", i);
    return stem + buf;
  };
  std::vector<NamedSpec> out;
  try {
    if (doc.is_object() && doc.contains("corpus")) {
      const json& c = doc["corpus"];
      sealkit::SealCorpusOptions opt;
      opt.count = c.value("count", opt.count);
      opt.seed = c.value("seed", opt.seed);
      opt.first_seal_seed = c.value("first_seal_seed", opt.first_seal_seed);
      opt.jitter = c.value("jitter", opt.jitter);
      const auto specs = sealkit::make_seal_corpus(opt);
      for (std::size_t i = 0; i < specs.size(); ++i) out.push_back({default_name(i), specs[i]});
      return out;
    }
    const json items = doc.is_array() ? doc : json::array({doc});
    for (std::size_t i = 0; i < items.size(); ++i) {
      std::string name = items[i].is_object() && items[i].contains("name")
                             ? items[i]["name"].get<std::string>()
                             : default_name(i);
      out.push_back({std::move(name), spec_from_json(items[i])});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kDataError, path.string() + ": " + e.what());
  } catch (const sealkit::Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kNotFound, "file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kDataError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kNotFound, "cannot open for writing: " + path.string());
  out << text;
  if (!out) fail(ErrorCode::kDataError, "write failed: " + path.string());
}

}  // namespace seal
