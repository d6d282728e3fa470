#include "cli.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json_io.hpp"
#include "sealkit/corpus.hpp"
#include "sealkit/embedding.hpp"
#include "sealkit/error.hpp"
#include "sealkit/pipeline.hpp"
#include "sealkit/retrieval.hpp"
#include "sealkit/synth.hpp"
#include "service.hpp"

namespace seal {
namespace {

namespace fs = std::filesystem;
using sealkit::ErrorCode;
using sealkit::fail;

std::string indexed_name(const char* prefix, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu%s", prefix, i, ext);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    fail(ErrorCode::kNotFound, "cannot create directory: " + dir.string());
  }
}

fs::path required_db(const std::string& flag) {
  const auto path = resolve_db_path(flag.empty() ? std::nullopt : std::optional<fs::path>(flag));
  if (!path) fail(ErrorCode::kInvalidArgument, "--db is required (or set SEAL_DB)");
  return *path;
}

struct HarrisFlags {
  double k = 0.04;
  double rel_threshold = 0.01;
  int nms_radius = 4;
  std::string hog_input = "skeleton";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--hog-input", hog_input, "HOG source map: skeleton or regular")
        ->capture_default_str();
    cmd->add_option("--harris-k", k, "Harris k in [0.04, 0.06]")->capture_default_str();
    cmd->add_option("--harris-threshold", rel_threshold, "Corner threshold relative to max R")
        ->capture_default_str();
    cmd->add_option("--harris-nms", nms_radius, "Non-maximum suppression radius")
        ->capture_default_str();
  }

  sealkit::FeatureOptions options() const {
    sealkit::FeatureOptions f;
    f.hog_input = sealkit::parse_hog_input(hog_input);
    f.harris.k = k;
    f.harris.rel_threshold = rel_threshold;
    f.harris.nms_radius = nms_radius;
    return f;
  }
};

// Raw provider vector for `glyph_id`, reduced through the database model.
std::optional<std::vector<double>> project_query_embedding(const sealkit::GlyphDatabase& db,
                                                           const sealkit::EmbeddingManifest* m,
                                                           const std::string& glyph_id) {
  if (!m || !db.manifest.kpca) return std::nullopt;
  const sealkit::EmbeddingVector* v = m->find(glyph_id);
  if (!v) return std::nullopt;
  if (v->dim() != db.manifest.kpca->input_dim()) {
    fail(ErrorCode::kDataError, "query embedding for " + glyph_id + " has dim " +
                                    std::to_string(v->dim()) + ", database expects " +
                                    std::to_string(db.manifest.kpca->input_dim()));
  }
  return sealkit::kpca_project(*db.manifest.kpca, v->values);
}

// ---- separate ----

struct SeparateArgs {
  std::string image;
  int k = sealkit::kDefaultColorClusters;
  std::uint64_t seed = 0;
  int iters = sealkit::kDefaultKMeansIterations;
  std::string out_dir;
};

int cmd_separate(const SeparateArgs& a, std::ostream& out) {
  const sealkit::RasterImage image = sealkit::load_image(a.image);
  const auto sep = sealkit::kmeans_rgb(image, a.k, a.seed, a.iters);
  ensure_dir(a.out_dir);
  for (std::size_t i = 0; i < sep.clusters.size(); ++i) {
    sealkit::save_image(sealkit::mask_to_image(sealkit::cluster_to_mask(image, sep.clusters[i])),
                        fs::path(a.out_dir) / indexed_name("cluster", i, ".png"));
  }
  json doc = clusters_to_json(
      sep, sealkit::select_red_cluster(sep),
      [](std::size_t i) { return indexed_name("cluster", i, ".png"); }, "mask");
  doc["width"] = image.width();
  doc["height"] = image.height();
  const std::string text = doc.dump(2) + "\n";
  write_text_file(fs::path(a.out_dir) / "clusters.json", text);
  out << text;
  return kExitOk;
}

// ---- segment ----

struct SegmentArgs {
  std::string image;
  std::optional<std::size_t> cluster;
  int k = sealkit::kDefaultColorClusters;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string rule = "plateau";
  int ratio_count = 100;
  double ratio_min = sealkit::kDefaultRatioMin;
  double ratio_max = sealkit::kDefaultRatioMax;
  bool keep_border = false;
  std::string debug;
};

int cmd_segment(const SegmentArgs& a, std::ostream& out) {
  const sealkit::RasterImage image = sealkit::load_image(a.image);
  sealkit::PipelineConfig cfg;
  cfg.k = a.k;
  cfg.seed = a.seed;
  cfg.cluster = a.cluster;
  cfg.strip_border = !a.keep_border;
  cfg.segment.seed = a.seed;
  cfg.segment.rule = sealkit::parse_selection_rule(a.rule);
  cfg.segment.ratio_count = a.ratio_count;
  cfg.segment.ratio_min = a.ratio_min;
  cfg.segment.ratio_max = a.ratio_max;
  const auto seg = sealkit::segment_seal(image, cfg);

  ensure_dir(a.out_dir);
  const fs::path dir(a.out_dir);
  for (std::size_t i = 0; i < seg.hypotheses.size(); ++i) {
    sealkit::save_image(sealkit::mask_to_image(sealkit::hypothesis_mask(seg.hypotheses[i])),
                        dir / indexed_name("segment", i, ".png"));
  }
  sealkit::save_image(sealkit::render_overlay(image, seg.hypotheses), dir / "overlay.png");

  json doc = {
      {"width", seg.width},
      {"height", seg.height},
      {"seed", a.seed},
      {"k", a.k},
      {"cluster_index", seg.cluster_index},
      {"auto_cluster", !a.cluster.has_value()},
      {"selection_rule", sealkit::to_string(cfg.segment.rule)},
      {"candidate_bandwidths", seg.segmentation.candidate_bandwidths},
      {"overlay", "overlay.png"},
      {"hypotheses", hypotheses_to_json(
                         seg, [](std::size_t i) { return indexed_name("segment", i, ".png"); },
                         "mask")},
  };
  const std::string text = doc.dump(2) + "\n";
  write_text_file(dir / "hypotheses.json", text);
  if (!a.debug.empty()) {
    json dbg = segmentation_debug_json(seg.segmentation);
    dbg["transform"] = {{"origin", {seg.transform.origin.x, seg.transform.origin.y}},
                        {"scale", seg.transform.scale}};
    write_text_file(a.debug, dbg.dump(2) + "\n");
  }
  out << text;
  return kExitOk;
}

// ---- ingest ----

struct IngestArgs {
  std::string glyph_dir;
  std::string embeddings;
  std::string db;
  std::uint64_t seed = 0;
  std::size_t target_dim = sealkit::kDefaultTargetDim;
  std::string kernel = "rbf";
  double gamma = 0.0;
  HarrisFlags features;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
  sealkit::IngestOptions opt;
  opt.features = a.features.options();
  if (!a.embeddings.empty()) opt.embeddings = a.embeddings;
  opt.kernel.type = sealkit::parse_kernel_type(a.kernel);
  opt.kernel.gamma = a.gamma;
  opt.target_dim = a.target_dim;
  opt.seed = a.seed;
  const fs::path db_name = required_db(a.db);
  sealkit::IngestReport report;
  const auto db = sealkit::ingest_glyph_dir(a.glyph_dir, opt, &report);
  if (db_name.has_parent_path()) ensure_dir(db_name.parent_path());
  sealkit::save_db(db, db_name);

  const auto [manifest, records] = sealkit::db_paths(db_name);
  json skipped = json::array();
  for (const auto& s : report.skipped) {
    skipped.push_back({{"path", s.path}, {"reason", s.reason}});
    err << "seal: skipped " << s.path << ": " << s.reason << "\n";
  }
  json doc = {{"records", db.records.size()},
              {"skipped", skipped},
              {"missing_embeddings", report.missing_embeddings},
              {"manifest", manifest.string()},
              {"records_file", records.string()},
              {"embedding_dim", db.manifest.kpca ? db.manifest.kpca->target_dim : 0}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

// ---- query ----

struct QueryArgs {
  std::string image;
  std::string db;
  double wcf = 1.0;
  double wgf = 1.0;
  std::size_t top = 50;
  std::string embeddings;
  std::string embedding_id;
};

int cmd_query(const QueryArgs& a, std::ostream& out, std::ostream& err) {
  const auto db = sealkit::load_db(required_db(a.db));
  if (db.records.empty()) fail(ErrorCode::kDataError, "glyph database is empty");
  const std::string id = fs::path(a.image).stem().string();
  sealkit::GlyphRecord query =
      sealkit::make_record(id, "", sealkit::load_glyph_mask(a.image), db.manifest.features,
                           sealkit::GlyphOrigin::kQuerySegment);
  std::optional<sealkit::EmbeddingManifest> m;
  if (!a.embeddings.empty()) m = sealkit::load_embeddings(a.embeddings);
  query.embedding =
      project_query_embedding(db, m ? &*m : nullptr, a.embedding_id.empty() ? id : a.embedding_id);

  const sealkit::Weights w{a.wcf, a.wgf};
  const auto ranked = sealkit::rank(query, db.records, w);
  for (const auto& warning : ranked.warnings) err << "seal: warning: " << warning << "\n";
  json doc = rank_to_json(ranked, a.top, w);
  doc["query"] = id;
  out << doc.dump(2) << "\n";
  return kExitOk;
}

// ---- eval ----

struct EvalMrrArgs {
  std::string db;
  std::string queries;
  double wcf = 1.0;
  double wgf = 1.0;
  std::string embeddings;
};

int cmd_eval_mrr(const EvalMrrArgs& a, std::ostream& out, std::ostream& err) {
  const auto db = sealkit::load_db(required_db(a.db));
  if (db.records.empty()) fail(ErrorCode::kDataError, "glyph database is empty");
  std::optional<sealkit::EmbeddingManifest> m;
  if (!a.embeddings.empty()) m = sealkit::load_embeddings(a.embeddings);
  const sealkit::Weights w{a.wcf, a.wgf};

  std::vector<int> ranks;
  json rows = json::array();
  json skipped = json::array();
  std::set<std::string> warnings;
  for (const auto& img : sealkit::list_labeled_images(a.queries)) {
    const bool known = std::any_of(db.records.begin(), db.records.end(),
                                   [&](const sealkit::GlyphRecord& r) { return r.label == img.label; });
    if (!known) {
      skipped.push_back({{"path", img.path.string()}, {"reason", "label not in database"}});
      continue;
    }
    sealkit::GlyphRecord q = sealkit::make_record(
        img.glyph_id, img.label, sealkit::load_glyph_mask(img.path), db.manifest.features,
        sealkit::GlyphOrigin::kQuerySegment);
    q.embedding = project_query_embedding(db, m ? &*m : nullptr, img.glyph_id);
    const auto ranked = sealkit::rank(q, db.records, w);
    warnings.insert(ranked.warnings.begin(), ranked.warnings.end());
    const auto hit = std::find_if(ranked.matches.begin(), ranked.matches.end(),
                                  [&](const sealkit::RankedMatch& r) { return r.label == img.label; });
    ranks.push_back(hit->rank);
    rows.push_back({{"glyph_id", img.glyph_id},
                    {"label", img.label},
                    {"rank", hit->rank},
                    {"top_label", ranked.matches.front().label}});
  }
  for (const auto& warning : warnings) err << "seal: warning: " << warning << "\n";
  if (ranks.empty()) fail(ErrorCode::kDataError, "no query shares a label with the database");
  json doc = {{"mrr", sealkit::mrr(ranks)},
              {"query_count", ranks.size()},
              {"weights", {{"w_cf", w.w_cf}, {"w_gf", w.w_gf}}},
              {"queries", rows},
              {"skipped", skipped}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

struct EvalFeaturesArgs {
  std::string images;
  std::string embeddings;
  HarrisFlags features;
};

int cmd_eval_features(const EvalFeaturesArgs& a, std::ostream& out) {
  const auto opts = a.features.options();
  std::vector<std::string> labels;
  std::vector<sealkit::GlyphRecord> recs;
  for (const auto& img : sealkit::list_labeled_images(a.images)) {
    recs.push_back(sealkit::make_record(img.glyph_id, img.label,
                                        sealkit::load_glyph_mask(img.path), opts));
    labels.push_back(img.label);
  }
  auto geo = [&](std::size_t i, std::size_t j) { return sealkit::feature_distances(recs[i], recs[j]); };
  json features = json::array();
  features.push_back(feature_report_to_json(sealkit::evaluate_feature(
      "harris", labels, [&](std::size_t i, std::size_t j) { return geo(i, j).harris; })));
  features.push_back(feature_report_to_json(sealkit::evaluate_feature(
      "hog", labels, [&](std::size_t i, std::size_t j) { return geo(i, j).hog; })));
  features.push_back(feature_report_to_json(sealkit::evaluate_feature(
      "skeleton", labels, [&](std::size_t i, std::size_t j) { return geo(i, j).skeleton; })));
  if (!a.embeddings.empty()) {
    const auto m = sealkit::load_embeddings(a.embeddings);
    std::vector<const sealkit::EmbeddingVector*> vecs;
    for (const auto& r : recs) {
      const auto* v = m.find(r.glyph_id);
      if (!v) fail(ErrorCode::kDataError, "no embedding for glyph " + r.glyph_id);
      vecs.push_back(v);
    }
    features.push_back(feature_report_to_json(sealkit::evaluate_feature(
        "cnn", labels, [&](std::size_t i, std::size_t j) {
          return sealkit::cosine_distance(vecs[i]->values, vecs[j]->values);
        })));
  }
  json classes = json::array();
  for (const auto& c : sealkit::enumerate_pairs(labels).classes) classes.push_back(c);
  json doc = {{"image_count", recs.size()},
              {"classes", classes},
              {"hog_input", a.features.hog_input},
              {"features", features}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

sealkit::GlyphSource glyph_source(const std::string& dir) {
  return dir.empty() ? sealkit::procedural_glyph_source() : sealkit::directory_glyph_source(dir);
}

std::vector<fs::path> spec_files(const fs::path& p) {
  if (fs::is_regular_file(p)) return {p};
  if (!fs::is_directory(p)) fail(ErrorCode::kNotFound, "spec path not found: " + p.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && e.path().extension() == ".json" &&
        e.path().string().find(".truth.json") == std::string::npos) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) fail(ErrorCode::kDataError, "no spec files in " + p.string());
  return out;
}

struct EvalSegArgs {
  std::string specs;
  std::string glyphs;
  std::uint64_t seed = 7;
  std::string rule = "plateau";
};

int cmd_eval_seg(const EvalSegArgs& a, std::ostream& out) {
  const auto source = glyph_source(a.glyphs);
  sealkit::PipelineConfig cfg;
  cfg.seed = a.seed;
  cfg.segment.seed = a.seed;
  cfg.segment.rule = sealkit::parse_selection_rule(a.rule);
  std::vector<sealkit::SealVerdict> verdicts;
  json seals = json::array();
  for (const auto& file : spec_files(a.specs)) {
    for (const auto& named : load_spec_file(file)) {
      const auto seal = sealkit::synth_seal(named.spec, source);
      const auto seg = sealkit::segment_seal(seal.image, cfg);
      std::vector<sealkit::BoundingBox> boxes;
      for (const auto& h : seg.hypotheses) boxes.push_back(h.bbox);
      const auto v = sealkit::score_segmentation(boxes, seal.truth);
      json glyphs = json::array();
      for (const auto& g : v.glyphs) {
        glyphs.push_back({{"glyph_id", g.glyph_id},
                          {"iou", g.iou},
                          {"matched_hypothesis", g.matched_hypothesis}});
      }
      seals.push_back({{"name", named.name},
                       {"correct", v.correct},
                       {"hypotheses", v.hypothesis_count},
                       {"truth", seal.truth.glyphs.size()},
                       {"glyphs", glyphs}});
      verdicts.push_back(v);
    }
  }
  const auto correct = std::count_if(verdicts.begin(), verdicts.end(),
                                     [](const sealkit::SealVerdict& v) { return v.correct; });
  json doc = {{"accuracy", sealkit::corpus_accuracy(verdicts)},
              {"correct", correct},
              {"total", verdicts.size()},
              {"seed", a.seed},
              {"selection_rule", a.rule},
              {"seals", seals}};
  out << doc.dump(2) << "\n";
  return kExitOk;
}

// ---- synth ----

struct SynthArgs {
  std::string spec;
  std::string out_dir;
  std::string glyphs;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  const auto source = glyph_source(a.glyphs);
  const auto specs = load_spec_file(a.spec);
  ensure_dir(a.out_dir);
  const fs::path dir(a.out_dir);
  json index = json::array();
  for (const auto& named : specs) {
    const auto seal = sealkit::synth_seal(named.spec, source);
    const std::string png = named.name + ".png";
    const std::string truth = named.name + ".truth.json";
    sealkit::save_image(seal.image, dir / png);
    json t = truth_to_json(seal.truth);
    t["spec"] = spec_to_json(named.spec);
    write_text_file(dir / truth, t.dump(2) + "\n");
    index.push_back({{"name", named.name}, {"image", png}, {"truth", truth}});
  }
  out << json{{"seals", index}}.dump(2) << "\n";
  return kExitOk;
}

// ---- serve ----

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string db;
  std::string static_dir;
  std::size_t max_sessions = kDefaultMaxSessions;
  std::uint64_t seed = 0;
};

int cmd_serve(const ServeArgs& a, std::ostream& err) {
  ServiceConfig cfg;
  if (!a.db.empty()) cfg.db = a.db;
  if (!a.static_dir.empty()) cfg.static_dir = a.static_dir;
  cfg.max_sessions = a.max_sessions;
  cfg.seed = a.seed;
  SealService service(cfg);
  err << "seal: serving on http://" << a.host << ":" << a.port << " (" << service.db_size()
      << " glyph records)\n";
  if (!service.listen(a.host, a.port)) {
    fail(ErrorCode::kInvalidArgument, "cannot listen on " + a.host + ":" + std::to_string(a.port));
  }
  return kExitOk;
}

const char* code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kDataError: return "data_error";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
  }
  return "error";
}

void report_error(std::ostream& err, bool as_json, const char* code, const std::string& message,
                  int exit_code) {
  if (as_json) {
    err << json{{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}}.dump()
        << "\n";
  } else {
    err << "seal: error: " << message << "\n";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const bool json_errors =
      std::any_of(argv + std::min(argc, 1), argv + argc, [](const char* a) { return std::string(a) == "--json"; });

  CLI::App app{"Seal character segmentation and glyph retrieval", "seal"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json_flag = false;
  app.add_flag("--json", json_flag, "Print errors as JSON on stderr");

  SeparateArgs sep;
  auto* c_sep = app.add_subcommand("separate", "K-means color separation into per-cluster masks");
  c_sep->add_option("image", sep.image, "Seal image (PNG)")->required()->check(CLI::ExistingFile);
  c_sep->add_option("--k", sep.k, "Number of color clusters")->capture_default_str();
  c_sep->add_option("--seed", sep.seed, "k-means++ seed")->capture_default_str();
  c_sep->add_option("--iters", sep.iters, "Maximum Lloyd iterations")->capture_default_str();
  c_sep->add_option("--out-dir", sep.out_dir, "Output directory")->required();

  SegmentArgs seg;
  auto* c_seg = app.add_subcommand("segment", "Segment a seal into character hypotheses");
  c_seg->add_option("image", seg.image, "Seal image (PNG)")->required()->check(CLI::ExistingFile);
  c_seg->add_option("--cluster", seg.cluster, "Cluster index (default: reddest)");
  c_seg->add_option("--k", seg.k, "Number of color clusters")->capture_default_str();
  c_seg->add_option("--seed", seg.seed, "Seed for k-means and bandwidth ratios")->capture_default_str();
  c_seg->add_option("--out", seg.out_dir, "Output directory")->required();
  c_seg->add_option("--selection-rule", seg.rule, "plateau or concave-band")->capture_default_str();
  c_seg->add_option("--ratio-count", seg.ratio_count, "Bandwidth ratios drawn")->capture_default_str();
  c_seg->add_option("--ratio-min", seg.ratio_min, "Smallest neighbour ratio")->capture_default_str();
  c_seg->add_option("--ratio-max", seg.ratio_max, "Largest neighbour ratio")->capture_default_str();
  c_seg->add_flag("--keep-border", seg.keep_border, "Do not strip an enclosing seal border");
  c_seg->add_option("--debug", seg.debug, "Write the bandwidth curve and fit as JSON");

  IngestArgs ing;
  auto* c_ing = app.add_subcommand("ingest", "Build a glyph database from <label>/<id>.png files");
  c_ing->add_option("glyph-dir", ing.glyph_dir, "Labeled glyph directory")->required();
  c_ing->add_option("--embeddings", ing.embeddings, "Embedding manifest (JSON header)");
  c_ing->add_option("--db", ing.db, "Database name (writes NAME.manifest.json, NAME.records.jsonl)");
  c_ing->add_option("--seed", ing.seed, "Recorded in the manifest")->capture_default_str();
  c_ing->add_option("--target-dim", ing.target_dim, "Kernel PCA output dimension")->capture_default_str();
  c_ing->add_option("--kernel", ing.kernel, "rbf or linear")->capture_default_str();
  c_ing->add_option("--gamma", ing.gamma, "RBF gamma (<= 0 means 1/dim)")->capture_default_str();
  ing.features.add_to(c_ing);

  QueryArgs qry;
  auto* c_qry = app.add_subcommand("query", "Rank database glyphs against a segment image");
  c_qry->add_option("image", qry.image, "Segment image (dark glyph on light)")->required()->check(CLI::ExistingFile);
  c_qry->add_option("--db", qry.db, "Database name");
  c_qry->add_option("--wcf", qry.wcf, "Embedding weight")->capture_default_str();
  c_qry->add_option("--wgf", qry.wgf, "Geometric weight")->capture_default_str();
  c_qry->add_option("--top", qry.top, "Matches to print")->capture_default_str()->check(CLI::PositiveNumber);
  c_qry->add_option("--embeddings", qry.embeddings, "Embedding manifest holding the query vector");
  c_qry->add_option("--embedding-id", qry.embedding_id, "Query id in that manifest (default: file stem)");

  auto* c_eval = app.add_subcommand("eval", "Evaluation harnesses");
  c_eval->require_subcommand(1);
  EvalMrrArgs mrr;
  auto* c_mrr = c_eval->add_subcommand("mrr", "Mean reciprocal rank of labeled queries");
  c_mrr->add_option("--db", mrr.db, "Database name");
  c_mrr->add_option("--queries", mrr.queries, "Labeled query directory")->required();
  c_mrr->add_option("--wcf", mrr.wcf, "Embedding weight")->capture_default_str();
  c_mrr->add_option("--wgf", mrr.wgf, "Geometric weight")->capture_default_str();
  c_mrr->add_option("--embeddings", mrr.embeddings, "Embedding manifest holding query vectors");
  EvalFeaturesArgs feat;
  auto* c_feat = c_eval->add_subcommand("features", "Within- vs cross-character feature scores");
  c_feat->add_option("--images", feat.images, "Labeled image directory")->required();
  c_feat->add_option("--embeddings", feat.embeddings, "Also score raw embedding vectors");
  feat.features.add_to(c_feat);
  EvalSegArgs eseg;
  auto* c_eseg = c_eval->add_subcommand("seg", "Segmentation accuracy on synthetic seals");
  c_eseg->add_option("--specs", eseg.specs, "Spec file or directory of spec files")->required();
  c_eseg->add_option("--glyphs", eseg.glyphs, "Labeled glyph directory (default: procedural)");
  c_eseg->add_option("--seed", eseg.seed, "Segmentation seed")->capture_default_str();
  c_eseg->add_option("--selection-rule", eseg.rule, "plateau or concave-band")->capture_default_str();

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Render synthetic seals with ground truth");
  c_syn->add_option("--spec", syn.spec, "Seal spec JSON")->required()->check(CLI::ExistingFile);
  c_syn->add_option("--out-dir", syn.out_dir, "Output directory")->required();
  c_syn->add_option("--glyphs", syn.glyphs, "Labeled glyph directory (default: procedural)");

  ServeArgs srv;
  auto* c_srv = app.add_subcommand("serve", "HTTP API and static UI");
  c_srv->add_option("--host", srv.host, "Bind address")->capture_default_str();
  c_srv->add_option("--port", srv.port, "Port")->capture_default_str();
  c_srv->add_option("--db", srv.db, "Database name (SEAL_DB overrides)");
  c_srv->add_option("--static", srv.static_dir, "UI bundle directory");
  c_srv->add_option("--max-sessions", srv.max_sessions, "Session LRU capacity")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_srv->add_option("--seed", srv.seed, "Seed for every session")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (json_errors) {
      report_error(err, true, "usage", e.what(), kExitUsage);
    } else {
      app.exit(e, out, err);
    }
    return kExitUsage;
  }

  try {
    if (*c_sep) return cmd_separate(sep, out);
    if (*c_seg) return cmd_segment(seg, out);
    if (*c_ing) return cmd_ingest(ing, out, err);
    if (*c_qry) return cmd_query(qry, out, err);
    if (*c_mrr) return cmd_eval_mrr(mrr, out, err);
    if (*c_feat) return cmd_eval_features(feat, out);
    if (*c_eseg) return cmd_eval_seg(eseg, out);
    if (*c_syn) return cmd_synth(syn, out);
    if (*c_srv) return cmd_serve(srv, err);
  } catch (const sealkit::Error& e) {
    const int code = e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitData;
    report_error(err, json_errors, code_name(e.code()), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    report_error(err, json_errors, "data_error", e.what(), kExitData);
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace seal
