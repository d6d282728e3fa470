#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sealkit/corpus.hpp"
#include "sealkit/pipeline.hpp"
#include "sealkit/retrieval.hpp"
#include "sealkit/synth.hpp"

namespace seal {

using json = nlohmann::json;

json to_json(const sealkit::BoundingBox& box);
sealkit::BoundingBox box_from_json(const json& j);

/// `mask_name(i)` gives the file name or URL stored per cluster.
template <typename F>
json clusters_to_json(const sealkit::SeparationResult& sep, std::size_t red_cluster,
                      F mask_name, const char* mask_field) {
  json clusters = json::array();
  for (std::size_t i = 0; i < sep.clusters.size(); ++i) {
    const auto& c = sep.clusters[i];
    clusters.push_back({{"index", i},
                        {"centroid", c.centroid},
                        {"size", c.member_indices.size()},
                        {"redness", c.redness},
                        {mask_field, mask_name(i)}});
  }
  return {{"k", sep.k},
          {"seed", sep.seed},
          {"iterations", sep.iterations},
          {"red_cluster", red_cluster},
          {"clusters", std::move(clusters)}};
}

/// Hypotheses on the source grid; `mask_name(i)` as for clusters.
template <typename F>
json hypotheses_to_json(const sealkit::SealSegmentation& seg, F mask_name,
                        const char* mask_field) {
  json hyps = json::array();
  for (std::size_t i = 0; i < seg.hypotheses.size(); ++i) {
    const auto& h = seg.hypotheses[i];
    hyps.push_back({{"index", i},
                    {"bbox", to_json(h.bbox)},
                    {"pixel_count", h.pixels.size()},
                    {"source_bandwidth", h.source_bandwidth},
                    {"cluster_label", h.cluster_label},
                    {mask_field, mask_name(i)}});
  }
  return hyps;
}

/// Bandwidth curve, polynomial fit, candidates and normalized hypotheses.
json segmentation_debug_json(const sealkit::SegmentationResult& seg);

json rank_to_json(const sealkit::RankResult& result, std::size_t top,
                  const sealkit::Weights& weights);

json feature_report_to_json(const sealkit::FeatureReport& report);

/// Strict: unknown keys are rejected.
sealkit::SyntheticSealSpec spec_from_json(const json& j);
json spec_to_json(const sealkit::SyntheticSealSpec& spec);
json truth_to_json(const sealkit::GroundTruth& truth);

struct NamedSpec {
  std::string name;
  sealkit::SyntheticSealSpec spec;
};

/// A spec file holds one spec object, an array of them, or
/// {"corpus": {count, seed, first_seal_seed, jitter}} for the generated mix.
/// Unnamed seals are called `<stem>_<index>`.
std::vector<NamedSpec> load_spec_file(const std::filesystem::path& path);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace seal
