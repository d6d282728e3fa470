#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sealkit/embedding.hpp"
#include "sealkit/glyph_features.hpp"
#include "sealkit/retrieval.hpp"
#include "sealkit/synth.hpp"

namespace sealkit {

inline constexpr int kDbFormatVersion = 1;

struct DbManifest {
  int format_version = kDbFormatVersion;
  FeatureOptions features;
  std::uint64_t seed = 0;
  /// Set when the database was built with embeddings.
  std::optional<std::string> provider_id;
  std::optional<KpcaModel> kpca;
  std::size_t record_count = 0;

  friend bool operator==(const DbManifest&, const DbManifest&) = default;
};

struct GlyphDatabase {
  DbManifest manifest;
  std::vector<GlyphRecord> records;  // sorted by (label, glyph_id)

  const GlyphRecord* find(const std::string& glyph_id) const;

  friend bool operator==(const GlyphDatabase&, const GlyphDatabase&) = default;
};

struct IngestOptions {
  FeatureOptions features;
  std::optional<std::filesystem::path> embeddings;
  KernelConfig kernel;
  /// Lowered to the number of usable components when larger.
  std::size_t target_dim = kDefaultTargetDim;
  std::uint64_t seed = 0;
};

struct IngestSkip {
  std::string path;
  std::string reason;
};

struct IngestReport {
  std::vector<IngestSkip> skipped;
  /// Ingested glyphs with no vector in the embedding manifest.
  std::vector<std::string> missing_embeddings;
};

struct LabeledImage {
  std::string label;
  std::string glyph_id;  // file stem
  std::filesystem::path path;
};

/// PNG files laid out as `<label>/<glyph_id>.png`, sorted by (label,
/// glyph_id). Throws kNotFound when dir does not exist.
std::vector<LabeledImage> list_labeled_images(const std::filesystem::path& dir);

/// Foreground is luminance < 128.
BinaryMask load_glyph_mask(const std::filesystem::path& path);

GlyphRecord make_record(std::string glyph_id, std::string label, const BinaryMask& mask,
                        const FeatureOptions& features = {},
                        GlyphOrigin origin = GlyphOrigin::kTypeface);

/// Unreadable, blank or duplicate-id images are skipped and reported.
/// Throws kDataError when nothing could be ingested or the embedding
/// manifest is invalid.
GlyphDatabase ingest_glyph_dir(const std::filesystem::path& dir,
                               const IngestOptions& options = {},
                               IngestReport* report = nullptr);

/// `<name>.manifest.json` and `<name>.records.jsonl`.
std::pair<std::filesystem::path, std::filesystem::path> db_paths(
    const std::filesystem::path& name);

/// Deterministic: equal databases produce identical bytes.
void save_db(const GlyphDatabase& db, const std::filesystem::path& name);

/// Validates every record. Errors name the file and line; a format version
/// other than kDbFormatVersion throws kVersionMismatch.
GlyphDatabase load_db(const std::filesystem::path& name);

/// Resolves glyph ids against `<label>/<glyph_id>.png` under dir.
GlyphSource directory_glyph_source(const std::filesystem::path& dir);

}  // namespace sealkit
