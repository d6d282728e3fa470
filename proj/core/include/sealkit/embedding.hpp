#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sealkit {

struct EmbeddingVector {
  std::string glyph_id;
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
};

/// Header {"provider_id", "dim", "count"} plus a JSON-lines sidecar of
/// {"glyph_id", "vector"} records. The sidecar path is the header's
/// "records" field, resolved against the header's directory, or the
/// header path with its extension replaced by ".jsonl".
struct EmbeddingManifest {
  std::string provider_id;
  std::size_t dim = 0;
  std::vector<EmbeddingVector> entries;  // file order
  std::map<std::string, std::size_t> index;

  const EmbeddingVector* find(const std::string& glyph_id) const;
};

/// Throws kNotFound for a missing file and kDataError for schema, count,
/// duplicate-id, dimension or non-finite violations (naming the glyph).
EmbeddingManifest load_embeddings(const std::filesystem::path& manifest_path);

enum class KernelType { kRbf, kLinear };

struct KernelConfig {
  KernelType type = KernelType::kRbf;
  /// RBF width; <= 0 selects 1 / dim.
  double gamma = 0.0;

  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

const char* to_string(KernelType type) noexcept;
KernelType parse_kernel_type(const std::string& name);

inline constexpr std::size_t kDefaultTargetDim = 128;
inline constexpr double kEigenvalueFloor = 1e-10;

struct KpcaModel {
  std::vector<std::vector<double>> training;
  KernelConfig kernel;  // gamma resolved
  /// n × target_dim, row-major; columns are eigenvectors scaled by 1/sqrt(λ).
  std::vector<double> alphas;
  std::vector<double> eigenvalues;  // descending, retained only
  std::size_t target_dim = 0;
  /// Centering terms of the training Gram matrix.
  std::vector<double> gram_row_means;
  double gram_mean = 0.0;

  std::size_t input_dim() const noexcept {
    return training.empty() ? 0 : training.front().size();
  }

  friend bool operator==(const KpcaModel&, const KpcaModel&) = default;
};

double kernel_value(const KernelConfig& kernel, std::span<const double> a,
                    std::span<const double> b);

/// Double-centred Gram eigendecomposition. Each component's sign is fixed so
/// that its largest-magnitude alpha entry is positive. Throws
/// kInvalidArgument for fewer than two vectors, mixed dimensions or a
/// target_dim above the number of eigenvalues > 1e-10, unless
/// clamp_to_rank lowers target_dim to that number.
KpcaModel kpca_fit(std::span<const std::vector<double>> vectors, const KernelConfig& kernel,
                   std::size_t target_dim = kDefaultTargetDim, bool clamp_to_rank = false);

std::vector<double> kpca_project(const KpcaModel& model, std::span<const double> v);

}  // namespace sealkit
