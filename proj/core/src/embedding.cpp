#include "sealkit/embedding.hpp"

#include <Eigen/Dense>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sealkit/error.hpp"

namespace sealkit {
namespace {

using nlohmann::json;

json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kNotFound, "file not found: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kDataError, path.string() + ": " + e.what());
  }
}

}  // namespace

const EmbeddingVector* EmbeddingManifest::find(const std::string& glyph_id) const {
  const auto it = index.find(glyph_id);
  return it == index.end() ? nullptr : &entries[it->second];
}

EmbeddingManifest load_embeddings(const std::filesystem::path& manifest_path) {
  const json header = parse_json_file(manifest_path);
  EmbeddingManifest m;
  std::size_t count = 0;
  std::filesystem::path records;
  try {
    m.provider_id = header.at("provider_id").get<std::string>();
    m.dim = header.at("dim").get<std::size_t>();
    count = header.at("count").get<std::size_t>();
    if (header.contains("records")) {
      records = manifest_path.parent_path() / header["records"].get<std::string>();
    } else {
      records = manifest_path;
      records.replace_extension(".jsonl");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kDataError, manifest_path.string() + ": " + e.what());
  }
  if (m.dim == 0) fail(ErrorCode::kDataError, "embedding dim must be positive");

  std::ifstream in(records);
  if (!in) fail(ErrorCode::kNotFound, "file not found: " + records.string());
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = records.string() + ":" + std::to_string(lineno);
    EmbeddingVector v;
    try {
      const json rec = json::parse(line);
      v.glyph_id = rec.at("glyph_id").get<std::string>();
      v.values = rec.at("vector").get<std::vector<double>>();
    } catch (const json::exception& e) {
      fail(ErrorCode::kDataError, where + ": " + e.what());
    }
    if (v.values.size() != m.dim) {
      fail(ErrorCode::kDataError, where + ": glyph " + v.glyph_id + " has " +
                                      std::to_string(v.values.size()) + " values, expected " +
                                      std::to_string(m.dim));
    }
    if (!std::all_of(v.values.begin(), v.values.end(), [](double x) { return std::isfinite(x); })) {
      fail(ErrorCode::kDataError, where + ": glyph " + v.glyph_id + " has non-finite values");
    }
    if (!m.index.emplace(v.glyph_id, m.entries.size()).second) {
      fail(ErrorCode::kDataError, where + ": duplicate glyph " + v.glyph_id);
    }
    m.entries.push_back(std::move(v));
  }
  if (m.entries.size() != count) {
    fail(ErrorCode::kDataError, "embedding count " + std::to_string(m.entries.size()) +
                                    " does not match header count " + std::to_string(count));
  }
  return m;
}

const char* to_string(KernelType type) noexcept {
  return type == KernelType::kRbf ? "rbf" : "linear";
}

KernelType parse_kernel_type(const std::string& name) {
  if (name == "rbf") return KernelType::kRbf;
  if (name == "linear") return KernelType::kLinear;
  fail(ErrorCode::kInvalidArgument, "unknown kernel: " + name);
}

double kernel_value(const KernelConfig& kernel, std::span<const double> a,
                    std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorCode::kInvalidArgument, "kernel dimension mismatch");
  if (kernel.type == KernelType::kLinear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-kernel.gamma * d2);
}

KpcaModel kpca_fit(std::span<const std::vector<double>> vectors, const KernelConfig& kernel,
                   std::size_t target_dim, bool clamp_to_rank) {
  const std::size_t n = vectors.size();
  if (n < 2) fail(ErrorCode::kInvalidArgument, "kernel PCA needs at least 2 vectors");
  if (target_dim < 1) fail(ErrorCode::kInvalidArgument, "target_dim must be >= 1");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim || dim == 0) {
      fail(ErrorCode::kInvalidArgument, "kernel PCA vectors must share a positive dimension");
    }
  }

  KpcaModel model;
  model.kernel = kernel;
  if (model.kernel.type == KernelType::kRbf && !(model.kernel.gamma > 0.0)) {
    model.kernel.gamma = 1.0 / static_cast<double>(dim);
  }
  model.training.assign(vectors.begin(), vectors.end());

  const auto ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd k(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = i; j < ni; ++j) {
      k(i, j) = kernel_value(model.kernel, vectors[i], vectors[j]);
      k(j, i) = k(i, j);
    }
  }
  const Eigen::VectorXd row_means = k.rowwise().mean();
  model.gram_mean = row_means.mean();
  model.gram_row_means.assign(row_means.data(), row_means.data() + n);
  Eigen::MatrixXd kc(ni, ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      kc(i, j) = k(i, j) - row_means(i) - row_means(j) + model.gram_mean;
    }
  }

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kc);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::kDataError, "kernel PCA eigendecomposition failed");
  }
  std::size_t retained = 0;
  for (Eigen::Index c = ni - 1; c >= 0 && solver.eigenvalues()(c) > kEigenvalueFloor; --c) {
    ++retained;
  }
  if (retained == 0) fail(ErrorCode::kDataError, "all kernel PCA eigenvalues are below 1e-10");
  if (target_dim > retained) {
    if (!clamp_to_rank) {
      fail(ErrorCode::kInvalidArgument,
           "target_dim " + std::to_string(target_dim) + " exceeds the " +
               std::to_string(retained) + " eigenvalues above 1e-10");
    }
    target_dim = retained;
  }
  model.target_dim = target_dim;
  model.alphas.assign(n * target_dim, 0.0);
  for (std::size_t c = 0; c < target_dim; ++c) {
    const Eigen::Index col = ni - 1 - static_cast<Eigen::Index>(c);
    const double lambda = solver.eigenvalues()(col);
    model.eigenvalues.push_back(lambda);
    Eigen::VectorXd v = solver.eigenvectors().col(col);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < ni; ++i) {
      if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
    }
    if (v(arg) < 0.0) v = -v;
    const double inv = 1.0 / std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) model.alphas[i * target_dim + c] = v(static_cast<Eigen::Index>(i)) * inv;
  }
  return model;
}

std::vector<double> kpca_project(const KpcaModel& model, std::span<const double> v) {
  if (v.size() != model.input_dim()) {
    fail(ErrorCode::kInvalidArgument, "projection input has dimension " +
                                          std::to_string(v.size()) + ", model expects " +
                                          std::to_string(model.input_dim()));
  }
  const std::size_t n = model.training.size();
  std::vector<double> row(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    row[i] = kernel_value(model.kernel, v, model.training[i]);
    mean += row[i];
  }
  mean /= static_cast<double>(n);
  std::vector<double> out(model.target_dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double centred = row[i] - mean - model.gram_row_means[i] + model.gram_mean;
    const double* a = model.alphas.data() + i * model.target_dim;
    for (std::size_t c = 0; c < model.target_dim; ++c) out[c] += centred * a[c];
  }
  return out;
}

}  // namespace sealkit
