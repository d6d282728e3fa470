#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace seal {

inline constexpr std::size_t kMaxUploadBytes = 16u << 20;
inline constexpr std::size_t kDefaultMaxSessions = 64;

struct ServiceConfig {
  /// Database name as passed to load_db; SEAL_DB takes precedence.
  std::optional<std::filesystem::path> db;
  std::optional<std::filesystem::path> static_dir;
  std::size_t max_sessions = kDefaultMaxSessions;
  std::size_t max_upload_bytes = kMaxUploadBytes;
  /// k-means and bandwidth-ratio seed for every session.
  std::uint64_t seed = 0;
};

/// SEAL_DB when set and non-empty, otherwise `flag`.
std::optional<std::filesystem::path> resolve_db_path(
    const std::optional<std::filesystem::path>& flag);

/// JSON API over in-memory sessions with LRU eviction. Stages run serially
/// within a session; distinct sessions run in parallel.
class SealService {
 public:
  /// Throws sealkit::Error when the configured database cannot be loaded.
  explicit SealService(ServiceConfig config);
  ~SealService();
  SealService(const SealService&) = delete;
  SealService& operator=(const SealService&) = delete;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Returns the bound port, or -1.
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  void wait_until_ready() const;
  void stop();

  std::size_t session_count() const;
  std::size_t db_size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace seal
