#include "service.hpp"

#include "httplib.h"

#include <cstdlib>
#include <list>
#include <map>
#include <mutex>
#include <random>
#include <unordered_map>

#include "json_io.hpp"
#include "sealkit/corpus.hpp"
#include "sealkit/error.hpp"
#include "sealkit/pipeline.hpp"

namespace seal {
namespace {

using sealkit::ErrorCode;

struct Session {
  std::mutex mu;
  std::string id;
  sealkit::RasterImage image;
  std::map<int, sealkit::SeparationResult> separations;  // keyed by k
  std::optional<int> segmented_k;
  std::optional<sealkit::SealSegmentation> segmentation;
  std::vector<std::uint8_t> overlay_png;

  const char* stage() const {
    if (segmentation) return "segmented";
    return separations.empty() ? "uploaded" : "clustered";
  }
};

class SessionStore {
 public:
  explicit SessionStore(std::size_t capacity) : capacity_(capacity), rng_(std::random_device{}()) {}

  std::shared_ptr<Session> create(sealkit::RasterImage image) {
    auto s = std::make_shared<Session>();
    s->image = std::move(image);
    std::lock_guard lock(mu_);
    do {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_()));
      s->id = buf;
    } while (sessions_.count(s->id));
    order_.push_front(s->id);
    sessions_[s->id] = {s, order_.begin()};
    while (sessions_.size() > capacity_) {
      sessions_.erase(order_.back());
      order_.pop_back();
    }
    return s;
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return nullptr;
    order_.splice(order_.begin(), order_, it->second.pos);
    return it->second.session;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
  }

 private:
  struct Entry {
    std::shared_ptr<Session> session;
    std::list<std::string>::iterator pos;
  };

  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::string> order_;  // most recent first
  std::unordered_map<std::string, Entry> sessions_;
  std::mt19937_64 rng_;
};

struct HttpError {
  int status;
  std::string message;
};

[[noreturn]] void http_fail(int status, std::string message) {
  throw HttpError{status, std::move(message)};
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", {{"status", status}, {"message", message}}}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDataError: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kVersionMismatch: return 500;
  }
  return 500;
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    json j = json::parse(req.body);
    if (!j.is_object()) http_fail(400, "request body must be a JSON object");
    return j;
  } catch (const json::parse_error&) {
    http_fail(400, "request body is not valid JSON");
  }
}

template <typename T>
T body_field(const json& body, const char* key, T fallback) {
  if (!body.contains(key)) return fallback;
  try {
    return body[key].get<T>();
  } catch (const json::exception&) {
    http_fail(400, std::string("field ") + key + " has the wrong type");
  }
}

int query_k(const httplib::Request& req) {
  if (!req.has_param("k")) return sealkit::kDefaultColorClusters;
  try {
    std::size_t used = 0;
    const std::string v = req.get_param_value("k");
    const int k = std::stoi(v, &used);
    if (used == v.size() && k >= 1 && k <= 16) return k;
  } catch (const std::logic_error&) {
  }
  http_fail(400, "k must be an integer in [1, 16]");
}

std::size_t path_index(const httplib::Request& req, std::size_t group) {
  try {
    return std::stoul(req.matches[group].str());
  } catch (const std::logic_error&) {
    http_fail(404, "no such index");
  }
}

void reply_png(httplib::Response& res, const sealkit::RasterImage& image) {
  const auto bytes = sealkit::encode_png(image);
  res.status = 200;
  res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), "image/png");
}

}  // namespace

std::optional<std::filesystem::path> resolve_db_path(
    const std::optional<std::filesystem::path>& flag) {
  if (const char* env = std::getenv("SEAL_DB"); env && *env) return std::filesystem::path(env);
  return flag;
}

struct SealService::Impl {
  ServiceConfig config;
  std::optional<sealkit::GlyphDatabase> db;
  SessionStore sessions;
  httplib::Server server;

  explicit Impl(ServiceConfig c) : config(std::move(c)), sessions(config.max_sessions) {
    if (config.max_sessions == 0) {
      sealkit::fail(ErrorCode::kInvalidArgument, "max_sessions must be positive");
    }
    if (const auto path = resolve_db_path(config.db)) db = sealkit::load_db(*path);
    if (config.static_dir && !server.set_mount_point("/", config.static_dir->string())) {
      sealkit::fail(ErrorCode::kNotFound,
                    "static directory not found: " + config.static_dir->string());
    }
    server.set_payload_max_length(config.max_upload_bytes);
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        const char* msg = res.status == 413 ? "image too large (limit 16 MiB)"
                          : res.status == 404 ? "not found"
                                              : httplib::status_message(res.status);
        reply_error(res, res.status, msg);
      }
    });
    server.set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            reply_error(res, 500, e.what());
          } catch (...) {
            reply_error(res, 500, "internal error");
          }
        });
    routes();
  }

  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        reply_error(res, e.status, e.message);
      } catch (const sealkit::Error& e) {
        reply_error(res, status_for(e.code()), e.what());
      }
    };
  }

  std::shared_ptr<Session> session_for(const httplib::Request& req) {
    auto s = sessions.find(req.matches[1].str());
    if (!s) http_fail(404, "unknown session: " + req.matches[1].str());
    return s;
  }

  static const sealkit::SeparationResult& separation_for(Session& s, int k) {
    const auto it = s.separations.find(k);
    if (it == s.separations.end()) {
      http_fail(409, "clusters for k=" + std::to_string(k) + " have not been computed yet");
    }
    return it->second;
  }

  static const sealkit::SealSegmentation& segmentation_for(Session& s) {
    if (!s.segmentation) http_fail(409, "select a cluster before querying segments");
    return *s.segmentation;
  }

  void routes() {
    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200,
            {{"status", "ok"},
             {"sessions", sessions.size()},
             {"db_records", db ? db->records.size() : 0}});
    });

    server.Post("/api/sessions", guarded([this](const httplib::Request& req,
                                                httplib::Response& res) {
      if (req.body.empty()) http_fail(400, "request body must be a PNG image");
      sealkit::RasterImage image;
      try {
        image = sealkit::decode_png(std::span(
            reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()));
      } catch (const sealkit::Error& e) {
        http_fail(400, std::string("body is not a readable PNG image: ") + e.what());
      }
      const auto s = sessions.create(std::move(image));
      reply(res, 201,
            {{"session_id", s->id},
             {"width", s->image.width()},
             {"height", s->image.height()},
             {"stage", s->stage()}});
    }));

    server.Get(R"(/api/sessions/([^/]+))", guarded([this](const httplib::Request& req,
                                                         httplib::Response& res) {
      const auto s = session_for(req);
      std::lock_guard lock(s->mu);
      reply(res, 200,
            {{"session_id", s->id},
             {"width", s->image.width()},
             {"height", s->image.height()},
             {"stage", s->stage()}});
    }));

    server.Get(R"(/api/sessions/([^/]+)/clusters)", guarded([this](const httplib::Request& req,
                                                                  httplib::Response& res) {
      const auto s = session_for(req);
      const int k = query_k(req);
      std::lock_guard lock(s->mu);
      auto it = s->separations.find(k);
      if (it == s->separations.end()) {
        it = s->separations
                 .emplace(k, sealkit::kmeans_rgb(s->image, k, config.seed))
                 .first;
      }
      const auto& sep = it->second;
      const std::string base = "/api/sessions/" + s->id + "/clusters/";
      json body = clusters_to_json(
          sep, sealkit::select_red_cluster(sep),
          [&](std::size_t i) { return base + std::to_string(i) + "/preview.png?k=" + std::to_string(k); },
          "preview_url");
      body["session_id"] = s->id;
      reply(res, 200, body);
    }));

    server.Get(R"(/api/sessions/([^/]+)/clusters/(\d+)/preview\.png)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto s = session_for(req);
                 const int k = query_k(req);
                 const std::size_t c = path_index(req, 2);
                 std::lock_guard lock(s->mu);
                 const auto& sep = separation_for(*s, k);
                 if (c >= sep.clusters.size()) http_fail(404, "no such cluster");
                 reply_png(res, sealkit::mask_to_image(
                                    sealkit::cluster_to_mask(s->image, sep.clusters[c])));
               }));

    server.Post(R"(/api/sessions/([^/]+)/select)", guarded([this](const httplib::Request& req,
                                                                 httplib::Response& res) {
      const auto s = session_for(req);
      const json body = parse_body(req);
      if (!body.contains("cluster_index")) http_fail(400, "cluster_index is required");
      const auto index = body_field<long long>(body, "cluster_index", -1);
      const int k = body_field<int>(body, "k", sealkit::kDefaultColorClusters);
      std::lock_guard lock(s->mu);
      const auto& sep = separation_for(*s, k);
      if (index < 0 || static_cast<std::size_t>(index) >= sep.clusters.size()) {
        http_fail(400, "cluster_index out of range");
      }
      if (s->segmentation) {
        if (s->segmented_k != k || s->segmentation->cluster_index != static_cast<std::size_t>(index)) {
          http_fail(409, "this session is already segmented on another cluster");
        }
      } else {
        sealkit::PipelineConfig cfg;
        cfg.k = k;
        cfg.seed = config.seed;
        cfg.segment.seed = config.seed;
        s->segmentation =
            sealkit::segment_cluster(s->image, sep, static_cast<std::size_t>(index), cfg);
        s->segmented_k = k;
        s->overlay_png = sealkit::encode_png(
            sealkit::render_overlay(s->image, s->segmentation->hypotheses));
      }
      const std::string base = "/api/sessions/" + s->id;
      reply(res, 200,
            {{"session_id", s->id},
             {"k", k},
             {"cluster_index", index},
             {"overlay_url", base + "/overlay.png"},
             {"hypotheses", hypotheses_to_json(
                                *s->segmentation,
                                [&](std::size_t i) {
                                  return base + "/segments/" + std::to_string(i) + "/mask.png";
                                },
                                "mask_url")}});
    }));

    server.Get(R"(/api/sessions/([^/]+)/overlay\.png)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto s = session_for(req);
                 std::lock_guard lock(s->mu);
                 segmentation_for(*s);
                 res.status = 200;
                 res.set_content(reinterpret_cast<const char*>(s->overlay_png.data()),
                                 s->overlay_png.size(), "image/png");
               }));

    server.Get(R"(/api/sessions/([^/]+)/segments/(\d+)/mask\.png)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto s = session_for(req);
                 const std::size_t n = path_index(req, 2);
                 std::lock_guard lock(s->mu);
                 const auto& seg = segmentation_for(*s);
                 if (n >= seg.hypotheses.size()) http_fail(404, "no such segment");
                 reply_png(res, sealkit::mask_to_image(sealkit::hypothesis_mask(seg.hypotheses[n])));
               }));

    server.Post(R"(/api/sessions/([^/]+)/segments/(\d+)/query)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto s = session_for(req);
                  const std::size_t n = path_index(req, 2);
                  const json body = parse_body(req);
                  sealkit::Weights w;
                  w.w_cf = body_field<double>(body, "wcf", w.w_cf);
                  w.w_gf = body_field<double>(body, "wgf", w.w_gf);
                  const long long top = body_field<long long>(body, "top", 50);
                  if (top < 1) http_fail(400, "top must be >= 1");
                  std::lock_guard lock(s->mu);
                  const auto& seg = segmentation_for(*s);
                  if (n >= seg.hypotheses.size()) http_fail(404, "no such segment");
                  if (!db || db->records.empty()) {
                    http_fail(503, "no glyph database loaded; ingest a database first");
                  }
                  const sealkit::GlyphRecord query = sealkit::make_record(
                      "segment-" + std::to_string(n), "",
                      sealkit::hypothesis_mask(seg.hypotheses[n]), db->manifest.features,
                      sealkit::GlyphOrigin::kQuerySegment);
                  const auto ranked = sealkit::rank(query, db->records, w);
                  json out = rank_to_json(ranked, static_cast<std::size_t>(top), w);
                  out["session_id"] = s->id;
                  out["segment"] = n;
                  reply(res, 200, out);
                }));
  }
};

SealService::SealService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
SealService::~SealService() = default;

bool SealService::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}
int SealService::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}
bool SealService::listen_after_bind() { return impl_->server.listen_after_bind(); }
void SealService::wait_until_ready() const { impl_->server.wait_until_ready(); }
void SealService::stop() { impl_->server.stop(); }
std::size_t SealService::session_count() const { return impl_->sessions.size(); }
std::size_t SealService::db_size() const { return impl_->db ? impl_->db->records.size() : 0; }

}  // namespace seal
