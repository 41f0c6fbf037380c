// Copyright 2026 The wgcloud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wg/http.hpp"

#include <ctime>
#include <mutex>

#include "httplib.h"
#include "json.hpp"
#include "wg/errors.hpp"

namespace wg::http {

namespace {

using nlohmann::ordered_json;

int status_for(Errc code) {
  switch (code) {
    case Errc::KeyRequired:
    case Errc::KeyMismatch:
    case Errc::AuthFailure:
    case Errc::TierForbidden:
      return 403;
    case Errc::NoSuchKey:
    case Errc::ObjectNotFound:
    case Errc::UnknownResource:
      return 404;
    case Errc::BucketQuotaExceeded:
    case Errc::PoolQuotaExceeded:
    case Errc::InsufficientOsds:
      return 413;
    default:
      return 400;
  }
}

void set_error(httplib::Response& res, const Error& e) {
  res.status = status_for(e.code());
  ordered_json body;
  body["error"] = e.name();
  body["message"] = e.what();
  res.set_content(body.dump(), "application/json");
}

struct RouteContext {
  Simulation* sim = nullptr;
  FacadeOptions options;
  // One request at a time: the facade serializes through the state layer,
  // and on_mutation snapshots the whole simulation.
  std::mutex serialize_mu;

  int64_t now() const {
    return options.fixed_now ? *options.fixed_now : int64_t(std::time(nullptr));
  }

  gateway::Tier resolve(const std::string& bucket) const {
    auto tier = sim->gateway.resolve_tier_by_name(bucket);
    if (!tier) fail(Errc::UnknownResource, "no such bucket: " + bucket);
    return *tier;
  }

  void mutated() const {
    if (options.on_mutation) options.on_mutation();
  }
};

std::optional<std::string> sse_key(const httplib::Request& req) {
  if (!req.has_header("x-sse-key")) return std::nullopt;
  return req.get_header_value("x-sse-key");
}

}  // namespace

void install_routes(httplib::Server& server, Simulation& sim, const FacadeOptions& options) {
  auto ctx = std::make_shared<RouteContext>();
  ctx->sim = &sim;
  ctx->options = options;

  const std::string object_pattern = R"(/([a-z0-9][a-z0-9\-]*[a-z0-9])/(.+))";
  const std::string bucket_pattern = R"(/([a-z0-9][a-z0-9\-]*[a-z0-9]))";

  server.Put(object_pattern, [ctx](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard serialize(ctx->serialize_mu);
    try {
      const std::string bucket = req.matches[1];
      const std::string key = req.matches[2];
      gateway::Tier tier = ctx->resolve(bucket);
      std::span<const uint8_t> payload(reinterpret_cast<const uint8_t*>(req.body.data()),
                                       req.body.size());
      auto meta = ctx->sim->gateway.put_object(ctx->options.actor, tier, bucket, key, payload,
                                               sse_key(req), ctx->now());
      ctx->mutated();
      ordered_json body;
      body["key"] = meta.key;
      body["size"] = meta.size;
      body["created_ts"] = meta.created_ts;
      body["content_hash"] = meta.content_hash;
      body["encrypted"] = !meta.sse_fingerprint.empty();
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      ctx->mutated();  // the failed attempt is still audited
      set_error(res, e);
    }
  });

  server.Get(object_pattern, [ctx](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard serialize(ctx->serialize_mu);
    try {
      const std::string bucket = req.matches[1];
      const std::string key = req.matches[2];
      gateway::Tier tier = ctx->resolve(bucket);
      auto payload =
          ctx->sim->gateway.get_object(ctx->options.actor, tier, bucket, key, sse_key(req),
                                       ctx->now());
      ctx->mutated();  // reads append audit entries
      res.set_content(std::string(payload.begin(), payload.end()),
                      "application/octet-stream");
    } catch (const Error& e) {
      ctx->mutated();
      set_error(res, e);
    }
  });

  server.Delete(object_pattern, [ctx](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard serialize(ctx->serialize_mu);
    try {
      const std::string bucket = req.matches[1];
      const std::string key = req.matches[2];
      gateway::Tier tier = ctx->resolve(bucket);
      uint64_t freed =
          ctx->sim->gateway.delete_object(ctx->options.actor, tier, bucket, key, ctx->now());
      ctx->mutated();
      ordered_json body;
      body["freed"] = freed;
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      ctx->mutated();
      set_error(res, e);
    }
  });

  server.Get(bucket_pattern, [ctx](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard serialize(ctx->serialize_mu);
    try {
      const std::string bucket = req.matches[1];
      gateway::Tier tier = ctx->resolve(bucket);
      std::string prefix = req.get_param_value("prefix");
      size_t max_keys = 1000;
      if (req.has_param("max-keys")) max_keys = std::stoul(req.get_param_value("max-keys"));
      std::optional<std::string> continuation;
      if (req.has_param("continuation")) continuation = req.get_param_value("continuation");
      auto page = ctx->sim->gateway.list_objects(tier, bucket, prefix, max_keys, continuation);
      ordered_json body;
      ordered_json items = ordered_json::array();
      for (const auto& meta : page.items) {
        ordered_json m;
        m["key"] = meta.key;
        m["size"] = meta.size;
        m["created_ts"] = meta.created_ts;
        items.push_back(std::move(m));
      }
      body["objects"] = std::move(items);
      if (page.continuation)
        body["continuation"] = *page.continuation;
      else
        body["continuation"] = nullptr;
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      set_error(res, e);
    }
  });
}

int serve(Simulation& sim, const std::string& host, int port, const FacadeOptions& options) {
  httplib::Server server;
  install_routes(server, sim, options);
  if (!server.listen(host, port)) return 1;
  return 0;
}

}  // namespace wg::http
