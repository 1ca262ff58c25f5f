#include "dimscope/server.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "dimscope/error.hpp"
#include "dimscope/session.hpp"

namespace dimscope {

using nlohmann::json;

namespace {

constexpr auto kViewWait = std::chrono::seconds(60);
constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

}  // namespace

struct ViewServer::Impl {
  std::shared_ptr<const Dataset> dataset;
  ServerOptions options;
  SessionConfig config;
  httplib::Server http;

  mutable std::mutex mutex;
  mutable std::condition_variable changed;
  std::shared_ptr<ViewContext> context;  // set once distances exist
  SessionState state;
  std::atomic<std::uint64_t> currentRevision{0};
  std::optional<std::uint64_t> builtRevision;
  std::string latestView;
  std::optional<std::string> viewError;
  bool stopping = false;

  std::thread worker;
  std::thread precompute;
  std::thread listener;

  void log(const std::string& message) const {
    if (options.log) options.log(message);
  }

  void install(std::shared_ptr<const DistanceMatrix> distances) {
    auto ctx = std::make_shared<ViewContext>(dataset, std::move(distances), config);
    std::lock_guard lock(mutex);
    context = std::move(ctx);
    changed.notify_all();
  }

  void workerLoop() {
    std::unique_lock lock(mutex);
    while (true) {
      changed.wait(lock, [&] {
        return stopping || (context && builtRevision != state.revision);
      });
      if (stopping) return;
      const SessionState snapshot = state;
      const auto ctx = context;
      lock.unlock();

      std::string rendered;
      std::optional<std::string> failure;
      bool cancelled = false;
      try {
        const ViewModel view = buildView(*ctx, snapshot);
        rendered = viewToJson(view, *dataset);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Cancelled) {
          cancelled = true;
        } else {
          failure = e.what();
        }
      } catch (const std::exception& e) {
        failure = e.what();
      }

      lock.lock();
      if (cancelled || state.revision != snapshot.revision) continue;
      latestView = std::move(rendered);
      viewError = std::move(failure);
      builtRevision = snapshot.revision;
      changed.notify_all();
    }
  }

  ViewModel buildView(ViewContext& ctx, const SessionState& snapshot) {
    return dimscope::buildView(snapshot, ctx, [this, revision = snapshot.revision] {
      return currentRevision.load() != revision;
    });
  }

  void routes() {
    http.Get("/api/health", [this](const httplib::Request&, httplib::Response& res) {
      std::lock_guard lock(mutex);
      reply(res, 200,
            {{"status", context ? "ok" : "precomputing"}, {"revision", state.revision}});
    });

    http.Get("/api/dataset/meta", [this](const httplib::Request&, httplib::Response& res) {
      std::shared_ptr<ViewContext> ctx;
      {
        std::lock_guard lock(mutex);
        ctx = context;
      }
      res.set_content(datasetMetaJson(*dataset, ctx ? &ctx->distances() : nullptr, config), kJson);
    });

    http.Get("/api/view", [this](const httplib::Request&, httplib::Response& res) {
      std::unique_lock lock(mutex);
      if (!context) {
        reply(res, 503, {{"error", "distance precompute in progress"}});
        return;
      }
      const bool current = changed.wait_for(lock, kViewWait, [&] {
        return stopping || builtRevision == state.revision;
      });
      if (!current || stopping) {
        reply(res, 503, {{"error", "view not available"}});
        return;
      }
      if (viewError) {
        reply(res, 500, {{"error", *viewError}, {"revision", state.revision}});
        return;
      }
      res.status = 200;
      res.set_content(latestView, kJson);
    });

    http.Post("/api/event", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const EventEnvelope envelope = parseEvent(req.body, *dataset);
        std::lock_guard lock(mutex);
        if (!context) {
          reply(res, 503, {{"error", "distance precompute in progress"}});
          return;
        }
        ApplyResult result = applyEvent(state, envelope, *dataset);
        state = std::move(result.state);
        currentRevision.store(state.revision);
        changed.notify_all();
        reply(res, 200, {{"revision", state.revision}, {"warnings", result.warnings}});
      } catch (const ValidationError& e) {
        reply(res, 400, {{"error", e.what()}, {"field", e.field()}});
      } catch (const Error& e) {
        if (e.code() == ErrorCode::RevisionConflict) {
          std::lock_guard lock(mutex);
          reply(res, 409, {{"error", e.what()}, {"revision", state.revision}});
        } else {
          reply(res, 400, {{"error", e.what()}});
        }
      }
    });

    if (!options.staticDir.empty()) http.set_mount_point("/", options.staticDir);
  }
};

ViewServer::ViewServer(std::shared_ptr<const Dataset> dataset,
                       std::shared_ptr<const DistanceMatrix> distances, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->dataset = std::move(dataset);
  impl_->options = std::move(options);
  impl_->config = parseSessionConfig(impl_->options.configJson, *impl_->dataset);
  impl_->state = impl_->config.initial;
  impl_->currentRevision = impl_->state.revision;
  impl_->routes();

  if (distances) {
    impl_->install(std::move(distances));
  } else {
    impl_->log("computing distance matrix for " + std::to_string(impl_->dataset->numericCount()) +
               " dims");
    impl_->precompute = std::thread([impl = impl_.get()] {
      auto dm = std::make_shared<const DistanceMatrix>(
          distanceMatrix(*impl->dataset, impl->options.metric, impl->options.workers));
      if (!impl->options.cachePath.empty()) {
        try {
          saveDistanceCache(*dm, impl->options.cachePath);
          impl->log("distance cache written to " + impl->options.cachePath);
        } catch (const Error& e) {
          impl->log(std::string("could not write distance cache: ") + e.what());
        }
      }
      impl->install(std::move(dm));
      impl->log("distance matrix ready");
    });
  }
  impl_->worker = std::thread([impl = impl_.get()] { impl->workerLoop(); });
}

ViewServer::~ViewServer() {
  stop();
  if (impl_->listener.joinable()) impl_->listener.join();
  if (impl_->precompute.joinable()) impl_->precompute.join();
  if (impl_->worker.joinable()) impl_->worker.join();
}

int ViewServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->http.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host);
    return bound;
  }
  if (!impl_->http.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void ViewServer::run() { impl_->http.listen_after_bind(); }

void ViewServer::start() {
  impl_->listener = std::thread([impl = impl_.get()] { impl->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void ViewServer::stop() {
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopping = true;
    impl_->changed.notify_all();
  }
  impl_->http.stop();
}

bool ViewServer::ready() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->context != nullptr;
}

bool ViewServer::waitReady(double timeoutSeconds) const {
  std::unique_lock lock(impl_->mutex);
  return impl_->changed.wait_for(lock, std::chrono::duration<double>(timeoutSeconds),
                                 [&] { return impl_->context != nullptr; });
}

}  // namespace dimscope
