#pragma once

#include <functional>
#include <memory>
#include <string>

#include "dimscope/dataset.hpp"
#include "dimscope/metrics.hpp"

namespace dimscope {

struct ServerOptions {
  std::string configJson;  // session config, see parseSessionConfig
  DistanceMetric metric = DistanceMetric::AbsoluteCorrelation;
  unsigned workers = 0;    // distance precompute threads, 0 = hardware concurrency
  std::string cachePath;   // written after a background precompute when non-empty
  std::string staticDir;   // served at / when non-empty
  std::function<void(const std::string&)> log;
};

// One session per server. Endpoints:
//   GET  /api/health        {"status": "ok"|"precomputing", "revision": n}
//   GET  /api/dataset/meta  dataset description and slider ranges
//   GET  /api/view          ViewModel of the latest accepted state
//   POST /api/event         apply one event; 400 ValidationError, 409 revision conflict
// /api/view and /api/event answer 503 until the distance matrix is available.
// Views are rebuilt off the request path; a newer event cancels an in-flight
// rebuild, and GET /api/view waits for the view of the current revision.
class ViewServer {
 public:
  // `distances` may be null: the matrix is then computed on a background thread.
  ViewServer(std::shared_ptr<const Dataset> dataset, std::shared_ptr<const DistanceMatrix> distances,
             ServerOptions options);
  ~ViewServer();

  ViewServer(const ViewServer&) = delete;
  ViewServer& operator=(const ViewServer&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port.
  int bind(const std::string& host, int port);
  void run();    // blocks until stop()
  void start();  // run() on a background thread
  void stop();

  bool ready() const;
  bool waitReady(double timeoutSeconds) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dimscope
