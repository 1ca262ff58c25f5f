// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dimscope/dimscope.h"

namespace {

struct Failure {
  dimscope_status status;
};

void check(dimscope_status status) {
  if (status != DIMSCOPE_OK) throw Failure{status};
}

// Owns a string returned by the C API.
class CString {
 public:
  CString() = default;
  ~CString() { dimscope_string_free(ptr_); }
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  char** out() { return &ptr_; }
  std::string str() const { return ptr_ ? ptr_ : ""; }

 private:
  char* ptr_ = nullptr;
};

struct Dataset {
  dimscope_dataset* ptr = nullptr;
  ~Dataset() { dimscope_dataset_free(ptr); }
};

struct Distances {
  dimscope_distances* ptr = nullptr;
  ~Distances() { dimscope_distances_free(ptr); }
};

struct Session {
  dimscope_session* ptr = nullptr;
  ~Session() { dimscope_session_free(ptr); }
};

void writeFile(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(1);
  }
}

dimscope_metric metricFromName(const std::string& name) {
  return name == "literal" ? DIMSCOPE_METRIC_LITERAL : DIMSCOPE_METRIC_ABS;
}

void loadDataset(Dataset& data, const std::string& csv, const std::string& schema) {
  check(dimscope_dataset_load_csv(csv.c_str(), schema.empty() ? nullptr : schema.c_str(), &data.ptr));
}

// Loads the cache when given, otherwise computes distances in-process.
void obtainDistances(Distances& dist, const Dataset& data, const std::string& cache,
                     const std::string& metric, unsigned workers) {
  if (!cache.empty()) {
    check(dimscope_distances_load(cache.c_str(), data.ptr, &dist.ptr));
  } else {
    check(dimscope_distances_compute(data.ptr, metricFromName(metric), workers, &dist.ptr));
  }
}

void logLine(const char* message, void*) { std::fprintf(stderr, "[dimscope] %s\n", message); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimscope: dimension-subspace selection for parallel coordinates"};
  app.require_subcommand(1);

  std::string csv, schema, output, metric = "abs", cache;
  unsigned workers = 0;
  const std::vector<std::string> metricNames{"abs", "literal"};

  auto* precompute = app.add_subcommand("precompute", "compute and cache the dimension distance matrix");
  precompute->add_option("csv", csv, "input CSV")->required()->check(CLI::ExistingFile);
  precompute->add_option("--metric", metric, "abs (1-|rho|) or literal (|1-rho|)")
      ->check(CLI::IsMember(metricNames));
  precompute->add_option("-o,--output", output, "cache file")->required();
  precompute->add_option("--schema", schema, "JSON column-type sidecar")->check(CLI::ExistingFile);
  precompute->add_option("--workers", workers, "threads, 0 = all cores");

  int port = 8080;
  std::string host = "127.0.0.1", staticDir, configPath;
  auto* serve = app.add_subcommand("serve", "run the HTTP/JSON view server");
  serve->add_option("csv", csv, "input CSV")->required()->check(CLI::ExistingFile);
  serve->add_option("--cache", cache, "distance cache; computed in the background and written here if missing");
  serve->add_option("--port", port, "TCP port (DIMSCOPE_PORT overrides)");
  serve->add_option("--host", host, "bind address");
  serve->add_option("--metric", metric, "metric when no cache exists")->check(CLI::IsMember(metricNames));
  serve->add_option("--static", staticDir, "directory served at /")->check(CLI::ExistingDirectory);
  serve->add_option("--config", configPath, "session config JSON file")->check(CLI::ExistingFile);
  serve->add_option("--schema", schema, "JSON column-type sidecar")->check(CLI::ExistingFile);
  serve->add_option("--workers", workers, "precompute threads, 0 = all cores");

  double dSelect = 0.2, dRemove = 0.0;
  std::string mode = "cliques", cat;
  auto* snapshot = app.add_subcommand("snapshot", "export graph and panels as SVG");
  snapshot->add_option("csv", csv, "input CSV")->required()->check(CLI::ExistingFile);
  snapshot->add_option("--d-select", dSelect, "edge threshold");
  snapshot->add_option("--d-remove", dRemove, "sampling radius, 0 disables sampling");
  snapshot->add_option("--mode", mode, "cliques or rules")
      ->check(CLI::IsMember({"cliques", "rules", "DistanceCliques", "LabelRules"}));
  snapshot->add_option("--cat", cat, "categorical column for colors and rules");
  snapshot->add_option("--cache", cache, "distance cache to reuse");
  snapshot->add_option("--metric", metric, "metric when no cache is given")->check(CLI::IsMember(metricNames));
  snapshot->add_option("--config", configPath, "extra session config JSON file")->check(CLI::ExistingFile);
  snapshot->add_option("--schema", schema, "JSON column-type sidecar")->check(CLI::ExistingFile);
  std::string viewJsonPath;
  snapshot->add_option("--view-json", viewJsonPath, "also write the ViewModel JSON here");
  snapshot->add_option("-o,--output", output, "SVG file, - for stdout")->required();

  double tSup = 0.05, tCon = 0.6;
  int bins = 8;
  std::string direction = "RangeToLabel";
  auto* rules = app.add_subcommand("rules", "mine label/range association rules");
  rules->add_option("csv", csv, "input CSV")->required()->check(CLI::ExistingFile);
  rules->add_option("--cat", cat, "categorical column")->required();
  rules->add_option("--tsup", tSup, "minimum support");
  rules->add_option("--tcon", tCon, "minimum confidence");
  rules->add_option("--direction", direction, "LabelToRange, RangeToLabel or Both")
      ->check(CLI::IsMember({"LabelToRange", "RangeToLabel", "Both"}));
  rules->add_option("--bins", bins, "bins per numeric dim");
  rules->add_option("--cache", cache, "distance cache used to order panel axes");
  rules->add_option("--schema", schema, "JSON column-type sidecar")->check(CLI::ExistingFile);
  rules->add_option("-o,--output", output, "JSON file, - for stdout")->required();

  CLI11_PARSE(app, argc, argv);

  auto readText = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };

  try {
    Dataset data;
    loadDataset(data, csv, schema);

    if (precompute->parsed()) {
      Distances dist;
      check(dimscope_distances_compute(data.ptr, metricFromName(metric), workers, &dist.ptr));
      check(dimscope_distances_save(dist.ptr, output.c_str()));
      std::fprintf(stderr, "[dimscope] wrote %zu x %zu distances to %s\n", dimscope_distances_size(dist.ptr),
                   dimscope_distances_size(dist.ptr), output.c_str());
      return 0;
    }

    if (serve->parsed()) {
      if (const char* env = std::getenv("DIMSCOPE_PORT"); env != nullptr && *env != '\0') {
        port = std::atoi(env);
      }
      Distances dist;
      if (!cache.empty()) {
        if (std::ifstream(cache).good()) {
          check(dimscope_distances_load(cache.c_str(), data.ptr, &dist.ptr));
          std::fprintf(stderr, "[dimscope] cache hit: %s\n", cache.c_str());
        } else {
          std::fprintf(stderr, "[dimscope] cache miss: %s\n", cache.c_str());
        }
      }
      const std::string config = configPath.empty() ? "" : readText(configPath);
      dimscope_serve_options options{};
      options.host = host.c_str();
      options.port = port;
      options.config_json = config.c_str();
      options.cache_path = cache.empty() ? nullptr : cache.c_str();
      options.static_dir = staticDir.empty() ? nullptr : staticDir.c_str();
      options.metric = metricFromName(metric);
      options.workers = workers;
      options.log = logLine;
      check(dimscope_serve(data.ptr, dist.ptr, &options));
      return 0;
    }

    if (snapshot->parsed()) {
      Distances dist;
      obtainDistances(dist, data, cache, metric, 0);
      nlohmann::json config = configPath.empty() ? nlohmann::json::object()
                                                 : nlohmann::json::parse(readText(configPath));
      config["dSelect"] = dSelect;
      config["dRemove"] = dRemove;
      config["mode"] = mode;
      if (!cat.empty()) config["catDim"] = cat;
      Session session;
      check(dimscope_session_create(data.ptr, dist.ptr, config.dump().c_str(), &session.ptr));
      CString svg;
      check(dimscope_session_snapshot_svg(session.ptr, svg.out()));
      writeFile(output, svg.str());
      if (!viewJsonPath.empty()) {
        CString view;
        check(dimscope_session_view_json(session.ptr, view.out()));
        writeFile(viewJsonPath, view.str());
      }
      return 0;
    }

    if (rules->parsed()) {
      Distances dist;
      if (!cache.empty()) check(dimscope_distances_load(cache.c_str(), data.ptr, &dist.ptr));
      const dimscope_rule_direction dir = direction == "LabelToRange"   ? DIMSCOPE_LABEL_TO_RANGE
                                          : direction == "Both"         ? DIMSCOPE_BOTH_DIRECTIONS
                                                                        : DIMSCOPE_RANGE_TO_LABEL;
      CString out;
      check(dimscope_mine_rules_json(data.ptr, cat.c_str(), tSup, tCon, dir, bins, dist.ptr, out.out()));
      writeFile(output, out.str() + "\n");
      return 0;
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << dimscope_status_name(f.status) << "): " << dimscope_last_error() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
