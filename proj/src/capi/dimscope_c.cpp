#include "dimscope/dimscope.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "dimscope/dataset.hpp"
#include "dimscope/error.hpp"
#include "dimscope/metrics.hpp"
#include "dimscope/rules.hpp"
#include "dimscope/server.hpp"
#include "dimscope/session.hpp"

struct dimscope_dataset {
  std::shared_ptr<const dimscope::Dataset> value;
};

struct dimscope_distances {
  std::shared_ptr<const dimscope::DistanceMatrix> value;
};

struct dimscope_session {
  std::unique_ptr<dimscope::Session> value;
};

namespace {

thread_local std::string lastError;

dimscope_status statusOf(dimscope::ErrorCode code) {
  using dimscope::ErrorCode;
  switch (code) {
    case ErrorCode::Io: return DIMSCOPE_ERR_IO;
    case ErrorCode::Parse: return DIMSCOPE_ERR_PARSE;
    case ErrorCode::Schema: return DIMSCOPE_ERR_SCHEMA;
    case ErrorCode::DegenerateDim:
    case ErrorCode::DegenerateLayout: return DIMSCOPE_ERR_DEGENERATE;
    case ErrorCode::FingerprintMismatch: return DIMSCOPE_ERR_FINGERPRINT_MISMATCH;
    case ErrorCode::Format: return DIMSCOPE_ERR_FORMAT;
    case ErrorCode::CliqueExplosion: return DIMSCOPE_ERR_CLIQUE_EXPLOSION;
    case ErrorCode::NoCategoricalDim: return DIMSCOPE_ERR_NO_CATEGORICAL;
    case ErrorCode::InvalidK: return DIMSCOPE_ERR_INVALID_K;
    case ErrorCode::Validation: return DIMSCOPE_ERR_VALIDATION;
    case ErrorCode::RevisionConflict: return DIMSCOPE_ERR_REVISION_CONFLICT;
    case ErrorCode::InvalidArgument: return DIMSCOPE_ERR_INVALID_ARGUMENT;
    case ErrorCode::Cancelled: return DIMSCOPE_ERR_INTERNAL;
  }
  return DIMSCOPE_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
dimscope_status guarded(F&& body) {
  lastError.clear();
  try {
    body();
    return DIMSCOPE_OK;
  } catch (const dimscope::Error& e) {
    lastError = e.what();
    return statusOf(e.code());
  } catch (const std::bad_alloc&) {
    lastError = "out of memory";
    return DIMSCOPE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    lastError = e.what();
    return DIMSCOPE_ERR_INTERNAL;
  }
}

void requireNonNull(const void* p, const char* name) {
  if (p == nullptr) {
    throw dimscope::Error(dimscope::ErrorCode::InvalidArgument, std::string(name) + " is NULL");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

uint32_t dimscope_api_version(void) { return DIMSCOPE_API_VERSION; }

const char* dimscope_last_error(void) { return lastError.c_str(); }

const char* dimscope_status_name(dimscope_status status) {
  switch (status) {
    case DIMSCOPE_OK: return "ok";
    case DIMSCOPE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case DIMSCOPE_ERR_IO: return "I/O error";
    case DIMSCOPE_ERR_PARSE: return "parse error";
    case DIMSCOPE_ERR_SCHEMA: return "schema error";
    case DIMSCOPE_ERR_DEGENERATE: return "degenerate input";
    case DIMSCOPE_ERR_FINGERPRINT_MISMATCH: return "fingerprint mismatch";
    case DIMSCOPE_ERR_FORMAT: return "format error";
    case DIMSCOPE_ERR_CLIQUE_EXPLOSION: return "clique explosion";
    case DIMSCOPE_ERR_NO_CATEGORICAL: return "no categorical dimension";
    case DIMSCOPE_ERR_INVALID_K: return "invalid k";
    case DIMSCOPE_ERR_VALIDATION: return "validation error";
    case DIMSCOPE_ERR_REVISION_CONFLICT: return "revision conflict";
    case DIMSCOPE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void dimscope_string_free(char* str) { std::free(str); }

dimscope_status dimscope_dataset_load_csv(const char* path, const char* schema_path,
                                          dimscope_dataset** out) {
  return guarded([&] {
    requireNonNull(path, "path");
    requireNonNull(out, "out");
    dimscope::Schema schema;
    if (schema_path != nullptr && *schema_path != '\0') schema = dimscope::loadSchema(schema_path);
    auto dataset = std::make_shared<const dimscope::Dataset>(dimscope::loadCsv(path, schema));
    *out = new dimscope_dataset{std::move(dataset)};
  });
}

dimscope_status dimscope_dataset_parse_csv(const char* text, size_t length, const char* schema_json,
                                           dimscope_dataset** out) {
  return guarded([&] {
    requireNonNull(text, "text");
    requireNonNull(out, "out");
    dimscope::Schema schema;
    if (schema_json != nullptr && *schema_json != '\0') schema = dimscope::parseSchema(schema_json);
    auto dataset = std::make_shared<const dimscope::Dataset>(
        dimscope::parseCsv(std::string_view(text, length), schema));
    *out = new dimscope_dataset{std::move(dataset)};
  });
}

void dimscope_dataset_free(dimscope_dataset* dataset) { delete dataset; }

size_t dimscope_dataset_item_count(const dimscope_dataset* dataset) {
  return dataset ? dataset->value->itemCount() : 0;
}

size_t dimscope_dataset_numeric_count(const dimscope_dataset* dataset) {
  return dataset ? dataset->value->numericCount() : 0;
}

size_t dimscope_dataset_categorical_count(const dimscope_dataset* dataset) {
  return dataset ? dataset->value->categoricalCount() : 0;
}

uint64_t dimscope_dataset_fingerprint(const dimscope_dataset* dataset) {
  return dataset ? dataset->value->fingerprint() : 0;
}

dimscope_status dimscope_dataset_meta_json(const dimscope_dataset* dataset, char** out) {
  return guarded([&] {
    requireNonNull(dataset, "dataset");
    requireNonNull(out, "out");
    const auto config = dimscope::defaultSessionConfig(*dataset->value);
    *out = duplicate(dimscope::datasetMetaJson(*dataset->value, nullptr, config));
  });
}

dimscope_status dimscope_distances_compute(const dimscope_dataset* dataset, dimscope_metric metric,
                                           unsigned workers, dimscope_distances** out) {
  return guarded([&] {
    requireNonNull(dataset, "dataset");
    requireNonNull(out, "out");
    if (metric != DIMSCOPE_METRIC_LITERAL && metric != DIMSCOPE_METRIC_ABS) {
      throw dimscope::Error(dimscope::ErrorCode::InvalidArgument, "unknown metric");
    }
    auto matrix = std::make_shared<const dimscope::DistanceMatrix>(dimscope::distanceMatrix(
        *dataset->value, static_cast<dimscope::DistanceMetric>(metric), workers));
    *out = new dimscope_distances{std::move(matrix)};
  });
}

dimscope_status dimscope_distances_save(const dimscope_distances* distances, const char* path) {
  return guarded([&] {
    requireNonNull(distances, "distances");
    requireNonNull(path, "path");
    dimscope::saveDistanceCache(*distances->value, path);
  });
}

dimscope_status dimscope_distances_load(const char* path, const dimscope_dataset* dataset,
                                        dimscope_distances** out) {
  return guarded([&] {
    requireNonNull(path, "path");
    requireNonNull(dataset, "dataset");
    requireNonNull(out, "out");
    auto matrix = std::make_shared<const dimscope::DistanceMatrix>(
        dimscope::loadDistanceCache(path, *dataset->value));
    *out = new dimscope_distances{std::move(matrix)};
  });
}

void dimscope_distances_free(dimscope_distances* distances) { delete distances; }

size_t dimscope_distances_size(const dimscope_distances* distances) {
  return distances ? distances->value->size() : 0;
}

double dimscope_distances_at(const dimscope_distances* distances, size_t j, size_t k) {
  if (distances == nullptr || j >= distances->value->size() || k >= distances->value->size()) {
    return std::nan("");
  }
  return (*distances->value)(j, k);
}

dimscope_metric dimscope_distances_metric(const dimscope_distances* distances) {
  return distances ? static_cast<dimscope_metric>(distances->value->metric()) : DIMSCOPE_METRIC_ABS;
}

dimscope_status dimscope_session_create(const dimscope_dataset* dataset,
                                        const dimscope_distances* distances,
                                        const char* config_json, dimscope_session** out) {
  return guarded([&] {
    requireNonNull(dataset, "dataset");
    requireNonNull(distances, "distances");
    requireNonNull(out, "out");
    auto config = dimscope::parseSessionConfig(config_json ? config_json : "", *dataset->value);
    auto session = std::make_unique<dimscope::Session>(dataset->value, distances->value, config);
    *out = new dimscope_session{std::move(session)};
  });
}

void dimscope_session_free(dimscope_session* session) { delete session; }

dimscope_status dimscope_session_apply_event(dimscope_session* session, const char* event_json,
                                             char** warnings_json) {
  return guarded([&] {
    requireNonNull(session, "session");
    requireNonNull(event_json, "event_json");
    const auto result = session->value->apply(std::string(event_json));
    if (warnings_json != nullptr) *warnings_json = duplicate(nlohmann::json(result.warnings).dump());
  });
}

uint64_t dimscope_session_revision(const dimscope_session* session) {
  return session ? session->value->state().revision : 0;
}

dimscope_status dimscope_session_view_json(dimscope_session* session, char** out) {
  return guarded([&] {
    requireNonNull(session, "session");
    requireNonNull(out, "out");
    *out = duplicate(session->value->viewJson());
  });
}

dimscope_status dimscope_session_snapshot_svg(dimscope_session* session, char** out) {
  return guarded([&] {
    requireNonNull(session, "session");
    requireNonNull(out, "out");
    *out = duplicate(dimscope::renderSvg(session->value->view(), session->value->context().dataset()));
  });
}

dimscope_status dimscope_mine_rules_json(const dimscope_dataset* dataset,
                                         const char* categorical_label, double t_sup, double t_con,
                                         dimscope_rule_direction direction, int bin_count,
                                         const dimscope_distances* distances, char** out) {
  return guarded([&] {
    requireNonNull(dataset, "dataset");
    requireNonNull(categorical_label, "categorical_label");
    requireNonNull(out, "out");
    const auto& data = *dataset->value;
    const auto catDim = data.findCategorical(categorical_label);
    if (!catDim) {
      throw dimscope::Error(dimscope::ErrorCode::NoCategoricalDim,
                            std::string("no categorical column '") + categorical_label + "'");
    }
    if (direction < DIMSCOPE_LABEL_TO_RANGE || direction > DIMSCOPE_BOTH_DIRECTIONS) {
      throw dimscope::Error(dimscope::ErrorCode::InvalidArgument, "unknown rule direction");
    }
    const dimscope::RuleThresholds thresholds{t_sup, t_con,
                                              static_cast<dimscope::RuleDirection>(direction)};
    const dimscope::BinningSpec binning{bin_count};
    const auto rules = dimscope::mineRules(data, binning, *catDim, thresholds,
                                           distances ? distances->value.get() : nullptr);
    *out = duplicate(dimscope::rulesToJson(data, rules));
  });
}

dimscope_status dimscope_serve(const dimscope_dataset* dataset, const dimscope_distances* distances,
                               const dimscope_serve_options* options) {
  return guarded([&] {
    requireNonNull(dataset, "dataset");
    requireNonNull(options, "options");
    dimscope::ServerOptions server;
    server.configJson = options->config_json ? options->config_json : "";
    server.metric = static_cast<dimscope::DistanceMetric>(options->metric);
    server.workers = options->workers;
    server.cachePath = options->cache_path ? options->cache_path : "";
    server.staticDir = options->static_dir ? options->static_dir : "";
    if (options->log != nullptr) {
      server.log = [fn = options->log, user = options->log_user](const std::string& message) {
        fn(message.c_str(), user);
      };
    }
    dimscope::ViewServer view(dataset->value, distances ? distances->value : nullptr, server);
    const std::string host = options->host ? options->host : "127.0.0.1";
    const int port = view.bind(host, options->port);
    if (server.log) server.log("listening on http://" + host + ":" + std::to_string(port));
    view.run();
  });
}

}  // extern "C"
