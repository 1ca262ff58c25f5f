#include <doctest.h>

#include <algorithm>
#include <random>
#include <regex>

#include <nlohmann/json.hpp>

#include "dimscope/error.hpp"
#include "dimscope/session.hpp"
#include "fixtures.hpp"

using namespace dimscope;
using nlohmann::json;

namespace {

struct Env {
  std::shared_ptr<const Dataset> data;
  std::shared_ptr<const DistanceMatrix> dm;
};

Env envOf(Dataset d, DistanceMetric metric = DistanceMetric::AbsoluteCorrelation) {
  auto data = std::make_shared<const Dataset>(std::move(d));
  auto dm = std::make_shared<const DistanceMatrix>(distanceMatrix(*data, metric));
  return {data, dm};
}

Session sessionOf(const Env& env, const std::string& config = "") {
  return Session(env.data, env.dm, parseSessionConfig(config, *env.data));
}

EventEnvelope ev(Event e) { return EventEnvelope{std::move(e), std::nullopt}; }

std::string fieldOf(auto&& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "";
}

std::size_t countMatches(const std::string& text, const std::string& pattern) {
  const std::regex re(pattern);
  return static_cast<std::size_t>(std::distance(std::sregex_iterator(text.begin(), text.end(), re),
                                                std::sregex_iterator()));
}

}  // namespace

TEST_CASE("default config") {
  const Dataset d = fixture::twoPairs();
  const auto config = parseSessionConfig("", d);
  CHECK(config.initial.revision == 0);
  CHECK(config.initial.catDim == std::optional<std::size_t>{0});
  CHECK(config.initial.graph.dSelect == 0.2);
  CHECK(config.initial.opacity == 0.3);
  CHECK(config.binning.binCount == 8);
  CHECK(config.sliderSteps == 200);
}

TEST_CASE("config parsing and validation") {
  const Dataset d = fixture::twoPairs();
  const auto c = parseSessionConfig(
      R"({"dSelect":0.5,"dRemove":0.1,"catDim":"group","mode":"rules","kmeansK":3,"binCount":4,"direction":"Both"})", d);
  CHECK(c.initial.graph.dSelect == 0.5);
  CHECK(c.initial.mode == Mode::LabelRules);
  CHECK(c.binning.binCount == 4);
  CHECK(c.initial.rules.direction == RuleDirection::Both);
  CHECK(fieldOf([&] { parseSessionConfig(R"({"bogus":1})", d); }) == "bogus");
  CHECK(fieldOf([&] { parseSessionConfig(R"({"dSelect":"x"})", d); }) == "dSelect");
  CHECK(fieldOf([&] { parseSessionConfig(R"({"dSelect":0.2,"dRemove":0.3})", d); }) == "dRemove");
  CHECK(fieldOf([&] { parseSessionConfig(R"({"catDim":"nope"})", d); }) == "catDim");
  CHECK(fieldOf([&] { parseSessionConfig(R"({"binCount":1})", d); }) == "binCount");
  CHECK(fieldOf([&] { parseSessionConfig(R"({"opacity":0})", d); }) == "opacity");
  CHECK(fieldOf([&] { parseSessionConfig(R"({"kmeansK":0})", d); }) == "kmeansK");
  CHECK_THROWS_AS(parseSessionConfig("[", d), ValidationError);
  const Dataset plain = fixture::fromColumns({{1, 2, 3}, {3, 1, 2}});
  CHECK(fieldOf([&] { parseSessionConfig(R"({"mode":"rules"})", plain); }) == "catDim");
}

TEST_CASE("event parsing round trip") {
  const Dataset d = fixture::twoPairs();
  const std::vector<std::string> events{
      R"({"type":"SetMode","mode":"LabelRules"})",
      R"({"type":"SetDSelect","value":0.25})",
      R"({"type":"SetDRemove","value":0.05})",
      R"({"type":"SetCatDim","catDim":null})",
      R"({"type":"SetCatDim","catDim":"group"})",
      R"({"type":"SetRuleThresholds","tSup":0.1,"tCon":0.7,"direction":"LabelToRange"})",
      R"({"type":"RectIncludeDims","dims":[0,2]})",
      R"({"type":"RectExcludeDims","dims":[3]})",
      R"({"type":"SetColorSource","source":"kmeans","k":3,"seed":9})",
      R"({"type":"SetOpacity","value":0.5})",
      R"({"type":"ClearOverrides"})",
  };
  for (const auto& text : events) {
    const auto env = parseEvent(text, d);
    CHECK_FALSE(env.expectedRevision);
    const auto again = parseEvent(eventToJson(env.event), d);
    CHECK(eventToJson(again.event) == eventToJson(env.event));
  }
  CHECK(parseEvent(R"({"type":"SetOpacity","value":0.5,"expectedRevision":4})", d).expectedRevision ==
        std::optional<std::uint64_t>{4});
  CHECK(fieldOf([&] { parseEvent(R"({"type":"Nope"})", d); }) == "type");
  CHECK(fieldOf([&] { parseEvent(R"({"value":1})", d); }) == "type");
  CHECK(fieldOf([&] { parseEvent(R"({"type":"SetDSelect"})", d); }) == "dSelect");
  CHECK(fieldOf([&] { parseEvent("not json", d); }) != "");
}

TEST_CASE("applyEvent: revision bumps on every accepted event, idempotent views") {
  const Env env = envOf(fixture::twoPairs());
  Session s = sessionOf(env);
  CHECK(s.state().revision == 0);
  s.apply(ev(event::SetDSelect{0.3}));
  const std::string first = s.viewJson();
  s.apply(ev(event::SetDSelect{0.3}));
  CHECK(s.state().revision == 2);
  const std::string second = s.viewJson();
  // Identical apart from the revision fields.
  auto a = json::parse(first), b = json::parse(second);
  a.erase("revision");
  b.erase("revision");
  a["state"].erase("revision");
  b["state"].erase("revision");
  CHECK(a == b);
}

TEST_CASE("applyEvent: LabelRules without a categorical dim") {
  const Env env = envOf(fixture::fromColumns({{1, 2, 3}, {3, 1, 2}}));
  const SessionState s = parseSessionConfig("", *env.data).initial;
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetMode{Mode::LabelRules}), *env.data); }) == "catDim");
}

TEST_CASE("applyEvent: dRemove clamped below a lowered dSelect") {
  const Dataset d = fixture::twoPairs();
  SessionState s = parseSessionConfig(R"({"dSelect":0.8})", d).initial;
  auto r = applyEvent(s, ev(event::SetDRemove{0.5}), d);
  CHECK(r.warnings.empty());
  r = applyEvent(r.state, ev(event::SetDSelect{0.4}), d);
  CHECK(r.state.graph.dSelect == 0.4);
  CHECK(r.state.graph.dRemove == 0.4 - kClampEpsilon);
  CHECK(r.state.graph.dRemove < 0.4);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("dRemove") != std::string::npos);
  r = applyEvent(r.state, ev(event::SetDRemove{0.9}), d);
  CHECK(r.state.graph.dRemove < 0.4);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("applyEvent: rejected events leave state untouched") {
  const Dataset d = fixture::twoPairs();
  const SessionState s = parseSessionConfig("", d).initial;
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetDSelect{-1}), d); }) == "dSelect");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetDSelect{std::nan("")}), d); }) == "dSelect");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetOpacity{0}), d); }) == "opacity");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetOpacity{1.5}), d); }) == "opacity");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetCatDim{7}), d); }) == "catDim");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::RectExcludeDims{{9}}), d); }) == "dims");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetRuleThresholds{2, 0.5, {}}), d); }) == "tSup");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetColorSource{ColorSource::KMeans, 0, {}}), d); }) == "k");
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetColorSource{ColorSource::KMeans, 41, {}}), d); }) == "k");
  try {
    applyEvent(s, EventEnvelope{event::SetOpacity{0.5}, 3}, d);
    FAIL("expected RevisionConflict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RevisionConflict);
  }
  CHECK(applyEvent(s, EventEnvelope{event::SetOpacity{0.5}, 0}, d).state.revision == 1);
  CHECK(s == parseSessionConfig("", d).initial);
}

TEST_CASE("applyEvent: leaving LabelRules requires keeping a categorical dim") {
  const Dataset d = fixture::twoPairs();
  auto s = applyEvent(parseSessionConfig("", d).initial, ev(event::SetMode{Mode::LabelRules}), d).state;
  CHECK(fieldOf([&] { applyEvent(s, ev(event::SetCatDim{std::nullopt}), d); }) == "catDim");
  s = applyEvent(s, ev(event::SetMode{Mode::DistanceCliques}), d).state;
  CHECK_FALSE(applyEvent(s, ev(event::SetCatDim{std::nullopt}), d).state.catDim);
}

TEST_CASE("rectangle include/exclude and clear") {
  const Dataset d = fixture::twoPairs();
  auto s = parseSessionConfig("", d).initial;
  s = applyEvent(s, ev(event::RectExcludeDims{{0, 1}}), d).state;
  CHECK(s.graph.forcedExclude == std::set<std::size_t>{0, 1});
  s = applyEvent(s, ev(event::RectIncludeDims{{1}}), d).state;
  CHECK(s.graph.forcedExclude == std::set<std::size_t>{0});
  CHECK(s.graph.forcedInclude == std::set<std::size_t>{1});
  s = applyEvent(s, ev(event::ClearOverrides{}), d).state;
  CHECK(s.graph.forcedExclude.empty());
  CHECK(s.graph.forcedInclude.empty());
}

TEST_CASE("two perfectly correlated pairs give two 2-axis panels") {
  const Env env = envOf(fixture::twoPairs());
  const double within = (*env.dm)(0, 1);
  double cross = 1;
  for (std::size_t a : {0, 1}) {
    for (std::size_t b : {2, 3}) cross = std::min(cross, (*env.dm)(a, b));
  }
  CHECK(within == 0.0);
  CHECK((*env.dm)(2, 3) == 0.0);
  const double dSelect = (within + cross) / 2;
  Session s = sessionOf(env, R"({"dSelect":)" + std::to_string(dSelect) + "}");
  const ViewModel& v = s.view();
  REQUIRE(v.panels.size() == 2);
  for (const auto& panel : v.panels) {
    CHECK(panel.axes.size() == 2);
    CHECK(panel.provenance == "cliques");
    REQUIRE(panel.polylines.size() == env.data->itemCount());
    for (const auto& line : panel.polylines) CHECK(line.size() == panel.axes.size());
    CHECK(panel.colors.size() == env.data->itemCount());
  }
  CHECK(v.panels[0].axes[0].dim == 0);
  CHECK(v.panels[0].axes[1].dim == 1);
  CHECK(v.panels[1].axes[0].dim == 2);
  CHECK(v.graph.dots.size() == 4);
  CHECK(v.graph.edges.size() == 2);
  CHECK(v.legend.size() == 3);
}

TEST_CASE("rules mode on the perfect-separation fixture") {
  const Env env = envOf(fixture::perfectSeparation());
  Session s = sessionOf(env, R"({"mode":"LabelRules","catDim":"label","tSup":0.1,"tCon":0.9})");
  const ViewModel& v = s.view();
  REQUIRE_FALSE(v.panels.empty());
  const auto& panel = v.panels[0];
  CHECK(panel.provenance == "rules");
  CHECK(panel.label == std::optional<std::int32_t>{0});
  REQUIRE(panel.axes.size() == 1);
  CHECK(panel.axes[0].dim == 0);
}

TEST_CASE("empty rule set: zero panels, legend still present") {
  const Env env = envOf(fixture::perfectSeparation());
  Session s = sessionOf(env, R"({"mode":"LabelRules","catDim":"label","tSup":0.95,"tCon":0.95})");
  const ViewModel& v = s.view();
  CHECK(v.panels.empty());
  CHECK(v.legend.size() == 3);
  CHECK_FALSE(v.advisory);
  const std::string svg = renderSvg(v, *env.data);
  CHECK(svg.find("pcp-empty") != std::string::npos);
}

TEST_CASE("k-means colouring when no categorical dim is selected") {
  const Env env = envOf(fixture::twoPairs());
  Session s = sessionOf(env, R"({"catDim":null,"kmeansK":3})");
  const ViewModel& v = s.view();
  CHECK(v.legend.size() == 3);
  CHECK(v.legend[0].label == "cluster 1");
  for (int c : v.colors) {
    CHECK(c >= 0);
    CHECK(c < 3);
  }
  s.apply(ev(event::SetColorSource{ColorSource::KMeans, 2, 5}));
  CHECK(s.view().legend.size() == 2);
}

TEST_CASE("clique explosion becomes an advisory with no panels") {
  const Env env = envOf(fixture::plantedGroups(1, 60, 14, 7, 3.0));
  GraphParams p;
  p.dSelect = 0.9;
  REQUIRE(maximalCliques(buildGraph(*env.dm, p), 100000).size() > 1);
  Session s = sessionOf(env, R"({"dSelect":0.9,"cliqueCap":1})");
  const ViewModel& v = s.view();
  REQUIRE(v.cliques.empty());
  CHECK(v.panels.empty());
  REQUIRE(v.advisory);
  const auto doc = json::parse(s.viewJson());
  CHECK(doc["advisory"].is_string());
}

TEST_CASE("layout is reused when only dSelect changes") {
  const Env env = envOf(fixture::plantedGroups(2, 80, 12, 3, 0.3));
  Session s = sessionOf(env);
  s.view();
  CHECK(s.context().layoutComputations() == 1);
  for (double v : {0.1, 0.3, 0.5, 0.7}) {
    s.apply(ev(event::SetDSelect{v}));
    s.view();
  }
  CHECK(s.context().layoutComputations() == 1);
  s.apply(ev(event::RectExcludeDims{{4}}));
  s.view();
  CHECK(s.context().layoutComputations() == 2);
}

TEST_CASE("no panel references a hidden, excluded or constant dim") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 30; ++t) {
    Dataset base = fixture::plantedGroups(rng(), 60, 10, 3, 0.4);
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < base.numericCount(); ++j) cols.emplace_back(base.numeric(j).begin(), base.numeric(j).end());
    cols.push_back(std::vector<double>(60, 2.0));  // constant dim 10
    std::vector<std::string> labels(60);
    for (std::size_t i = 0; i < 60; ++i) labels[i] = cols[0][i] > 0 ? "hi" : "lo";
    const Env env = envOf(fixture::fromColumns(cols, {labels}));
    Session s = sessionOf(env);
    const double dSelect = 0.1 + 0.8 * u(rng);
    s.apply(ev(event::SetDSelect{dSelect}));
    s.apply(ev(event::SetDRemove{dSelect * u(rng)}));
    s.apply(ev(event::RectExcludeDims{{static_cast<std::size_t>(rng() % 10)}}));
    if (t % 2) {
      s.apply(ev(event::SetRuleThresholds{0.02, 0.5, RuleDirection::Both}));
      s.apply(ev(event::SetMode{Mode::LabelRules}));
    }
    const ViewModel& v = s.view();
    std::set<std::size_t> visible;
    for (const auto& dot : v.graph.dots) visible.insert(dot.dim);
    CHECK(visible.count(10) == 0);
    for (const auto& panel : v.panels) {
      for (const auto& axis : panel.axes) {
        CHECK(visible.count(axis.dim) == 1);
        CHECK(v.graph.hidden.count(axis.dim) == 0);
        CHECK(std::find(v.graph.excluded.begin(), v.graph.excluded.end(), axis.dim) == v.graph.excluded.end());
        CHECK_FALSE(env.data->numericMeta(axis.dim).isConstant());
      }
    }
  }
}

TEST_CASE("view json is deterministic and canonical") {
  const Env env = envOf(fixture::plantedGroups(5, 50, 9, 3, 0.3));
  std::string previous;
  for (int run = 0; run < 2; ++run) {
    Session s = sessionOf(env, R"({"catDim":null})");
    s.apply(ev(event::SetDSelect{0.5}));
    s.apply(ev(event::SetColorSource{ColorSource::KMeans, 3, 2}));
    const std::string text = s.viewJson();
    if (run == 1) CHECK(text == previous);
    previous = text;
    CHECK(json::parse(text).dump() == text);  // keys already sorted
  }
  // A fresh context with the same state gives the same bytes.
  auto config = parseSessionConfig(R"({"catDim":null})", *env.data);
  ViewContext ctx(env.data, env.dm, config);
  auto state = config.initial;
  state = applyEvent(state, ev(event::SetDSelect{0.5}), *env.data).state;
  state = applyEvent(state, ev(event::SetColorSource{ColorSource::KMeans, 3, 2}), *env.data).state;
  CHECK(viewToJson(buildView(state, ctx), *env.data) == previous);
}

TEST_CASE("view json: missing values serialise as null and panels are consistent") {
  const Env env = envOf(fixture::fromColumns({{1, 2, kMissing, 4}, {2, 4, 6, 8}, {4, 3, 2, 1}}));
  Session s = sessionOf(env, R"({"dSelect":0.5})");
  const auto doc = json::parse(s.viewJson());
  REQUIRE(doc["panels"].size() >= 1);
  bool sawNull = false;
  for (const auto& panel : doc["panels"]) {
    for (const auto& line : panel["polylines"]) {
      CHECK(line.size() == panel["axes"].size());
      for (const auto& v : line) sawNull |= v.is_null();
    }
    CHECK(panel["colors"].size() == 4);
  }
  CHECK(sawNull);
  CHECK(doc["revision"] == 0);
  CHECK(doc["graph"]["hiddenCount"] == 0);
}

TEST_CASE("context rejects a matrix from another dataset") {
  const Env a = envOf(fixture::twoPairs());
  const Env b = envOf(fixture::perfectSeparation());
  try {
    ViewContext ctx(a.data, b.dm, parseSessionConfig("", *a.data));
    FAIL("expected FingerprintMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::FingerprintMismatch);
  }
}

TEST_CASE("cancellation aborts a build") {
  const Env env = envOf(fixture::twoPairs());
  ViewContext ctx(env.data, env.dm, parseSessionConfig("", *env.data));
  try {
    buildView(parseSessionConfig("", *env.data).initial, ctx, [] { return true; });
    FAIL("expected Cancelled");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Cancelled);
  }
}

TEST_CASE("svg snapshot structure") {
  const Env env = envOf(fixture::twoPairs());
  Session s = sessionOf(env, R"({"dSelect":0.5})");
  const std::string svg = renderSvg(s.view(), *env.data);
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(countMatches(svg, "<g id=\"pcp-panel-[0-9]+\"") == 2);
  CHECK(countMatches(svg, "<circle class=\"dot\"") == 4);
  CHECK(countMatches(svg, "<line class=\"edge\"") == 2);
  CHECK(countMatches(svg, "class=\"swatch\"") == 3);
}

TEST_CASE("dataset meta json") {
  const Env env = envOf(fixture::twoPairs(), DistanceMetric::Literal);
  const auto doc = json::parse(datasetMetaJson(*env.data, env.dm.get(), parseSessionConfig("", *env.data)));
  CHECK(doc["items"] == 40);
  CHECK(doc["numeric"].size() == 4);
  CHECK(doc["categorical"][0]["values"].size() == 3);
  CHECK(doc["metric"] == "literal");
  CHECK(doc["sliders"]["dSelect"]["max"] == 2.0);
  CHECK(doc["sliders"]["dSelect"]["step"] == 0.01);
}
