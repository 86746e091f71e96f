#include <random>

#include "doctest.h"
#include "sarceval/error.hpp"
#include "sarceval/knowledge.hpp"
#include "support/test_support.hpp"

using namespace sarceval;
using sarceval::testing::fixture;
using sarceval::testing::ScriptedHttp;
using sarceval::testing::TempDir;
using sarceval::testing::write_text;

namespace {

std::vector<std::string> targets(const std::vector<ConceptEdge>& edges) {
  std::vector<std::string> out;
  for (const auto& e : edges) out.push_back(e.target);
  return out;
}

std::vector<std::string> terms(std::string_view text, std::vector<std::string> objects = {}) {
  return extract_terms(text, objects);
}

Sample sample(std::string text) { return {"s", std::move(text), "s.jpg", Label::Sarcastic}; }

const std::string kRedNode = R"({
  "@id": "/c/en/red",
  "edges": [
    {"rel": {"label": "SymbolOf"}, "start": {"@id": "/c/en/red"}, "end": {"@id": "/c/en/warning/n"}, "weight": 3.0},
    {"rel": {"label": "RelatedTo"}, "start": {"@id": "/c/en/blood"}, "end": {"@id": "/c/en/red"}, "weight": 2.0},
    {"rel": {"label": "IsA"}, "start": {"@id": "/c/en/crimson"}, "end": {"@id": "/c/en/red"}, "weight": 5.0},
    {"rel": {"label": "Antonym"}, "start": {"@id": "/c/en/red"}, "end": {"@id": "/c/en/green"}, "weight": 9.0},
    {"rel": {"label": "RelatedTo"}, "start": {"@id": "/c/en/red"}, "end": {"@id": "/c/fr/rouge"}, "weight": 4.0},
    {"rel": {"label": "HasProperty"}, "start": {"@id": "/c/en/red"}, "end": {"@id": "/c/en/bright"}, "weight": 1.5},
    {"rel": {"label": "HasProperty"}, "start": {"@id": "/c/en/red"}, "end": {"@id": "/c/en/bright/a"}, "weight": 2.0},
    {"rel": {"label": "RelatedTo"}, "start": {"@id": "/c/en/red"}, "end": {"@id": "/c/en/red/n"}, "weight": 8.0}
  ]
})";

}  // namespace

TEST_CASE("extract_terms") {
  CHECK(terms("The hospital is great!") == std::vector<std::string>{"hospital", "great"});
  CHECK(terms("", {"dog", "dog"}) == std::vector<std::string>{"dog"});
  CHECK(terms("red RED Red") == std::vector<std::string>{"red"});
  CHECK(terms("a red car", {"Car", "traffic_light", "red"}) == std::vector<std::string>{"red", "car", "traffic light"});
  CHECK(terms("the of and").empty());
}

TEST_CASE("snapshot lookup") {
  auto kb = KnowledgeSnapshot::load(fixture("snapshot_small.jsonl"));
  CHECK(kb.provenance().find("@") != std::string::npos);

  auto hospital = kb.lookup("hospital", 3);
  CHECK(std::find(targets(hospital).begin(), targets(hospital).end(), "sickness") != targets(hospital).end());
  CHECK(kb.lookup("zzzz_unknown", 3).empty());

  SUBCASE("ranking: weight desc then target asc") {
    auto red = kb.lookup("red", 2);
    REQUIRE(red.size() == 2);
    CHECK(red[0].target == "warning");
    CHECK(red[0].weight == 3.0);
    CHECK(red[1].target == "blood");
    CHECK(targets(kb.lookup("red", 10)) == std::vector<std::string>{"warning", "blood", "bright", "color", "rose"});
    CHECK(kb.lookup("red", 0).empty());
  }
  SUBCASE("non-whitelisted relation is dropped") {
    for (const auto& e : kb.lookup("red", 100)) CHECK(default_relations().contains(e.relation));
    CHECK(kb.skipped() == 1);
  }
  SUBCASE("lookup normalizes the query") { CHECK(kb.lookup(" RED ", 1).at(0).target == "warning"); }
}

TEST_CASE("snapshot construction rules") {
  std::vector<ConceptEdge> edges{{"cat", "IsA", "pet", 1.0},   {"cat", "IsA", "pet", 2.5}, {"cat", "IsA", "cat", 1.0},
                                 {"cat", "IsA", "animal", -1}, {"cat", "Desires", "fish", 4}, {"Big_Cat", "IsA", "Feline", 1}};
  KnowledgeSnapshot kb(edges);
  auto cat = kb.lookup("cat", 10);
  REQUIRE(cat.size() == 1);
  CHECK(cat[0].weight == 2.5);
  CHECK(kb.skipped() == 3);
  CHECK(kb.lookup("big cat", 1).at(0).target == "feline");
  CHECK(kb.edge_count() == 2);

  RelationWhitelist only_isa{"IsA"};
  KnowledgeSnapshot narrow(std::vector<ConceptEdge>{{"a", "RelatedTo", "b", 1}, {"a", "IsA", "c", 1}}, only_isa);
  CHECK(targets(narrow.lookup("a", 5)) == std::vector<std::string>{"c"});
}

TEST_CASE("snapshot load errors") {
  TempDir dir;
  CHECK_THROWS_AS(KnowledgeSnapshot::load(dir / "missing.jsonl"), Error);
  auto bad = write_text(dir / "bad.jsonl", "{\"term\":\"a\",\"relation\":\"IsA\",\"target\":\"b\",\"weight\":1}\nnot json\n");
  try {
    KnowledgeSnapshot::load(bad);
    FAIL("expected SchemaViolation");
  } catch (const SchemaViolation& e) {
    REQUIRE(e.violations().size() == 1);
    CHECK(e.violations()[0].line == 2);
  }
}

TEST_CASE("lookup(k) is a prefix of lookup(k+1)") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pick(0, 5), weight(0, 3), rel(0, 2);
  const char* relations[] = {"RelatedTo", "IsA", "Antonym"};
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<ConceptEdge> edges;
    for (int i = 0; i < 20; ++i)
      edges.push_back({std::string(1, static_cast<char>('a' + pick(rng))), relations[rel(rng)],
                       std::string(1, static_cast<char>('a' + pick(rng))), static_cast<double>(weight(rng))});
    KnowledgeSnapshot kb(edges);
    for (char t = 'a'; t <= 'f'; ++t) {
      for (std::size_t k = 0; k < 8; ++k) {
        auto shorter = kb.lookup(std::string(1, t), k);
        auto longer = kb.lookup(std::string(1, t), k + 1);
        REQUIRE(shorter.size() <= longer.size());
        CHECK(std::equal(shorter.begin(), shorter.end(), longer.begin()));
        for (const auto& e : longer) CHECK(e.relation != "Antonym");
      }
    }
  }
}

TEST_CASE("enrich") {
  SUBCASE("empty knowledge keeps detections") {
    KnowledgeSnapshot empty(std::vector<ConceptEdge>{});
    std::vector<Detection> dets{{"dog", {"brown"}, 0.9, {0, 0, 1, 1}}};
    auto ctx = enrich(sample("good boy"), dets, empty, EnrichmentPolicy{});
    CHECK(ctx.concepts.empty());
    CHECK(ctx.detections == dets);
    CHECK(ctx.source_terms == std::vector<std::string>{"good", "boy", "dog", "brown"});
  }
  SUBCASE("same target from two terms appears once with max weight") {
    KnowledgeSnapshot kb(std::vector<ConceptEdge>{{"rain", "RelatedTo", "wet", 1.0}, {"storm", "RelatedTo", "wet", 2.0}});
    auto ctx = enrich(sample("rain storm"), {}, kb, 3, 10);
    REQUIRE(ctx.concepts.size() == 1);
    CHECK(ctx.concepts[0].target == "wet");
    CHECK(ctx.concepts[0].weight == 2.0);
    CHECK(ctx.concepts[0].source == "storm");
  }
  SUBCASE("max_concepts truncation after global ranking") {
    auto kb = KnowledgeSnapshot::load(fixture("snapshot_small.jsonl"));
    auto ctx = enrich(sample("hospital"), {}, kb, 3, 1);
    CHECK(targets(ctx.concepts) == std::vector<std::string>{"sickness"});
    auto both = enrich(sample("hospital"), std::vector<Detection>{{"stop sign", {"red"}, 0.9, {0, 0, 1, 1}}}, kb, 3, 10);
    CHECK(targets(both.concepts) == std::vector<std::string>{"warning", "blood", "bright", "sickness", "building"});
    CHECK(enrich(sample("hospital"), {}, kb, 0, 10).concepts.empty());
  }
  SUBCASE("deterministic") {
    auto kb = KnowledgeSnapshot::load(fixture("snapshot_small.jsonl"));
    std::vector<Detection> dets{{"dog", {"red"}, 0.9, {0, 0, 1, 1}}};
    auto a = enrich(sample("the hospital is red"), dets, kb, 2, 4);
    auto b = enrich(sample("the hospital is red"), dets, kb, 2, 4);
    CHECK(a == b);
  }
}

TEST_CASE("ConceptNet response parsing") {
  auto edges = parse_conceptnet_edges(kRedNode, "red", default_relations());
  // Outgoing edges, incoming RelatedTo only, English only, no self loops, max weight per (relation, target).
  CHECK(targets(edges) == std::vector<std::string>{"warning", "blood", "bright"});
  CHECK(edges[2].weight == 2.0);
  for (const auto& e : edges) CHECK(e.source == "red");
  CHECK_THROWS_AS(parse_conceptnet_edges("{not json", "red", default_relations()), Error);
}

TEST_CASE("live ConceptNet client") {
  TempDir dir;
  ScriptedHttp http;
  std::vector<std::chrono::milliseconds> sleeps;
  auto sleeper = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };
  ConceptNetClient::Options options;
  options.endpoint = "http://kb.local/api/";
  options.edge_limit = 50;

  SUBCASE("request shape, memoization, disk cache") {
    http.enqueue(200, kRedNode);
    {
      ConceptNetClient client(options, http.factory(), DiskCache(dir.path(), "conceptnet"), default_relations(), sleeper);
      CHECK(targets(client.lookup("Red", 2)) == std::vector<std::string>{"warning", "blood"});
      CHECK(targets(client.lookup("red", 3)) == std::vector<std::string>{"warning", "blood", "bright"});
      CHECK(client.request_count() == 1);
      auto req = http.request(0);
      CHECK(req.method == "GET");
      CHECK(req.base_url == "http://kb.local");
      CHECK(req.path == "/api/c/en/red?limit=50");
    }
    ConceptNetClient again(options, http.factory(), DiskCache(dir.path(), "conceptnet"), default_relations(), sleeper);
    CHECK(again.lookup("red", 1).at(0).target == "warning");
    CHECK(again.request_count() == 0);
    CHECK(http.request_count() == 1);
  }
  SUBCASE("multi-word terms use underscores") {
    http.enqueue(200, R"({"edges": []})");
    ConceptNetClient client(options, http.factory(), std::nullopt, default_relations(), sleeper);
    CHECK(client.lookup("traffic light", 3).empty());
    CHECK(http.request(0).path == "/api/c/en/traffic_light?limit=50");
  }
  SUBCASE("404 is an empty result, other failures are BackendUnreachable") {
    http.enqueue(404, "");
    http.enqueue(503, "");
    http.fail_transport();
    ConceptNetClient client(options, http.factory(), std::nullopt, default_relations(), sleeper);
    CHECK(client.lookup("qwxz", 3).empty());
    for (const char* term : {"a", "b"}) {
      try {
        client.lookup(term, 3);
        FAIL("expected BackendUnreachable");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BackendUnreachable);
      }
    }
  }
  SUBCASE("requests are spaced by the rate limiter") {
    for (int i = 0; i < 3; ++i) http.enqueue(200, R"({"edges": []})");
    ConceptNetClient client(options, http.factory(), std::nullopt, default_relations(), sleeper);
    client.lookup("a", 1);
    client.lookup("b", 1);
    client.lookup("c", 1);
    // The first call never waits. The sleeper here does not advance the clock,
    // so each reserved slot pushes the next one a further 1.2 s out.
    REQUIRE(sleeps.size() == 2);
    CHECK(sleeps[0] > std::chrono::milliseconds(1000));
    CHECK(sleeps[0] <= std::chrono::milliseconds(1200));
    CHECK(sleeps[1] > std::chrono::milliseconds(2200));
    CHECK(sleeps[1] <= std::chrono::milliseconds(2400));
  }
}

TEST_CASE("rate limiter with a fake clock") {
  using namespace std::chrono;
  steady_clock::time_point now{};
  std::vector<milliseconds> sleeps;
  RateLimiter limiter(
      milliseconds(1200), [&](milliseconds d) { sleeps.push_back(d); now += d; }, [&] { return now; });
  limiter.acquire();
  now += milliseconds(200);
  limiter.acquire();
  now += milliseconds(5000);
  limiter.acquire();
  CHECK(sleeps == std::vector<milliseconds>{milliseconds(1000)});
}
