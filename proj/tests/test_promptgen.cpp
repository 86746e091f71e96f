#include "doctest.h"
#include "sarceval/error.hpp"
#include "sarceval/promptgen.hpp"
#include "sarceval/serialization.hpp"
#include "support/test_support.hpp"

using namespace sarceval;
using sarceval::testing::TempDir;
using sarceval::testing::write_text;

namespace {

bool contains(const std::string& hay, std::string_view needle) { return hay.find(needle) != std::string::npos; }

Sample msd(std::string text) { return {"s1", std::move(text), "s1.jpg", Label::Sarcastic}; }

EnrichedContext dog_hospital() {
  EnrichedContext ctx;
  ctx.detections = {{"dog", {"brown"}, 0.9, {0, 0, 5, 5}}};
  ctx.concepts = {{"hospital", "RelatedTo", "sickness", 2.0}};
  ctx.source_terms = {"hospital", "dog", "brown"};
  return ctx;
}

std::vector<std::pair<Task, Method>> all_variants() {
  return {{Task::MSD, Method::Baseline}, {Task::MSD, Method::Enhanced}, {Task::MSE, Method::Baseline},
          {Task::MSE, Method::Enhanced}};
}

}  // namespace

TEST_CASE("template slot rules") {
  CHECK_NOTHROW(PromptTemplate(Task::MSD, Method::Baseline, "{text}", "t"));
  CHECK_NOTHROW(PromptTemplate(Task::MSD, Method::Enhanced, "{text} {objects} {concepts}", "t"));
  for (const char* bad : {"no slot", "{text} {objects}", "{text} {concepts}"}) {
    try {
      PromptTemplate(Task::MSD, Method::Baseline, bad, "t");
      FAIL("expected InvalidTemplate for baseline: " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidTemplate);
    }
  }
  for (const char* bad : {"{text} {objects}", "{text} {concepts}", "{objects} {concepts}"}) {
    try {
      PromptTemplate(Task::MSE, Method::Enhanced, bad, "t");
      FAIL("expected InvalidTemplate for enhanced: " << bad);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidTemplate);
    }
  }
}

TEST_CASE("baseline MSD rendering") {
  auto p = render(default_template(Task::MSD, Method::Baseline), msd("nice weather"));
  CHECK(contains(p.text, "Is this post sarcastic? Answer Yes or No, then explain."));
  CHECK(contains(p.text, "nice weather"));
  CHECK_FALSE(contains(p.text, "Detected objects"));
  CHECK_FALSE(contains(p.text, "Related concepts"));
  CHECK(p.fingerprint == fingerprint(p.text));
}

TEST_CASE("enhanced rendering") {
  const auto tmpl = default_template(Task::MSD, Method::Enhanced);
  SUBCASE("empty lists render none") {
    auto p = render(tmpl, msd("nice weather"), EnrichedContext{});
    CHECK(contains(p.text, "Detected objects: none"));
    CHECK(contains(p.text, "Related concepts: none"));
  }
  SUBCASE("objects then concepts") {
    auto p = render(tmpl, msd("the hospital is great"), dog_hospital());
    auto obj = p.text.find("dog (brown)");
    auto con = p.text.find("hospital —RelatedTo→ sickness");
    REQUIRE(obj != std::string::npos);
    REQUIRE(con != std::string::npos);
    CHECK(obj < con);
  }
  SUBCASE("context mismatches") {
    try {
      render(tmpl, msd("x"));
      FAIL("expected MissingSlotData");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingSlotData);
    }
    CHECK_THROWS_AS(render(default_template(Task::MSD, Method::Baseline), msd("x"), EnrichedContext{}), Error);
  }
}

TEST_CASE("list rendering") {
  CHECK(render_objects({}) == "none");
  CHECK(render_concepts({}) == "none");
  CHECK(render_objects({{"dog", {"brown", "small"}, 0.9, {0, 0, 1, 1}}, {"cat", {}, 0.8, {0, 0, 1, 1}}}) ==
        "dog (brown, small), cat");
  CHECK(render_concepts({{"red", "SymbolOf", "warning", 3}, {"hospital", "RelatedTo", "sickness", 2}}) ==
        "red —SymbolOf→ warning; hospital —RelatedTo→ sickness");
}

TEST_CASE("substitution is single pass") {
  PromptTemplate tmpl(Task::MSD, Method::Baseline, "A {text} B", "t");
  CHECK(render(tmpl, msd("{text} {objects}")).text == "A {text} {objects} B");
}

TEST_CASE("render is pure and fingerprints track bytes") {
  for (auto [task, method] : all_variants()) {
    auto tmpl = default_template(task, method);
    auto go = [&](const std::string& text) {
      return method == Method::Enhanced ? render(tmpl, msd(text), dog_hospital()) : render(tmpl, msd(text));
    };
    auto a = go("love mondays");
    auto b = go("love mondays");
    auto c = go("love tuesdays");
    CHECK(a.text == b.text);
    CHECK(a.fingerprint == b.fingerprint);
    CHECK(a.fingerprint != c.fingerprint);
  }
}

TEST_CASE("templates state the output contract") {
  for (auto method : {Method::Baseline, Method::Enhanced}) {
    CHECK(contains(default_template(Task::MSD, method).text(), "Begin your answer with \"Yes\" or \"No\""));
    const auto& mse = default_template(Task::MSE, method).text();
    CHECK(contains(mse, "Explain why this post is sarcastic."));
    CHECK(contains(mse, "single paragraph"));
  }
  CHECK(contains(default_template(Task::MSE, Method::Enhanced).text(), "Detected objects: {objects}"));
  CHECK(contains(default_template(Task::MSE, Method::Enhanced).text(), "Related concepts: {concepts}"));
}

TEST_CASE("shipped template directory matches the built-ins") {
  const auto dir = std::filesystem::path(SARCEVAL_SOURCE_DIR) / "templates" / "v1";
  for (auto [task, method] : all_variants()) {
    auto loaded = load_template(dir, task, method);
    auto builtin = default_template(task, method);
    CHECK(loaded.text() == builtin.text());
    CHECK(loaded.version() == builtin.version());
  }
}

TEST_CASE("load_template") {
  TempDir dir;
  write_text(dir / "v7" / "msd_baseline.txt", "Q: {text}\n");
  auto t = load_template(dir / "v7", Task::MSD, Method::Baseline);
  CHECK(t.text() == "Q: {text}");
  CHECK(t.version() == "v7");
  write_text(dir / "v7" / "VERSION", "ablation-3\n");
  CHECK(load_template(dir / "v7", Task::MSD, Method::Baseline).version() == "ablation-3");
  try {
    load_template(dir / "v7", Task::MSE, Method::Enhanced);
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingFile);
  }
}
