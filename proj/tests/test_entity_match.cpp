#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sapo/entity_match.hpp"
#include "sapo/text_norm.hpp"
#include "test_support.hpp"

using namespace sapo;

TEST_CASE("normalize_text folds case and collapses whitespace") {
  CHECK(normalize_text("  Asphalt   SHINGLE ") == "asphalt shingle");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text("1893") == "1893");
  CHECK(normalize_text("a\tb\nc") == "a b c");
}

TEST_CASE("normalize_text applies compatibility mappings") {
  CHECK(normalize_text("ＡＳＰＨＡＬＴ") == "asphalt");  // fullwidth forms
  CHECK(normalize_text("ﬁt") == "fit");                  // ligature
  CHECK(normalize_text("a b") == "a b");            // NBSP
  CHECK(normalize_text("　x　") == "x");         // ideographic space
}

TEST_CASE("normalized byte offsets point into the source text") {
  const std::string raw = "  Big  WORD ";
  const NormalizedText norm = normalize_text_mapped(raw);
  CHECK(norm.text == "big word");
  REQUIRE(norm.origin.size() == norm.text.size());
  // 'b' of "big" originates from the 'B' at raw offset 2.
  CHECK(norm.origin[0].first == 2);
  // 'w' of "word" originates from the 'W' at raw offset 7.
  CHECK(norm.origin[4].first == 7);
}

TEST_CASE("build_lexicon covers every node and its aliases") {
  const ErGraph g = test::roofing_graph();
  const Lexicon lex = build_lexicon(g);
  CHECK(lex.entries.count("asphalt shingle"));
  CHECK(lex.entries.count("1893"));
  CHECK(lex.entries.count("lionel messi"));
  CHECK(lex.entries.count("messi"));
  CHECK(lex.entries.count("argentine national football team"));
  CHECK(lex.entries.at("messi") == lex.entries.at("lionel messi"));
  // Every node has at least its canonical entry.
  for (const EntityNode& n : g.nodes()) CHECK(lex.entries.count(n.id));
}

TEST_CASE("case-fold collisions across nodes are ambiguous") {
  const ErGraph g = build_graph({{"ABC", "r", "x"}, {"y", "r", "answer"}}, "answer");
  const ErGraph bad = with_aliases(g, {{"y", {"abc"}}});
  CHECK_THROWS_AS(build_lexicon(bad), Error);
}

TEST_CASE("alias equal to its own node label is fine") {
  const ErGraph g = with_aliases(build_graph({{"a", "r", "b"}}, "b"), {{"a", {"A"}}});
  CHECK_NOTHROW(build_lexicon(g));
}

TEST_CASE("link_entities finds alias phrasing") {
  const ErGraph g = test::roofing_graph();
  const Lexicon lex = build_lexicon(g);
  const MentionSet mentions = link_entities(
      "First, from the search results, I found information about the Argentine national "
      "football team",
      lex);
  CHECK(mentions.node_ids ==
        std::set<NodeId>{"argentina national men's football team"});
}

TEST_CASE("no graph entities means an empty mention set") {
  const Lexicon lex = build_lexicon(test::roofing_graph());
  const MentionSet mentions = link_entities("nothing relevant here at all", lex);
  CHECK(mentions.node_ids.empty());
  CHECK(mentions.spans.empty());
}

TEST_CASE("plural folding is off by default and matchable via the flag") {
  // Alias-free graph: the plural surface form exists only via folding.
  const ErGraph g = build_graph(test::roofing_triples(), "Asphalt Shingle");
  const Lexicon lex = build_lexicon(g);
  const std::string sentence = "asphalt shingles were developed in 1893";

  const MentionSet plain = link_entities(sentence, lex);
  CHECK(plain.node_ids == std::set<NodeId>{"1893"});

  MatchOptions fold;
  fold.plural_fold = true;
  const MentionSet folded = link_entities(sentence, lex, fold);
  CHECK(folded.node_ids == std::set<NodeId>{"asphalt shingle", "1893"});
}

TEST_CASE("word boundaries block partial-token matches") {
  const ErGraph g = build_graph({{"entity 1", "r", "ans"}}, "ans");
  const Lexicon lex = build_lexicon(g);
  CHECK(link_entities("about entity 17 today", lex).node_ids.empty());
  CHECK(link_entities("about entity 1 today", lex).node_ids ==
        std::set<NodeId>{"entity 1"});

  MatchOptions substring;
  substring.word_boundaries = false;
  CHECK(link_entities("aboutentity 1x", lex, substring).node_ids ==
        std::set<NodeId>{"entity 1"});
}

TEST_CASE("longest match wins at a shared offset") {
  const ErGraph g =
      build_graph({{"new york", "r", "new york city"}, {"new york city", "r2", "ans"}}, "ans");
  const Lexicon lex = build_lexicon(g);
  const MentionSet mentions = link_entities("she moved to New York City last year", lex);
  CHECK(mentions.node_ids == std::set<NodeId>{"new york city"});
  REQUIRE(mentions.spans.size() == 1);
  CHECK(mentions.spans[0].node == "new york city");
}

TEST_CASE("spans carry source byte offsets") {
  const ErGraph g = test::roofing_graph();
  const Lexicon lex = build_lexicon(g);
  const std::string raw = "  THE year 1893  mattered";
  const MentionSet mentions = link_entities(raw, lex);
  REQUIRE(mentions.spans.size() == 1);
  const MentionSpan& span = mentions.spans[0];
  CHECK(raw.substr(span.begin, span.end - span.begin) == "1893");
}

TEST_CASE("single-character forms are below the token length floor") {
  const ErGraph g = build_graph({{"x", "r", "answer"}}, "answer");
  const Lexicon lex = build_lexicon(g);
  CHECK(lex.entries.count("x"));  // present but inert
  CHECK(link_entities("x marks the spot", lex).node_ids.empty());

  const Lexicon permissive = build_lexicon(g, 1);
  CHECK(link_entities("x marks the spot", permissive).node_ids ==
        std::set<NodeId>{"x"});
}

TEST_CASE("linking is idempotent under normalization") {
  const ErGraph g = test::roofing_graph();
  const Lexicon lex = build_lexicon(g);
  const std::string texts[] = {
      "  The ARGENTINA National Men's Football Team  played in 1893 ",
      "Lionel МESSI stands out",  // Cyrillic М: no match for messi
      "Pablo Aimar and LIONEL MESSI",
      "ＡＳＰＨＡＬＴ ＳＨＩＮＧＬＥ",
  };
  for (const std::string& text : texts) {
    const MentionSet direct = link_entities(text, lex);
    const MentionSet renorm = link_entities(normalize_text(text), lex);
    CHECK(direct.node_ids == renorm.node_ids);
  }
}

TEST_CASE("mention sets are monotone under concatenation") {
  Rng rng(99);
  const ErGraph g = test::roofing_graph();
  const Lexicon lex = build_lexicon(g);
  for (int trial = 0; trial < 50; ++trial) {
    const Trajectory a = test::random_trajectory(rng, g, 2);
    const Trajectory b = test::random_trajectory(rng, g, 2);
    const std::string ta = a.steps[0].observation;
    const std::string tb = b.steps[0].observation;
    const auto ids_a = link_entities(ta, lex).node_ids;
    const auto ids_b = link_entities(tb, lex).node_ids;
    const auto ids_ab = link_entities(ta + " " + tb, lex).node_ids;
    for (const NodeId& id : ids_a) CHECK(ids_ab.count(id));
    for (const NodeId& id : ids_b) CHECK(ids_ab.count(id));
  }
}
