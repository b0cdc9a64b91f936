#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sapo/er_graph.hpp"
#include "sapo/json_io.hpp"
#include "test_support.hpp"

using namespace sapo;

TEST_CASE("build_graph interns one node per normalized label") {
  const ErGraph g = test::roofing_graph();
  CHECK(g.node_count() == 7);
  CHECK(g.edge_count() == 6);
  CHECK(g.answer_node() == "asphalt shingle");
}

TEST_CASE("build_graph minimal two-node graph") {
  const ErGraph g = build_graph({{"a", "r", "a-answer"}}, "a-answer");
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.answer_node() == "a-answer");
}

TEST_CASE("build_graph deduplicates repeated triples") {
  const ErGraph g = build_graph({{"a", "r", "b"}, {"a", "r", "b"}}, "b");
  CHECK(g.edge_count() == 1);
}

TEST_CASE("build_graph keeps distinct relations between the same endpoints") {
  const ErGraph g = build_graph({{"a", "r1", "b"}, {"a", "r2", "b"}}, "b");
  CHECK(g.edge_count() == 2);
  CHECK(g.node_count() == 2);
}

TEST_CASE("build_graph drops self-loops") {
  const ErGraph g = build_graph({{"a", "r", "a"}, {"a", "r", "b"}}, "b");
  CHECK(g.edge_count() == 1);
}

TEST_CASE("build_graph errors") {
  CHECK_THROWS_AS(build_graph({}, "x"), Error);
  CHECK_THROWS_WITH_AS(build_graph({{"a", "r", "b"}}, "missing"),
                       doctest::Contains("AnswerNodeMissing"), Error);
  try {
    build_graph({}, "x");
  } catch (const Error& e) {
    CHECK(e.code() == Err::EmptyGraph);
  }
}

TEST_CASE("case-folded labels merge into one node") {
  const ErGraph g = build_graph({{"ABC", "r", "xyz"}, {"abc", "r2", "Answer"}}, "answer");
  CHECK(g.node_count() == 3);
}

TEST_CASE("shortest_distance on the roofing fixture") {
  const ErGraph g = test::roofing_graph();
  CHECK(shortest_distance(g, "asphalt shingle") == Distance::of(0));
  CHECK(shortest_distance(g, "1893") == Distance::of(1));
  CHECK(shortest_distance(g, "argentina national men's football team") == Distance::of(2));
  CHECK(shortest_distance(g, "lionel messi") == Distance::of(3));
  CHECK(shortest_distance(g, "pablo aimar") == Distance::of(3));
  CHECK_THROWS_AS(shortest_distance(g, "nobody"), Error);
}

TEST_CASE("disconnected component is unreachable") {
  const ErGraph g = build_graph({{"a", "r", "b"}, {"c", "r", "d"}}, "a");
  CHECK(!shortest_distance(g, "c").reachable());
  CHECK(!shortest_distance(g, "d").reachable());
  CHECK(shortest_distance(g, "b") == Distance::of(1));
}

TEST_CASE("contribution_score formula") {
  const ErGraph g = test::roofing_graph();
  CHECK(contribution_score(g, "asphalt shingle", 2.0) == 1.0);
  CHECK(contribution_score(g, "1893", 2.0) == 0.5);
  CHECK(contribution_score(g, "argentina national men's football team", 2.0) == 0.25);
  CHECK(contribution_score(g, "lionel messi", 2.0) == 0.125);
  CHECK(contribution_score(Distance::unreachable(), 2.0) == 0.0);
  CHECK(contribution_score(Distance::of(5), 1.0) == 1.0);
  CHECK_THROWS_AS(contribution_score(g, "1893", 0.5), Error);
}

TEST_CASE("BFS equals brute-force simple-path minimum on small graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const ErGraph g = test::random_small_graph(rng, 8);
    for (int v = 0; v < g.node_count(); ++v) {
      const int oracle = test::brute_force_distance(g, v, g.answer_index());
      const Distance d = g.distance_to_answer(v);
      if (oracle < 0) {
        CHECK(!d.reachable());
      } else {
        CHECK(d.hops == oracle);
      }
    }
  }
}

TEST_CASE("edge endpoints differ by at most one hop") {
  Rng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const ErGraph g = test::random_small_graph(rng, 9);
    for (const auto& e : g.edges()) {
      const Distance du = g.distance_to_answer(e.src);
      const Distance dv = g.distance_to_answer(e.dst);
      if (du.reachable() && dv.reachable()) {
        CHECK(std::abs(du.hops - dv.hops) <= 1);
      } else {
        // An edge connects both or neither to the answer component.
        CHECK(du.reachable() == dv.reachable());
      }
    }
  }
}

TEST_CASE("contribution decays monotonically in distance") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const ErGraph g = test::random_small_graph(rng);
    const double k = 1.5 + rng.real01() * 3.0;
    for (int a = 0; a < g.node_count(); ++a) {
      for (int b = 0; b < g.node_count(); ++b) {
        const Distance da = g.distance_to_answer(a);
        const Distance db = g.distance_to_answer(b);
        if (da.reachable() && db.reachable() && da.hops < db.hops) {
          CHECK(contribution_score(da, k) > contribution_score(db, k));
        }
      }
    }
  }
}

TEST_CASE("k=1 collapses every reachable node to score 1") {
  Rng rng(88);
  const ErGraph g = test::random_small_graph(rng);
  for (int v = 0; v < g.node_count(); ++v) {
    const Distance d = g.distance_to_answer(v);
    if (d.reachable()) CHECK(contribution_score(d, 1.0) == 1.0);
  }
}

TEST_CASE("validate_task_graph with the exact adjacency oracle passes") {
  const ErGraph g = test::roofing_graph();
  RetrievalOracle oracle = [&g](const NodeId& id) {
    std::unordered_set<NodeId> out;
    for (int v : g.neighbors(g.index_of(id))) out.insert(g.nodes()[v].id);
    return out;
  };
  const ValidationReport report = validate_task_graph(g, {"lionel messi"}, oracle);
  CHECK(report.connectivity_ok);
  CHECK(report.distant_unreachability_ok);
  CHECK(report.intermediate_unskippability_ok);
  CHECK(report.failing_nodes.empty());
}

TEST_CASE("oracle returning the answer everywhere breaks distant unreachability") {
  const ErGraph g = test::roofing_graph();
  RetrievalOracle oracle = [&g](const NodeId&) {
    return std::unordered_set<NodeId>{g.answer_node()};
  };
  const ValidationReport report = validate_task_graph(g, {}, oracle);
  CHECK(!report.distant_unreachability_ok);
  CHECK(!report.failing_nodes.empty());
}

TEST_CASE("mutually blind oracle breaks connectivity") {
  const ErGraph g = build_graph({{"a", "r", "b"}}, "b");
  RetrievalOracle oracle = [](const NodeId&) { return std::unordered_set<NodeId>{}; };
  const ValidationReport report = validate_task_graph(g, {}, oracle);
  CHECK(!report.connectivity_ok);
}

TEST_CASE("skipping an intermediate node is flagged") {
  // Path c - b - answer; the oracle lets c retrieve b and answer directly.
  const ErGraph g = build_graph({{"c", "r", "b"}, {"b", "r", "ans"}}, "ans");
  RetrievalOracle oracle = [&g](const NodeId& id) {
    std::unordered_set<NodeId> out;
    for (int v : g.neighbors(g.index_of(id))) out.insert(g.nodes()[v].id);
    if (id == "c") out.insert("ans");
    return out;
  };
  const ValidationReport report = validate_task_graph(g, {}, oracle);
  CHECK(report.connectivity_ok);
  CHECK(!report.distant_unreachability_ok);
  CHECK(!report.intermediate_unskippability_ok);
}

TEST_CASE("unknown question entity is an error") {
  const ErGraph g = build_graph({{"a", "r", "b"}}, "b");
  RetrievalOracle oracle = [](const NodeId&) { return std::unordered_set<NodeId>{}; };
  CHECK_THROWS_AS(validate_task_graph(g, {"ghost"}, oracle), Error);
}

TEST_CASE("corrupt_graph rate zero is the identity in every mode") {
  const ErGraph g = test::roofing_graph();
  for (NoiseMode mode :
       {NoiseMode::NodeDeletion, NoiseMode::NoisyNodeInjection, NoiseMode::AnswerPerturbation}) {
    const ErGraph c = corrupt_graph(g, NoiseSpec{mode, 0.0, 99});
    CHECK(c == g);
  }
}

TEST_CASE("node deletion count uses floor arithmetic and protects the answer") {
  std::vector<Triple> triples;
  for (int i = 1; i < 9; ++i) {
    triples.push_back({"n" + std::to_string(i), "r", "n0"});
  }
  const ErGraph g = build_graph(triples, "n0");  // 9 nodes, star
  const ErGraph c = corrupt_graph(g, NoiseSpec{NoiseMode::NodeDeletion, 0.5, 7});
  CHECK(c.node_count() == 5);  // 9 - floor(4.5)
  CHECK(c.answer_node() == "n0");

  // Full deletion keeps the answer only.
  const ErGraph all = corrupt_graph(g, NoiseSpec{NoiseMode::NodeDeletion, 1.0, 7});
  CHECK(all.node_count() == 1);
  CHECK(all.answer_node() == "n0");
}

TEST_CASE("node deletion never removes the answer across seeds") {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const ErGraph g = test::random_small_graph(rng);
    const NoiseSpec spec{NoiseMode::NodeDeletion, rng.real01(), rng.next_u64()};
    const ErGraph c = corrupt_graph(g, spec);
    CHECK(c.has_node(g.answer_node()));
    CHECK(c.answer_node() == g.answer_node());
  }
}

TEST_CASE("noisy node injection adds leaf nodes") {
  const ErGraph g = test::roofing_graph();  // 7 nodes
  const ErGraph c = corrupt_graph(g, NoiseSpec{NoiseMode::NoisyNodeInjection, 0.3, 5});
  CHECK(c.node_count() == 9);  // 7 + floor(2.1)
  CHECK(c.edge_count() == g.edge_count() + 2);
  CHECK(c.answer_node() == g.answer_node());
}

TEST_CASE("answer perturbation moves the answer to another node") {
  const ErGraph g = test::roofing_graph();
  const ErGraph c = corrupt_graph(g, NoiseSpec{NoiseMode::AnswerPerturbation, 1.0, 3});
  CHECK(c.node_count() == g.node_count());
  CHECK(c.answer_node() != g.answer_node());

  // A single-node graph has nowhere to move the answer.
  const ErGraph tiny = corrupt_graph(
      ErGraph(build_graph({{"a", "r", "b"}}, "a")),
      NoiseSpec{NoiseMode::NodeDeletion, 1.0, 1});
  const ErGraph kept = corrupt_graph(tiny, NoiseSpec{NoiseMode::AnswerPerturbation, 1.0, 3});
  CHECK(kept.answer_node() == tiny.answer_node());
}

TEST_CASE("corruption is deterministic for a fixed seed") {
  const ErGraph g = test::roofing_graph();
  for (NoiseMode mode :
       {NoiseMode::NodeDeletion, NoiseMode::NoisyNodeInjection, NoiseMode::AnswerPerturbation}) {
    const NoiseSpec spec{mode, 0.4, 1234};
    const ErGraph a = corrupt_graph(g, spec);
    const ErGraph b = corrupt_graph(g, spec);
    CHECK(a == b);
    CHECK(graph_to_json(a).dump() == graph_to_json(b).dump());
  }
}

TEST_CASE("graph file round trip") {
  const ErGraph g = test::roofing_graph();
  const ErGraph back = graph_from_json(graph_to_json(g));
  CHECK(back == g);
  CHECK(back.node("lionel messi").aliases == std::vector<std::string>{"Messi"});
}
