#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles here
// must stay independent of the library code paths they check.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sapo/er_graph.hpp"
#include "sapo/rng.hpp"
#include "sapo/trajectory.hpp"

namespace sapo::test {

// Bundled roofing case-study graph (also on disk under data/fixtures).
inline std::vector<Triple> roofing_triples() {
  return {
      {"Asphalt Shingle", "Type", "New type of waterproof roofing material"},
      {"Asphalt Shingle", "Usage", "Waterproofing and decoration"},
      {"Asphalt Shingle", "Development Year", "1893"},
      {"1893", "Establishment Year", "Argentina National Men's Football Team"},
      {"Argentina National Men's Football Team", "Associated Player", "Pablo Aimar"},
      {"Argentina National Men's Football Team", "Current Captain", "Lionel Messi"},
  };
}

inline ErGraph roofing_graph() {
  ErGraph g = build_graph(roofing_triples(), "Asphalt Shingle", "roofing");
  return with_aliases(
      g, {{"Lionel Messi", {"Messi"}},
          {"Argentina National Men's Football Team", {"Argentine national football team"}},
          {"Asphalt Shingle", {"Asphalt Shingles"}}});
}

// Random connected-ish graph over single-word labels, <= 10 nodes.
inline ErGraph random_small_graph(Rng& rng, int max_nodes = 8) {
  static const char* kNames[] = {"alpha", "bravo", "carbon", "delta", "ember",
                                 "falcon", "garnet", "harbor", "indigo", "juniper"};
  const int n = 2 + static_cast<int>(rng.bounded(max_nodes - 1));
  std::vector<Triple> triples;
  // Random spanning tree keeps everything reachable, then extra edges.
  for (int i = 1; i < n; ++i) {
    const int j = static_cast<int>(rng.bounded(i));
    triples.push_back({kNames[i], "rel", kNames[j]});
  }
  const int extra = static_cast<int>(rng.bounded(n));
  for (int e = 0; e < extra; ++e) {
    const int a = static_cast<int>(rng.bounded(n));
    const int b = static_cast<int>(rng.bounded(n));
    if (a != b) triples.push_back({kNames[a], "rel", kNames[b]});
  }
  // Occasionally add a disconnected pair so unreachable paths occur.
  if (rng.bounded(4) == 0 && n <= 8) {
    triples.push_back({"island", "rel", "atoll"});
  }
  const int answer = static_cast<int>(rng.bounded(n));
  return build_graph(triples, kNames[answer], "random");
}

// Brute-force shortest path by exhaustive simple-path enumeration.
inline int brute_force_distance(const ErGraph& g, int from, int to) {
  const int n = g.node_count();
  std::vector<bool> visited(n, false);
  int best = -1;
  struct Walker {
    const ErGraph& g;
    std::vector<bool>& visited;
    int target;
    int* best;
    void dfs(int at, int depth) {
      if (at == target) {
        if (*best < 0 || depth < *best) *best = depth;
        return;
      }
      if (*best >= 0 && depth >= *best) return;
      visited[at] = true;
      for (int next : g.neighbors(at)) {
        if (!visited[next]) dfs(next, depth + 1);
      }
      visited[at] = false;
    }
  } walker{g, visited, to, &best};
  walker.dfs(from, 0);
  return best;
}

// Random trajectory whose texts drop graph labels and filler words.
inline Trajectory random_trajectory(Rng& rng, const ErGraph& g, int max_steps = 5) {
  static const char* kFiller[] = {"the", "search", "found", "page", "about", "results", "linked"};
  auto random_text = [&](int words) {
    std::string text;
    for (int w = 0; w < words; ++w) {
      if (!text.empty()) text += ' ';
      if (rng.bounded(2) == 0) {
        text += g.nodes()[rng.bounded(g.node_count())].canonical_label;
      } else {
        text += kFiller[rng.bounded(std::size(kFiller))];
      }
    }
    return text;
  };

  Trajectory traj;
  traj.trajectory_id = "fuzz";
  traj.query = random_text(4);
  const int steps = 1 + static_cast<int>(rng.bounded(max_steps));
  for (int t = 0; t < steps; ++t) {
    Step s;
    s.thought = random_text(3 + static_cast<int>(rng.bounded(6)));
    s.action.name = "search";
    s.observation = random_text(3 + static_cast<int>(rng.bounded(8)));
    traj.steps.push_back(std::move(s));
  }
  traj.final_answer = g.nodes()[rng.bounded(g.node_count())].canonical_label;
  return traj;
}

}  // namespace sapo::test
