#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sapo/er_graph.hpp"

namespace sapo {

// Surface-form table linking normalized text spans to graph nodes. Forms
// shorter than min_token_len codepoints stay in the table but never match.
struct Lexicon {
  std::unordered_map<std::string, NodeId> entries;
  int min_token_len = 2;

  // Matching order: per first byte, longest form first.
  struct Form {
    std::string surface;
    NodeId node;
  };
  std::vector<Form> forms;                               // sorted by length desc
  std::unordered_map<char, std::vector<uint32_t>> by_first_byte;
};

struct MatchOptions {
  bool word_boundaries = true;  // off: substring matching for unsegmented text
  bool plural_fold = false;     // on: a form also matches form+"s" / form+"es"
};

struct MentionSpan {
  uint32_t begin = 0;  // byte offsets into the source text
  uint32_t end = 0;
  NodeId node;
};

struct MentionSet {
  std::set<NodeId> node_ids;
  std::vector<MentionSpan> spans;
};

// One entry per normalized canonical label and alias. Throws
// AmbiguousSurfaceForm when two distinct nodes share a normalized form.
Lexicon build_lexicon(const ErGraph& graph, int min_token_len = 2);

// Non-overlapping longest-match occurrences of lexicon surface forms in
// normalize_text(text), at word boundaries by default.
MentionSet link_entities(std::string_view text, const Lexicon& lexicon,
                         const MatchOptions& options = {});

}  // namespace sapo
