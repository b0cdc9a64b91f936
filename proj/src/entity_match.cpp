#include "sapo/entity_match.hpp"

#include <algorithm>

#include "sapo/text_norm.hpp"

namespace sapo {

namespace {

void add_entry(Lexicon& lex, const std::string& raw_surface, const NodeId& node) {
  const std::string surface = normalize_text(raw_surface);
  if (surface.empty()) return;
  auto [it, inserted] = lex.entries.emplace(surface, node);
  if (!inserted && it->second != node) {
    throw Error(Err::AmbiguousSurfaceForm,
                "'" + surface + "' maps to both '" + it->second + "' and '" + node + "'");
  }
}

}  // namespace

Lexicon build_lexicon(const ErGraph& graph, int min_token_len) {
  Lexicon lex;
  lex.min_token_len = min_token_len;
  for (const EntityNode& node : graph.nodes()) {
    add_entry(lex, node.canonical_label, node.id);
    for (const std::string& alias : node.aliases) add_entry(lex, alias, node.id);
  }

  for (const auto& [surface, node] : lex.entries) {
    if (codepoint_count(surface) < static_cast<size_t>(min_token_len)) continue;
    lex.forms.push_back(Lexicon::Form{surface, node});
  }
  std::sort(lex.forms.begin(), lex.forms.end(), [](const auto& a, const auto& b) {
    if (a.surface.size() != b.surface.size()) return a.surface.size() > b.surface.size();
    return a.surface < b.surface;
  });
  for (uint32_t i = 0; i < lex.forms.size(); ++i) {
    lex.by_first_byte[lex.forms[i].surface[0]].push_back(i);
  }
  return lex;
}

namespace {

bool boundary_before(std::string_view text, size_t pos, const MatchOptions& opt) {
  if (!opt.word_boundaries || pos == 0) return true;
  const size_t prev = prev_cp_start(text, pos);
  return !is_word_cp_at(text, prev);
}

bool boundary_after(std::string_view text, size_t pos, const MatchOptions& opt) {
  if (!opt.word_boundaries || pos >= text.size()) return true;
  return !is_word_cp_at(text, pos);
}

// Length of the match for `form` at text[pos..], or 0. With plural folding a
// trailing "s"/"es" in the text is absorbed into the match.
size_t match_len_at(std::string_view text, size_t pos, const std::string& form,
                    const MatchOptions& opt) {
  if (pos + form.size() > text.size()) return 0;
  if (text.compare(pos, form.size(), form) != 0) return 0;
  const size_t end = pos + form.size();
  if (boundary_after(text, end, opt)) return form.size();
  if (opt.plural_fold) {
    if (end < text.size() && text[end] == 's' && boundary_after(text, end + 1, opt)) {
      return form.size() + 1;
    }
    if (end + 1 < text.size() && text[end] == 'e' && text[end + 1] == 's' &&
        boundary_after(text, end + 2, opt)) {
      return form.size() + 2;
    }
  }
  return 0;
}

}  // namespace

MentionSet link_entities(std::string_view text, const Lexicon& lexicon,
                         const MatchOptions& options) {
  const NormalizedText norm = normalize_text_mapped(text);
  const std::string_view scan = norm.text;

  MentionSet result;
  size_t pos = 0;
  while (pos < scan.size()) {
    size_t matched = 0;
    const Lexicon::Form* hit = nullptr;
    if (boundary_before(scan, pos, options)) {
      auto bucket = lexicon.by_first_byte.find(scan[pos]);
      if (bucket != lexicon.by_first_byte.end()) {
        for (uint32_t idx : bucket->second) {
          const Lexicon::Form& form = lexicon.forms[idx];
          const size_t len = match_len_at(scan, pos, form.surface, options);
          if (len > 0) {
            matched = len;
            hit = &form;
            break;  // forms are ordered longest-first
          }
        }
      }
    }
    if (hit) {
      const uint32_t src_begin = norm.origin[pos].first;
      const uint32_t src_end = norm.origin[pos + matched - 1].second;
      result.spans.push_back(MentionSpan{src_begin, src_end, hit->node});
      result.node_ids.insert(hit->node);
      pos += matched;
    } else {
      pos += cp_len_at(scan, pos);
    }
  }
  return result;
}

}  // namespace sapo
