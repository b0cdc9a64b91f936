#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sapo {

// Normalized text plus, for every output byte, the [begin, end) byte range of
// the source codepoint it came from. Lets entity-match spans point back into
// the original (un-normalized) text.
struct NormalizedText {
  std::string text;
  std::vector<std::pair<uint32_t, uint32_t>> origin;
};

// Unicode compatibility normalization (NFKC_Casefold then NFKD, applied per
// codepoint so offsets survive), White_Space runs collapsed to single spaces,
// ends trimmed.
NormalizedText normalize_text_mapped(std::string_view raw);

std::string normalize_text(std::string_view raw);

// Number of codepoints in a UTF-8 string (invalid bytes count as one each).
size_t codepoint_count(std::string_view utf8);

// True if the codepoint starting at byte `pos` is alphanumeric. Used for the
// word-boundary test during matching.
bool is_word_cp_at(std::string_view text, size_t pos);

// Byte index of the codepoint start at or before `pos` - 1, or npos at start.
size_t prev_cp_start(std::string_view text, size_t pos);

// Byte length of the codepoint starting at `pos` (>= 1).
size_t cp_len_at(std::string_view text, size_t pos);

}  // namespace sapo
