#include "sapo/text_norm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <mutex>
#include <unordered_map>

#include "sapo/error.hpp"

namespace sapo {

namespace {

struct Normalizers {
  const icu::Normalizer2* nfkc_cf = nullptr;
  const icu::Normalizer2* nfkd = nullptr;
};

const Normalizers& normalizers() {
  static Normalizers n = [] {
    UErrorCode ec = U_ZERO_ERROR;
    Normalizers out;
    out.nfkc_cf = icu::Normalizer2::getNFKCCasefoldInstance(ec);
    out.nfkd = icu::Normalizer2::getNFKDInstance(ec);
    if (U_FAILURE(ec) || !out.nfkc_cf || !out.nfkd) {
      throw Error(Err::IoError, "ICU normalizer initialization failed");
    }
    return out;
  }();
  return n;
}

// Per-codepoint normalization result: UTF-8 expansion with whitespace already
// rewritten to ' '. Cached; the map only ever grows.
const std::string& expand_codepoint(UChar32 cp) {
  static std::mutex mu;
  static std::unordered_map<UChar32, std::string> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(cp);
  if (it != cache.end()) return it->second;

  std::string expansion;
  if (u_isUWhiteSpace(cp)) {
    expansion = " ";
  } else {
    const Normalizers& n = normalizers();
    UErrorCode ec = U_ZERO_ERROR;
    icu::UnicodeString in(cp);
    icu::UnicodeString folded = n.nfkc_cf->normalize(in, ec);
    icu::UnicodeString decomposed = n.nfkd->normalize(folded, ec);
    if (U_FAILURE(ec)) decomposed = in;
    for (int32_t i = 0; i < decomposed.length();) {
      const UChar32 out_cp = decomposed.char32At(i);
      i += U16_LENGTH(out_cp);
      if (u_isUWhiteSpace(out_cp)) {
        if (expansion.empty() || expansion.back() != ' ') expansion += ' ';
      } else {
        char buf[U8_MAX_LENGTH];
        int32_t len = 0;
        UBool err = false;
        U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, out_cp, err);
        if (!err) expansion.append(buf, static_cast<size_t>(len));
      }
    }
  }
  return cache.emplace(cp, std::move(expansion)).first->second;
}

}  // namespace

NormalizedText normalize_text_mapped(std::string_view raw) {
  NormalizedText out;
  out.text.reserve(raw.size());
  out.origin.reserve(raw.size());

  const auto* bytes = reinterpret_cast<const uint8_t*>(raw.data());
  const int32_t n = static_cast<int32_t>(raw.size());
  bool pending_space = false;
  int32_t i = 0;
  while (i < n) {
    const int32_t cp_begin = i;
    UChar32 cp;
    U8_NEXT(bytes, i, n, cp);
    if (cp < 0) cp = 0xFFFD;  // invalid byte sequence
    const std::string& expansion = expand_codepoint(cp);
    for (char c : expansion) {
      if (c == ' ') {
        pending_space = true;
        continue;
      }
      if (pending_space && !out.text.empty()) {
        out.text += ' ';
        out.origin.emplace_back(static_cast<uint32_t>(cp_begin), static_cast<uint32_t>(i));
      }
      pending_space = false;
      out.text += c;
      out.origin.emplace_back(static_cast<uint32_t>(cp_begin), static_cast<uint32_t>(i));
    }
  }
  return out;
}

std::string normalize_text(std::string_view raw) {
  return normalize_text_mapped(raw).text;
}

size_t codepoint_count(std::string_view utf8) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(utf8.data());
  const int32_t n = static_cast<int32_t>(utf8.size());
  size_t count = 0;
  int32_t i = 0;
  while (i < n) {
    UChar32 cp;
    U8_NEXT(bytes, i, n, cp);
    ++count;
  }
  return count;
}

bool is_word_cp_at(std::string_view text, size_t pos) {
  if (pos >= text.size()) return false;
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  int32_t i = static_cast<int32_t>(pos);
  UChar32 cp;
  U8_NEXT(bytes, i, static_cast<int32_t>(text.size()), cp);
  if (cp < 0) return false;
  return u_isalnum(cp);
}

size_t prev_cp_start(std::string_view text, size_t pos) {
  if (pos == 0) return std::string_view::npos;
  size_t p = pos - 1;
  while (p > 0 && (static_cast<uint8_t>(text[p]) & 0xC0) == 0x80) --p;
  return p;
}

size_t cp_len_at(std::string_view text, size_t pos) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(text.data());
  int32_t i = static_cast<int32_t>(pos);
  UChar32 cp;
  U8_NEXT(bytes, i, static_cast<int32_t>(text.size()), cp);
  (void)cp;
  return static_cast<size_t>(i) - pos;
}

}  // namespace sapo
