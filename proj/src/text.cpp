#include "kgod/text.hpp"

#include <array>
#include <cctype>

namespace kgod::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Length of the UTF-8 sequence starting at s[pos], or 0 if malformed.
std::size_t valid_sequence_length(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return 1;
  std::size_t len = 0;
  char32_t min = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

struct CaseRange {
  char32_t lower_first;
  char32_t lower_last;
  char32_t upper_first;
};

// Contiguous blocks where lower = upper + offset.
constexpr std::array<CaseRange, 10> kBlocks{{
    {0x0061, 0x007A, 0x0041},  // ASCII
    {0x00E0, 0x00F6, 0x00C0},  // Latin-1
    {0x00F8, 0x00FE, 0x00D8},
    {0x03B1, 0x03C1, 0x0391},  // Greek
    {0x03C3, 0x03CB, 0x03A3},
    {0x03AD, 0x03AF, 0x0388},
    {0x03CD, 0x03CE, 0x038E},
    {0x0430, 0x044F, 0x0410},  // Cyrillic
    {0x0450, 0x045F, 0x0400},
    {0x0561, 0x0586, 0x0531},  // Armenian
}};

struct PairRange {
  char32_t first;
  char32_t last;
  bool upper_is_even;
};

// Alternating upper/lower pairs.
constexpr std::array<PairRange, 11> kPairs{{
    {0x0100, 0x012F, true},
    {0x0132, 0x0137, true},
    {0x0139, 0x0148, false},
    {0x014A, 0x0177, true},
    {0x0179, 0x017E, false},
    {0x0460, 0x0481, true},
    {0x048A, 0x04BF, true},
    {0x04C1, 0x04CE, false},
    {0x04D0, 0x052F, true},
    {0x1E00, 0x1E95, true},
    {0x1EA0, 0x1EFF, true},
}};

struct Single {
  char32_t lower;
  char32_t upper;
};

constexpr std::array<Single, 4> kSingles{{
    {0x00FF, 0x0178},
    {0x03AC, 0x0386},
    {0x03CC, 0x038C},
    {0x03C2, 0x03A3},  // final sigma uppercases, but Σ lowercases to σ
}};

}  // namespace

std::string sanitize_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t len = valid_sequence_length(bytes, pos);
    if (len == 0) {
      append_utf8(out, kReplacement);
      ++pos;
    } else {
      out.append(bytes.substr(pos, len));
      pos += len;
    }
  }
  return out;
}

char32_t decode_utf8(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  std::size_t len = 1;
  char32_t cp = b0;
  if (b0 >= 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else if (b0 >= 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kReplacement;
  }
  for (std::size_t i = 1; i < len; ++i) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[pos + i]) & 0x3F);
  }
  pos += len;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

char32_t simple_upper(char32_t cp) {
  for (const auto& b : kBlocks) {
    if (cp >= b.lower_first && cp <= b.lower_last) return cp - b.lower_first + b.upper_first;
  }
  for (const auto& p : kPairs) {
    if (cp >= p.first && cp <= p.last) {
      const bool even = (cp % 2) == 0;
      const bool is_lower = p.upper_is_even ? !even : even;
      return is_lower ? cp - 1 : cp;
    }
  }
  for (const auto& s : kSingles) {
    if (cp == s.lower) return s.upper;
  }
  if (cp == 0x0131) return 'I';
  return cp;
}

char32_t simple_lower(char32_t cp) {
  for (const auto& b : kBlocks) {
    const char32_t upper_last = b.upper_first + (b.lower_last - b.lower_first);
    if (cp >= b.upper_first && cp <= upper_last) return cp - b.upper_first + b.lower_first;
  }
  for (const auto& p : kPairs) {
    if (cp >= p.first && cp <= p.last) {
      const bool even = (cp % 2) == 0;
      const bool is_upper_cp = p.upper_is_even ? even : !even;
      return is_upper_cp ? cp + 1 : cp;
    }
  }
  for (const auto& s : kSingles) {
    if (cp == s.upper && s.lower != 0x03C2) return s.lower;
  }
  if (cp == 0x0130) return 'i';
  return cp;
}

bool is_upper(char32_t cp) { return simple_lower(cp) != cp; }

bool is_letter(char32_t cp) {
  if (cp < 0x80) return std::isalpha(static_cast<int>(cp)) != 0;
  if (simple_lower(cp) != cp || simple_upper(cp) != cp) return true;
  // Uncased scripts (CJK, Arabic, ...) count as letters; punctuation blocks do not.
  return cp >= 0x00C0 && !(cp >= 0x2000 && cp <= 0x2BFF) && !(cp >= 0x3000 && cp <= 0x303F);
}

std::string upper_first(std::string_view s) {
  if (s.empty()) return {};
  std::size_t pos = 0;
  const char32_t first = decode_utf8(s, pos);
  std::string out;
  append_utf8(out, simple_upper(first));
  out.append(s.substr(pos));
  return out;
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : trim(s)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && iequals(s.substr(0, prefix.size()), prefix);
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      const int hi = hex_value(s[i + 1]);
      const int lo = hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

}  // namespace kgod::text
