#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace kgod::wikitext {

// Frames (templates and links) nested deeper than this degrade to text.
inline constexpr std::size_t kMaxNesting = 16;

struct WikiLink {
  std::string target;  // normalized title, never empty
  std::string anchor;  // display text
  std::optional<std::string> fragment;

  // File:, Image:, Media: and Category: links, and interlanguage links.
  bool is_non_article() const;

  friend bool operator==(const WikiLink&, const WikiLink&) = default;
};

struct TemplateCall;

struct Text {
  std::string value;
  friend bool operator==(const Text&, const Text&) = default;
};

// Nested template inside a parameter value. Shared and immutable.
struct NestedTemplate {
  std::shared_ptr<const TemplateCall> call;
  const TemplateCall& operator*() const { return *call; }
  const TemplateCall* operator->() const { return call.get(); }
  friend bool operator==(const NestedTemplate& a, const NestedTemplate& b);
};

using Fragment = std::variant<Text, WikiLink, NestedTemplate>;

struct ParamValue {
  std::vector<Fragment> fragments;  // adjacent Text fragments are merged
  friend bool operator==(const ParamValue&, const ParamValue&) = default;
};

struct TemplateCall {
  std::string name;  // normalized
  std::vector<std::pair<std::string, ParamValue>> params;
  std::size_t depth = 0;  // 0 for top-level calls

  const ParamValue* param(std::string_view key) const;
  friend bool operator==(const TemplateCall&, const TemplateCall&) = default;
};

inline bool operator==(const NestedTemplate& a, const NestedTemplate& b) {
  if (a.call == b.call) return true;
  return a.call && b.call && *a.call == *b.call;
}

struct PlainText {
  std::string value;
  friend bool operator==(const PlainText&, const PlainText&) = default;
};
struct LinkRef {
  std::size_t index;
  friend bool operator==(const LinkRef&, const LinkRef&) = default;
};
struct TemplateRef {
  std::size_t index;
  friend bool operator==(const TemplateRef&, const TemplateRef&) = default;
};
struct Heading {
  int level;
  std::string text;
  friend bool operator==(const Heading&, const Heading&) = default;
};

using ContentNode = std::variant<PlainText, LinkRef, TemplateRef, Heading>;

struct ParsedPage {
  std::string title;
  std::vector<TemplateCall> templates;  // top-level, document order
  std::vector<WikiLink> links;          // every link, including those inside templates
  std::vector<ContentNode> body;
  std::optional<std::string> redirect_target;

  bool is_redirect() const { return redirect_target.has_value(); }
  friend bool operator==(const ParsedPage&, const ParsedPage&) = default;
};

// Total: never throws on any input.
ParsedPage parse_wikitext(std::string_view title, std::string_view source);

// Removes comments, references and HTML tags. Exposed for tests.
std::string preprocess(std::string_view source);

// Text of a parameter value: link anchors kept, nested templates dropped,
// quote markup removed, whitespace collapsed.
std::string plain_text(const ParamValue& value);

std::string strip_to_plaintext(const ParsedPage& page);

std::string first_sentences(std::string_view text, std::size_t n);

// Template-name normalization: trimmed, whitespace/underscore runs collapsed,
// first character uppercased.
std::string normalize_name(std::string_view name);

}  // namespace kgod::wikitext
