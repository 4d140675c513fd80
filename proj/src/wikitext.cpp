#include "kgod/wikitext.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <numeric>

#include "kgod/rdf.hpp"
#include "kgod/text.hpp"

namespace kgod::wikitext {

namespace {

using text::iequals;
using text::istarts_with;

constexpr std::array<std::string_view, 78> kHtmlTags{
    "abbr", "b",        "bdi",    "bdo",     "big",        "blockquote", "br",       "caption", "ce",
    "center", "chem",   "cite",   "code",    "data",       "dd",         "del",      "dfn",     "div",
    "dl",   "dt",       "em",     "font",    "gallery",    "h1",         "h2",       "h3",      "h4",
    "h5",   "h6",       "hiero",  "hr",      "i",          "imagemap",   "includeonly", "indicator", "ins",
    "kbd",  "li",       "mapframe", "mark",  "math",       "noinclude",  "nowiki",   "ol",      "onlyinclude",
    "p",    "poem",     "pre",    "q",       "references", "rp",         "rt",       "ruby",    "s",
    "samp", "score",    "section", "small",  "source",     "span",       "strike",   "strong",  "sub",
    "sup",  "syntaxhighlight", "table", "tbody", "td",     "templatestyles", "th",   "thead",   "time",
    "timeline", "tr",   "tt",     "u",       "ul",         "var"};

constexpr std::array<std::string_view, 24> kMagicWords{
    "DEFAULTSORT", "DISPLAYTITLE", "PAGENAME",      "PAGENAMEE",    "FULLPAGENAME", "BASEPAGENAME",
    "SUBPAGENAME", "NAMESPACE",    "SITENAME",      "SERVER",       "CURRENTYEAR",  "CURRENTMONTH",
    "CURRENTDAY",  "CURRENTTIME",  "LOCALYEAR",     "NUMBEROFARTICLES", "REVISIONID", "LC",
    "UC",          "LCFIRST",      "UCFIRST",       "FORMATNUM",    "PLURAL",       "GRAMMAR"};

bool is_known_tag(std::string_view name) {
  return std::any_of(kHtmlTags.begin(), kHtmlTags.end(), [&](std::string_view t) { return iequals(t, name); });
}

// Length of an HTML-ish tag starting at s[pos] == '<', with its name, or 0.
std::size_t match_tag(std::string_view s, std::size_t pos, std::string& name, bool& closing, bool& self_closing) {
  std::size_t i = pos + 1;
  closing = false;
  if (i < s.size() && s[i] == '/') {
    closing = true;
    ++i;
  }
  const std::size_t name_start = i;
  while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
  if (i == name_start || !std::isalpha(static_cast<unsigned char>(s[name_start]))) return 0;
  name.assign(s.substr(name_start, i - name_start));
  if (i >= s.size()) return 0;
  if (s[i] != '>' && s[i] != '/' && !text::is_space(s[i])) return 0;
  const std::size_t close = s.find_first_of("<>", i);
  if (close == std::string_view::npos || s[close] == '<') return 0;
  self_closing = close > pos && s[close - 1] == '/';
  return close + 1 - pos;
}

std::size_t ifind(std::string_view s, std::string_view needle, std::size_t from) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i) {
    if (iequals(s.substr(i, needle.size()), needle)) return i;
  }
  return std::string_view::npos;
}

std::string remove_comments(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t open = s.find("<!--", pos);
    if (open == std::string_view::npos) {
      out.append(s.substr(pos));
      break;
    }
    out.append(s.substr(pos, open - pos));
    const std::size_t close = s.find("-->", open + 4);
    if (close == std::string_view::npos) break;
    pos = close + 3;
  }
  return out;
}

std::string remove_refs_and_tags(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  std::string name;
  while (pos < s.size()) {
    if (s[pos] != '<') {
      const std::size_t next = s.find('<', pos);
      const std::size_t end = next == std::string_view::npos ? s.size() : next;
      out.append(s.substr(pos, end - pos));
      pos = end;
      continue;
    }
    bool closing = false;
    bool self_closing = false;
    const std::size_t len = match_tag(s, pos, name, closing, self_closing);
    if (len == 0) {
      out += '<';
      ++pos;
      continue;
    }
    if (iequals(name, "ref")) {
      pos += len;
      if (!closing && !self_closing) {
        const std::size_t end_tag = ifind(s, "</ref", pos);
        if (end_tag != std::string_view::npos) {
          const std::size_t gt = s.find('>', end_tag);
          pos = gt == std::string_view::npos ? s.size() : gt + 1;
        }
      }
      continue;
    }
    if (is_known_tag(name)) {
      if (iequals(name, "br")) out += ' ';
      pos += len;
      continue;
    }
    out.append(s.substr(pos, len));
    pos += len;
  }
  return out;
}

// Removes __TOC__-style behavior switches.
std::string remove_behavior_switches(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    if (s.substr(pos).starts_with("__")) {
      std::size_t i = pos + 2;
      while (i < s.size() && std::isupper(static_cast<unsigned char>(s[i]))) ++i;
      if (i > pos + 2 && s.substr(i).starts_with("__")) {
        pos = i + 2;
        continue;
      }
    }
    out += s[pos++];
  }
  return out;
}

// --- parse tree under construction -------------------------------------

struct LinkItem {
  WikiLink link;
  std::size_t id;  // registration id in Context::links
};
struct TemplateItem {
  std::shared_ptr<TemplateCall> call;
};
using Item = std::variant<Text, LinkItem, TemplateItem, Heading>;
using Level = std::vector<Item>;

void append_text(Level& level, std::string_view s) {
  if (s.empty()) return;
  if (!level.empty()) {
    if (auto* t = std::get_if<Text>(&level.back())) {
      t->value.append(s);
      return;
    }
  }
  level.emplace_back(Text{std::string(s)});
}

void append_items(Level& level, Level&& items) {
  for (Item& item : items) {
    if (auto* t = std::get_if<Text>(&item)) {
      append_text(level, t->value);
    } else {
      level.push_back(std::move(item));
    }
  }
}

std::string remove_quote_markup(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '\'') {
      out += s[i++];
      continue;
    }
    std::size_t run = 0;
    while (i + run < s.size() && s[i + run] == '\'') ++run;
    if (run == 1) {
      out += '\'';
    } else if (run == 4) {
      out += '\'';
    } else if (run > 5) {
      out.append(run - 5, '\'');
    }
    i += run;
  }
  return out;
}

// Plain text of an item list: link anchors kept, templates dropped.
std::string items_text(const Level& items) {
  std::string out;
  for (const Item& item : items) {
    if (const auto* t = std::get_if<Text>(&item)) {
      out += t->value;
    } else if (const auto* l = std::get_if<LinkItem>(&item)) {
      if (!l->link.is_non_article()) out += l->link.anchor;
    }
  }
  return out;
}

bool is_magic_name(std::string_view raw) {
  std::string_view head = text::trim(raw);
  const std::size_t colon = head.find(':');
  if (colon != std::string_view::npos) head = text::trim(head.substr(0, colon));
  return std::any_of(kMagicWords.begin(), kMagicWords.end(), [&](std::string_view m) { return m == head; });
}

std::string strip_template_prefixes(std::string_view name) {
  name = text::trim(name);
  for (std::string_view prefix : {"subst:", "safesubst:", "msgnw:", "Template:"}) {
    if (istarts_with(name, prefix)) name = text::trim(name.substr(prefix.size()));
  }
  return std::string(name);
}

std::string pipe_trick(std::string_view target) {
  std::string_view t = target;
  if (const std::size_t colon = t.find(':'); colon != std::string_view::npos) t = t.substr(colon + 1);
  if (t.ends_with(")")) {
    if (const std::size_t open = t.rfind(" ("); open != std::string_view::npos) t = t.substr(0, open);
  } else if (const std::size_t comma = t.find(", "); comma != std::string_view::npos) {
    t = t.substr(0, comma);
  }
  return std::string(text::trim(t));
}

ParamValue to_param_value(Level&& items) {
  ParamValue value;
  for (Item& item : items) {
    if (auto* t = std::get_if<Text>(&item)) {
      if (t->value.empty()) continue;
      if (!value.fragments.empty()) {
        if (auto* prev = std::get_if<Text>(&value.fragments.back())) {
          prev->value += t->value;
          continue;
        }
      }
      value.fragments.emplace_back(std::move(*t));
    } else if (auto* l = std::get_if<LinkItem>(&item)) {
      value.fragments.emplace_back(std::move(l->link));
    } else if (auto* tpl = std::get_if<TemplateItem>(&item)) {
      value.fragments.emplace_back(NestedTemplate{std::move(tpl->call)});
    }
  }
  return value;
}

void trim_param_value(ParamValue& value) {
  auto& f = value.fragments;
  if (!f.empty()) {
    if (auto* t = std::get_if<Text>(&f.front())) {
      const std::size_t b = t->value.find_first_not_of(" \t\n\r\f\v");
      t->value = b == std::string::npos ? std::string() : t->value.substr(b);
      if (t->value.empty()) f.erase(f.begin());
    }
  }
  if (!f.empty()) {
    if (auto* t = std::get_if<Text>(&f.back())) {
      const std::size_t e = t->value.find_last_not_of(" \t\n\r\f\v");
      t->value = e == std::string::npos ? std::string() : t->value.substr(0, e + 1);
      if (t->value.empty()) f.pop_back();
    }
  }
}

void set_depth(TemplateCall& call, std::size_t depth) {
  call.depth = depth;
  for (auto& [key, value] : call.params) {
    for (Fragment& frag : value.fragments) {
      if (auto* nested = std::get_if<NestedTemplate>(&frag)) {
        set_depth(*std::const_pointer_cast<TemplateCall>(nested->call), depth + 1);
      }
    }
  }
}

struct Context {
  std::vector<std::pair<std::size_t, WikiLink>> links;  // (source offset, link)
};

struct Frame {
  enum class Kind { Template, Link } kind;
  std::size_t offset;
  std::vector<Level> parts;
};

// Single-pass stack machine. Unmatched openers degrade to text; nothing backtracks.
class Machine {
 public:
  Machine(Context& ctx, std::string_view src, std::size_t base, bool line_constructs)
      : ctx_(ctx), src_(src), base_(base), line_constructs_(line_constructs) {}

  Level run() {
    std::size_t pos = 0;
    while (pos < src_.size()) {
      const bool at_line_start = pos == 0 || src_[pos - 1] == '\n';
      if (line_constructs_ && stack_.empty() && at_line_start) {
        if (const std::size_t skip = try_table(pos); skip > 0) {
          pos += skip;
          continue;
        }
        if (const std::size_t skip = try_heading(pos); skip > 0) {
          pos += skip;
          continue;
        }
      }
      const char c = src_[pos];
      if (c == '{' || c == '}' || c == '[' || c == ']') {
        std::size_t run = 1;
        while (pos + run < src_.size() && src_[pos + run] == c) ++run;
        handle_run(c, pos, run);
        pos += run;
        pos += link_trail(pos);
        continue;
      }
      if (c == '|' && !stack_.empty()) {
        stack_.back().parts.emplace_back();
        ++pos;
        continue;
      }
      const std::size_t next = src_.find_first_of("{}[]|\n", pos + 1);
      std::size_t end = next == std::string_view::npos ? src_.size() : next;
      if (c == '\n') end = pos + 1;
      append_text(current(), src_.substr(pos, end - pos));
      pos = end;
    }
    while (!stack_.empty()) degrade_top();
    return std::move(top_);
  }

 private:
  Level& current() { return stack_.empty() ? top_ : stack_.back().parts.back(); }

  void handle_run(char c, std::size_t pos, std::size_t run) {
    if (c == '{' || c == '[') {
      const auto kind = c == '{' ? Frame::Kind::Template : Frame::Kind::Link;
      if (run < 2) {
        append_text(current(), src_.substr(pos, run));
        return;
      }
      // Extra leading braces are literal text; the innermost pair opens a frame.
      append_text(current(), src_.substr(pos, run - 2));
      if (stack_.size() >= kMaxNesting) {
        append_text(current(), src_.substr(pos + run - 2, 2));
        return;
      }
      stack_.push_back(Frame{kind, base_ + pos + run - 2, {Level{}}});
      return;
    }
    std::size_t remaining = run;
    std::size_t at = pos;
    while (remaining >= 2) {
      const bool closed = c == '}' ? close_template() : close_link();
      if (!closed) break;
      remaining -= 2;
      at += 2;
    }
    append_text(current(), src_.substr(at, remaining));
    if (remaining > 0) last_closed_link_ = false;
  }

  // Closes the innermost template frame, degrading any link frames above it.
  bool close_template() {
    last_closed_link_ = false;
    const auto it = std::find_if(stack_.rbegin(), stack_.rend(),
                                 [](const Frame& f) { return f.kind == Frame::Kind::Template; });
    if (it == stack_.rend()) return false;
    while (stack_.back().kind != Frame::Kind::Template) degrade_top();
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    finish_template(std::move(frame));
    return true;
  }

  bool close_link() {
    last_closed_link_ = false;
    if (stack_.empty() || stack_.back().kind != Frame::Kind::Link) return false;
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    finish_link(std::move(frame));
    return true;
  }

  void degrade_top() {
    Frame frame = std::move(stack_.back());
    stack_.pop_back();
    degrade(std::move(frame));
  }

  void degrade(Frame&& frame) {
    Level& out = current();
    append_text(out, frame.kind == Frame::Kind::Template ? "{{" : "[[");
    for (std::size_t i = 0; i < frame.parts.size(); ++i) {
      if (i > 0) append_text(out, "|");
      append_items(out, std::move(frame.parts[i]));
    }
  }

  void finish_template(Frame&& frame) {
    bool dynamic_name = false;
    for (const Item& item : frame.parts[0]) {
      if (!std::holds_alternative<Text>(item)) dynamic_name = true;
    }
    const std::string raw_name = items_text(frame.parts[0]);
    const std::string name = normalize_name(strip_template_prefixes(raw_name));
    if (name.empty() && !dynamic_name) {
      degrade(std::move(frame));
      return;
    }
    // Parser functions, magic words and computed names are dropped.
    if (dynamic_name || name.front() == '#' || is_magic_name(raw_name)) return;

    auto call = std::make_shared<TemplateCall>();
    call->name = name;
    std::size_t positional = 0;
    for (std::size_t i = 1; i < frame.parts.size(); ++i) {
      Level& part = frame.parts[i];
      std::string key;
      bool named = false;
      if (!part.empty()) {
        if (auto* t = std::get_if<Text>(&part.front())) {
          const std::size_t eq = t->value.find('=');
          if (eq != std::string::npos) {
            key = std::string(text::trim(std::string_view(t->value).substr(0, eq)));
            t->value.erase(0, eq + 1);
            named = true;
          }
        }
      }
      if (!named) key = std::to_string(++positional);
      ParamValue value = to_param_value(std::move(part));
      if (named) trim_param_value(value);
      std::erase_if(call->params, [&](const auto& p) { return p.first == key; });
      call->params.emplace_back(std::move(key), std::move(value));
    }
    current().emplace_back(TemplateItem{std::move(call)});
  }

  void finish_link(Frame&& frame) {
    std::string raw;
    for (const Item& item : frame.parts[0]) {
      const auto* t = std::get_if<Text>(&item);
      if (t == nullptr) {
        degrade(std::move(frame));
        return;
      }
      raw += t->value;
    }
    if (raw.find_first_of("\n{}<>[]") != std::string::npos) {
      degrade(std::move(frame));
      return;
    }
    std::string_view spec = text::trim(raw);
    if (spec.starts_with(':')) spec = text::trim(spec.substr(1));
    std::string_view target_part = spec;
    std::optional<std::string> fragment;
    if (const std::size_t hash = spec.find('#'); hash != std::string_view::npos) {
      target_part = spec.substr(0, hash);
      fragment = std::string(spec.substr(hash + 1));
    }
    const std::string target = normalize_title(target_part);

    std::string anchor;
    if (frame.parts.size() == 1) {
      anchor = std::string(spec);
    } else {
      Level anchor_items;
      for (std::size_t i = 1; i < frame.parts.size(); ++i) {
        if (i > 1) append_text(anchor_items, "|");
        append_items(anchor_items, std::move(frame.parts[i]));
      }
      anchor = text::collapse_whitespace(remove_quote_markup(items_text(anchor_items)));
      if (anchor.empty() && frame.parts.size() == 2) anchor = pipe_trick(target_part);
    }

    if (target.empty()) {
      // Same-page section links carry no target; keep their text.
      append_text(current(), anchor);
      return;
    }
    WikiLink link{target, anchor, fragment};
    const std::size_t id = ctx_.links.size();
    ctx_.links.emplace_back(frame.offset, link);
    current().emplace_back(LinkItem{std::move(link), id});
    last_closed_link_ = true;
  }

  // Letters directly after a closed article link extend its anchor.
  std::size_t link_trail(std::size_t pos) {
    if (!last_closed_link_) return 0;
    last_closed_link_ = false;
    std::size_t end = pos;
    while (end < src_.size() && src_[end] >= 'a' && src_[end] <= 'z') ++end;
    if (end == pos) return 0;
    auto& item = std::get<LinkItem>(current().back());
    if (item.link.is_non_article()) return 0;
    item.link.anchor.append(src_.substr(pos, end - pos));
    ctx_.links[item.id].second.anchor = item.link.anchor;
    return end - pos;
  }

  // Tables are dropped; returns the number of bytes consumed.
  std::size_t try_table(std::size_t pos) {
    std::size_t i = pos;
    while (i < src_.size() && (src_[i] == ' ' || src_[i] == ':')) ++i;
    if (!src_.substr(i).starts_with("{|")) return 0;
    std::size_t depth = 0;
    std::size_t line = pos;
    while (line < src_.size()) {
      std::size_t eol = src_.find('\n', line);
      if (eol == std::string_view::npos) eol = src_.size();
      const std::string_view l = text::trim(src_.substr(line, eol - line));
      if (l.starts_with("{|")) ++depth;
      if (l.starts_with("|}") && --depth == 0) return std::min(eol + 1, src_.size()) - pos;
      line = eol + 1;
    }
    return src_.size() - pos;
  }

  std::size_t try_heading(std::size_t pos) {
    if (src_[pos] != '=') return 0;
    std::size_t eol = src_.find('\n', pos);
    if (eol == std::string_view::npos) eol = src_.size();
    std::string_view line = src_.substr(pos, eol - pos);
    while (!line.empty() && text::is_space(line.back())) line.remove_suffix(1);
    std::size_t lead = 0;
    while (lead < line.size() && line[lead] == '=') ++lead;
    std::size_t trail = 0;
    while (trail < line.size() && line[line.size() - 1 - trail] == '=') ++trail;
    const std::size_t level = std::min({lead, trail, std::size_t{6}});
    if (level == 0 || 2 * level >= line.size()) return 0;
    const std::string_view inner = line.substr(level, line.size() - 2 * level);
    Machine sub(ctx_, inner, base_ + pos + level, false);
    const std::string heading = text::collapse_whitespace(remove_quote_markup(items_text(sub.run())));
    top_.emplace_back(Heading{static_cast<int>(level), heading});
    return eol - pos;
  }

  Context& ctx_;
  std::string_view src_;
  std::size_t base_;
  bool line_constructs_;
  Level top_;
  std::vector<Frame> stack_;
  bool last_closed_link_ = false;
};

std::optional<std::string> detect_redirect(std::string_view s) {
  s = text::trim(s);
  if (!istarts_with(s, "#redirect")) return std::nullopt;
  s.remove_prefix(9);
  s = text::trim(s);
  if (s.starts_with(':')) s = text::trim(s.substr(1));
  if (!s.starts_with("[[")) return std::nullopt;
  s.remove_prefix(2);
  const std::size_t end = s.find_first_of("]|\n");
  if (end == std::string_view::npos) return std::nullopt;
  std::string_view target = s.substr(0, end);
  if (const std::size_t hash = target.find('#'); hash != std::string_view::npos) target = target.substr(0, hash);
  if (target.starts_with(':')) target.remove_prefix(1);
  std::string normalized = normalize_title(target);
  if (normalized.empty()) return std::nullopt;
  return normalized;
}

std::string unwrap_external_links(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (pos < s.size()) {
    const std::size_t open = s.find('[', pos);
    if (open == std::string_view::npos) {
      out.append(s.substr(pos));
      break;
    }
    out.append(s.substr(pos, open - pos));
    const std::string_view rest = s.substr(open + 1);
    const bool is_url = istarts_with(rest, "http://") || istarts_with(rest, "https://") ||
                        istarts_with(rest, "ftp://") || rest.starts_with("//");
    const std::size_t close = s.find_first_of("]\n", open);
    if (!is_url || close == std::string_view::npos || s[close] != ']') {
      out += '[';
      pos = open + 1;
      continue;
    }
    const std::string_view inner = s.substr(open + 1, close - open - 1);
    if (const std::size_t space = inner.find(' '); space != std::string_view::npos) {
      out.append(inner.substr(space + 1));
    }
    pos = close + 1;
  }
  return out;
}

// Removes list and indentation markers at line starts.
std::string strip_line_markers(std::string_view s, bool at_line_start) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (at_line_start && (c == '*' || c == '#' || c == ':' || c == ';')) continue;
    at_line_start = c == '\n';
    out += c;
  }
  return out;
}

std::string tidy(std::string s) {
  // Parentheses emptied by dropped templates, and spaces before punctuation.
  for (std::string_view junk : {"( )", "()"}) {
    for (std::size_t at = s.find(junk); at != std::string::npos; at = s.find(junk)) s.erase(at, junk.size());
  }
  s = text::collapse_whitespace(s);
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ' ' && i + 1 < s.size() && (s[i + 1] == ',' || s[i + 1] == '.' || s[i + 1] == ';')) continue;
    out += s[i];
  }
  return out;
}

}  // namespace

bool WikiLink::is_non_article() const {
  const std::size_t colon = target.find(':');
  if (colon == std::string::npos) return false;
  const std::string_view prefix = std::string_view(target).substr(0, colon);
  for (std::string_view ns : {"File", "Image", "Media", "Category"}) {
    if (iequals(prefix, ns)) return true;
  }
  // Interlanguage links such as [[de:Foo]] or [[zh-yue:Foo]].
  if (colon + 1 < target.size() && target[colon + 1] == ' ') return false;
  const std::string_view lang = prefix.substr(0, prefix.find('-'));
  if (lang.size() < 2 || lang.size() > 3) return false;
  if (!std::isupper(static_cast<unsigned char>(lang[0]))) return false;
  return std::all_of(lang.begin() + 1, lang.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

const ParamValue* TemplateCall::param(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string normalize_name(std::string_view name) {
  std::string s(name);
  for (char& c : s) {
    if (c == '_') c = ' ';
  }
  return text::upper_first(text::collapse_whitespace(s));
}

std::string preprocess(std::string_view source) {
  std::string s = text::sanitize_utf8(source);
  std::string unified;
  unified.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\r') {
      unified += '\n';
      if (i + 1 < s.size() && s[i + 1] == '\n') ++i;
    } else {
      unified += s[i];
    }
  }
  return remove_behavior_switches(remove_refs_and_tags(remove_comments(unified)));
}

ParsedPage parse_wikitext(std::string_view title, std::string_view source) {
  ParsedPage page;
  page.title = normalize_title(title);
  const std::string src = preprocess(source);
  page.redirect_target = detect_redirect(src);

  Context ctx;
  Level items = Machine(ctx, src, 0, true).run();

  // Links are numbered in order of their opening brackets.
  std::vector<std::size_t> order(ctx.links.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ctx.links[a].first < ctx.links[b].first; });
  std::vector<std::size_t> final_index(ctx.links.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    final_index[order[i]] = i;
    page.links.push_back(std::move(ctx.links[order[i]].second));
  }

  for (Item& item : items) {
    if (auto* t = std::get_if<Text>(&item)) {
      if (!page.body.empty()) {
        if (auto* prev = std::get_if<PlainText>(&page.body.back())) {
          prev->value += t->value;
          continue;
        }
      }
      page.body.emplace_back(PlainText{std::move(t->value)});
    } else if (auto* l = std::get_if<LinkItem>(&item)) {
      page.body.emplace_back(LinkRef{final_index[l->id]});
    } else if (auto* tpl = std::get_if<TemplateItem>(&item)) {
      set_depth(*tpl->call, 0);
      page.body.emplace_back(TemplateRef{page.templates.size()});
      page.templates.push_back(std::move(*tpl->call));
    } else if (auto* h = std::get_if<Heading>(&item)) {
      page.body.emplace_back(std::move(*h));
    }
  }
  return page;
}

std::string plain_text(const ParamValue& value) {
  std::string out;
  for (const Fragment& f : value.fragments) {
    if (const auto* t = std::get_if<Text>(&f)) {
      out += t->value;
    } else if (const auto* l = std::get_if<WikiLink>(&f)) {
      if (!l->is_non_article()) out += l->anchor;
    }
  }
  return text::collapse_whitespace(remove_quote_markup(out));
}

std::string strip_to_plaintext(const ParsedPage& page) {
  std::string out;
  bool line_start = true;
  for (const ContentNode& node : page.body) {
    if (const auto* t = std::get_if<PlainText>(&node)) {
      out += strip_line_markers(unwrap_external_links(remove_quote_markup(t->value)), line_start);
      if (!t->value.empty()) line_start = t->value.back() == '\n';
    } else if (const auto* l = std::get_if<LinkRef>(&node)) {
      const WikiLink& link = page.links[l->index];
      if (!link.is_non_article()) out += link.anchor;
      line_start = false;
    } else if (std::holds_alternative<Heading>(node)) {
      out += '\n';
      line_start = true;
    }
  }
  return tidy(std::move(out));
}

std::string first_sentences(std::string_view textv, std::size_t n) {
  const std::string_view s = text::trim(textv);
  if (n == 0) return {};
  std::size_t found = 0;
  std::size_t pos = 0;
  char32_t prev = 0;
  char32_t prev2 = 0;
  while (pos < s.size()) {
    const std::size_t at = pos;
    const char32_t cp = text::decode_utf8(s, pos);
    if (cp == '.' || cp == '!' || cp == '?') {
      bool boundary = false;
      if (pos >= s.size()) {
        boundary = true;
      } else if (text::is_space(s[pos])) {
        std::size_t look = pos;
        while (look < s.size() && text::is_space(s[look])) ++look;
        if (look >= s.size()) {
          boundary = true;
        } else {
          std::size_t tmp = look;
          boundary = text::is_upper(text::decode_utf8(s, tmp));
        }
      }
      // Initials such as "J. R." are not sentence ends.
      if (boundary && cp == '.' && text::is_upper(prev) && (prev2 == 0 || !text::is_letter(prev2))) {
        boundary = false;
      }
      if (boundary && ++found == n) return std::string(s.substr(0, at + 1));
    }
    prev2 = prev;
    prev = cp;
  }
  return std::string(s);
}

}  // namespace kgod::wikitext
