#include <gtest/gtest.h>

#include <algorithm>

#include "kgod/wikitext.hpp"
#include "support/generators.hpp"

using namespace kgod::wikitext;

namespace {

std::size_t count_occurrences(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t at = s.find(needle); at != std::string_view::npos; at = s.find(needle, at + needle.size())) ++n;
  return n;
}

const WikiLink& link_of(const Fragment& f) { return std::get<WikiLink>(f); }

}  // namespace

TEST(ParseWikitextTest, InfoboxWithLinkAndText) {
  const ParsedPage page = parse_wikitext("Lost Highway", "{{Infobox film|director=[[David Lynch]]|runtime=134}}");
  ASSERT_EQ(page.templates.size(), 1u);
  const TemplateCall& call = page.templates[0];
  EXPECT_EQ(call.name, "Infobox film");
  EXPECT_EQ(call.depth, 0u);
  ASSERT_EQ(call.params.size(), 2u);
  EXPECT_EQ(call.params[0].first, "director");
  ASSERT_EQ(call.params[0].second.fragments.size(), 1u);
  EXPECT_EQ(link_of(call.params[0].second.fragments[0]).target, "David Lynch");
  EXPECT_EQ(call.params[1].first, "runtime");
  ASSERT_EQ(call.params[1].second.fragments.size(), 1u);
  EXPECT_EQ(std::get<Text>(call.params[1].second.fragments[0]).value, "134");
  ASSERT_EQ(page.links.size(), 1u);
  EXPECT_EQ(page.links[0].anchor, "David Lynch");
}

TEST(ParseWikitextTest, EmptySource) {
  const ParsedPage page = parse_wikitext("X", "");
  EXPECT_TRUE(page.templates.empty());
  EXPECT_TRUE(page.links.empty());
  EXPECT_TRUE(page.body.empty());
  EXPECT_FALSE(page.is_redirect());
}

TEST(ParseWikitextTest, Redirect) {
  EXPECT_EQ(parse_wikitext("LH", "#REDIRECT [[Lost Highway (film)]]").redirect_target, "Lost Highway (film)");
  EXPECT_EQ(parse_wikitext("LH", "  #redirect:[[lost_highway#Plot]]").redirect_target, "Lost highway");
  EXPECT_FALSE(parse_wikitext("LH", "Text #REDIRECT [[X]]").redirect_target);
}

TEST(ParseWikitextTest, NestedTemplateInParameter) {
  const ParsedPage page =
      parse_wikitext("B", "{{Infobox film|based_on={{Based on|''Novel''|[[Author X]]}}}}");
  ASSERT_EQ(page.templates.size(), 1u);
  const ParamValue* based_on = page.templates[0].param("based_on");
  ASSERT_NE(based_on, nullptr);
  ASSERT_EQ(based_on->fragments.size(), 1u);
  const auto& nested = std::get<NestedTemplate>(based_on->fragments[0]);
  EXPECT_EQ(nested->name, "Based on");
  EXPECT_EQ(nested->depth, 1u);
  ASSERT_EQ(nested->params.size(), 2u);
  EXPECT_EQ(nested->params[0].first, "1");
  EXPECT_EQ(nested->params[1].first, "2");
  ASSERT_EQ(page.links.size(), 1u);
  EXPECT_EQ(page.links[0].target, "Author X");
}

TEST(ParseWikitextTest, NameNormalizationAndDuplicateKeys) {
  const ParsedPage page = parse_wikitext("T", "{{ infobox_film \n| a = 1 | b=2 | a = 3 }}");
  ASSERT_EQ(page.templates.size(), 1u);
  const TemplateCall& call = page.templates[0];
  EXPECT_EQ(call.name, "Infobox film");
  ASSERT_EQ(call.params.size(), 2u);
  EXPECT_EQ(call.params[0].first, "b");
  EXPECT_EQ(call.params[1].first, "a");
  EXPECT_EQ(plain_text(call.params[1].second), "3");
}

TEST(ParseWikitextTest, ExplicitEmptyParameter) {
  const ParsedPage page = parse_wikitext("T", "{{X|runtime=|other= }}");
  ASSERT_EQ(page.templates.size(), 1u);
  EXPECT_TRUE(page.templates[0].param("runtime")->fragments.empty());
  EXPECT_TRUE(page.templates[0].param("other")->fragments.empty());
}

TEST(ParseWikitextTest, ParserFunctionsAndMagicWordsAreNotTemplates) {
  const ParsedPage page = parse_wikitext("T", "{{#if:x|[[A]]}}{{DEFAULTSORT:Lynch, David}}{{Real}}");
  ASSERT_EQ(page.templates.size(), 1u);
  EXPECT_EQ(page.templates[0].name, "Real");
}

TEST(ParseWikitextTest, LinkForms) {
  const ParsedPage page = parse_wikitext(
      "T", "[[Lost Highway|the film]] [[Mulholland Drive (film)|]] [[David Lynch#Career]] [[apple]]s [[#Plot|plot]]");
  ASSERT_EQ(page.links.size(), 4u);
  EXPECT_EQ(page.links[0].target, "Lost Highway");
  EXPECT_EQ(page.links[0].anchor, "the film");
  EXPECT_EQ(page.links[1].target, "Mulholland Drive (film)");
  EXPECT_EQ(page.links[1].anchor, "Mulholland Drive");
  EXPECT_EQ(page.links[2].target, "David Lynch");
  EXPECT_EQ(page.links[2].fragment, "Career");
  EXPECT_EQ(page.links[3].target, "Apple");
  EXPECT_EQ(page.links[3].anchor, "apples");
  EXPECT_EQ(strip_to_plaintext(page), "the film Mulholland Drive David Lynch#Career apples plot");
}

TEST(ParseWikitextTest, CommentsAndReferencesRemoved) {
  const ParsedPage page = parse_wikitext(
      "T", "A<!-- [[Hidden]] -->B<ref name=\"x\">[[Cited]]</ref>C<ref name=\"y\"/>D<!-- unterminated [[Z]]");
  EXPECT_TRUE(page.links.empty());
  EXPECT_EQ(strip_to_plaintext(page), "ABCD");
}

TEST(ParseWikitextTest, HtmlTagsUnwrapped) {
  const ParsedPage page = parse_wikitext("T", "<small>small</small> text<br/>next <span class=\"x\">y</span> a < b");
  EXPECT_EQ(strip_to_plaintext(page), "small text next y a < b");
}

TEST(ParseWikitextTest, HeadingsAndTables) {
  const ParsedPage page = parse_wikitext("T", "Intro.\n== Plot ==\nStory.\n{|\n| [[InTable]]\n|}\nAfter.");
  bool saw_heading = false;
  for (const ContentNode& node : page.body) {
    if (const auto* h = std::get_if<Heading>(&node)) {
      saw_heading = true;
      EXPECT_EQ(h->level, 2);
      EXPECT_EQ(h->text, "Plot");
    }
  }
  EXPECT_TRUE(saw_heading);
  EXPECT_TRUE(page.links.empty());
  EXPECT_EQ(strip_to_plaintext(page), "Intro. Story. After.");
}

TEST(ParseWikitextTest, UnmatchedBracesDegradeToText) {
  const ParsedPage page = parse_wikitext("T", "a {{b [[c]] d }} e ]] f [[g");
  EXPECT_TRUE(page.templates.empty());
  ASSERT_EQ(page.links.size(), 1u);
  EXPECT_EQ(page.links[0].target, "C");
}

TEST(ParseWikitextTest, UnclosedTemplateKeepsInnerStructure) {
  const ParsedPage page = parse_wikitext("T", "{{Broken|x= {{Infobox film|runtime=1}} [[A]]");
  ASSERT_EQ(page.templates.size(), 1u);
  EXPECT_EQ(page.templates[0].name, "Infobox film");
  EXPECT_EQ(page.templates[0].depth, 0u);
  ASSERT_EQ(page.links.size(), 1u);
}

TEST(ParseWikitextTest, LinksInsideTemplatesInDocumentOrder) {
  const ParsedPage page = parse_wikitext("T", "{{X|a=[[One]]|b={{Y|[[Two]]}}}} [[Three]]");
  ASSERT_EQ(page.links.size(), 3u);
  EXPECT_EQ(page.links[0].target, "One");
  EXPECT_EQ(page.links[1].target, "Two");
  EXPECT_EQ(page.links[2].target, "Three");
  const auto* ref = std::get_if<LinkRef>(&page.body.back());
  ASSERT_NE(ref, nullptr);
  EXPECT_EQ(ref->index, 2u);
}

TEST(ParseWikitextTest, InvalidUtf8BecomesReplacementCharacter) {
  const ParsedPage page = parse_wikitext("T", std::string("a\xff" "b"));
  EXPECT_EQ(strip_to_plaintext(page), "a\xEF\xBF\xBD" "b");
}

TEST(StripToPlaintextTest, LeadSentence) {
  const ParsedPage page =
      parse_wikitext("Lost Highway", "'''Lost Highway''' is a 1997 film directed by [[David Lynch]].");
  EXPECT_EQ(strip_to_plaintext(page), "Lost Highway is a 1997 film directed by David Lynch.");
}

TEST(StripToPlaintextTest, EmptyAndInfoboxOnly) {
  EXPECT_EQ(strip_to_plaintext(parse_wikitext("X", "")), "");
  EXPECT_EQ(strip_to_plaintext(parse_wikitext("X", "{{Infobox film|name=X|director=[[Y]]}}")), "");
}

TEST(StripToPlaintextTest, FileCategoryAndExternalLinks) {
  const ParsedPage page = parse_wikitext(
      "X", "[[File:Poster.jpg|thumb|A [[poster]]]]Body [http://example.org site] text.[[Category:Films]] [[de:X]]");
  EXPECT_EQ(strip_to_plaintext(page), "Body site text.");
}

TEST(FirstSentencesTest, Examples) {
  EXPECT_EQ(first_sentences("A. B. C is here. Second sentence. Third.", 1), "A. B. C is here.");
  EXPECT_EQ(first_sentences("One sentence only", 3), "One sentence only");
  EXPECT_EQ(first_sentences("First. Second. Third.", 2), "First. Second.");
  EXPECT_EQ(first_sentences("Is it? Yes! Done.", 2), "Is it? Yes!");
  EXPECT_EQ(first_sentences("Born in 1946. in lowercase. Next one.", 1), "Born in 1946. in lowercase.");
  EXPECT_EQ(first_sentences("Directed by J. Smith. Then.", 1), "Directed by J. Smith.");
}

// --- properties ----------------------------------------------------------

namespace {

std::string random_wikitext(kgod::prop::Gen& gen, std::size_t len) {
  static const std::vector<std::string> pieces{
      "{{", "}}", "[[", "]]", "|", "=", "a", "B c", "\n", "'''", "''", "{|", "|}", "==", "#REDIRECT ",
      "<ref>", "</ref>", "<b>", "x", "Infobox film", "[", "]", "{", "}", "\xff", "\xc3\xa9", ":", "File:"};
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += gen.pick(pieces);
  return s;
}

}  // namespace

TEST(WikitextPropertyTest, TotalityAndStructureBound) {
  kgod::prop::Gen gen(42);
  for (int i = 0; i < 3000; ++i) {
    std::string s = random_wikitext(gen, gen.below(60));
    if (gen.coin(10)) {
      s.clear();
      for (std::size_t j = gen.below(200); j > 0; --j) s += static_cast<char>(gen.below(256));
    }
    ParsedPage page;
    ASSERT_NO_THROW(page = parse_wikitext("T", s)) << s;
    // Markup can only be joined by comment/tag removal, so bound on the preprocessed text.
    const std::string pre = preprocess(s);
    EXPECT_LE(page.templates.size(), count_occurrences(pre, "{{")) << s;
    EXPECT_LE(page.links.size(), count_occurrences(pre, "[[")) << s;
    for (const WikiLink& l : page.links) EXPECT_FALSE(l.target.empty()) << s;
    for (const ContentNode& n : page.body) {
      if (const auto* r = std::get_if<LinkRef>(&n)) EXPECT_LT(r->index, page.links.size());
      if (const auto* r = std::get_if<TemplateRef>(&n)) EXPECT_LT(r->index, page.templates.size());
    }
    EXPECT_NO_THROW(strip_to_plaintext(page));
  }
}

TEST(WikitextPropertyTest, CommentOpacity) {
  kgod::prop::Gen gen(99);
  for (int i = 0; i < 2000; ++i) {
    const std::string base = random_wikitext(gen, gen.below(40));
    // Positions are drawn in base and filled from the back so comments never nest.
    std::vector<std::size_t> spots;
    for (std::size_t k = gen.below(4); k > 0; --k) {
      const std::size_t at = gen.below(base.size() + 1);
      // Avoid splitting a multi-byte sequence or a "<ref"/"<b>" tag in half.
      if (at > 0 && at < base.size() &&
          ((static_cast<unsigned char>(base[at]) & 0xC0) == 0x80 ||
           std::string_view("<>/refb").find(base[at - 1]) != std::string_view::npos)) {
        continue;
      }
      spots.push_back(at);
    }
    std::sort(spots.rbegin(), spots.rend());
    std::string with_comments = base;
    for (std::size_t at : spots) {
      with_comments.insert(at, "<!--" + random_wikitext(gen, gen.below(6)) + "-->");
    }
    EXPECT_EQ(parse_wikitext("T", with_comments), parse_wikitext("T", base)) << with_comments;
  }
}

TEST(WikitextPropertyTest, NestingCapDegradesToText) {
  for (std::size_t depth : {15u, 16u, 17u, 40u, 5000u}) {
    std::string s;
    for (std::size_t i = 0; i < depth; ++i) s += "{{T" + std::to_string(i) + "|";
    s += "x";
    for (std::size_t i = 0; i < depth; ++i) s += "}}";
    ParsedPage page;
    ASSERT_NO_THROW(page = parse_wikitext("T", s));
    auto max_depth = [](const TemplateCall& c, auto&& self) -> std::size_t {
      std::size_t d = c.depth;
      for (const auto& [k, v] : c.params) {
        for (const Fragment& f : v.fragments) {
          if (const auto* n = std::get_if<NestedTemplate>(&f)) d = std::max(d, self(**n, self));
        }
      }
      return d;
    };
    for (const TemplateCall& t : page.templates) EXPECT_LT(max_depth(t, max_depth), kMaxNesting);
  }
  // Unclosed openers far beyond the cap.
  EXPECT_NO_THROW(parse_wikitext("T", std::string(100000, '{')));
  EXPECT_NO_THROW(parse_wikitext("T", std::string(100000, '[')));
}
