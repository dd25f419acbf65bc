#include <catch2/catch_amalgamated.hpp>

#include "html_check.hpp"

#include "rehearse/feedback/sanitizer.hpp"

#include <random>

using namespace rehearse::feedback;
using rehearse::testing::html_violation;

TEST_CASE("allowed tags survive without attributes") {
    CHECK(sanitize_html("<p class=\"x\" onclick=\"evil()\">Hi</p>") == "<p>Hi</p>");
    CHECK(sanitize_html("<UL><LI>one<LI>two</UL>") == "<ul><li>one<li>two</li></li></ul>");
    CHECK(sanitize_html("a<br/>b<br>c") == "a<br>b<br>c");
    CHECK(sanitize_html("<strong>x</strong><em>y</em><b>z</b><ol><li>q</li></ol>") ==
          "<strong>x</strong><em>y</em><b>z</b><ol><li>q</li></ol>");
}

TEST_CASE("dangerous elements are removed with their content") {
    CHECK(sanitize_html("a<script>alert(1)</script>b") == "ab");
    CHECK(sanitize_html("a<SCRIPT type=x>alert(1)</ScRiPt >b") == "ab");
    CHECK(sanitize_html("<style>p{}</style><p>x</p>") == "<p>x</p>");
    CHECK(sanitize_html("<iframe src=//evil></iframe>ok") == "ok");
    CHECK(sanitize_html("<svg onload=alert(1)><circle/></svg>ok") == "ok");
    CHECK(sanitize_html("<script>never closed") == "");
}

TEST_CASE("other tags are dropped, text kept") {
    CHECK(sanitize_html("<a href=\"javascript:x\">link</a>") == "link");
    CHECK(sanitize_html("<img src=x onerror=alert(1)>after") == "after");
    CHECK(sanitize_html("<div><span>t</span></div>") == "t");
    CHECK(sanitize_html("<!-- hidden --><!DOCTYPE html><?xml x?>v") == "v");
}

TEST_CASE("text is escaped but entities are kept") {
    CHECK(sanitize_html("5 > 3 & 2 < 4 \"q\"") == "5 &gt; 3 &amp; 2 &lt; 4 &quot;q&quot;");
    CHECK(sanitize_html("&amp; &#39; &#x1F600; &bogus") == "&amp; &#39; &#x1F600; &amp;bogus");
    CHECK(escape_html("<b>&\"") == "&lt;b&gt;&amp;&quot;");
}

TEST_CASE("malformed nesting is repaired") {
    CHECK(sanitize_html("</p>stray</li>") == "stray");
    CHECK(sanitize_html("<p><b>bold</p>tail") == "<p><b>bold</b></p>tail");
    CHECK(sanitize_html("<ul><li>open") == "<ul><li>open</li></ul>");
    CHECK(sanitize_html("<p <b>>x") == "&lt;p <b>&gt;x</b>");
}

TEST_CASE("random markup always sanitizes to the whitelist") {
    static const std::vector<std::string> pieces = {
        "<p>", "</p>", "<ul>", "</ul>", "<li>", "</li>", "<b>", "</b>", "<br/>", "<script>", "</script>",
        "<style>", "</style>", "<img src=x onerror=alert(1)>", "<a href='javascript:1'>", "</a>",
        "<p onclick=\"x()\">", "<!--", "-->", "<", ">", "&", "&amp;", "\"", "'", "text ", "<svg>", "</svg>",
        "<em class=a>", "</em>", "<strong", "</strong>", "<!DOCTYPE", "<?", "?>", "<iframe>", "</ifr", "ame>",
        "<textarea>", "</textarea>", "<ScRiPt>", "<li/>", "</ ul>", "<math>", "</math>", "\n", "é"};
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), length(0, 40);
    for (int i = 0; i < 5000; ++i) {
        std::string input;
        for (std::size_t n = length(rng); n > 0; --n) input += pieces[pick(rng)];
        std::string out;
        REQUIRE_NOTHROW(out = sanitize_html(input));
        INFO(input);
        CHECK(html_violation(out).empty());
        CHECK(sanitize_html(out) == out);
    }
}

TEST_CASE("allowed tag list") {
    CHECK(is_allowed_tag("p"));
    CHECK(is_allowed_tag("br"));
    CHECK_FALSE(is_allowed_tag("script"));
    CHECK_FALSE(is_allowed_tag("div"));
}

TEST_CASE("CDATA sections are dropped whole") {
    CHECK(rehearse::feedback::sanitize_html("a<![CDATA[<script>x</script>]]>b") == "ab");
    CHECK(rehearse::feedback::sanitize_html("a<![CDATA[never closed") == "a");
}
