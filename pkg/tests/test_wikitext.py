"""Tests for wikitext parsing."""

from __future__ import annotations

import random
import re

import pytest

from wiki_genre_signals.constants import NS_ARTICLE, NS_CATEGORY, NS_TALK
from wiki_genre_signals.errors import EmptyTitleError
from wiki_genre_signals.wikitext import (
    Title,
    detect_redirect,
    extract_categories,
    extract_lead,
    extract_wikilinks,
    is_infobox,
    namespace_table,
    normalize_template_name,
    normalize_title,
    parse_templates,
    strip_noise,
)

# --- normalize_title ---


def test_normalize_title_fragment_and_underscores() -> None:
    assert normalize_title("science_fiction#History") == Title(NS_ARTICLE, "Science fiction")


def test_normalize_title_talk_prefix() -> None:
    assert normalize_title("Talk:Dune_(novel)") == Title(NS_TALK, "Dune (novel)")


def test_normalize_title_blank_raises() -> None:
    with pytest.raises(EmptyTitleError, match="Empty title"):
        normalize_title("  ")


def test_normalize_title_only_fragment_raises() -> None:
    with pytest.raises(EmptyTitleError):
        normalize_title("#Plot")


def test_normalize_title_entities_decoded() -> None:
    assert normalize_title("Dungeons &amp; Dragons") == Title(NS_ARTICLE, "Dungeons & Dragons")
    assert normalize_title("A&amp;amp;B").name == "A&B"


def test_normalize_title_prefix_case_and_aliases() -> None:
    assert normalize_title("category:  fantasy_novels") == Title(NS_CATEGORY, "Fantasy novels")
    assert normalize_title("WP:Manual of Style").namespace == 4
    assert normalize_title("Image:Cover.jpg").namespace == 6


def test_normalize_title_unknown_prefix_stays_in_article_namespace() -> None:
    title = normalize_title("Star Wars: Episode IV")
    assert title == Title(NS_ARTICLE, "Star Wars: Episode IV")


def test_normalize_title_first_letter_only() -> None:
    assert normalize_title("iPhone").name == "IPhone"
    assert normalize_title("éowyn").name == "Éowyn"
    # Uppercasing "ß" yields two characters; the title keeps it as is.
    assert normalize_title("ßeta").name == "ßeta"


def test_normalize_title_extra_namespace_alias() -> None:
    table = namespace_table({"CAT": NS_CATEGORY})
    assert normalize_title("CAT:Space opera", table) == Title(NS_CATEGORY, "Space opera")


def test_title_str_renders_prefix() -> None:
    assert str(Title(NS_ARTICLE, "Dune")) == "Dune"
    assert str(Title(NS_TALK, "Dune")) == "Talk:Dune"
    assert Title(NS_TALK, "Dune").subject() == Title(NS_ARTICLE, "Dune")


def test_normalize_title_idempotent_over_random_strings() -> None:
    rng = random.Random(1337)
    pieces = [
        "a", "b", "Z", "é", "ß", "ǆ", "1", " ", "  ", "_", "__", ":", "#", "&amp;", "&lt;",
        "Talk:", "category:", "wp:", "Foo:", "\t", " ", "(", ")", "'",
    ]
    checked = 0
    for _ in range(5000):
        raw = "".join(rng.choice(pieces) for _ in range(rng.randint(1, 12)))
        try:
            once = normalize_title(raw)
        except EmptyTitleError:
            continue
        assert normalize_title(str(once)) == once, raw
        assert "_" not in once.name
        assert once.name == once.name.strip()
        assert "#" not in once.name
        checked += 1
    assert checked > 1000


# --- detect_redirect ---


@pytest.mark.parametrize(
    ("wikitext", "expected"),
    [
        ("#REDIRECT [[Frank Herbert]]", Title(NS_ARTICLE, "Frank Herbert")),
        ("#redirect [[Dune (novel)|Dune]]", Title(NS_ARTICLE, "Dune (novel)")),
        ("  #Redirect: [[dune_(novel)#Plot]]\n{{R from move}}", Title(NS_ARTICLE, "Dune (novel)")),
        ("#REDIRECT [[Category:Fantasy]]", Title(NS_CATEGORY, "Fantasy")),
    ],
)
def test_detect_redirect(wikitext: str, expected: Title) -> None:
    assert detect_redirect(wikitext) == expected


@pytest.mark.parametrize(
    "wikitext",
    ["Plain article text", "#REDIRECT Frank Herbert", "#REDIRECT [[]]", "Text\n#REDIRECT [[X]]"],
)
def test_detect_redirect_absent(wikitext: str) -> None:
    assert detect_redirect(wikitext) is None


# --- strip_noise ---


def test_strip_noise_comment() -> None:
    assert strip_noise("a<!--x-->b") == "a" + " " * 8 + "b"


def test_strip_noise_nowiki_hides_links() -> None:
    text = "<nowiki>[[Not a link]]</nowiki>"
    cleaned = strip_noise(text)

    assert len(cleaned) == len(text)
    assert cleaned.startswith("<nowiki>") and cleaned.endswith("</nowiki>")
    assert extract_wikilinks(cleaned) == []


def test_strip_noise_unterminated_comment() -> None:
    text = "a<!--unterminated"
    assert strip_noise(text) == "a" + " " * (len(text) - 1)


def test_strip_noise_self_closing_tag_and_case() -> None:
    text = "x<nowiki/>[[A]]<PRE>[[B]]</pre><syntaxhighlight lang='py'>{{c}}</syntaxhighlight>"
    cleaned = strip_noise(text)

    assert len(cleaned) == len(text)
    assert extract_wikilinks(cleaned) == [Title(NS_ARTICLE, "A")]
    assert parse_templates(cleaned) == []


def test_strip_noise_preserves_length_on_random_input() -> None:
    rng = random.Random(7)
    pieces = ["<!--", "-->", "<nowiki>", "</nowiki>", "<pre>", "</pre>", "a", "\n", "<source/>"]
    for _ in range(500):
        text = "".join(rng.choice(pieces) for _ in range(rng.randint(0, 20)))
        assert len(strip_noise(text)) == len(text)


# --- parse_templates ---


def test_parse_templates_infobox_params() -> None:
    templates = parse_templates("{{Infobox book|author=[[A|B]]|genre=SF}}")

    assert len(templates) == 1
    assert templates[0].name == "Infobox book"
    assert templates[0].params == (("author", "[[A|B]]"), ("genre", "SF"))
    assert templates[0].param("Genre") == "SF"


def test_parse_templates_nested() -> None:
    templates = parse_templates("{{a|{{b}}}}")

    assert [t.name for t in templates] == ["A", "B"]
    outer, inner = templates[0].span, templates[1].span
    assert outer[0] < inner[0] and inner[1] < outer[1]


def test_parse_templates_unclosed() -> None:
    assert parse_templates("{{unclosed") == []


def test_parse_templates_positional_and_prefix() -> None:
    templates = parse_templates("{{Template:other_uses| X }}")

    assert templates[0].name == "Other uses"
    assert templates[0].params == ((None, " X "),)

def test_parse_templates_spans_inside_tags_and_links() -> None:
    text = "A<ref>{{cite web|title=[[X]]}}</ref> [[File:B.jpg|thumb|{{lang|fr|b}}]]"

    templates = parse_templates(text)

    assert [t.name for t in templates] == ["Cite web", "Lang"]
    for template in templates:
        start, end = template.span
        assert text[start : start + 2] == "{{" and text[end - 2 : end] == "}}"
    assert templates[0].span[0] == text.index("{{cite")
    assert templates[1].span[0] == text.index("{{lang")


def test_parse_templates_keyed_value_starting_with_equals() -> None:
    templates = parse_templates("{{a|b==c|{{d}}}}")

    assert templates[0].params[0] == ("b", "=c")
    assert templates[1].name == "D"
    assert templates[1].span == (9, 14)



def test_normalize_template_name_rejects_invalid() -> None:
    assert normalize_template_name("  ") is None
    assert normalize_template_name("a<b") is None
    assert normalize_template_name("wikiProject_Novels") == "WikiProject Novels"


def test_is_infobox() -> None:
    assert is_infobox("Infobox book")
    assert is_infobox("infobox")
    assert not is_infobox("Infoboxes")
    assert not is_infobox("Short description")


def test_template_spans_are_laminar() -> None:
    rng = random.Random(2024)
    pieces = ["{{", "}}", "|", "a", "[[", "]]", "=", " "]
    for _ in range(2000):
        text = "".join(rng.choice(pieces) for _ in range(rng.randint(0, 30)))
        spans = [t.span for t in parse_templates(text)]
        for start, end in spans:
            assert 0 <= start < end <= len(text)
        for a_start, a_end in spans:
            for b_start, b_end in spans:
                disjoint = a_end <= b_start or b_end <= a_start
                nested = (a_start <= b_start and b_end <= a_end) or (
                    b_start <= a_start and a_end <= b_end
                )
                assert disjoint or nested, text


# --- extract_wikilinks ---


def test_extract_wikilinks_basic() -> None:
    links = extract_wikilinks("[[Science fiction|SF]] and [[fantasy]]")
    assert links == [Title(NS_ARTICLE, "Science fiction"), Title(NS_ARTICLE, "Fantasy")]


def test_extract_wikilinks_skips_other_namespaces() -> None:
    assert extract_wikilinks("[[Category:American science fiction novels]]") == []
    assert extract_wikilinks("[[File:Cover.jpg|thumb|Cover]]") == []


def test_extract_wikilinks_keeps_duplicates() -> None:
    assert extract_wikilinks("[[A]][[A]]") == [Title(NS_ARTICLE, "A"), Title(NS_ARTICLE, "A")]


def test_extract_wikilinks_skips_interwiki() -> None:
    assert extract_wikilinks("[[:fr:Dune]] [[de:Dune]] [[wikt:novel]] [[Dune]]") == [
        Title(NS_ARTICLE, "Dune")
    ]


def test_extract_wikilinks_leading_colon_article() -> None:
    assert extract_wikilinks("[[:Dune]]") == [Title(NS_ARTICLE, "Dune")]


def test_extract_wikilinks_links_inside_image_caption() -> None:
    text = "[[File:Cover.jpg|thumb|First edition of [[Dune (novel)|Dune]]]]"
    assert extract_wikilinks(text) == [Title(NS_ARTICLE, "Dune (novel)")]


_ORACLE_RE = re.compile(r"\[\[([^\[\]|{}<>\n]+)(?:\|[^\[\]\n]*)?\]\]")


def _oracle_links(text: str) -> list[Title]:
    links: list[Title] = []
    for match in _ORACLE_RE.finditer(text):
        try:
            title = normalize_title(match.group(1))
        except EmptyTitleError:
            continue
        if title.namespace == NS_ARTICLE:
            links.append(title)
    return links


def _random_flat_wikitext(rng: random.Random) -> str:
    words = ["alpha", "Beta", "gamma_ray", "Dune", "science fiction", "x", "Ursula K. Le Guin"]
    prose = ["The ", "and ", "novel. ", "\n", ", ", "(1965) ", "'''bold''' ", "= x =\n"]
    parts: list[str] = []
    for _ in range(rng.randint(0, 12)):
        roll = rng.random()
        if roll < 0.4:
            parts.append(rng.choice(prose))
        elif roll < 0.7:
            parts.append(f"[[{rng.choice(words)}]]")
        elif roll < 0.9:
            parts.append(f"[[{rng.choice(words)}|{rng.choice(words)}]]")
        else:
            parts.append(f"[[Category:{rng.choice(words)}]]")
    return "".join(parts)


def test_extract_wikilinks_matches_naive_scanner() -> None:
    rng = random.Random(20260101)
    mismatches = 0
    for _ in range(10_000):
        text = _random_flat_wikitext(rng)
        if extract_wikilinks(text) != _oracle_links(text):
            mismatches += 1
    assert mismatches == 0


# --- extract_categories ---


def test_extract_categories_sortkey_ignored() -> None:
    assert extract_categories("[[Category:American science fiction novels|Dune]]") == [
        Title(NS_CATEGORY, "American science fiction novels")
    ]


def test_extract_categories_none() -> None:
    assert extract_categories("No categories here, only [[links]].") == []


def test_extract_categories_dedup_first_seen_order() -> None:
    text = "[[Category:B]] [[category:A]] [[Category:b|key]] <!-- [[Category:C]] -->"
    assert extract_categories(text) == [Title(NS_CATEGORY, "B"), Title(NS_CATEGORY, "A")]


def test_extract_categories_colon_link_is_not_assignment() -> None:
    assert extract_categories("See [[:Category:Fantasy novels]].") == []


# --- extract_lead ---


def test_extract_lead_includes_infobox_links() -> None:
    page = (
        "{{Infobox book|author=[[Ursula K. Le Guin]]}}Intro [[Science fiction]].\n"
        "==Plot==\n[[Later link]]"
    )
    lead = extract_lead(page)

    assert lead.links == (
        Title(NS_ARTICLE, "Ursula K. Le Guin"),
        Title(NS_ARTICLE, "Science fiction"),
    )
    assert lead.text.endswith("Intro [[Science fiction]].\n")
    assert [t.name for t in lead.templates] == ["Infobox book"]


def test_extract_lead_without_heading_is_whole_page() -> None:
    page = "Intro [[A]].\n===Minor===\n[[B]]"
    lead = extract_lead(page)

    assert lead.text == page
    assert lead.links == (Title(NS_ARTICLE, "A"), Title(NS_ARTICLE, "B"))


def test_extract_lead_excludes_hatnotes() -> None:
    assert extract_lead("{{Other uses|X}}[[A]]").links == (Title(NS_ARTICLE, "A"),)
    assert extract_lead("{{About|the novel|the film|[[Dune (film)]]}}[[A]]").links == (
        Title(NS_ARTICLE, "A"),
    )


def test_extract_lead_heading_inside_comment_or_template_ignored() -> None:
    page = "<!--\n== Hidden ==\n-->{{Quote|\n== Quoted ==\n}}[[A]]\n== Real ==\n[[B]]"
    lead = extract_lead(page)

    assert lead.links == (Title(NS_ARTICLE, "A"),)
    assert lead.text.endswith("[[A]]\n")


def test_extract_lead_level_three_heading_does_not_end_lead() -> None:
    page = "[[A]]\n=== Sub ===\n[[B]]\n== Plot ==\n[[C]]"
    assert extract_lead(page).links == (Title(NS_ARTICLE, "A"), Title(NS_ARTICLE, "B"))


def test_extract_lead_nested_templates_inside_infobox_count() -> None:
    page = (
        "{{Infobox novel|genre={{plainlist|\n"
        "* [[Space opera]]\n* [[Military science fiction]]}}}}"
    )
    assert extract_lead(page).links == (
        Title(NS_ARTICLE, "Space opera"),
        Title(NS_ARTICLE, "Military science fiction"),
    )


def test_extract_lead_caption_links_count() -> None:
    page = "[[File:Dune.jpg|thumb|A [[sandworm]]]] '''Dune''' is a [[novel]].\n== Plot =="
    assert extract_lead(page).links == (Title(NS_ARTICLE, "Sandworm"), Title(NS_ARTICLE, "Novel"))


def test_extract_lead_template_does_not_splice_targets() -> None:
    assert extract_lead("[[Foo{{x}}bar]] [[Baz]]").links == (Title(NS_ARTICLE, "Baz"),)

def test_extract_lead_crlf_heading_ends_lead() -> None:
    lead = extract_lead("Intro [[A]].\n==Plot==\r\n[[Later]]")

    assert lead.links == (Title(NS_ARTICLE, "A"),)
    assert lead.text == "Intro [[A]].\n"


def test_extract_lead_infobox_nested_in_other_template_counts() -> None:
    page = "{{Col begin|{{Infobox book|genre=[[Fantasy]]}}|[[Hidden]]}}[[Prose]]\n== Plot =="
    assert extract_lead(page).links == (Title(NS_ARTICLE, "Fantasy"), Title(NS_ARTICLE, "Prose"))



# --- robustness ---


def _collapse(text: str) -> str:
    return re.sub(r"\s+", " ", text)


def test_parsers_survive_random_input() -> None:
    rng = random.Random(99)
    alphabet = "ab Z:#|=[]{}\n!-'<>/Category"
    for _ in range(3000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 60)))
        lead = extract_lead(text)
        categories = extract_categories(text)
        parse_templates(strip_noise(text))
        detect_redirect(text)

        assert all(title.namespace == NS_CATEGORY for title in categories)
        if "<" not in text:
            haystack = _collapse(text)
            for title in (*lead.links, *categories):
                assert _collapse(title.name[1:]) in haystack, (text, title)
