"""Regenerates preprocess_golden.jsonl with Python's `re` as the reference
engine. The patterns are the rule table transcribed to Python syntax and
applied in order with literal replacements.

Run from this directory: python3 make_preprocess_golden.py
"""

import json
import re

RULES = [
    ("emoji", r"[\U00010000-\U0010ffff]", "XX_EMOJI"),
    ("line_break", r"([\r\n\t\f\v]+( )*)+", ". "),
    ("url_http", r"https?:\/\/([\w\-_]+\.)+([\w\-_]+)+(\/[^\s]+)*", "XX_URL"),
    ("email", r"[\SÑñ]+@([\SÑñ]+\.)+[\SÑñ]+", "XX_EMAIL"),
    ("url_domain", r"([\w\-_]+\.)+(com|net|org|co|us|ph|io)(\/[^\s]+)*", "XX_URL"),
    ("username", r"@[^\s.,!?]+", "XX_USERNAME"),
    ("hashtag", r"#[a-zA-ZÑñ0-9_]+", "XX_HASHTAG"),
    ("comma", r"(?<!,),(?!,)", "XX_COMMA"),
    ("semicolon", r"(?<!;);(?!;)", "XX_SEMICOLON"),
    ("same_symbols", r"(?<!\S)([^a-zA-Z0-9\s])\1+(?!\S)", "XX_SEQSAMESYMBOLS"),
    ("mixed_symbols", r"[^a-zA-Z0-9\s]{2,}", "XX_SEQNOTSAMESYMBOLS"),
    ("whitespace", r"\s\s+", " "),
]
COMPILED = [(name, re.compile(p), r) for name, p, r in RULES]

CASES = [
    ("emoji_single", "ang saya 😀 natin"),
    ("emoji_run", "salamat 🙏🙏 po"),
    ("emoji_attached", "good morning☀️🌻"),
    ("line_break_newline", "Kumain ako\nUmalis siya"),
    ("line_break_after_period", "Kumain ako.\nUmalis siya"),
    ("line_break_tabs_spaces", "una\t\t  pangalawa\r\n  pangatlo"),
    ("url_http", "basahin mo http://balita.example.ph/2020/ulat ngayon"),
    ("url_https_nested", "link: https://www.gov.ph/docs/a?id=3 salamat"),
    ("email_plain", "email me at juan@abc.com"),
    ("email_subdomain", "sulat sa maria.santos@mail.up.edu.ph bukas"),
    ("url_domain_com", "bisitahin ang shopee.com ngayon"),
    ("url_domain_path", "nasa rappler.com/nation/balita ang ulat"),
    ("url_domain_io", "gamit ko github.io araw-araw"),
    ("username", "salamat @ana sa tulong"),
    ("username_punct", "tanong ni @jose_rizal, bakit?"),
    ("hashtag", "kita tayo #tara"),
    ("hashtag_enye", "#Pasko2023 #Niño masaya"),
    ("comma_single", "kita tayo , bukas #tara @ana"),
    ("comma_attached", "ako, ikaw, siya"),
    ("comma_double", "teka,, sandali"),
    ("semicolon_single", "umuulan; hindi ako lalabas"),
    ("semicolon_double", "ayos;; sige"),
    ("same_symbols_bang", "grabe !!! talaga"),
    ("same_symbols_dots", "hmm ... ewan"),
    ("same_symbols_attached", "grabe!!! talaga"),
    ("mixed_symbols", "ano ?! seryoso"),
    ("mixed_symbols_emoticon", "sige :-) bukas"),
    ("whitespace_runs", "sobrang    layo   nito"),
    ("plain_untouched", "Ang bata ay kumain ng mangga."),
    ("combined", "Uy @pedro, tingnan mo https://x.co/abc 😀 #astig!!\nAstig talaga;"),
]


def apply(text):
    for _, rx, repl in COMPILED:
        text = rx.sub(lambda _m, r=repl: r, text)
    return text


def rules_hit(text):
    hit = []
    for name, rx, repl in COMPILED:
        new = rx.sub(lambda _m, r=repl: r, text)
        if new != text:
            hit.append(name)
        text = new
    return hit


def main():
    covered = set()
    with open("preprocess_golden.jsonl", "w") as out:
        for name, text in CASES:
            expected = apply(text)
            assert apply(expected) == expected, f"{name} is not idempotent"
            hit = rules_hit(text)
            covered.update(hit)
            row = {"name": name, "input": text, "expected": expected, "rules": hit}
            out.write(json.dumps(row, ensure_ascii=False) + "\n")
    missing = [n for n, _, _ in RULES if n not in covered]
    assert not missing, f"rules without a fixture: {missing}"
    print(f"{len(CASES)} cases, every rule covered")


if __name__ == "__main__":
    main()
