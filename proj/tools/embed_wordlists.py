#!/usr/bin/env python3
"""Regenerates include/narr/data/*.hpp from the plain-text lists under data/."""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent


def read_list(rel):
    words = [w.strip() for w in (ROOT / rel).read_text().splitlines()]
    return sorted({w for w in words if w and not w.startswith("#")})


def emit(header, lists):
    out = ["#pragma once", "",
           "// Generated by tools/embed_wordlists.py from data/; keep in sync (checked by tests).", "",
           "#include <array>", "#include <string_view>", "", "namespace narr::data {", ""]
    for var, words in lists:
        out.append(f"inline constexpr std::array<std::string_view, {len(words)}> {var} = {{")
        line = "   "
        for w in words:
            piece = f' "{w}",'
            if len(line) + len(piece) > 100:
                out.append(line)
                line = "   "
            line += piece
        out.append(line)
        out.append("};")
        out.append("")
    out.append("}  // namespace narr::data")
    (ROOT / "include/narr/data" / header).write_text("\n".join(out) + "\n")


emit("english_stopwords.hpp", [("kEnglishStopwords", read_list("data/stopwords_en.txt"))])
emit("sentiment_lexicon.hpp", [("kPositiveWords", read_list("data/lexicon/positive.txt")),
                               ("kNegativeWords", read_list("data/lexicon/negative.txt"))])
