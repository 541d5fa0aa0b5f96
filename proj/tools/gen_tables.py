#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Generates the shipped Latin mapping tables and the native-script sample corpora.

Usage: gen_tables.py <data-dir>
"""
import random
import sys
from pathlib import Path

ZWNJ, ZWJ = "‌", "‍"

DEVA = dict(
    consonants=[
        ("क", "k"), ("ख", "kh"), ("ग", "g"), ("घ", "gh"), ("ङ", "ng"),
        ("च", "ch"), ("छ", "chh"), ("ज", "j"), ("झ", "jh"), ("ञ", "ny"),
        ("ट", "t"), ("ठ", "th"), ("ड", "d"), ("ढ", "dh"), ("ण", "n"),
        ("त", "t"), ("थ", "th"), ("द", "d"), ("ध", "dh"), ("न", "n"),
        ("प", "p"), ("फ", "ph"), ("ब", "b"), ("भ", "bh"), ("म", "m"),
        ("य", "y"), ("र", "r"), ("ल", "l"), ("व", "v"), ("श", "sh"),
        ("ष", "sh"), ("स", "s"), ("ह", "h"),
        ("ऩ", "n"), ("ऱ", "r"), ("ळ", "l"), ("ऴ", "zh"),
        ("\u0958", "q"), ("\u0959", "kh"), ("\u095a", "g"), ("\u095b", "z"),
        ("\u095c", "d"), ("\u095d", "dh"), ("\u095e", "f"), ("\u095f", "y"),
    ],
    # consonant + nukta, decomposed
    nukta="़",
    nukta_override={"क": "q", "ख": "kh", "ग": "g", "ज": "z", "ड": "d", "ढ": "dh", "फ": "f", "य": "y"},
    conjuncts=[("क्ष", "ksh"), ("ज्ञ", "gy"), ("त्र", "tr"), ("श्र", "shr")],
    virama="्",
    matras=[
        ("ा", "aa"), ("ि", "i"), ("ी", "ee"), ("ु", "u"), ("ू", "oo"),
        ("ृ", "ri"), ("ॄ", "rri"), ("ॢ", "li"), ("ॣ", "lli"),
        ("ॅ", "e"), ("ॆ", "e"), ("े", "e"), ("ै", "ai"),
        ("ॉ", "o"), ("ॊ", "o"), ("ो", "o"), ("ौ", "au"),
    ],
    vowels=[
        ("अ", "a"), ("आ", "aa"), ("इ", "i"), ("ई", "ee"), ("उ", "u"), ("ऊ", "oo"),
        ("ऋ", "ri"), ("ॠ", "rri"), ("ऌ", "li"), ("ॡ", "lli"),
        ("ऍ", "e"), ("ऎ", "e"), ("ए", "e"), ("ऐ", "ai"),
        ("ऑ", "o"), ("ऒ", "o"), ("ओ", "o"), ("औ", "au"), ("ॐ", "om"),
    ],
    signs=[("ँ", "n"), ("ं", "n"), ("ः", "h"), ("ऽ", "'"),
           ("।", "."), ("॥", "."), ("॰", "."), ("़", ""), ("्", ""),
           (ZWNJ, ""), (ZWJ, "")],
    policy="cluster",
)

MLYM = dict(
    consonants=[
        ("ക", "k"), ("ഖ", "kh"), ("ഗ", "g"), ("ഘ", "gh"), ("ങ", "ng"),
        ("ച", "ch"), ("ഛ", "chh"), ("ജ", "j"), ("ഝ", "jh"), ("ഞ", "nj"),
        ("ട", "t"), ("ഠ", "th"), ("ഡ", "d"), ("ഢ", "dh"), ("ണ", "n"),
        ("ത", "th"), ("ഥ", "thh"), ("ദ", "d"), ("ധ", "dh"), ("ന", "n"),
        ("പ", "p"), ("ഫ", "ph"), ("ബ", "b"), ("ഭ", "bh"), ("മ", "m"),
        ("യ", "y"), ("ര", "r"), ("റ", "r"), ("ല", "l"), ("ള", "l"),
        ("ഴ", "zh"), ("വ", "v"), ("ശ", "sh"), ("ഷ", "sh"), ("സ", "s"),
        ("ഹ", "h"), ("ഺ", "tt"),
    ],
    nukta=None,
    nukta_override={},
    conjuncts=[("ക്ഷ", "ksh")],
    virama="്",
    matras=[
        ("ാ", "a"), ("ി", "i"), ("ീ", "ee"), ("ു", "u"), ("ൂ", "oo"),
        ("ൃ", "ru"), ("ൄ", "roo"), ("െ", "e"), ("േ", "e"), ("ൈ", "ai"),
        ("ൊ", "o"), ("ോ", "o"), ("ൌ", "au"), ("ൗ", "au"),
    ],
    vowels=[
        ("അ", "a"), ("ആ", "aa"), ("ഇ", "i"), ("ഈ", "ee"), ("ഉ", "u"), ("ഊ", "oo"),
        ("ഋ", "ru"), ("എ", "e"), ("ഏ", "e"), ("ഐ", "ai"), ("ഒ", "o"), ("ഓ", "o"),
        ("ഔ", "au"),
    ],
    signs=[("ഁ", "n"), ("ം", "m"), ("ഃ", "h"),
           ("ൺ", "n"), ("ൻ", "n"), ("ർ", "r"), ("ൽ", "l"), ("ൾ", "l"), ("ൿ", "k"),
           ("്", ""), (ZWNJ, ""), (ZWJ, "")],
    policy="retain",
)


def syllable_bases(spec):
    bases = list(spec["consonants"]) + list(spec["conjuncts"])
    if spec["nukta"]:
        for src, lat in spec["nukta_override"].items():
            bases.append((src + spec["nukta"], lat))
    return bases


def rules(spec):
    out = []
    for src, lat in syllable_bases(spec):
        out.append((src, lat + "a"))
        out.append((src + spec["virama"], lat))
        for m, v in spec["matras"]:
            out.append((src + m, lat + v))
    out += spec["vowels"]
    out += spec["matras"]
    out += spec["signs"]
    seen = set()
    for src, _ in out:
        assert src not in seen, src
        seen.add(src)
    return out


def write_table(path, title, spec):
    lines = [f"# {title} -> Latin", f"#!schwa={spec['policy']}", "# source\treplacement"]
    lines += [f"{s}\t{r}" for s, r in rules(spec)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def word(rng, spec):
    bases = syllable_bases(spec)
    parts = []
    if rng.random() < 0.2:
        parts.append(rng.choice(spec["vowels"])[0])
    for _ in range(rng.randint(1, 4)):
        parts.append(rng.choice(bases)[0])
        r = rng.random()
        if r < 0.45:
            parts.append(rng.choice(spec["matras"])[0])
        elif r < 0.55:
            parts.append(spec["virama"])
    if rng.random() < 0.3:
        parts.append(rng.choice([s for s, rep in spec["signs"] if rep.isalpha()]))
    return "".join(parts)


def write_corpus(path, spec, seed, stop):
    rng = random.Random(seed)
    lines = []
    for _ in range(1000):
        ws = [word(rng, spec) for _ in range(rng.randint(3, 12))]
        line = " ".join(ws)
        line += rng.choice([stop, stop, "?", "!", ",", ""])
        lines.append(line)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else "data")
    (root / "tables").mkdir(parents=True, exist_ok=True)
    (root / "corpora").mkdir(parents=True, exist_ok=True)
    write_table(root / "tables" / "devanagari_latin.tsv", "Devanagari", DEVA)
    write_table(root / "tables" / "malayalam_latin.tsv", "Malayalam", MLYM)
    write_corpus(root / "corpora" / "hindi_native.txt", DEVA, 11, "।")
    write_corpus(root / "corpora" / "malayalam_native.txt", MLYM, 13, ".")


if __name__ == "__main__":
    main()
