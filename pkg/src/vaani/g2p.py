"""Devanagari grapheme-to-phoneme conversion and lexicon building.

The transducer is two stages.  ``parse_graphemes`` groups codepoints
into clusters (base letter + optional nukta + matra-or-virama + optional
nasal mark); ``clusters_to_phones`` then emits phones under a fixed rule
order:

- R1: a bare consonant carries the inherent schwa ``a``
- R2: virama suppresses the vowel
- R3: the word-final schwa drops when the word has two or more clusters
- R4: a medial schwa drops in vowel-consonant _ consonant-vowel context,
  one left-to-right pass over the sequence R3 produced
- N1: anusvara becomes the homorganic nasal of the following consonant's
  varga, or nasalizes the preceding vowel when no varga applies;
  chandrabindu always nasalizes the preceding vowel

Nasalized vowels never delete.  All letter-to-phone and varga tables
live in ``data/devanagari_phones.json`` so the symbol set can change
without touching this module.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import (
    EmptyInput,
    InvalidGraphemeSequence,
    NonDevanagariCodepoint,
    VaaniError,
)

VIRAMA = "्"
NUKTA = "़"
ANUSVARA = "ं"
CHANDRABINDU = "ँ"
SCHWA = "a"

_NASAL_MARKS = {ANUSVARA: "anusvara", CHANDRABINDU: "chandrabindu"}
_NASAL_CHARS = {"anusvara": ANUSVARA, "chandrabindu": CHANDRABINDU}


@lru_cache(maxsize=1)
def phone_tables() -> dict:
    raw = resources.files("vaani").joinpath("data", "devanagari_phones.json").read_text("utf-8")
    tables = json.loads(raw)
    # U+0958..U+095F canonically decompose to base + nukta, so they cannot
    # be stored in an NFC data file; derive them from the nukta table
    for cp in range(0x0958, 0x0960):
        decomp = unicodedata.decomposition(chr(cp)).split()
        base = chr(int(decomp[0], 16))
        if base in tables["nukta_forms"]:
            tables["consonants"][chr(cp)] = tables["nukta_forms"][base]
    vowels = set(tables["independent_vowels"].values()) | set(tables["matras"].values())
    inventory = set(tables["consonants"].values()) | set(tables["nukta_forms"].values())
    inventory |= vowels | {v + "~" for v in vowels}
    tables["inventory"] = frozenset(inventory)
    return tables


def phone_inventory() -> frozenset[str]:
    """Every symbol the transducer may emit."""
    return phone_tables()["inventory"]


@dataclass(frozen=True)
class GraphemeCluster:
    base: str
    matra: str | None = None
    virama: bool = False
    nasal_mark: str | None = None  # "anusvara" | "chandrabindu"
    nukta: bool = False

    def to_text(self) -> str:
        """The exact codepoints this cluster was parsed from."""
        return (
            self.base
            + (NUKTA if self.nukta else "")
            + (self.matra or "")
            + (VIRAMA if self.virama else "")
            + (_NASAL_CHARS[self.nasal_mark] if self.nasal_mark else "")
        )


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    phones: tuple[str, ...]


@dataclass
class LexiconBuild:
    """Result of a bulk build: entries plus per-word failures."""

    entries: list[LexiconEntry]
    failures: list[tuple[str, str]]  # (word, reason)


def parse_graphemes(word: str) -> list[GraphemeCluster]:
    """Group a Devanagari word into grapheme clusters, left to right."""
    if not word:
        raise EmptyInput("empty word")
    t = phone_tables()
    vowels, consonants, matras = t["independent_vowels"], t["consonants"], t["matras"]
    clusters: list[GraphemeCluster] = []
    i, n = 0, len(word)
    while i < n:
        cp = word[i]
        if cp in vowels:
            i += 1
            nasal = None
            if i < n and word[i] in _NASAL_MARKS:
                nasal = _NASAL_MARKS[word[i]]
                i += 1
            clusters.append(GraphemeCluster(cp, nasal_mark=nasal))
        elif cp in consonants:
            base = cp
            i += 1
            nukta = False
            if i < n and word[i] == NUKTA:
                nukta = True
                i += 1
            matra = None
            virama = False
            if i < n and word[i] in matras:
                matra = word[i]
                i += 1
            elif i < n and word[i] == VIRAMA:
                virama = True
                i += 1
            nasal = None
            if i < n and word[i] in _NASAL_MARKS:
                nasal = _NASAL_MARKS[word[i]]
                i += 1
            clusters.append(GraphemeCluster(base, matra, virama, nasal, nukta))
        elif cp in matras or cp in (VIRAMA, NUKTA) or cp in _NASAL_MARKS:
            raise InvalidGraphemeSequence(
                "combining mark %r at index %d has no valid base" % (cp, i), i
            )
        else:
            raise NonDevanagariCodepoint(
                "unsupported codepoint %r at index %d" % (cp, i), i
            )
    return clusters


def _consonant_phone(cluster: GraphemeCluster, tables: dict) -> str:
    if cluster.nukta and cluster.base in tables["nukta_forms"]:
        return tables["nukta_forms"][cluster.base]
    return tables["consonants"][cluster.base]


class _Item:
    __slots__ = ("phone", "is_vowel", "deletable")

    def __init__(self, phone: str, is_vowel: bool, deletable: bool = False):
        self.phone = phone
        self.is_vowel = is_vowel
        self.deletable = deletable


def _nasalize_last_vowel(items: list[_Item]) -> None:
    for item in reversed(items):
        if item.is_vowel:
            if not item.phone.endswith("~"):
                item.phone += "~"
            item.deletable = False
            return
    # no vowel to nasalize (virama + nasal mark); fall back to a dental nasal
    items.append(_Item("n", False))


def clusters_to_phones(clusters: list[GraphemeCluster]) -> list[str]:
    """Apply R1-R4 and the nasal rules to a parsed cluster sequence."""
    if not clusters:
        raise EmptyInput("no clusters")
    t = phone_tables()
    vowels, matras, nasal_map = t["independent_vowels"], t["matras"], t["nasal_by_phone"]

    items: list[_Item] = []
    for i, cl in enumerate(clusters):
        cluster_items: list[_Item] = []
        if cl.base in vowels:
            cluster_items.append(_Item(vowels[cl.base], True))
        else:
            cluster_items.append(_Item(_consonant_phone(cl, t), False))
            if cl.virama:
                pass  # R2
            elif cl.matra is not None:
                cluster_items.append(_Item(matras[cl.matra], True))
            else:
                cluster_items.append(_Item(SCHWA, True, deletable=True))  # R1
        if cl.nasal_mark == "anusvara":
            homorganic = None
            if i + 1 < len(clusters) and clusters[i + 1].base not in vowels:
                homorganic = nasal_map.get(_consonant_phone(clusters[i + 1], t))
            if homorganic:
                cluster_items.append(_Item(homorganic, False))
            else:
                _nasalize_last_vowel(cluster_items)
        elif cl.nasal_mark == "chandrabindu":
            _nasalize_last_vowel(cluster_items)
        items.extend(cluster_items)

    # R3: word-final schwa
    if len(clusters) >= 2 and items and items[-1].deletable:
        items.pop()

    # R4: medial schwa in V C _ C V, single pass; the left context sees
    # deletions already made, the right context is the untouched tail
    out: list[_Item] = []
    idx = 0
    while idx < len(items):
        item = items[idx]
        if item.deletable:
            left_ok = len(out) >= 2 and out[-2].is_vowel and not out[-1].is_vowel
            right = items[idx + 1:idx + 3]
            right_ok = (
                len(right) == 2 and not right[0].is_vowel and right[1].is_vowel
            )
            if left_ok and right_ok:
                idx += 1
                continue
        out.append(item)
        idx += 1
    return [item.phone for item in out]


def g2p(word: str) -> list[str]:
    """Word to phone sequence: parse clusters, then apply the rules."""
    return clusters_to_phones(parse_graphemes(word))


def build_lexicon(words: list[str]) -> LexiconBuild:
    """G2P a word list into lexicon entries, deduplicated and sorted.

    Words the transducer rejects are collected in ``failures`` with the
    reason, never dropped silently.
    """
    entries: list[LexiconEntry] = []
    failures: list[tuple[str, str]] = []
    for word in sorted(set(words)):
        try:
            entries.append(LexiconEntry(word, tuple(g2p(word))))
        except VaaniError as exc:
            failures.append((word, str(exc)))
    return LexiconBuild(entries, failures)


def format_lexicon(entries: list[LexiconEntry]) -> str:
    """``word<TAB>phone phone phone`` lines, one per entry."""
    return "".join("%s\t%s\n" % (e.word, " ".join(e.phones)) for e in entries)


def load_lexicon(path: str) -> dict[str, tuple[str, ...]]:
    lexicon: dict[str, tuple[str, ...]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            word, phones = line.split("\t", 1)
            lexicon[word] = tuple(phones.split())
    return lexicon
