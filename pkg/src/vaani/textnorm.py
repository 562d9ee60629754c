"""Rule/table-driven Hindi text normalization.

Two speakable-form rewrites on real (unrestricted) text: digit runs
become Hindi number words read in the Indian system (crore/lakh/
thousand/hundred), and known abbreviation tokens expand from a table.
Everything else, whitespace included, passes through byte-for-byte; a
correction volunteer must never lose text to the normalizer.

Table files are UTF-8, one ``key<TAB>value`` per line, ``#`` comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import NotFound, OutOfRange

MAX_NUMBER = 10 ** 9  # exclusive; beyond this the tables are silent

_DIGIT_RUN = re.compile(r"[0-9०-९]+")
_DEVANAGARI_DIGITS = str.maketrans("०१२३४५६७८९", "0123456789")


@dataclass(frozen=True)
class NumberWordTable:
    """Words for 0..99 plus the ordered Indian-system scale words."""

    units: dict[int, str]
    scale_words: tuple[tuple[int, str], ...]

    def __post_init__(self):
        missing = [n for n in range(100) if n not in self.units]
        if missing:
            raise ValueError("units table is missing %d entries" % len(missing))
        values = [v for v, _ in self.scale_words]
        if values != sorted(values) or len(set(values)) != len(values):
            raise ValueError("scale values must be strictly increasing")


@dataclass(frozen=True)
class AbbrevTable:
    entries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for key, value in self.entries.items():
            if not key:
                raise ValueError("empty abbreviation key")
            if key == value:
                raise ValueError("abbreviation %r maps to itself" % key)


@dataclass(frozen=True)
class TextSpan:
    """A classified fragment of input text."""

    text: str
    kind: str  # "digits" | "abbreviation" | "plain"


def read_table_lines(path_or_text: str, from_file: bool = True) -> dict[str, str]:
    """Parse ``key<TAB>value`` lines, skipping blanks and # comments."""
    if from_file:
        with open(path_or_text, encoding="utf-8") as fh:
            raw = fh.read()
    else:
        raw = path_or_text
    entries: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), 1):
        line = line.strip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            raise ValueError("line %d has no tab separator" % lineno)
        key, value = line.split("\t", 1)
        entries[key] = value
    return entries


def _bundled(name: str) -> str:
    return resources.files("vaani").joinpath("data", name).read_text(encoding="utf-8")


def load_number_table(path: str | None = None) -> NumberWordTable:
    """Load a number-word table; the bundled Hindi table by default."""
    raw = read_table_lines(path) if path else read_table_lines(_bundled("hindi_numbers.tsv"), from_file=False)
    units: dict[int, str] = {}
    scales: list[tuple[int, str]] = []
    for key, value in raw.items():
        n = int(key)
        if n < 100:
            units[n] = value
        else:
            scales.append((n, value))
    return NumberWordTable(units, tuple(sorted(scales)))


def load_abbrev_table(path: str | None = None) -> AbbrevTable:
    raw = read_table_lines(path) if path else read_table_lines(_bundled("abbreviations.tsv"), from_file=False)
    return AbbrevTable(raw)


def number_to_words(n: int, table: NumberWordTable) -> str:
    """Indian-system reading of ``n``: decompose by the scale words,
    render each nonzero group from the 0..99 table, join with spaces."""
    if not 0 <= n < MAX_NUMBER:
        raise OutOfRange("number %d outside [0, %d)" % (n, MAX_NUMBER))
    if n == 0:
        return table.units[0]
    parts: list[str] = []
    remainder = n
    for value, word in reversed(table.scale_words):
        group, remainder = divmod(remainder, value)
        if group:
            parts.append(table.units[group])
            parts.append(word)
    if remainder:
        parts.append(table.units[remainder])
    return " ".join(parts)


def expand_abbreviation(token: str, table: AbbrevTable) -> str:
    try:
        return table.entries[token]
    except KeyError:
        raise NotFound("abbreviation %r not in table" % token) from None


def classify_spans(text: str, abbrevs: AbbrevTable | None = None) -> list[TextSpan]:
    """Split into whitespace-delimited spans and tag each one."""
    spans: list[TextSpan] = []
    for part in re.split(r"(\s+)", text):
        if not part:
            continue
        if part.isspace():
            spans.append(TextSpan(part, "plain"))
        elif _DIGIT_RUN.fullmatch(part):
            spans.append(TextSpan(part, "digits"))
        elif abbrevs is not None and part in abbrevs.entries:
            spans.append(TextSpan(part, "abbreviation"))
        else:
            spans.append(TextSpan(part, "plain"))
    return spans


def _replace_digit_runs(token: str, numbers: NumberWordTable) -> str:
    def convert(match: re.Match) -> str:
        digits = match.group(0).translate(_DEVANAGARI_DIGITS)
        try:
            return number_to_words(int(digits), numbers)
        except OutOfRange:
            return match.group(0)

    return _DIGIT_RUN.sub(convert, token)


def normalize_text(
    text: str,
    numbers: NumberWordTable | None = None,
    abbrevs: AbbrevTable | None = None,
) -> str:
    """Rewrite digit runs and known abbreviations, nothing else.

    Abbreviation matching is whole-token and exact.  Digit runs too long
    for the tables stay untouched rather than erroring; unknown
    abbreviations pass through unchanged.
    """
    out: list[str] = []
    for part in re.split(r"(\s+)", text):
        if not part or part.isspace():
            out.append(part)
            continue
        if abbrevs is not None and part in abbrevs.entries:
            out.append(abbrevs.entries[part])
            continue
        if numbers is not None:
            part = _replace_digit_runs(part, numbers)
        out.append(part)
    return "".join(out)
