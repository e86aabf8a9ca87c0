"""Persian grapheme-to-phoneme conversion and the bundled task lexicon.

Persian script omits short vowels, so rule-only conversion is unsound for
scoring.  All task-critical vocabulary (color words and the pseudo-word
list) therefore ships in bundled lexicon files; letter rules are a
fallback for incidental words, and romanized input is accepted everywhere
so fixtures avoid encoding pitfalls.  Unknown characters are an explicit
error, never silently skipped: the output grades children.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass
from importlib import resources

logger = logging.getLogger(__name__)


class G2pError(ValueError):
    """Raised when a word cannot be converted to phonemes."""


class LexiconFormatError(ValueError):
    """Raised for malformed lexicon files (message carries the line number)."""


@dataclass(frozen=True)
class Phoneme:
    symbol: str   # IPA-style symbol
    code: str     # ASCII romanization used in lexicon files

    def __repr__(self):
        return f"/{self.symbol}/"


def _build_inventory() -> tuple[dict[str, Phoneme], dict[str, Phoneme]]:
    # 6 vowels + 23 consonants = 29 entries.
    pairs = [
        # vowels
        ("a", "a"), ("æ", "ae"), ("e", "e"), ("i", "i"), ("o", "o"), ("u", "u"),
        # consonants
        ("p", "p"), ("b", "b"), ("t", "t"), ("d", "d"), ("k", "k"), ("g", "g"),
        ("ʔ", "'"),
        ("f", "f"), ("v", "v"), ("s", "s"), ("z", "z"),
        ("ʃ", "sh"), ("ʒ", "zh"), ("x", "kh"), ("ɣ", "gh"), ("h", "h"),
        ("tʃ", "ch"), ("dʒ", "j"),
        ("m", "m"), ("n", "n"), ("l", "l"), ("r", "r"), ("j", "y"),
    ]
    by_symbol = {s: Phoneme(s, c) for s, c in pairs}
    by_code = {p.code: p for p in by_symbol.values()}
    return by_symbol, by_code

INVENTORY, BY_CODE = _build_inventory()

PhonemeSeq = tuple[Phoneme, ...]

# Romanized codes ordered longest-first for greedy parsing.
_CODES_BY_LENGTH = sorted(BY_CODE, key=len, reverse=True)

# Fallback letter rules for Persian script.  Short vowels are unwritten in
# Persian, so these are approximate by construction; scoring-critical words
# must come from the lexicon instead.
_SCRIPT_RULES = {
    "آ": ("a",), "ا": ("a",), "ب": ("b",), "پ": ("p",), "ت": ("t",), "ث": ("s",),
    "ج": ("dʒ",), "چ": ("tʃ",), "ح": ("h",), "خ": ("x",), "د": ("d",), "ذ": ("z",),
    "ر": ("r",), "ز": ("z",), "ژ": ("ʒ",), "س": ("s",), "ش": ("ʃ",), "ص": ("s",),
    "ض": ("z",), "ط": ("t",), "ظ": ("z",), "ع": ("ʔ",), "غ": ("ɣ",), "ف": ("f",),
    "ق": ("ɣ",), "ک": ("k",), "گ": ("g",), "ل": ("l",), "م": ("m",), "ن": ("n",),
    "و": ("v",), "ه": ("h",), "ی": ("j",), "ء": ("ʔ",), "أ": ("ʔ",), "إ": ("ʔ",),
    "ؤ": ("ʔ",), "ئ": ("ʔ",),
    # diacritics, when present, carry the short vowels
    "َ": ("æ",), "ِ": ("e",), "ُ": ("o",),
    "ْ": (), "ـ": (),  # sukun, tatweel
}

_FOLD = str.maketrans({"ي": "ی", "ك": "ک", "ۀ": "ه", "‌": " "})  # ZWNJ to space


def normalize_word(word: str) -> str:
    """NFC normalization, Arabic-to-Persian letterform folding, lowercase."""
    return unicodedata.normalize("NFC", word).translate(_FOLD).strip().lower()


def phonemes_from_codes(codes: list[str]) -> PhonemeSeq:
    out = []
    for code in codes:
        if code not in BY_CODE:
            raise G2pError(f"unknown phoneme code {code!r}")
        out.append(BY_CODE[code])
    return tuple(out)


def _parse_romanized(word: str) -> PhonemeSeq:
    out = []
    i = 0
    while i < len(word):
        for code in _CODES_BY_LENGTH:
            if word.startswith(code, i):
                out.append(BY_CODE[code])
                i += len(code)
                break
        else:
            raise G2pError(f"no phoneme rule for character {word[i]!r} in {word!r}")
    return tuple(out)


def _parse_script(word: str) -> PhonemeSeq:
    out = []
    prev: Phoneme | None = None
    for ch in word:
        if ch == "ّ":  # shadda doubles the previous consonant
            if prev is None:
                raise G2pError(f"shadda with no preceding letter in {word!r}")
            out.append(prev)
            continue
        if ch not in _SCRIPT_RULES:
            raise G2pError(f"no phoneme rule for character {ch!r} in {word!r}")
        for sym in _SCRIPT_RULES[ch]:
            prev = INVENTORY[sym]
            out.append(prev)
    return tuple(out)


class Lexicon:
    """Word to phoneme-sequence map with per-entry provenance."""

    def __init__(self):
        self._entries: dict[str, PhonemeSeq] = {}
        self._provenance: dict[str, str] = {}

    def __contains__(self, word: str) -> bool:
        return normalize_word(word) in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(self, word: str) -> PhonemeSeq | None:
        return self._entries.get(normalize_word(word))

    def provenance(self, word: str) -> str | None:
        return self._provenance.get(normalize_word(word))

    def words(self) -> list[str]:
        return list(self._entries)

    def add(self, word: str, seq: PhonemeSeq, provenance: str) -> None:
        key = normalize_word(word)
        self._entries[key] = seq
        self._provenance[key] = provenance

    def merged_with(self, other: "Lexicon") -> "Lexicon":
        """New lexicon where ``other``'s entries shadow this one's."""
        out = Lexicon()
        out._entries = dict(self._entries)
        out._provenance = dict(self._provenance)
        out._entries.update(other._entries)
        out._provenance.update(other._provenance)
        return out

    def serialize(self) -> bytes:
        """Canonical form: one `word<TAB>codes` line per entry, file order."""
        lines = []
        for word, seq in self._entries.items():
            lines.append(word + "\t" + " ".join(p.code for p in seq) + "\n")
        return "".join(lines).encode("utf-8")


def parse_lexicon_text(text: str, provenance: str, source: str = "<string>") -> Lexicon:
    lex = Lexicon()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip():
            raise LexiconFormatError(f"{source}:{lineno}: expected `word<TAB>phoneme codes`")
        word, codes = parts[0], parts[1].split()
        if not codes:
            raise LexiconFormatError(f"{source}:{lineno}: no phoneme codes for {word!r}")
        for code in codes:
            if code not in BY_CODE:
                raise LexiconFormatError(
                    f"{source}:{lineno}: phoneme code {code!r} not in inventory"
                )
        if word in lex:
            logger.warning("%s:%d: duplicate lexicon entry %r, last one wins", source, lineno, word)
        lex.add(word, phonemes_from_codes(codes), provenance)
    return lex


def _load_bundled(name: str) -> Lexicon:
    text = resources.files("kidspeech.data").joinpath(name).read_text(encoding="utf-8")
    return parse_lexicon_text(text, provenance="bundled", source=name)


_bundled: Lexicon | None = None


def bundled_lexicon() -> Lexicon:
    """Color words plus the 40-item pseudo-word list (stand-in inventory)."""
    global _bundled
    if _bundled is None:
        _bundled = _load_bundled("colors.lex").merged_with(_load_bundled("pseudowords.lex"))
    return _bundled


def color_lexicon() -> Lexicon:
    return _load_bundled("colors.lex")


def pseudoword_lexicon() -> Lexicon:
    return _load_bundled("pseudowords.lex")


def load_lexicon(path) -> Lexicon:
    """Load a user lexicon file and merge it over the bundled entries.

    User entries shadow bundled ones.  Malformed lines and out-of-inventory
    phoneme codes raise `LexiconFormatError` naming the line.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    user = parse_lexicon_text(text, provenance="user", source=str(path))
    return bundled_lexicon().merged_with(user)


def g2p(word: str, lexicon: Lexicon | None = None) -> PhonemeSeq:
    """Convert one word to its phoneme sequence.

    Lexicon lookup first (bundled lexicon when none is given); otherwise
    Persian script goes through the letter rules and anything else is
    parsed as romanized phoneme codes, longest code first.
    """
    norm = normalize_word(word)
    if not norm:
        return ()
    lex = lexicon if lexicon is not None else bundled_lexicon()
    hit = lex.lookup(norm)
    if hit is not None:
        return hit
    if any("؀" <= ch <= "ۿ" for ch in norm):
        return _parse_script(norm)
    return _parse_romanized(norm)


def g2p_phrase(text: str, lexicon: Lexicon | None = None) -> PhonemeSeq:
    """Phoneme sequence of a whitespace-separated phrase, words concatenated."""
    out: list[Phoneme] = []
    for word in text.split():
        out.extend(g2p(word, lexicon))
    return tuple(out)
