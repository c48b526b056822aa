"""Tokenizers and the sentence splitter used across the pipeline.

Three different token notions coexist on purpose:

* ``word_count`` counts whitespace-separated tokens after trimming; this is
  the length measure used by the selection scoring function and the
  conciseness statistic.
* ``lexical_tokens`` lowercases, strips punctuation, and splits on
  whitespace; used by the lexical embedding and matching backends.
* ``alnum_tokens`` extracts lowercased alphanumeric runs; used by ROUGE.
"""
from __future__ import annotations

import re

from .errors import ConfigError

_ALNUM_RE = re.compile(r"[a-z0-9]+")
_PUNCT_RE = re.compile(r"[^\w\s]", re.UNICODE)
_SENT_BOUNDARY_RE = re.compile(r"[.!?]")
_DIGIT_DOT_DIGIT_RE = re.compile(r"\d\.\d")


def word_count(text: str) -> int:
    """Number of whitespace-separated tokens after trimming.

    Raises ConfigError on text that is empty after trimming.
    """
    tokens = text.split()
    if not tokens:
        raise ConfigError("word_count requires non-empty text")
    return len(tokens)


def lexical_tokens(text: str) -> list[str]:
    """Lowercased, punctuation-stripped whitespace tokens."""
    cleaned = _PUNCT_RE.sub("", text.lower())
    return cleaned.split()


def alnum_tokens(text: str) -> list[str]:
    """Lowercased alphanumeric tokens (the ROUGE tokenization)."""
    return _ALNUM_RE.findall(text.lower())


def _token_around(text: str, pos: int) -> str:
    """Maximal non-whitespace run containing position ``pos``."""
    start = pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    end = pos
    while end < len(text) and not text[end].isspace():
        end += 1
    return text[start:end]


def split_into_sentences(text: str) -> list[str]:
    """Split text into sentences with a cheap deterministic rule.

    A sentence boundary is a '.', '!' or '?' followed by whitespace and an
    uppercase letter, or by the end of the text. No boundary is placed when
    the surrounding token contains a digit-period-digit pattern (decimal
    numbers, version strings). Boundary punctuation stays attached to its
    sentence; inter-sentence whitespace is dropped.
    """
    cut_points = []
    for match in _SENT_BOUNDARY_RE.finditer(text):
        pos = match.start()
        rest = text[pos + 1:]
        stripped = rest.lstrip()
        if stripped and not (len(stripped) != len(rest) and stripped[0].isupper()):
            continue
        if _DIGIT_DOT_DIGIT_RE.search(_token_around(text, pos)):
            continue
        if stripped:  # whitespace + uppercase: cut after the punctuation
            cut_points.append(pos + 1)
        # end-of-text boundaries need no cut; the final segment absorbs them
    sentences = []
    prev = 0
    for cut in cut_points:
        segment = text[prev:cut].strip()
        if segment:
            sentences.append(segment)
        prev = cut
    tail = text[prev:].strip()
    if tail:
        sentences.append(tail)
    return sentences


# ---------------------------------------------------------------------------
# Porter stemmer (classic 1980 definition), used only behind the optional
# ROUGE stemming flag for parity experiments with stemming-enabled scorers.
# ---------------------------------------------------------------------------

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure_fast(stem: str) -> int:
    """Number of VC sequences in the stem (the Porter measure m)."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        cons = _is_consonant(stem, i)
        if cons and prev_vowel:
            m += 1
        prev_vowel = not cons
    return m


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (_is_consonant(word, len(word) - 3)
            and not _is_consonant(word, len(word) - 2)
            and _is_consonant(word, len(word) - 1)):
        return False
    return word[-1] not in "wxy"


def _replace_suffix(word: str, suffix: str, repl: str, min_measure: int) -> str | None:
    if not word.endswith(suffix):
        return None
    stem = word[: len(word) - len(suffix)]
    if _measure_fast(stem) > min_measure - 1:
        return stem + repl
    return word


def porter_stem(token: str) -> str:
    """Stem a lowercase token with the Porter algorithm."""
    word = token
    if len(word) <= 2:
        return word

    # Step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # Step 1b
    if word.endswith("eed"):
        stem = word[:-3]
        if _measure_fast(stem) > 0:
            word = word[:-1]
    else:
        matched = None
        for suffix in ("ed", "ing"):
            if word.endswith(suffix):
                stem = word[: len(word) - len(suffix)]
                if _contains_vowel(stem):
                    matched = stem
                break
        if matched is not None:
            word = matched
            if word.endswith(("at", "bl", "iz")):
                word += "e"
            elif _ends_double_consonant(word) and word[-1] not in "lsz":
                word = word[:-1]
            elif _measure_fast(word) == 1 and _ends_cvc(word):
                word += "e"

    # Step 1c
    if word.endswith("y") and _contains_vowel(word[:-1]):
        word = word[:-1] + "i"

    # Step 2
    step2 = (
        ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
        ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
        ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
        ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
        ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
    )
    for suffix, repl in step2:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure_fast(stem) > 0:
                word = stem + repl
            break

    # Step 3
    step3 = (
        ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
        ("ical", "ic"), ("ful", ""), ("ness", ""),
    )
    for suffix, repl in step3:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure_fast(stem) > 0:
                word = stem + repl
            break

    # Step 4
    step4 = (
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
    )
    for suffix in step4:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure_fast(stem) > 1:
                if suffix == "ion" and not (stem and stem[-1] in "st"):
                    continue
                word = stem
            break

    # Step 5a
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure_fast(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            word = stem

    # Step 5b
    if _measure_fast(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        word = word[:-1]

    return word
