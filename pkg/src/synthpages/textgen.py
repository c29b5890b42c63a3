"""Seeded pseudo-text: titles, abstracts, captions, body paragraphs, authors.

The prose only needs to look like scholarly text at a glance.  Words come
from a bundled lexicon and are chained with a deterministic order-2 word
chain, so identical seeds reproduce identical text on any platform.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from functools import lru_cache

from .sampler import RngSeed, _rng

TEXT_ROLES = (
    "title", "author", "abstract", "heading-1", "heading-2", "heading-3",
    "caption", "body", "keywords",
)

# words never used to start or end a sentence
_FUNCTION_WORDS = frozenset(
    "the a an of in on for with from under over between among through during "
    "we our this that these those its their such each both all some several many "
    "and or".split()
)


@dataclass(frozen=True)
class TextBlock:
    role: str
    tokens: tuple
    target_line_count: int = 0

    @property
    def text(self):
        return " ".join(self.tokens)


def _read_lines(name):
    ref = importlib.resources.files("synthpages") / "data" / name
    return [ln.strip() for ln in ref.read_text().splitlines() if ln.strip()]


@lru_cache(maxsize=4)
def vocabulary(path=None):
    if path is None:
        words = []
        for line in _read_lines("vocab.txt"):
            words.extend(line.split())
    else:
        with open(path) as fh:
            words = fh.read().split()
    return tuple(words)


@lru_cache(maxsize=4)
def name_pool(path=None):
    lines = _read_lines("names.txt") if path is None else open(path).read().splitlines()
    pool = []
    for line in lines:
        if "|" in line:
            name, affil = line.split("|", 1)
            pool.append((name.strip(), affil.strip()))
    return tuple(pool)


def _mix(a, b, c):
    # 64-bit splitmix-style hash, stable across platforms
    x = (a * 0x9E3779B97F4A7C15 + b * 0xBF58476D1CE4E5B9 + c * 0x94D049BB133111EB) & ((1 << 64) - 1)
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & ((1 << 64) - 1)
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & ((1 << 64) - 1)
    return x ^ (x >> 31)


def _next_word(vocab, prev2, prev1, branch):
    """Order-2 chain: the successor set is a fixed hash of the state."""
    return vocab[_mix(prev2, prev1, branch) % len(vocab)]


def _sentence(rng, vocab, length):
    idx2, idx1 = 0, int(rng.integers(len(vocab)))
    words = []
    while len(words) < length:
        branch = int(rng.integers(8))
        word = _next_word(vocab, idx2, idx1, branch)
        if len(words) == length - 1 and word in _FUNCTION_WORDS:
            continue  # do not end a sentence on a function word
        words.append(word)
        idx2, idx1 = idx1, vocab.index(word)
    return words


def _title_case(words):
    out = []
    for i, w in enumerate(words):
        if i == 0 or w not in _FUNCTION_WORDS:
            out.append(w.capitalize())
        else:
            out.append(w)
    return out


def pseudo_text(role, approx_tokens, seed, vocab_path=None) -> TextBlock:
    """Generate a text block of roughly ``approx_tokens`` words.

    The final token count is within +/-20% of the request (rounded
    outward), deterministic per (role, approx_tokens, seed).
    """
    if approx_tokens < 1:
        raise ValueError("approx_tokens must be >= 1")
    if role not in TEXT_ROLES:
        raise ValueError(f"unknown text role: {role!r}")
    rng = _rng(seed)
    vocab = vocabulary(vocab_path)
    lo = max(1, int(approx_tokens * 0.8))
    hi = max(lo, int(approx_tokens * 1.2))
    target = int(rng.integers(lo, hi + 1))

    tokens = []
    while len(tokens) < target:
        remaining = target - len(tokens)
        length = min(remaining, int(rng.integers(5, 15)))
        if remaining - length in (1, 2):
            length = remaining
        words = _sentence(rng, vocab, length)
        words[0] = words[0].capitalize()
        words[-1] = words[-1] + "."
        tokens.extend(words)
    if role == "title":
        tokens = _title_case([t.rstrip(".") for t in tokens])
    elif role in ("heading-1", "heading-2", "heading-3"):
        tokens = _title_case([t.rstrip(".") for t in tokens])
    return TextBlock(role=role, tokens=tuple(tokens))


def pseudo_authors(count, style, seed, names_path=None) -> TextBlock:
    """Author block: ``count`` synthetic name/affiliation lines."""
    if not 1 <= count <= 12:
        raise ValueError("author count must be in [1, 12]")
    rng = _rng(seed)
    pool = name_pool(names_path)
    picks = rng.choice(len(pool), size=min(count, len(pool)), replace=False)
    lines = []
    with_affiliation = bool(rng.random() < 0.8)
    for i in picks:
        name, affil = pool[int(i)]
        lines.append(f"{name} | {affil}" if with_affiliation else name)
    tokens = []
    for line in lines:
        tokens.extend(line.split())
        tokens.append("\n")
    return TextBlock(role="author", tokens=tuple(tokens[:-1]),
                     target_line_count=len(lines))
