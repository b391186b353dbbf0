"""Finite multiclass hypothesis classes: encoding, validation, I/O, transformations.

A hypothesis class is a finite set of distinct label vectors ("patterns") of a
common length n over the alphabet {0, ..., k-1}.  Everything downstream
(dimensions, bounds, graphs, certificates, learners) consumes this type.

All objects here are immutable; every operation is a pure function of its
inputs, so they may be called concurrently.  Randomness enters only through
explicit seeds.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Iterator

Pattern = tuple[int, ...]
Coords = tuple[int, ...]

DEFAULT_ENUMERATION_CAP = 2 ** 24


class ClassFormatError(ValueError):
    """Malformed class input; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CapExceeded(RuntimeError):
    """An exhaustive routine would exceed its configured enumeration cap."""


@dataclass(frozen=True)
class HypothesisClass:
    """A set of distinct patterns in {0,...,k-1}^n.

    The empty class is representable (several operations reject it in their
    own preconditions); ``is_empty`` flags it.
    """

    n: int
    k: int
    patterns: frozenset[Pattern]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        for p in self.patterns:
            if len(p) != self.n:
                raise ValueError(f"pattern {p} has length {len(p)}, expected {self.n}")
            for v in p:
                if not (0 <= v < self.k):
                    raise ValueError(f"label {v} out of range [0,{self.k}) in pattern {p}")

    @classmethod
    def from_patterns(cls, n: int, k: int, patterns: Iterable[Iterable[int]]) -> "HypothesisClass":
        return cls(n, k, frozenset(tuple(p) for p in patterns))

    @property
    def is_empty(self) -> bool:
        return not self.patterns

    def __len__(self) -> int:
        return len(self.patterns)

    def sorted_patterns(self) -> list[Pattern]:
        """Patterns in canonical (lexicographic) order."""
        return sorted(self.patterns)

    def __contains__(self, pattern) -> bool:
        return tuple(pattern) in self.patterns


def validate_coords(coords: Iterable[int], n: int) -> Coords:
    """Check a coordinate set: nonempty, strictly increasing, within [0, n)."""
    s = tuple(coords)
    if not s:
        raise ValueError("coordinate set must be nonempty")
    for a, b in zip(s, s[1:]):
        if a >= b:
            raise ValueError(f"coordinate set {s} is not strictly increasing")
    if s[0] < 0 or s[-1] >= n:
        raise ValueError(f"coordinate set {s} out of range [0,{n})")
    return s


def project(hc: HypothesisClass, coords: Iterable[int]) -> HypothesisClass:
    """Restrict every pattern to the given coordinates; duplicates collapse.

    The result has n = len(coords) and the same alphabet.
    """
    s = validate_coords(coords, hc.n)
    return HypothesisClass(len(s), hc.k, frozenset(tuple(p[i] for i in s) for p in hc.patterns))


def random_class(n: int, k: int, density: float, seed: int,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> HypothesisClass:
    """Include each of the k^n patterns independently with probability ``density``.

    Deterministic: the same seed yields the identical class.  density=1 gives
    the full cube, density=0 the (flagged) empty class.
    """
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    if not (0.0 <= density <= 1.0):
        raise ValueError(f"density must lie in [0,1], got {density}")
    total = k ** n
    if total > cap:
        raise CapExceeded(f"k^n = {total} exceeds enumeration cap {cap}")
    rng = random.Random(seed)
    chosen = [p for p in _iter_cube(n, k) if rng.random() < density]
    return HypothesisClass(n, k, frozenset(chosen))


def _iter_cube(n: int, k: int) -> Iterator[Pattern]:
    """All of {0,...,k-1}^n in lexicographic order."""
    p = [0] * n
    while True:
        yield tuple(p)
        i = n - 1
        while i >= 0 and p[i] == k - 1:
            p[i] = 0
            i -= 1
        if i < 0:
            return
        p[i] += 1


def iter_all_classes(n: int, k: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[HypothesisClass]:
    """Every nonempty class over {0..k-1}^n, enumerated deterministically.

    There are 2^(k^n) - 1 of them; the bitmask of the lexicographic cell list
    runs from 1 upward.  Intended for exhaustive sweeps at tiny (n, k).
    """
    cells = list(_iter_cube(n, k))
    if 2 ** len(cells) > cap:
        raise CapExceeded(f"2^(k^n) = 2^{len(cells)} exceeds cap {cap}")
    for mask in range(1, 2 ** len(cells)):
        pats = [cells[j] for j in range(len(cells)) if mask >> j & 1]
        yield HypothesisClass(n, k, frozenset(pats))


# ---------------------------------------------------------------------------
# I/O: line-oriented class files and the JSON variant
# ---------------------------------------------------------------------------

def parse_class(text: str | bytes) -> HypothesisClass:
    """Parse a class file.

    Grammar: the first non-comment line is ``n=<int> k=<int>``; every
    following non-comment line holds n whitespace-separated labels; ``#``
    starts a comment.  A leading ``{`` switches to the JSON form.
    Duplicate rows are rejected.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_class_json(text)
    n = k = None
    patterns: set[Pattern] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or not parts[0].startswith("n=") or not parts[1].startswith("k="):
                raise ClassFormatError(lineno, f"expected header 'n=<int> k=<int>', got {line!r}")
            try:
                n = int(parts[0][2:])
                k = int(parts[1][2:])
            except ValueError:
                raise ClassFormatError(lineno, f"non-integer header field in {line!r}") from None
            if n < 1 or k < 2:
                raise ClassFormatError(lineno, f"need n >= 1 and k >= 2, got n={n} k={k}")
            continue
        fields = line.split()
        if len(fields) != n:
            raise ClassFormatError(lineno, f"expected {n} labels, got {len(fields)}")
        try:
            row = tuple(int(f) for f in fields)
        except ValueError:
            raise ClassFormatError(lineno, f"non-integer label in {line!r}") from None
        for v in row:
            if not (0 <= v < k):
                raise ClassFormatError(lineno, f"label {v} out of range [0,{k})")
        if row in patterns:
            raise ClassFormatError(lineno, f"duplicate pattern {row}")
        patterns.add(row)
    if n is None:
        raise ClassFormatError(1, "missing header line 'n=<int> k=<int>'")
    return HypothesisClass(n, k, frozenset(patterns))


def parse_class_json(text: str | bytes) -> HypothesisClass:
    """Parse the structured form: {"n": ..., "k": ..., "patterns": [[...], ...]}."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ClassFormatError(exc.lineno, f"invalid JSON: {exc.msg}") from None
    for field in ("n", "k", "patterns"):
        if field not in obj:
            raise ClassFormatError(1, f"missing field {field!r}")
    n, k = obj["n"], obj["k"]
    if not isinstance(n, int) or not isinstance(k, int) or n < 1 or k < 2:
        raise ClassFormatError(1, f"need integer n >= 1 and k >= 2, got n={n!r} k={k!r}")
    patterns: set[Pattern] = set()
    for row in obj["patterns"]:
        t = tuple(row)
        if len(t) != n:
            raise ClassFormatError(1, f"pattern {t} has length {len(t)}, expected {n}")
        for v in t:
            if not isinstance(v, int) or not (0 <= v < k):
                raise ClassFormatError(1, f"label {v!r} out of range [0,{k})")
        if t in patterns:
            raise ClassFormatError(1, f"duplicate pattern {t}")
        patterns.add(t)
    return HypothesisClass(n, k, frozenset(patterns))


def serialize_class(hc: HypothesisClass) -> str:
    """Canonical text form: header, then rows in lexicographic order."""
    lines = [f"n={hc.n} k={hc.k}"]
    lines.extend(" ".join(str(v) for v in p) for p in hc.sorted_patterns())
    return "\n".join(lines) + "\n"


def serialize_class_json(hc: HypothesisClass) -> str:
    """Canonical JSON form (rows sorted lexicographically)."""
    obj = {"n": hc.n, "k": hc.k, "patterns": [list(p) for p in hc.sorted_patterns()]}
    return json.dumps(obj, separators=(",", ":")) + "\n"
