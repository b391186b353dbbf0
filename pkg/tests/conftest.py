"""Shared corpus builders for the test suite.

Everything is deterministic: exhaustive enumerations are cached per (n, k)
and random corpora are driven by explicit seed ranges.
"""

from functools import lru_cache

from pseudocube import HypothesisClass, iter_all_classes, random_class


@lru_cache(maxsize=None)
def all_classes(n: int, k: int) -> tuple[HypothesisClass, ...]:
    return tuple(iter_all_classes(n, k))


def random_corpus(count: int, n: int, k: int, density: float = 0.5,
                  seed0: int = 0, max_size: int | None = None,
                  min_size: int = 1) -> list[HypothesisClass]:
    """The first ``count`` nonempty random classes from consecutive seeds,
    optionally filtered by size."""
    out = []
    seed = seed0
    while len(out) < count:
        h = random_class(n, k, density, seed)
        seed += 1
        if len(h) < min_size:
            continue
        if max_size is not None and len(h) > max_size:
            continue
        out.append(h)
        if seed - seed0 > 100 * count + 1000:
            raise RuntimeError("corpus generation is not finding enough classes")
    return out
