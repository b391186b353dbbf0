"""Independent brute-force oracles.

These deliberately avoid the package's accelerated code paths (peeling,
flows, fraction-free elimination) so that agreement is meaningful.
"""

from fractions import Fraction
from itertools import combinations

from pseudocube import HypothesisClass, is_pseudocube


def brute_max_pseudocube(p: HypothesisClass, m: int) -> frozenset:
    """Union of all m-pseudo-cube subsets, by full subset enumeration."""
    pats = sorted(p.patterns)
    union: set = set()
    for r in range(1, len(pats) + 1):
        for subset in combinations(pats, r):
            cand = HypothesisClass(p.n, p.k, frozenset(subset))
            if is_pseudocube(cand, m):
                union.update(subset)
    return frozenset(union)


def brute_contains_pseudocube(p: HypothesisClass, m: int) -> bool:
    pats = sorted(p.patterns)
    for r in range(1, len(pats) + 1):
        for subset in combinations(pats, r):
            if is_pseudocube(HypothesisClass(p.n, p.k, frozenset(subset)), m):
                return True
    return False


def brute_ds_dimension(h: HypothesisClass, ell: int) -> int:
    """DS dimension straight from the definition: largest coordinate subset
    whose projection has a subset that is an (ell+1)-pseudo-cube."""
    from pseudocube import project
    best = 0
    for d in range(1, h.n + 1):
        for coords in combinations(range(h.n), d):
            if brute_contains_pseudocube(project(h, coords), ell + 1):
                best = d
    return best


def brute_min_max_outdegree(num_vertices: int, edges: list[tuple[int, ...]],
                            ell: int) -> int:
    """Exact minimum over all list orientations of the maximum ell-outdegree,
    by exhaustive search over charged-vertex choices with pruning."""
    demanding = [(e, len(e) - ell) for e in edges if len(e) > ell]
    if not demanding:
        return 0
    deg = [0] * num_vertices
    for e, _ in demanding:
        for v in e:
            deg[v] += 1
    best = max(deg)  # charging every incident vertex is one valid orientation
    counts = [0] * num_vertices

    def rec(idx: int, cur_max: int) -> None:
        nonlocal best
        if cur_max >= best:
            return
        if idx == len(demanding):
            best = cur_max
            return
        e, demand = demanding[idx]
        for charged in combinations(e, demand):
            for v in charged:
                counts[v] += 1
            rec(idx + 1, max(cur_max, max(counts[v] for v in charged)))
            for v in charged:
                counts[v] -= 1

    rec(0, 0)
    return best


def rank_fraction_pivot(rows: list[list[int]]) -> int:
    """Rank over exact rationals with largest-absolute-value pivoting; an
    elimination strategy independent of the fraction-free one."""
    m = [[Fraction(x) for x in row] for row in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    rank = 0
    for c in range(ncols):
        pivot = max(range(rank, nrows), key=lambda i: abs(m[i][c]), default=None)
        if pivot is None or m[pivot][c] == 0:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][c]
        for i in range(rank + 1, nrows):
            factor = m[i][c] * inv
            if factor:
                m[i] = [a - factor * b for a, b in zip(m[i], m[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank
