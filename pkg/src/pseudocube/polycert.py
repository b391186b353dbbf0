"""Exact-rational certificates for the sharp size bound.

Two certificate styles are produced:

* ``spanning_certificate`` builds the (monomial x pattern) evaluation matrix
  over exact integers and shows the monomial family of bounded high support
  spans all functions on the class (rank == |H|), via fraction-free
  elimination.
* ``construct_q`` replays the inductive argument: peel a pattern with a
  deficient direction, interpolate its off-direction indicator on the
  projection recursively, multiply the single-variable correction factor,
  and collect polynomials whose evaluation matrix is unit triangular.

All arithmetic is over exact rationals; certificates are bit-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .classes import (CapExceeded, DEFAULT_ENUMERATION_CAP, HypothesisClass,
                      Pattern, parse_class_json, serialize_class_json)
from .bounds import ds_sauer_bound, iter_bounded_high_vectors
from .dims import ds_dimension

ELIMINATION_BIT_CAP = 1_000_000


class PeelingError(RuntimeError):
    """No pattern with a deficient direction exists at some step: the class
    still contains a pseudo-cube on all coordinates, so the requested
    dimension budget is below the true DS dimension."""


@dataclass(frozen=True)
class MonomialSet:
    """Exponent vectors e with 0 <= e_i < k and at most d coordinates >= ell."""

    n: int
    k: int
    ell: int
    d: int
    exponents: tuple[Pattern, ...]


def monomial_set(n: int, k: int, ell: int, d: int,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> MonomialSet:
    """Enumerate the monomial basis; its cardinality equals the closed-form
    size bound (asserted)."""
    expected = ds_sauer_bound(n, k, ell, d)
    if expected > cap:
        raise CapExceeded(f"monomial set size {expected} exceeds cap {cap}")
    exps = tuple(iter_bounded_high_vectors(n, k, ell, d))
    assert len(exps) == expected, "monomial count must match the closed form"
    return MonomialSet(n=n, k=k, ell=ell, d=d, exponents=exps)


# ---------------------------------------------------------------------------
# Sparse rational polynomials with per-variable degree < k
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalPolynomial:
    """Terms map exponent vectors to nonzero rational coefficients."""

    n: int
    terms: tuple[tuple[Pattern, Fraction], ...]

    @classmethod
    def from_dict(cls, n: int, terms: dict[Pattern, Fraction]) -> "RationalPolynomial":
        kept = tuple(sorted((e, c) for e, c in terms.items() if c != 0))
        return cls(n=n, terms=kept)

    def evaluate(self, point: Pattern) -> Fraction:
        total = Fraction(0)
        for exp, coeff in self.terms:
            value = 1
            for x, e in zip(point, exp):
                if e:
                    value *= x ** e
            total += coeff * value
        return total

    def variable_degrees(self) -> tuple[int, ...]:
        degs = [0] * self.n
        for exp, _ in self.terms:
            for i, e in enumerate(exp):
                if e > degs[i]:
                    degs[i] = e
        return tuple(degs)


def _poly_mul_univariate(poly: dict[Pattern, Fraction], var: int,
                         coeffs: list[Fraction]) -> dict[Pattern, Fraction]:
    """Multiply a term dict by a univariate polynomial in ``var`` given by
    ascending coefficients."""
    out: dict[Pattern, Fraction] = {}
    for exp, c in poly.items():
        for e, u in enumerate(coeffs):
            if u == 0:
                continue
            new = exp[:var] + (exp[var] + e,) + exp[var + 1:]
            out[new] = out.get(new, Fraction(0)) + c * u
    return {e: c for e, c in out.items() if c != 0}


def _lagrange_coeffs(value: int, exclude: tuple[int, ...]) -> list[Fraction]:
    """Ascending coefficients of prod_{j in exclude} (x - j) / (value - j)."""
    coeffs = [Fraction(1)]
    for j in exclude:
        scale = Fraction(1, value - j)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for e, c in enumerate(coeffs):
            nxt[e + 1] += c * scale
            nxt[e] -= c * j * scale
        coeffs = nxt
    return coeffs


def indicator_poly(h: Pattern, k: int) -> RationalPolynomial:
    """The interpolation indicator of ``h`` on the full cube: value 1 at h and
    0 at every other point of {0..k-1}^n; per-variable degree k - 1."""
    n = len(h)
    for v in h:
        if not (0 <= v < k):
            raise ValueError(f"entry {v} out of range [0,{k})")
    terms: dict[Pattern, Fraction] = {(0,) * n: Fraction(1)}
    for i, hv in enumerate(h):
        others = tuple(j for j in range(k) if j != hv)
        terms = _poly_mul_univariate(terms, i, _lagrange_coeffs(hv, others))
    return RationalPolynomial.from_dict(n, terms)


# ---------------------------------------------------------------------------
# Spanning certificate (rank of the monomial evaluation matrix)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpanReport:
    rank: int
    spans: bool
    monomial_count: int
    class_size: int


def rank_bareiss(rows: list[list[int]], bit_cap: int = ELIMINATION_BIT_CAP) -> int:
    """Rank by fraction-free (division-free until exact) elimination with
    first-nonzero pivoting.  Intermediate growth beyond ``bit_cap`` bits
    raises instead of silently degrading."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = 1
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][c]
        for i in range(r + 1, nrows):
            mic = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c + 1, ncols):
                num = row_i[j] * pivot - mic * row_r[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise ArithmeticError("fraction-free elimination lost exactness")
                if q.bit_length() > bit_cap:
                    raise CapExceeded(f"entry exceeded {bit_cap} bits during elimination")
                row_i[j] = q
            row_i[c] = 0
        prev = pivot
        r += 1
        if r == nrows:
            break
    return r


def spanning_certificate(h: HypothesisClass, ell: int, d: int,
                         check_dim: bool = True,
                         cap: int = DEFAULT_ENUMERATION_CAP) -> SpanReport:
    """Rank of the (monomial x pattern) evaluation matrix over the exact
    integers.  ``spans`` is true iff the rank equals |H|, which is the content
    of the sharp size bound whenever d is at least the DS dimension of h.
    """
    if h.is_empty:
        raise ValueError("cannot certify the empty class")
    if check_dim:
        true_d = ds_dimension(h, ell).value
        if d < true_d:
            raise ValueError(f"d={d} is below the DS dimension {true_d}; "
                             "the certificate would be meaningless")
    mono = monomial_set(h.n, h.k, ell, d, cap=cap)
    pats = h.sorted_patterns()
    rows = []
    for exp in mono.exponents:
        rows.append([_int_monomial(p, exp) for p in pats])
    rank = rank_bareiss(rows)
    return SpanReport(rank=rank, spans=rank == len(pats),
                      monomial_count=len(mono.exponents), class_size=len(pats))


def _int_monomial(point: Pattern, exp: Pattern) -> int:
    value = 1
    for x, e in zip(point, exp):
        if e:
            value *= x ** e
    return value


# ---------------------------------------------------------------------------
# Peeling orders and the triangular Q construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    """Peeling certificate for a class.

    ``ordering`` lists all patterns; ``witnesses[t]`` is (direction, neighbor
    value set) for peeled steps and None for base-case (n == d) entries.
    When polynomials are present, ``eval_matrix[i][j]`` holds the value of the
    j-th polynomial at the i-th pattern, so A[i][i] == 1 and A[i][j] == 0 for
    i > j, exactly.
    """

    n: int
    k: int
    ell: int
    d: int
    ordering: tuple[Pattern, ...]
    witnesses: tuple[Optional[tuple[int, tuple[int, ...]]], ...]
    q_polys: Optional[tuple[RationalPolynomial, ...]] = None
    eval_matrix: Optional[tuple[tuple[Fraction, ...], ...]] = None


def _find_deficient(patterns: set[Pattern], n: int, ell: int):
    """Smallest (pattern, direction) whose line has size <= ell, with the
    neighbor value set; None if the set is an (ell+1)-pseudo-cube."""
    lines: dict[tuple[int, Pattern], list[Pattern]] = {}
    for p in patterns:
        for i in range(n):
            lines.setdefault((i, p[:i] + p[i + 1:]), []).append(p)
    best = None
    for (i, _), members in lines.items():
        if len(members) <= ell:
            for p in members:
                cand = (p, i)
                if best is None or cand < best:
                    best = cand
    if best is None:
        return None
    p, i = best
    values = tuple(sorted(q[i] for q in lines[(i, p[:i] + p[i + 1:])] if q != p))
    return p, i, values


def peeling_order(h: HypothesisClass, ell: int, d: int) -> Certificate:
    """Order the class so each pattern has fewer than ell neighbors in its
    witnessed direction within the remainder.  Requires n > d; gets stuck
    (and raises) exactly when some remainder is an (ell+1)-pseudo-cube on all
    coordinates, which cannot happen if d bounds the DS dimension."""
    if h.is_empty:
        raise ValueError("cannot order the empty class")
    if not (0 <= d < h.n):
        raise ValueError(f"peeling requires 0 <= d < n, got d={d}, n={h.n}")
    remaining = set(h.patterns)
    ordering: list[Pattern] = []
    witnesses: list[tuple[int, tuple[int, ...]]] = []
    while remaining:
        found = _find_deficient(remaining, h.n, ell)
        if found is None:
            raise PeelingError(
                f"no deficient pattern among {len(remaining)} remaining: the class "
                f"contains an {ell + 1}-pseudo-cube on all {h.n} coordinates")
        p, i, values = found
        ordering.append(p)
        witnesses.append((i, values))
        remaining.remove(p)
    return Certificate(n=h.n, k=h.k, ell=ell, d=d,
                       ordering=tuple(ordering), witnesses=tuple(witnesses))


def construct_q(h: HypothesisClass, ell: int, d: int) -> Certificate:
    """Replay the inductive construction of the basis polynomials.

    Base case n == d: interpolation indicators of the patterns.  Otherwise
    peel a deficient (pattern, direction), build the off-direction indicator
    on the projection by recursing with the same budget, and multiply the
    deficiency correction factor, whose degree in the witnessed variable
    stays below ell.  The resulting evaluation matrix is unit triangular and
    every polynomial is supported on the bounded-high monomial basis.
    """
    if h.is_empty:
        raise ValueError("cannot certify the empty class")
    if not (0 <= d <= h.n):
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={h.n}")
    if not (1 <= ell <= h.k):
        raise ValueError(f"need 1 <= ell <= k, got ell={ell}, k={h.k}")
    ordering, witnesses, polys, rows = _construct(h, ell, d, {})
    matrix = tuple(tuple(row) for row in rows)
    for i in range(len(ordering)):
        if matrix[i][i] != 1:
            raise AssertionError(f"diagonal entry {i} is {matrix[i][i]}, expected 1")
        for j in range(i):
            if matrix[i][j] != 0:
                raise AssertionError(f"entry ({i},{j}) is {matrix[i][j]}, expected 0")
    allowed = set(monomial_set(h.n, h.k, ell, d).exponents)
    for q in polys:
        for exp, _ in q.terms:
            if exp not in allowed:
                raise AssertionError(f"monomial {exp} escapes the bounded-high basis")
    return Certificate(n=h.n, k=h.k, ell=ell, d=d, ordering=ordering,
                       witnesses=witnesses, q_polys=polys, eval_matrix=matrix)


def _construct(h: HypothesisClass, ell: int, d: int, memo: dict):
    """Returns (ordering, witnesses, polys, rows) with rows[t][s] the value of
    poly s at pattern t; memoized per class so repeated projections are
    certified once."""
    key = (h.n, h.k, ell, d, h.patterns)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if h.n <= d:
        ordering = tuple(h.sorted_patterns())
        polys = tuple(indicator_poly(p, h.k) for p in ordering)
        rows = [[Fraction(int(t == s)) for s in range(len(ordering))]
                for t in range(len(ordering))]
        result = (ordering, (None,) * len(ordering), polys, rows)
        memo[key] = result
        return result
    remaining = set(h.patterns)
    ordering: list[Pattern] = []
    witnesses: list[tuple[int, tuple[int, ...]]] = []
    polys: list[RationalPolynomial] = []
    while remaining:
        found = _find_deficient(remaining, h.n, ell)
        if found is None:
            raise PeelingError(
                f"no deficient pattern among {len(remaining)} remaining: the class "
                f"contains an {ell + 1}-pseudo-cube on all {h.n} coordinates")
        p, i, values = found
        if h.n == 1:
            # the projection off the only coordinate is zero-dimensional, so
            # the off-direction indicator degenerates to the constant 1
            base = RationalPolynomial.from_dict(0, {(): Fraction(1)})
        else:
            proj = HypothesisClass(h.n - 1, h.k,
                                   frozenset(q[:i] + q[i + 1:] for q in remaining))
            sub_order, _, sub_polys, sub_rows = _construct(proj, ell, d, memo)
            target = p[:i] + p[i + 1:]
            base = _indicator_on_class(sub_order, sub_polys, sub_rows, target)
        lifted: dict[Pattern, Fraction] = {
            exp[:i] + (0,) + exp[i:]: c for exp, c in base.terms}
        factor = _lagrange_coeffs(p[i], values) if values else [Fraction(1)]
        q_terms = _poly_mul_univariate(lifted, i, factor)
        ordering.append(p)
        witnesses.append((i, values))
        polys.append(RationalPolynomial.from_dict(h.n, q_terms))
        remaining.remove(p)
    rows = [[q.evaluate(p) for q in polys] for p in ordering]
    result = (tuple(ordering), tuple(witnesses), tuple(polys), rows)
    memo[key] = result
    return result


def _indicator_on_class(ordering: tuple[Pattern, ...],
                        polys: tuple[RationalPolynomial, ...],
                        rows: list[list[Fraction]],
                        target: Pattern) -> RationalPolynomial:
    """Combine basis polynomials into the indicator of ``target`` on the
    class they certify, via back substitution against the unit-triangular
    evaluation matrix."""
    size = len(ordering)
    rhs = [Fraction(1) if p == target else Fraction(0) for p in ordering]
    coeff = [Fraction(0)] * size
    for t in range(size - 1, -1, -1):
        acc = rhs[t]
        row = rows[t]
        for s in range(t + 1, size):
            if coeff[s]:
                acc -= row[s] * coeff[s]
        coeff[t] = acc
    combined: dict[Pattern, Fraction] = {}
    for c, q in zip(coeff, polys):
        if c == 0:
            continue
        for exp, u in q.terms:
            combined[exp] = combined.get(exp, Fraction(0)) + c * u
    n = len(target)
    return RationalPolynomial.from_dict(n, combined)


# ---------------------------------------------------------------------------
# Certificate serialization and independent re-checking
# ---------------------------------------------------------------------------

def serialize_certificate(cert: Certificate, h: HypothesisClass) -> str:
    """Self-contained JSON: the class, the ordering as indices into its
    canonical pattern order, per-step witnesses, optional polynomial terms."""
    pats = h.sorted_patterns()
    index = {p: i for i, p in enumerate(pats)}
    obj = {
        "class": json.loads(serialize_class_json(h)),
        "ell": cert.ell,
        "d": cert.d,
        "ordering": [index[p] for p in cert.ordering],
        "witnesses": [None if w is None else {"direction": w[0], "values": list(w[1])}
                      for w in cert.witnesses],
    }
    if cert.q_polys is not None:
        obj["q_polys"] = [[[list(exp), c.numerator, c.denominator] for exp, c in q.terms]
                          for q in cert.q_polys]
    return json.dumps(obj, separators=(",", ":")) + "\n"


def load_certificate(text: str) -> tuple[Certificate, HypothesisClass]:
    obj = json.loads(text)
    h = parse_class_json(json.dumps(obj["class"]))
    pats = h.sorted_patterns()
    ordering = tuple(pats[i] for i in obj["ordering"])
    witnesses = tuple(None if w is None else (w["direction"], tuple(w["values"]))
                      for w in obj["witnesses"])
    q_polys = None
    if "q_polys" in obj:
        q_polys = tuple(
            RationalPolynomial.from_dict(
                h.n, {tuple(exp): Fraction(num, den) for exp, num, den in terms})
            for terms in obj["q_polys"])
    cert = Certificate(n=h.n, k=h.k, ell=obj["ell"], d=obj["d"],
                       ordering=ordering, witnesses=witnesses, q_polys=q_polys)
    return cert, h


@dataclass(frozen=True)
class VerifyReport:
    ok: bool
    failures: tuple[str, ...]


def verify_certificate(cert: Certificate, h: HypothesisClass) -> VerifyReport:
    """Re-check a certificate without re-deriving it.

    Validates the ordering is a permutation of the class, each witnessed step
    is deficient within its suffix with the recorded value set, and (when
    polynomials are present) support, per-variable degrees, and exact unit
    triangularity of the evaluation matrix.
    """
    failures: list[str] = []
    if set(cert.ordering) != h.patterns or len(cert.ordering) != len(h):
        failures.append("ordering is not a permutation of the class")
    if len(cert.witnesses) != len(cert.ordering):
        failures.append("witness count differs from ordering length")
    for t, (p, w) in enumerate(zip(cert.ordering, cert.witnesses)):
        if w is None:
            if cert.n != cert.d:
                failures.append(f"step {t}: missing witness with n > d")
            continue
        i, values = w
        suffix = cert.ordering[t:]
        neighbors = sorted(q[i] for q in suffix
                           if q != p and q[:i] + q[i + 1:] == p[:i] + p[i + 1:])
        if len(values) >= cert.ell:
            failures.append(f"step {t}: witness set size {len(values)} not below ell")
        if tuple(neighbors) != tuple(values):
            failures.append(f"step {t}: recorded values {values} differ from "
                            f"actual neighbors {tuple(neighbors)}")
    if cert.q_polys is not None:
        if len(cert.q_polys) != len(cert.ordering):
            failures.append("polynomial count differs from ordering length")
        allowed = set(monomial_set(cert.n, cert.k, cert.ell, cert.d).exponents)
        for s, q in enumerate(cert.q_polys):
            for exp, _ in q.terms:
                if exp not in allowed:
                    failures.append(f"poly {s}: monomial {exp} outside the basis")
                    break
        for t, p in enumerate(cert.ordering):
            for s, q in enumerate(cert.q_polys):
                value = q.evaluate(p)
                if t == s and value != 1:
                    failures.append(f"diagonal ({t},{s}) is {value}, expected 1")
                if t > s and value != 0:
                    failures.append(f"entry ({t},{s}) is {value}, expected 0")
    return VerifyReport(ok=not failures, failures=tuple(failures))
