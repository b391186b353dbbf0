"""Desk-scale list learners on finite instance spaces: the one-inclusion
list predictor, its leave-one-out experiment, the amplified PAC learner
(train several candidates on chunks, pick the validation minimizer), plus
the uniform-convergence experiment and the projection lower-bound check
for graph-shattered list classes.

Instances are indices 0..n-1 into a finite set; concepts are the patterns of
a hypothesis class over those instances.  All randomness flows from one root
seed; trial t uses its own derived stream, so any trial is reproducible in
isolation and aggregation is order independent.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .classes import CapExceeded, HypothesisClass, Pattern
from .dims import ListClass, ListMember, ds_dimension, graph_dimension
from .oig import min_max_orientation_indexed

LabeledPair = tuple[int, int]

PROJECTION_ENUM_CAP = 2 ** 22


class RealizabilityError(ValueError):
    """The sample cannot be explained jointly by the class and the list."""


def _llog(x: float) -> float:
    """Natural log clamped below at 1, the convention used by every bound here."""
    return max(math.log(x), 1.0)


def _trial_seed(seed: int, trial: int) -> int:
    return (seed << 32) + trial


def theoretical_ell_prime(ell: int, d: int, m: int) -> float:
    """The first-stage list width ell * (e*d)^sqrt(d) * log(2m) that an
    external wide-list learner would guarantee at sample size m.  Reported
    for context only; nothing is asserted against it since that learner is
    pluggable here."""
    if d == 0:
        return float(ell)
    return ell * (math.e * d) ** math.sqrt(d) * math.log(2 * m)


# ---------------------------------------------------------------------------
# Tasks and list providers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConceptTask:
    """A realizable distribution: instance x carries probability probs[x] and
    label target[x], so the target concept has zero loss by construction."""

    concepts: HypothesisClass
    target: Pattern
    probs: tuple[Fraction, ...]
    seed: int = 0

    @property
    def n(self) -> int:
        return self.concepts.n

    @property
    def k(self) -> int:
        return self.concepts.k

    def cum_weights(self) -> list[float]:
        total = 0.0
        out = []
        for p in self.probs:
            total += float(p)
            out.append(total)
        return out


def make_task(concepts: HypothesisClass, target_index: int,
              weights: Optional[Sequence] = None, seed: int = 0) -> ConceptTask:
    """Build a task whose distribution places weight w_x on (x, target(x)).

    ``target_index`` selects the target from the canonical pattern order.
    Weights default to uniform; they must be nonnegative and not all zero.
    """
    pats = concepts.sorted_patterns()
    if not (0 <= target_index < len(pats)):
        raise ValueError(f"target index {target_index} out of range [0,{len(pats)})")
    target = pats[target_index]
    if weights is None:
        weights = [1] * concepts.n
    weights = [Fraction(w) for w in weights]
    if len(weights) != concepts.n:
        raise ValueError(f"need {concepts.n} weights, got {len(weights)}")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    total = sum(weights)
    if total == 0:
        raise ValueError("weights must not all be zero")
    return ConceptTask(concepts=concepts, target=target,
                       probs=tuple(w / total for w in weights), seed=seed)


@dataclass(frozen=True)
class ListPredictor:
    """Per-instance label sets of size at most ell."""

    ell: int
    lists: tuple[frozenset[int], ...]
    provenance: str

    def __post_init__(self):
        for s in self.lists:
            if len(s) > self.ell:
                raise ValueError(f"list of size {len(s)} exceeds ell={self.ell}")

    def __call__(self, x: int) -> frozenset[int]:
        return self.lists[x]

    @property
    def max_list_size(self) -> int:
        return max((len(s) for s in self.lists), default=0)


def list_provider(kind: str, task: ConceptTask,
                  sample: Optional[Sequence[LabeledPair]] = None,
                  user_lists: Optional[Sequence] = None,
                  ell: Optional[int] = None) -> ListPredictor:
    """Produce the wide first-stage list the one-inclusion learner narrows.

    Kinds: ``full-alphabet`` (every label everywhere, always realizable),
    ``sample-support`` (labels observed at each instance in ``sample``), or
    ``user-supplied`` (validated against ``ell``).
    """
    n, k = task.n, task.k
    if kind == "full-alphabet":
        full = frozenset(range(k))
        return ListPredictor(ell=k, lists=(full,) * n, provenance="full-alphabet")
    if kind == "sample-support":
        if sample is None:
            raise ValueError("sample-support provider needs a sample")
        seen: dict[int, set[int]] = {x: set() for x in range(n)}
        for x, y in sample:
            seen[x].add(y)
        lists = tuple(frozenset(seen[x]) for x in range(n))
        size = max((len(s) for s in lists), default=1)
        return ListPredictor(ell=max(size, 1), lists=lists, provenance="sample-support")
    if kind == "user-supplied":
        if user_lists is None or ell is None:
            raise ValueError("user-supplied provider needs lists and ell")
        lists = tuple(frozenset(s) for s in user_lists)
        if len(lists) != n:
            raise ValueError(f"need {n} lists, got {len(lists)}")
        return ListPredictor(ell=ell, lists=lists, provenance="user-supplied")
    raise ValueError(f"unknown provider kind {kind!r}")


def population_error(task: ConceptTask, predictor: ListPredictor) -> Fraction:
    """Exact population loss of a predictor under the task distribution."""
    return sum((p for x, p in enumerate(task.probs) if task.target[x] not in predictor(x)),
               Fraction(0))


def sample_realizable(concepts: HypothesisClass, sample: Sequence[LabeledPair]) -> bool:
    """Does some concept match every labeled pair?"""
    return any(all(c[x] == y for x, y in sample) for c in concepts.patterns)


def _draw_pairs(task: ConceptTask, m: int, rng: random.Random) -> list[LabeledPair]:
    cum = task.cum_weights()
    xs = rng.choices(range(task.n), cum_weights=cum, k=m)
    return [(x, task.target[x]) for x in xs]


# ---------------------------------------------------------------------------
# One-inclusion list prediction
# ---------------------------------------------------------------------------

def predict_one_inclusion(concepts: HypothesisClass, mu: ListPredictor,
                          sample: Sequence[LabeledPair], x: int,
                          ell: int) -> frozenset[int]:
    """Predict a label set of size at most ell for instance ``x``.

    Restrict the class to the sample points plus x, keep the patterns whose
    entries all lie in mu's lists, orient the one-inclusion graph of that
    restriction with the least possible maximum ell-outdegree, and return
    the values the chosen orientation assigns to the edge consistent with
    the sample labels.

    Internally patterns are stored per distinct instance (restrictions to a
    point sequence are determined by their values on the distinct points),
    which keeps the cost linear in the sample length: directions of repeated
    instances contribute only singleton edges, so the orientation problem is
    decided entirely by the directions of once-sampled instances.
    """
    verts, edges, star, star_edge, xs = _reduced_problem(concepts, mu, sample, x)
    if star_edge is None:
        # the test instance was sampled: its value is forced by the labels
        return frozenset(v[xs] for v in star)
    selection, _ = min_max_orientation_indexed(len(verts), edges, ell)
    return frozenset(verts[j][xs] for j in selection[star_edge])


def _reduced_problem(concepts: HypothesisClass, mu: ListPredictor,
                     sample: Sequence[LabeledPair], x: int):
    """Vertices (reduced patterns over the distinct instances), orientable
    edges, the label-consistent patterns, the index of their edge in the test
    direction (None when the test instance was itself sampled, which forces
    the prediction), and the test slot."""
    seq = [x_i for x_i, _ in sample] + [x]
    distinct = sorted(set(seq))
    slot = {u: t for t, u in enumerate(distinct)}
    mult = Counter(seq)
    allowed = [mu(u) for u in distinct]
    reduced: set[Pattern] = set()
    for c in concepts.patterns:
        r = tuple(c[u] for u in distinct)
        if all(v in a for v, a in zip(r, allowed)):
            reduced.add(r)
    if not reduced:
        raise RealizabilityError("no pattern is consistent with the class and the list")
    required: dict[int, int] = {}
    for x_i, y_i in sample:
        prior = required.setdefault(x_i, y_i)
        if prior != y_i:
            raise RealizabilityError(f"contradictory labels for instance {x_i}")
    verts = sorted(reduced)
    star = [v for v in verts
            if all(v[slot[u]] == y for u, y in required.items())]
    if not star:
        raise RealizabilityError("no pattern is consistent with the sample labels")
    xs = slot[x]
    if mult[x] >= 2:
        return verts, [], star, None, xs
    index = {v: j for j, v in enumerate(verts)}
    edges: list[tuple[int, ...]] = []
    star_edge: Optional[int] = None
    star_key = star[0][:xs] + star[0][xs + 1:]
    for u in distinct:
        if mult[u] != 1:
            continue  # repeated instances: every edge in that direction is a singleton
        su = slot[u]
        groups: dict[Pattern, list[int]] = {}
        for v in verts:
            groups.setdefault(v[:su] + v[su + 1:], []).append(index[v])
        for key in sorted(groups):
            if u == x and key == star_key:
                star_edge = len(edges)
            edges.append(tuple(groups[key]))
    assert star_edge is not None
    return verts, edges, star, star_edge, xs


def restriction_class(concepts: HypothesisClass, mu: ListPredictor,
                      points: Sequence[int]) -> HypothesisClass:
    """The full restriction the predictor reasons about: distinct patterns of
    the class on the point sequence whose entries lie in mu's lists.  Used by
    diagnostics and tests; prediction itself runs on the reduced form."""
    out = set()
    for c in concepts.patterns:
        r = tuple(c[u] for u in points)
        if all(v in mu(u) for v, u in zip(r, points)):
            out.add(r)
    return HypothesisClass(len(points), concepts.k, frozenset(out))


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    epsilon: float = 0.1
    delta: float = 0.05
    m: int = 100
    trials: int = 1000
    seed: int = 0
    ell: int = 1
    ell_prime: Optional[int] = None
    chunk_factor: int = 160
    val_factor: int = 32
    test_size: int = 1000

    def __post_init__(self):
        if not (0 < self.epsilon < 1) or not (0 < self.delta < 1):
            raise ValueError("epsilon and delta must lie in (0,1)")
        if self.m < 1 or self.trials < 1 or self.ell < 1:
            raise ValueError("need m >= 1, trials >= 1, ell >= 1")
        if self.ell_prime is not None and self.ell_prime < self.ell:
            raise ValueError("ell_prime must be at least ell")


@dataclass(frozen=True)
class LooReport:
    """Leave-one-out outcome against the orientation-degree bound
    40 * ell * d * max(log ell', 1) / m.  ``ell_prime_theory`` is the width a
    generic first-stage list learner would promise at this sample size; it is
    informational only."""

    empirical_error: Fraction
    bound: float
    d_used: int
    ell_prime_used: int
    ell_prime_theory: float
    trials: int
    m: int
    ell: int
    failures: int
    per_trial: Optional[tuple[bool, ...]] = None


def _loo_trials(task: ConceptTask, cfg: ExperimentConfig, provider_kind: str,
                start: int, stop: int, keep: bool) -> tuple[int, list[bool]]:
    """Trials [start, stop); each one has its own counter-derived stream, so
    partitioning across workers cannot change any outcome."""
    mu = None
    if provider_kind != "sample-support":
        mu = list_provider(provider_kind, task)
    failures = 0
    outcomes: list[bool] = []
    for t in range(start, stop):
        rng = random.Random(_trial_seed(cfg.seed, t))
        pairs = _draw_pairs(task, cfg.m + 1, rng)
        train, (x, y) = pairs[:cfg.m], pairs[cfg.m]
        current = (list_provider("sample-support", task, sample=train)
                   if provider_kind == "sample-support" else mu)
        predicted = predict_one_inclusion(task.concepts, current, train, x, cfg.ell)
        miss = y not in predicted
        failures += miss
        if keep:
            outcomes.append(miss)
    return failures, outcomes


def loo_experiment(task: ConceptTask, cfg: ExperimentConfig,
                   provider_kind: str = "full-alphabet",
                   keep_trials: bool = False, jobs: int = 1) -> LooReport:
    """Repeatedly draw m+1 points, train on the first m, and test whether the
    held-out label lands in the predicted list.  ``jobs`` fans trials out
    across processes; the aggregate is identical for any fan-out."""
    if provider_kind == "sample-support":
        ell_prime = task.k  # per-trial support lists never exceed the alphabet
    else:
        ell_prime = max(list_provider(provider_kind, task).max_list_size, 1)
    d_used = ds_dimension(task.concepts, cfg.ell).value
    bound = 40.0 * cfg.ell * d_used * _llog(ell_prime) / cfg.m
    if jobs > 1:
        import multiprocessing
        step = -(-cfg.trials // jobs)
        ranges = [(a, min(a + step, cfg.trials)) for a in range(0, cfg.trials, step)]
        with multiprocessing.Pool(jobs) as pool:
            parts = pool.starmap(
                _loo_trials,
                [(task, cfg, provider_kind, a, b, keep_trials) for a, b in ranges])
        failures = sum(f for f, _ in parts)
        outcomes = [o for _, outs in parts for o in outs]
    else:
        failures, outcomes = _loo_trials(task, cfg, provider_kind, 0, cfg.trials,
                                         keep_trials)
    return LooReport(empirical_error=Fraction(failures, cfg.trials), bound=bound,
                     d_used=d_used, ell_prime_used=ell_prime,
                     ell_prime_theory=theoretical_ell_prime(cfg.ell, d_used, cfg.m),
                     trials=cfg.trials, m=cfg.m, ell=cfg.ell, failures=failures,
                     per_trial=tuple(outcomes) if keep_trials else None)


def pac_sample_plan(task: ConceptTask, cfg: ExperimentConfig,
                    ell_prime: int) -> tuple[int, int, int]:
    """(number of chunks, chunk size, validation size) for the amplified
    learner: p = ceil(log(2/delta)) chunks of 160*ell*d*log(ell')/eps points
    each, and a validation split of 32*log(2/delta)/eps + log(p+1)."""
    d = ds_dimension(task.concepts, cfg.ell).value
    p = max(math.ceil(math.log(2.0 / cfg.delta)), 1)
    chunk = max(math.ceil(cfg.chunk_factor * cfg.ell * max(d, 1) * _llog(ell_prime)
                          / cfg.epsilon), 1)
    val = math.ceil(cfg.val_factor * math.log(2.0 / cfg.delta) / cfg.epsilon
                    + math.log(p + 1))
    return p, chunk, val


@dataclass(frozen=True)
class PacReport:
    predictor: ListPredictor
    test_error: float
    population_error: Fraction
    validation_errors: tuple[Fraction, ...]
    chosen: int
    chunks: int
    chunk_size: int
    val_size: int
    filtered_size: int


def pac_learn(task: ConceptTask, cfg: ExperimentConfig,
              provider_kind: str = "full-alphabet") -> PacReport:
    """Amplified list PAC learner.

    Draw cfg.m points, keep those whose labels the provider list retains,
    partition into chunks plus validation, train a one-inclusion predictor
    per chunk, and return the one with the smallest validation error (ties
    break toward the earlier chunk).  Reports the held-out error on fresh
    draws alongside the exact population error.
    """
    rng = random.Random(_trial_seed(cfg.seed, 0))
    sample = _draw_pairs(task, cfg.m, rng)
    mu = (list_provider(provider_kind, task, sample=sample)
          if provider_kind == "sample-support" else list_provider(provider_kind, task))
    filtered = [(x, y) for x, y in sample if y in mu(x)]
    p, chunk, val = pac_sample_plan(task, cfg, max(mu.max_list_size, 1))
    needed = p * chunk + val
    if len(filtered) < needed:
        raise ValueError(f"sample too small to partition: have {len(filtered)} "
                         f"filtered points, need {needed} ({p} chunks of {chunk} "
                         f"plus {val} validation)")
    candidates: list[ListPredictor] = []
    for i in range(p):
        part = filtered[i * chunk:(i + 1) * chunk]
        lists = tuple(predict_one_inclusion(task.concepts, mu, part, x, cfg.ell)
                      for x in range(task.n))
        candidates.append(ListPredictor(ell=cfg.ell, lists=lists, provenance=f"chunk-{i}"))
    val_set = filtered[p * chunk:]
    val_errors = tuple(
        Fraction(sum(y not in cand(x) for x, y in val_set), len(val_set))
        for cand in candidates)
    chosen = min(range(p), key=lambda i: (val_errors[i], i))
    winner = candidates[chosen]
    test_rng = random.Random(_trial_seed(cfg.seed, 1))
    fresh = _draw_pairs(task, cfg.test_size, test_rng)
    test_error = sum(y not in winner(x) for x, y in fresh) / cfg.test_size
    return PacReport(predictor=winner, test_error=test_error,
                     population_error=population_error(task, winner),
                     validation_errors=val_errors, chosen=chosen, chunks=p,
                     chunk_size=chunk, val_size=len(val_set),
                     filtered_size=len(filtered))


# ---------------------------------------------------------------------------
# Graph-shattering projection bound and uniform convergence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProjectionBoundReport:
    lhs: int
    rhs: Fraction
    holds: bool


def verify_projection_bound(c: ListClass, coords: Sequence[int], pivot: Sequence[int],
                            witnesses: dict[tuple[int, ...], ListMember],
                            cap: int = PROJECTION_ENUM_CAP) -> ProjectionBoundReport:
    """Check the size of the union of realizable label tuples against
    (2*ell)^g / (4 * (2*ell-1)^g) * ell^g for a certified graph-shattered
    coordinate set of size g.

    The certificate is validated first: every sign vector b needs a member
    whose lists contain pivot_i exactly when b_i = 1.
    """
    coords = tuple(coords)
    pivot = tuple(pivot)
    g = len(coords)
    if len(pivot) != g:
        raise ValueError(f"pivot length {len(pivot)} differs from |S| = {g}")
    for bits in product((0, 1), repeat=g):
        member = witnesses.get(bits)
        if member is None:
            raise ValueError(f"certification fails: no witness for sign pattern {bits}")
        if member not in c.members:
            raise ValueError(f"certification fails: witness for {bits} is not a member")
        for j, i in enumerate(coords):
            if (pivot[j] in member[i]) != bool(bits[j]):
                raise ValueError(f"certification fails: witness for {bits} has wrong "
                                 f"sign at coordinate {i}")
    union: set[tuple[int, ...]] = set()
    budget = cap
    for bits in product((0, 1), repeat=g):
        member = witnesses[bits]
        lists = [sorted(member[i]) for i in coords]
        count = math.prod(len(s) for s in lists)
        budget -= count
        if budget < 0:
            raise CapExceeded(f"projection enumeration exceeds cap {cap}")
        union.update(product(*lists))
    ell = c.ell
    rhs = Fraction((2 * ell) ** g * ell ** g, 4 * (2 * ell - 1) ** g)
    return ProjectionBoundReport(lhs=len(union), rhs=rhs, holds=len(union) >= rhs)


@dataclass(frozen=True)
class UcReport:
    sup_deviation: float
    g_dim: int
    trials: int
    m: int


def uc_experiment(c: ListClass, task: ConceptTask, cfg: ExperimentConfig) -> UcReport:
    """Mean (over trials) of the largest gap between empirical and population
    loss across the members of ``c`` at sample size m, reported next to the
    graph dimension for qualitative rate comparison.  No inequality is
    asserted; the rate constants are asymptotic."""
    if c.n != task.n:
        raise ValueError(f"list class is over {c.n} instances, task over {task.n}")
    members = c.sorted_members()
    pop = [float(sum((p for x, p in enumerate(task.probs) if task.target[x] not in mem[x]),
                     Fraction(0)))
           for mem in members]
    total = 0.0
    for t in range(cfg.trials):
        rng = random.Random(_trial_seed(cfg.seed, t))
        pairs = _draw_pairs(task, cfg.m, rng)
        worst = 0.0
        for mem, lp in zip(members, pop):
            emp = sum(y not in mem[x] for x, y in pairs) / cfg.m
            gap = abs(emp - lp)
            if gap > worst:
                worst = gap
        total += worst
    g = graph_dimension(c).value
    return UcReport(sup_deviation=total / cfg.trials, g_dim=g,
                    trials=cfg.trials, m=cfg.m)
