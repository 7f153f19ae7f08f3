"""The repeated-averages probability hierarchy with exact rationals.

Measures are finite-support probability measures on N with Fraction
weights.  A probability block pairs a nice family with a rule assigning a
measure to (stream, block index); the canonical block at ordinal stage xi
averages the previous stage uniformly, with support equal to the stage's
partition block.  Convolution mixes one block's measures with another's
weights along the minima sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import families, ordinals
from .families import (Family, FinSet, LazySet, DEFAULT_PROBE_LIMIT,
                       EnumerationLimitError, partition_blocks,
                       partition_indices, schreier_family)
from .ordinals import Ordinal, ONE


@dataclass(frozen=True)
class Measure:
    """A finite-support probability measure on N with exact weights."""

    weights: tuple[tuple[int, Fraction], ...]

    @staticmethod
    def from_dict(d: dict[int, Fraction]) -> "Measure":
        items = tuple(sorted((k, Fraction(v)) for k, v in d.items() if v))
        return Measure(items)

    @staticmethod
    def dirac(n: int) -> "Measure":
        return Measure(((n, Fraction(1)),))

    @property
    def support(self) -> FinSet:
        return tuple(k for k, _ in self.weights)

    @property
    def mass(self) -> Fraction:
        return sum((v for _, v in self.weights), Fraction(0))

    def __call__(self, point: int) -> Fraction:
        for k, v in self.weights:
            if k == point:
                return v
        return Fraction(0)

    def mass_of(self, points) -> Fraction:
        pts = set(points)
        return sum((v for k, v in self.weights if k in pts), Fraction(0))

    def max_weight(self) -> Fraction:
        return max((v for _, v in self.weights), default=Fraction(0))

    def to_json(self) -> dict:
        return {"weights": [[k, f"{v.numerator}/{v.denominator}"]
                            for k, v in self.weights]}

    @staticmethod
    def from_json(data: dict) -> "Measure":
        return Measure.from_dict(
            {int(k): Fraction(s) for k, s in data["weights"]})


def _stage_one(xi: Ordinal, m: LazySet) -> dict[int, Fraction]:
    """First measure of stage xi on m; support is the first partition block."""
    if xi.is_zero:
        return {m.value(1): Fraction(1)}
    if xi.is_limit:
        p = m.value(1)
        stage = ordinals.add(ordinals.fund_seq(xi, p), ONE)
        return _stage_one(stage, m)
    child = ordinals.successor_part(xi)
    p = m.value(1)
    acc: dict[int, Fraction] = {}
    consumed = 0
    inv = Fraction(1, p)
    for _ in range(p):
        w = _stage_one(child, m.drop(consumed))
        for k, v in w.items():
            acc[k] = acc.get(k, Fraction(0)) + v * inv
        consumed += len(w)
    return acc


def ravg_measure(xi: Ordinal, m: LazySet, n: int,
                 probe_limit: int = DEFAULT_PROBE_LIMIT) -> Measure:
    """The n-th repeated-averages measure of stage xi on m.

    Deleting the supports of earlier measures and re-deriving the first
    measure realizes the shift axiom by construction.  m.consumed reports
    the materialized prefix afterwards.
    """
    if n < 1:
        raise ValueError("measure index must be >= 1")
    with m.probe_guard(probe_limit):
        consumed = 0
        for _ in range(n - 1):
            consumed += len(_stage_one(xi, m.drop(consumed)))
        return Measure.from_dict(_stage_one(xi, m.drop(consumed)))


def _stage_one_restricted(xi: Ordinal, m: LazySet, cutoff: int):
    """Weights of the first stage-xi measure at points <= cutoff.

    Returns (weights, closed, consumed): ``closed`` means the full support
    was located and spans ``consumed`` stream elements; otherwise every
    unexplored element exceeds the cutoff, so later siblings vanish under
    restriction and block boundaries need never be materialized.
    """
    v1 = m.value(1)
    if v1 > cutoff:
        return {}, False, 0
    if xi.is_zero:
        return {v1: Fraction(1)}, True, 1
    if xi.is_limit:
        stage = ordinals.add(ordinals.fund_seq(xi, v1), ONE)
        return _stage_one_restricted(stage, m, cutoff)
    child = ordinals.successor_part(xi)
    p = v1
    inv = Fraction(1, p)
    acc: dict[int, Fraction] = {}
    consumed = 0
    for _ in range(p):
        w, closed, c = _stage_one_restricted(child, m.drop(consumed), cutoff)
        for k, v in w.items():
            acc[k] = acc.get(k, Fraction(0)) + v * inv
        if not closed:
            return acc, False, consumed
        consumed += c
    return acc, True, consumed


def ravg_total_restricted(xi: Ordinal, m: LazySet, cutoff: int,
                          probe_limit: int = DEFAULT_PROBE_LIMIT) -> dict[int, Fraction]:
    """Pointwise sum over all block indices of stage-xi weights <= cutoff."""
    totals: dict[int, Fraction] = {}
    with m.probe_guard(probe_limit):
        consumed = 0
        while True:
            w, closed, c = _stage_one_restricted(xi, m.drop(consumed), cutoff)
            for k, v in w.items():
                totals[k] = totals.get(k, Fraction(0)) + v
            if not closed:
                return totals
            consumed += c


# ---------------------------------------------------------------------------
# Probability blocks


@dataclass
class ProbBlock:
    """A nice family together with a measure rule on (stream, index)."""

    family: Family
    rule: Callable[[LazySet, int], Measure]
    name: str = "block"

    def measure(self, m: LazySet, n: int) -> Measure:
        return self.rule(m, n)


def canonical_block(xi: Ordinal,
                    probe_limit: int = DEFAULT_PROBE_LIMIT) -> ProbBlock:
    """The repeated-averages block at stage xi."""
    return ProbBlock(
        family=schreier_family(xi),
        rule=lambda m, n: ravg_measure(xi, m, n, probe_limit),
        name=f"ravg({ordinals.fmt(xi)})")


def convolve(q_block: ProbBlock, p_block: ProbBlock,
             probe_limit: int = DEFAULT_PROBE_LIMIT) -> ProbBlock:
    """Mix p-measures with q-weights taken along the minima sequence.

    The n-th convolved measure expands the q-measure of the minima stream
    against the corresponding run of p-measures; the composite family is
    the outer family applied to inner blocks.
    """
    fam = families.Compose(q_block.family, p_block.family)

    def rule(m: LazySet, n: int) -> Measure:
        def minima():
            i = 1
            while True:
                yield p_block.measure(m, i).support[0]
                i += 1

        mins = LazySet(minima(), "p-block-minima", root=m.root)
        with m.probe_guard(probe_limit):
            q_meas = q_block.measure(mins, n)
            idx = partition_indices(mins, q_block.family, n)
            acc: dict[int, Fraction] = {}
            for i in idx:
                w = q_meas(mins.value(i))
                if not w:
                    continue
                for k, v in p_block.measure(m, i).weights:
                    acc[k] = acc.get(k, Fraction(0)) + w * v
        return Measure.from_dict(acc)

    return ProbBlock(family=fam, rule=rule,
                     name=f"{q_block.name}*{p_block.name}")


@dataclass
class BlockReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def block_validate(block: ProbBlock, samples,
                   probe_limit: int = DEFAULT_PROBE_LIMIT) -> BlockReport:
    """Check exact mass, support-partition agreement, and shift consistency.

    ``samples`` is a list of (LazySet, depth) pairs.  Violations are data,
    not errors; probe exhaustion propagates.
    """
    report = BlockReport()
    for m, depth in samples:
        supports: list[FinSet] = []
        for r in range(1, depth + 1):
            mu = block.measure(m, r)
            report.checked += 1
            if mu.mass != 1:
                report.violations.append(
                    {"sample": m.describe, "n": r, "kind": "mass",
                     "detail": str(mu.mass)})
            expected = partition_blocks(m, block.family, r, probe_limit)[-1]
            if mu.support != expected:
                report.violations.append(
                    {"sample": m.describe, "n": r, "kind": "support",
                     "detail": f"{mu.support} != {expected}"})
            shifted = m.remove_finite(
                {v for s in supports for v in s}) if supports else m
            if block.measure(shifted, 1) != mu:
                report.violations.append(
                    {"sample": m.describe, "n": r, "kind": "shift",
                     "detail": "first measure after deleting earlier "
                               "supports differs"})
            supports.append(mu.support)
    return report


def sufficiency_sup(block: ProbBlock, g: Family, nset: LazySet,
                    bound: int = 10 ** 5,
                    probe_limit: int = DEFAULT_PROBE_LIMIT):
    """Largest g-member mass of the first block measure on nset.

    Only members inside the support can carry mass, so this is a finite
    maximization.  Returns (value, witness set).
    """
    mu = block.measure(nset, 1)
    best = Fraction(0)
    witness: FinSet = ()
    for e in families.enumerate_within(g, mu.support, bound):
        v = mu.mass_of(e)
        if v > best:
            best, witness = v, e
    return best, witness


@dataclass
class FastGrowReport:
    condition_holds: bool
    strict_condition_holds: bool
    checked_pairs: list
    max_sum: Fraction
    witness: FinSet
    bound: Fraction
    bound_ok: bool


def fastgrow_check(xi: Ordinal, kset: LazySet, lset: LazySet, eps: Fraction,
                   n: int, subset_cap: int = 20,
                   probe_limit: int = DEFAULT_PROBE_LIMIT) -> FastGrowReport:
    """Desk-scale check of the fast-growing comparison.

    Verifies k(l_i) * (1 + 2 eps) <= l_{i+1} * eps for indices with
    l_i <= n (strict comparison reported separately), then maximizes the
    accumulated stage-xi mass over all E within {1..n} whose image under
    the k-stream is admissible at stage xi.
    """
    eps = Fraction(eps)
    checked = []
    nonstrict = strict = True
    with lset.probe_guard(probe_limit), kset.probe_guard(probe_limit):
        i = 1
        while lset.value(i) <= n:
            li, lnext = lset.value(i), lset.value(i + 1)
            k_li = kset.value(li)
            lhs, rhs = k_li * (1 + 2 * eps), lnext * eps
            checked.append({"i": i, "l_i": li, "l_next": lnext, "k": k_li,
                            "lhs": lhs, "rhs": rhs})
            nonstrict = nonstrict and lhs <= rhs
            strict = strict and lhs < rhs
            i += 1

    totals = ravg_total_restricted(xi, lset, n, probe_limit)
    points = tuple(sorted(k for k, v in totals.items() if v > 0))
    if len(points) > subset_cap:
        raise EnumerationLimitError(
            f"{len(points)} weighted points exceed subset cap {subset_cap}")
    fam = schreier_family(xi)
    best, witness = Fraction(0), ()
    for mask in range(1, 1 << len(points)):
        e = tuple(p for b, p in enumerate(points) if mask >> b & 1)
        with kset.probe_guard(probe_limit):
            image = tuple(kset.value(v) for v in e)
        if not fam.contains(image):
            continue
        s = sum((totals[p] for p in e), Fraction(0))
        if s > best:
            best, witness = s, e
    bound = 1 + eps
    return FastGrowReport(condition_holds=nonstrict,
                          strict_condition_holds=strict,
                          checked_pairs=checked, max_sum=best,
                          witness=witness, bound=bound,
                          bound_ok=best <= bound)
