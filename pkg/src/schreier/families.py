"""Regular families of finite subsets of N.

Finite sets are tuples of strictly increasing positive integers.  Infinite
sets are LazySet streams.  A Family is a grammar node (bounded-cardinality
sets, the transfinite admissible hierarchy, composition, image, preimage,
union) exposing membership, maximal initial segments, partitions,
truncated enumeration, and both symbolic and probe rank computation.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import ordinals
from .ordinals import Ordinal, ZERO, ONE, from_int

FinSet = tuple[int, ...]

DEFAULT_PROBE_LIMIT = 10 ** 6
DEFAULT_ENUM_LIMIT = 24


class ProbeLimitError(RuntimeError):
    """A stream operation would materialize more elements than allowed."""

    def __init__(self, message: str, consumed: int):
        super().__init__(f"{message} (consumed {consumed} stream elements)")
        self.consumed = consumed


class EnumerationLimitError(RuntimeError):
    """A truncated enumeration exceeded its configured bound."""


def check_finset(e) -> FinSet:
    e = tuple(e)
    prev = 0
    for v in e:
        if not isinstance(v, int) or v <= prev:
            raise ValueError(f"not a strictly increasing positive sequence: {e}")
        prev = v
    return e


# ---------------------------------------------------------------------------
# Lazy infinite strictly increasing sets


class LazySet:
    """A strictly increasing infinite subset of N, memoized by prefix.

    Elements are pulled one at a time and cached; ``consumed`` reports how
    much of the stream has been materialized.  Derived streams (``drop``,
    ``remove_finite``) read through their parent, so a probe guard placed
    on the root bounds every view of it.  The cache is lock-guarded.
    """

    def __init__(self, it: Iterator[int], describe: str = "stream",
                 root: "LazySet | None" = None):
        self._it = it
        self._cache: list[int] = []
        self._lock = threading.Lock()
        self._cap: int | None = None
        self.describe = describe
        self.root = root if root is not None else self

    # construction ----------------------------------------------------------

    @staticmethod
    def from_function(fn: Callable[[int], int], describe: str = "stream") -> "LazySet":
        def gen():
            i = 1
            while True:
                yield fn(i)
                i += 1
        return LazySet(gen(), describe)

    @staticmethod
    def naturals() -> "LazySet":
        return LazySet.from_function(lambda i: i, "arith:1:1")

    @staticmethod
    def arithmetic(start: int, step: int) -> "LazySet":
        if start < 1 or step < 1:
            raise ValueError("start and step must be positive")
        return LazySet.from_function(
            lambda i: start + (i - 1) * step, f"arith:{start}:{step}")

    @staticmethod
    def geometric(base: int, scale: int = 1) -> "LazySet":
        if base < 2 or scale < 1:
            raise ValueError("need base >= 2 and scale >= 1")
        return LazySet.from_function(
            lambda i: scale * base ** i, f"geom:{base}:{scale}")

    @staticmethod
    def from_prefix(prefix, tail_step: int = 1) -> "LazySet":
        prefix = check_finset(prefix)
        if not prefix:
            raise ValueError("prefix must be nonempty")
        if tail_step < 1:
            raise ValueError("tail step must be positive")

        def gen():
            yield from prefix
            v = prefix[-1]
            while True:
                v += tail_step
                yield v
        return LazySet(gen(), f"list-prefix:{list(prefix)}:+{tail_step}")

    # access ----------------------------------------------------------------

    @property
    def consumed(self) -> int:
        """High-water mark of materialized elements (per stream object)."""
        return len(self._cache)

    @contextmanager
    def probe_guard(self, limit: int | None):
        """Bound how far the root stream may materialize inside the block."""
        root = self.root
        old = root._cap
        if limit is not None:
            root._cap = limit if old is None else min(old, limit)
        try:
            yield
        finally:
            root._cap = old

    def _ensure(self, n: int):
        with self._lock:
            while len(self._cache) < n:
                root = self.root
                if root._cap is not None and root is self \
                        and len(self._cache) >= root._cap:
                    raise ProbeLimitError(
                        f"probe limit {root._cap} exceeded on {self.describe}",
                        len(self._cache))
                v = next(self._it)
                if self._cache and v <= self._cache[-1]:
                    raise ValueError(
                        f"stream {self.describe} is not strictly increasing")
                self._cache.append(v)

    def value(self, i: int) -> int:
        """1-based element access."""
        if i < 1:
            raise IndexError("indices are 1-based")
        self._ensure(i)
        return self._cache[i - 1]

    def prefix(self, n: int) -> FinSet:
        self._ensure(n)
        return tuple(self._cache[:n])

    def contains(self, v: int) -> bool:
        i = len(self._cache)
        while not self._cache or self._cache[-1] < v:
            i += 1
            self._ensure(i)
        lo, hi = 0, len(self._cache)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._cache[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self._cache) and self._cache[lo] == v

    def index_of(self, v: int) -> int | None:
        """1-based position of value v, or None if absent."""
        if not self.contains(v):
            return None
        return self._cache.index(v) + 1

    # derived streams -------------------------------------------------------

    def drop(self, k: int) -> "LazySet":
        """The stream minus its first k elements (reads through this one)."""
        parent = self

        def gen():
            i = k + 1
            while True:
                yield parent.value(i)
                i += 1
        return LazySet(gen(), f"{self.describe}[{k}:]", root=self.root)

    def remove_finite(self, values) -> "LazySet":
        """The stream minus a finite set of values (reads through this one)."""
        parent = self
        dropped = frozenset(values)

        def gen():
            i = 0
            while True:
                i += 1
                v = parent.value(i)
                if v not in dropped:
                    yield v
        return LazySet(gen(), f"{self.describe}\\{sorted(dropped)}",
                       root=self.root)


def set_from_spec(spec: dict) -> LazySet:
    """Build a LazySet from its JSON description."""
    kind = spec.get("kind")
    if kind == "arith":
        return LazySet.arithmetic(int(spec["start"]), int(spec["step"]))
    if kind == "list-prefix":
        return LazySet.from_prefix(spec["prefix"], int(spec.get("tail_step", 1)))
    if kind == "geom":
        return LazySet.geometric(int(spec["base"]), int(spec.get("scale", 1)))
    raise ValueError(f"unknown set spec kind: {kind!r}")


def set_from_cli(text: str) -> LazySet:
    """Build a LazySet from a compact CLI form like ``arith:3:2``."""
    if text == "all":
        return LazySet.naturals()
    parts = text.split(":")
    if parts[0] == "arith" and len(parts) == 3:
        return LazySet.arithmetic(int(parts[1]), int(parts[2]))
    if parts[0] == "geom" and len(parts) in (2, 3):
        scale = int(parts[2]) if len(parts) == 3 else 1
        return LazySet.geometric(int(parts[1]), scale)
    if parts[0] == "list" and len(parts) in (2, 3):
        prefix = [int(v) for v in parts[1].split(",")]
        step = int(parts[2]) if len(parts) == 3 else 1
        return LazySet.from_prefix(prefix, step)
    raise ValueError(f"cannot parse set description {text!r}")


# ---------------------------------------------------------------------------
# Family grammar


class Family:
    """A hereditary, spreading family given by a grammar node.

    Membership is memoized per node.  Nodes are immutable; caches only
    grow, so concurrent readers are safe under the GIL.
    """

    def __init__(self):
        self._memo: dict[FinSet, bool] = {}

    def contains(self, e: FinSet) -> bool:
        e = tuple(e)
        hit = self._memo.get(e)
        if hit is None:
            hit = self._memo[e] = self._contains(e)
        return hit

    def __contains__(self, e) -> bool:
        return self.contains(tuple(e))

    def _contains(self, e: FinSet) -> bool:
        raise NotImplementedError

    def cb_index(self) -> "CBIndex":
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError

    def __repr__(self):
        return f"<Family {self.spec()}>"

    # Structure-aware maximal initial segment; None means "use the generic
    # grow-and-test fallback".  Callers hold the probe guard.
    def _fast_max_segment(self, m: LazySet) -> FinSet | None:
        return None

    # Whether the node type guarantees closure under spreads (images and
    # ad hoc subclasses do not).
    def is_spreading_by_construction(self) -> bool:
        return False


@dataclass(frozen=True)
class CBIndex:
    """A derivative-rank value; ``exact`` is False for upper bounds only."""
    value: Ordinal
    exact: bool = True

    def __str__(self):
        prefix = "" if self.exact else "<="
        return prefix + ordinals.fmt(self.value)


class EmptyFamily(Family):
    """The empty family (contains nothing, not even the empty set)."""

    def is_spreading_by_construction(self) -> bool:
        return True

    def _contains(self, e: FinSet) -> bool:
        return False

    def cb_index(self) -> CBIndex:
        return CBIndex(ZERO)

    def spec(self) -> dict:
        return {"type": "empty"}


class EmptySetOnly(Family):
    """The family whose single member is the empty set."""

    def is_spreading_by_construction(self) -> bool:
        return True

    def _contains(self, e: FinSet) -> bool:
        return not e

    def cb_index(self) -> CBIndex:
        return CBIndex(ONE)

    def spec(self) -> dict:
        return {"type": "singleton-empty"}


class Adm(Family):
    """Sets of cardinality at most n."""

    def __init__(self, n: int):
        super().__init__()
        if n < 0:
            raise ValueError("cardinality bound must be >= 0")
        self.n = n

    def is_spreading_by_construction(self) -> bool:
        return True

    def _contains(self, e: FinSet) -> bool:
        return len(e) <= self.n

    def cb_index(self) -> CBIndex:
        return CBIndex(from_int(self.n + 1))

    def spec(self) -> dict:
        return {"type": "adm", "n": self.n}

    def _fast_max_segment(self, m: LazySet) -> FinSet:
        if self.n == 0:
            raise ValueError("family has no nonempty members")
        return m.prefix(self.n)


class Schreier(Family):
    """The transfinite admissible hierarchy indexed by an ordinal.

    Level 0 is the singletons-or-empty family.  At a successor stage a set
    belongs iff it splits into at most min(E) consecutive blocks from the
    previous stage; membership strips greedy maximal prefixes, which agrees
    with exhaustive decomposition search on these spreading levels.  At a
    limit the stage delegates to fs(lam, min E) + 1 along the canonical
    fundamental sequence.
    """

    def __init__(self, xi: Ordinal):
        super().__init__()
        self.xi = xi

    def is_spreading_by_construction(self) -> bool:
        return True

    def _child_successor(self) -> "Schreier":
        return schreier_family(ordinals.successor_part(self.xi))

    def _child_limit(self, n: int) -> "Schreier":
        return schreier_family(ordinals.add(ordinals.fund_seq(self.xi, n), ONE))

    def _contains(self, e: FinSet) -> bool:
        if not e:
            return True
        if self.xi.is_zero:
            return len(e) <= 1
        if self.xi.is_limit:
            return self._child_limit(e[0]).contains(e)
        child = self._child_successor()
        blocks = 0
        i, n = 0, len(e)
        while i < n:
            j = i + 1
            while j < n and child.contains(e[i:j + 1]):
                j += 1
            if not child.contains(e[i:j]):
                return False
            blocks += 1
            if blocks > e[0]:
                return False
            i = j
        return True

    def cb_index(self) -> CBIndex:
        return CBIndex(ordinals.add(ordinals.omega_pow(self.xi), ONE))

    def spec(self) -> dict:
        return {"type": "schreier", "xi": ordinals.fmt(self.xi)}

    def _fast_max_segment(self, m: LazySet) -> FinSet:
        if self.xi.is_zero:
            return m.prefix(1)
        if self.xi.is_limit:
            p = m.value(1)
            return self._child_limit(p)._fast_max_segment(m)
        child = self._child_successor()
        p = m.value(1)
        consumed = 0
        out: list[int] = []
        for _ in range(p):
            block = child._fast_max_segment(m.drop(consumed))
            out.extend(block)
            consumed += len(block)
        return tuple(out)


_SCHREIER_NODES: dict[Ordinal, Schreier] = {}
_ADM_NODES: dict[int, Adm] = {}


def schreier_family(xi: Ordinal) -> Schreier:
    """Interned hierarchy node (so membership caches are shared)."""
    node = _SCHREIER_NODES.get(xi)
    if node is None:
        node = _SCHREIER_NODES[xi] = Schreier(xi)
    return node


def adm_family(n: int) -> Adm:
    node = _ADM_NODES.get(n)
    if node is None:
        node = _ADM_NODES[n] = Adm(n)
    return node


class Compose(Family):
    """F[G]: unions of consecutive G-blocks whose minima form an F-set."""

    def __init__(self, outer: Family, inner: Family):
        super().__init__()
        self.outer = outer
        self.inner = inner

    def is_spreading_by_construction(self) -> bool:
        return self.outer.is_spreading_by_construction() and \
            self.inner.is_spreading_by_construction()

    def _contains(self, e: FinSet) -> bool:
        if isinstance(self.outer, EmptyFamily) or isinstance(self.inner, EmptyFamily):
            return False
        if not e:
            return True
        outer, inner = self.outer, self.inner
        n = len(e)

        def rec(i: int, mins: FinSet) -> bool:
            mins = mins + (e[i],)
            # minima prefixes of a member are members: prune early
            if not outer.contains(mins):
                return False
            j = i + 1
            while True:
                if not inner.contains(e[i:j]):
                    return False
                if j == n:
                    return True
                if rec(j, mins):
                    return True
                if j == n:
                    return False
                j += 1

        return rec(0, ())

    def cb_index(self) -> CBIndex:
        co, ci = self.outer.cb_index(), self.inner.cb_index()
        if co.value.is_zero or ci.value.is_zero:
            return CBIndex(ZERO, co.exact and ci.exact)
        beta = ordinals.successor_part(co.value)
        alpha = ordinals.successor_part(ci.value)
        return CBIndex(ordinals.add(ordinals.mul(alpha, beta), ONE),
                       co.exact and ci.exact)

    def spec(self) -> dict:
        return {"type": "compose", "outer": self.outer.spec(),
                "inner": self.inner.spec()}

    def _fast_max_segment(self, m: LazySet) -> FinSet:
        inner, outer = self.inner, self.outer
        boundaries = [0]

        def minima():
            while True:
                block = _max_segment(m.drop(boundaries[-1]), inner)
                boundaries.append(boundaries[-1] + len(block))
                yield block[0]

        mins_stream = LazySet(minima(), "block-minima", root=m.root)
        k = len(_max_segment(mins_stream, outer))
        return m.prefix(boundaries[k])


class Image(Family):
    """F(M): members of F pushed through the increasing enumeration of M."""

    def __init__(self, fam: Family, mset: LazySet,
                 probe_limit: int = DEFAULT_PROBE_LIMIT):
        super().__init__()
        self.fam = fam
        self.mset = mset
        self.probe_limit = probe_limit

    def _contains(self, e: FinSet) -> bool:
        if not e:
            return self.fam.contains(())
        idx = []
        with self.mset.probe_guard(self.probe_limit):
            for v in e:
                i = self.mset.index_of(v)
                if i is None:
                    return False
                idx.append(i)
        return self.fam.contains(tuple(idx))

    def cb_index(self) -> CBIndex:
        return CBIndex(self.fam.cb_index().value, exact=False)

    def spec(self) -> dict:
        return {"type": "image", "family": self.fam.spec(),
                "set": {"kind": "opaque", "describe": self.mset.describe}}


class Preimage(Family):
    """F(M^-1): index sets whose image under M's enumeration lies in F."""

    def __init__(self, fam: Family, mset: LazySet,
                 probe_limit: int = DEFAULT_PROBE_LIMIT):
        super().__init__()
        self.fam = fam
        self.mset = mset
        self.probe_limit = probe_limit

    def is_spreading_by_construction(self) -> bool:
        return self.fam.is_spreading_by_construction()

    def _contains(self, e: FinSet) -> bool:
        with self.mset.probe_guard(self.probe_limit):
            image = tuple(self.mset.value(i) for i in e)
        return self.fam.contains(image)

    def cb_index(self) -> CBIndex:
        inner = self.fam.cb_index()
        return CBIndex(inner.value, inner.exact)

    def spec(self) -> dict:
        return {"type": "preimage", "family": self.fam.spec(),
                "set": {"kind": "opaque", "describe": self.mset.describe}}

    def _fast_max_segment(self, m: LazySet) -> FinSet:
        mset = self.mset
        translated = LazySet.from_function(
            lambda i: mset.value(m.value(i)), "translated")
        with mset.probe_guard(self.probe_limit):
            k = len(_max_segment(translated, self.fam))
        return m.prefix(k)


class UnionFamily(Family):
    """Union of two families."""

    def __init__(self, left: Family, right: Family):
        super().__init__()
        self.left = left
        self.right = right

    def is_spreading_by_construction(self) -> bool:
        return self.left.is_spreading_by_construction() and \
            self.right.is_spreading_by_construction()

    def _contains(self, e: FinSet) -> bool:
        return self.left.contains(e) or self.right.contains(e)

    def cb_index(self) -> CBIndex:
        cl, cr = self.left.cb_index(), self.right.cb_index()
        value = cl.value if cl.value >= cr.value else cr.value
        return CBIndex(value, cl.exact and cr.exact)

    def spec(self) -> dict:
        return {"type": "union", "left": self.left.spec(),
                "right": self.right.spec()}


def family_from_spec(spec: dict) -> Family:
    """Build a Family from its JSON description."""
    kind = spec.get("type")
    if kind == "schreier":
        return schreier_family(ordinals.parse(spec["xi"]))
    if kind == "adm":
        return adm_family(int(spec["n"]))
    if kind == "compose":
        return Compose(family_from_spec(spec["outer"]),
                       family_from_spec(spec["inner"]))
    if kind == "image":
        return Image(family_from_spec(spec["family"]),
                     set_from_spec(spec["set"]))
    if kind == "preimage":
        return Preimage(family_from_spec(spec["family"]),
                        set_from_spec(spec["set"]))
    if kind == "union":
        return UnionFamily(family_from_spec(spec["left"]),
                           family_from_spec(spec["right"]))
    if kind == "empty":
        return EmptyFamily()
    if kind == "singleton-empty":
        return EmptySetOnly()
    raise ValueError(f"unknown family spec type: {kind!r}")


# ---------------------------------------------------------------------------
# Operations


def is_member(e, fam: Family) -> bool:
    return fam.contains(check_finset(e))


def is_maximal(e, fam: Family) -> bool:
    """True iff e extends by no next integer; e must be a nonempty member.

    Equivalent to true maximality exactly for nice families, where every
    non-maximal member extends by the successor of its maximum.
    """
    e = check_finset(e)
    if not e:
        raise ValueError("maximality is only defined for nonempty sets")
    if not fam.contains(e):
        raise ValueError(f"{e} is not a member")
    return not fam.contains(e + (e[-1] + 1,))


def _max_segment(m: LazySet, fam: Family) -> FinSet:
    fast = fam._fast_max_segment(m)
    if fast is not None:
        return fast
    k = 1
    while True:
        e = m.prefix(k)
        if not fam.contains(e):
            raise ValueError(
                f"prefix {e} left the family before a maximal initial "
                "segment was found; the family is not nice on this range")
        if not fam.contains(e + (m.value(k + 1),)):
            return e
        k += 1


def max_initial_segment(m: LazySet, fam: Family,
                        probe_limit: int = DEFAULT_PROBE_LIMIT) -> FinSet:
    """The unique maximal initial segment of m lying in fam.

    Exists, is finite and nonempty for nice families.  Raises
    ProbeLimitError if the segment does not close within the probe limit.
    """
    with m.probe_guard(probe_limit):
        return _max_segment(m, fam)


def partition_blocks(m: LazySet, fam: Family, count: int,
                     probe_limit: int = DEFAULT_PROBE_LIMIT) -> list[FinSet]:
    """First ``count`` blocks of the partition of m into maximal members."""
    blocks = []
    consumed = 0
    with m.probe_guard(probe_limit):
        for _ in range(count):
            block = _max_segment(m.drop(consumed), fam)
            blocks.append(block)
            consumed += len(block)
    return blocks


def partition(m: LazySet, fam: Family, n: int,
              probe_limit: int = DEFAULT_PROBE_LIMIT) -> FinSet:
    """The n-th block of the partition of m into maximal members of fam."""
    if n < 1:
        raise ValueError("block index must be >= 1")
    return partition_blocks(m, fam, n, probe_limit)[-1]


def partition_indices(m: LazySet, fam: Family, n: int,
                      probe_limit: int = DEFAULT_PROBE_LIMIT) -> FinSet:
    """1-based positions within m of the n-th partition block."""
    blocks = partition_blocks(m, fam, n, probe_limit)
    start = sum(len(b) for b in blocks[:-1])
    return tuple(range(start + 1, start + len(blocks[-1]) + 1))


def feasible_depth(m: LazySet, fam: Family, max_depth: int,
                   budget: int) -> int:
    """How many partition blocks of m fit within a stream budget.

    Blocks of transfinite families grow hyper-exponentially with the values
    of m, so desk-scale sampling must cap depth by materialized prefix.
    """
    consumed = 0
    with m.probe_guard(budget):
        for r in range(max_depth):
            try:
                block = _max_segment(m.drop(consumed), fam)
            except ProbeLimitError:
                return r
            consumed += len(block)
            if consumed > budget:
                return r
    return max_depth


def enumerate_restriction(fam: Family, n: int,
                          enum_limit: int = DEFAULT_ENUM_LIMIT) -> list[FinSet]:
    """All members within {1..n}, in colex order.

    Complete for hereditary families: every member is reached from the
    empty set by adding elements in increasing order.
    """
    if n > enum_limit:
        raise EnumerationLimitError(
            f"restriction bound {n} exceeds enumeration limit {enum_limit}")
    out: list[FinSet] = []
    if fam.contains(()):
        out.append(())
    stack = [(v,) for v in range(n, 0, -1) if fam.contains((v,))]
    while stack:
        e = stack.pop()
        out.append(e)
        for v in range(n, e[-1], -1):
            ext = e + (v,)
            if fam.contains(ext):
                stack.append(ext)
    out.sort(key=lambda e: tuple(reversed(e)))
    return out


def enumerate_within(fam: Family, candidates, limit: int = 10 ** 5) -> list[FinSet]:
    """All members that are subsets of a given finite candidate set."""
    candidates = check_finset(sorted(set(candidates)))
    out: list[FinSet] = []
    if fam.contains(()):
        out.append(())
    stack = [((v,), i) for i, v in enumerate(candidates) if fam.contains((v,))]
    while stack:
        e, i = stack.pop()
        out.append(e)
        if len(out) > limit:
            raise EnumerationLimitError(
                f"more than {limit} member subsets of {candidates}")
        for j in range(i + 1, len(candidates)):
            ext = e + (candidates[j],)
            if fam.contains(ext):
                stack.append((ext, j))
    return out


def truncation_maximal(fam: Family, n: int,
                       enum_limit: int = DEFAULT_ENUM_LIMIT) -> list[FinSet]:
    """Nonempty members of the {1..n} truncation with no extension in range."""
    members = enumerate_restriction(fam, n, enum_limit)
    out = []
    for e in members:
        if not e:
            continue
        if all(not fam.contains(e + (v,)) for v in range(e[-1] + 1, n + 1)):
            out.append(e)
    return out


@dataclass
class RegularityReport:
    hereditary: bool
    spreading: bool
    compactness: str = "not checked"
    hereditary_counterexamples: list = field(default_factory=list)
    spreading_counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.hereditary and self.spreading


def check_regularity(fam: Family, n: int,
                     enum_limit: int = DEFAULT_ENUM_LIMIT) -> RegularityReport:
    """Verify hereditariness and spreading on the {1..n} truncation.

    Drop-one subsets witness hereditariness; single +1 increments witness
    spreading, since any in-range spread is a chain of such increments.
    Compactness is not decidable from a truncation.
    """
    members = enumerate_restriction(fam, n, enum_limit)
    report = RegularityReport(hereditary=True, spreading=True)
    for e in members:
        for i in range(len(e)):
            sub = e[:i] + e[i + 1:]
            if not fam.contains(sub):
                report.hereditary = False
                report.hereditary_counterexamples.append((e, sub))
        for i in range(len(e)):
            ceiling = e[i + 1] if i + 1 < len(e) else n + 1
            if e[i] + 1 < ceiling:
                spread = e[:i] + (e[i] + 1,) + e[i + 1:]
                if not fam.contains(spread):
                    report.spreading = False
                    report.spreading_counterexamples.append((e, spread))
    return report


def cb_symbolic(fam: Family) -> CBIndex:
    """Compositional derivative index of a grammar family."""
    return fam.cb_index()


def cb_probe_rank(e, fam: Family, n: int) -> int:
    """Bounded probe rank of e inside the {1..n} truncation.

    For a hereditary family the extension recursion's value equals the size
    of the largest extension set; for a spreading family that maximum is
    attained by a right-packed block of consecutive integers, making the
    scan quadratic in n instead of exponential.  Families not spreading by
    construction (images, ad hoc sets) fall back to the literal recursion.
    """
    e = check_finset(e)
    if not fam.contains(e):
        raise ValueError(f"{e} is not a member")
    if e and n < e[-1]:
        raise ValueError("probe ceiling below max of the set")
    floor = e[-1] if e else 0
    if not fam.is_spreading_by_construction():
        memo: dict[FinSet, int] = {}

        def rank(cur: FinSet) -> int:
            got = memo.get(cur)
            if got is None:
                start = cur[-1] + 1 if cur else 1
                got = memo[cur] = 1 + max(
                    (rank(cur + (m,)) for m in range(start, n + 1)
                     if fam.contains(cur + (m,))), default=-1)
            return got

        return rank(e)
    best = 0
    for end in range(floor + 1, n + 1):
        j = best + 1
        while end - j + 1 > floor:
            block = tuple(range(end - j + 1, end + 1))
            if not fam.contains(e + block):
                break
            best = j
            j += 1
    return best


def check_limit_inclusion(lam: Ordinal, n: int, bound: int,
                          enum_limit: int = DEFAULT_ENUM_LIMIT) -> list[FinSet]:
    """Counterexamples to stage(n)+1 <= stage(n+1) nesting on a truncation.

    The limit levels are built from the canonical fundamental sequence;
    whether consecutive stages nest is probed, not assumed.
    """
    stage_n = schreier_family(ordinals.add(ordinals.fund_seq(lam, n), ONE))
    stage_next = schreier_family(ordinals.fund_seq(lam, n + 1))
    return [e for e in enumerate_restriction(stage_n, bound, enum_limit)
            if not stage_next.contains(e)]
