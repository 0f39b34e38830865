"""Exhaustive optimizers for small instances, used to cross-check everything else.

States are cylinders (partial assignments) over all variables, so nothing
here relies on the symmetry arguments the fast code paths use.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from ._validation import DomainError, InstanceTooLarge, as_rational, check_nonnegative, fmt_rational
from .formula import FormulaSpec, check_assignment, enumerate_reluctant, evaluate, reluctant_counts
from .linalg import CostPair

MAX_VARS = 12
MAX_SLICE = 5

Cylinder = Tuple[Optional[int], ...]


@dataclass(frozen=True)
class CostModel:
    """Local cost: ``c0`` per queried 0 and ``c1`` per queried 1, optionally per variable."""

    c0: Union[Fraction, Tuple[Fraction, ...]] = Fraction(1)
    c1: Union[Fraction, Tuple[Fraction, ...]] = Fraction(1)

    def pairs(self, m: int) -> Tuple[Tuple[Fraction, Fraction], ...]:
        def spread(c):
            if isinstance(c, (tuple, list)):
                if len(c) != m:
                    raise DomainError(f"per-variable costs need {m} entries, got {len(c)}")
                return [as_rational(x) for x in c]
            return [as_rational(c)] * m

        return tuple(zip(spread(self.c0), spread(self.c1)))


UNIT = CostModel()


@dataclass(frozen=True)
class Reluctant:
    pass


@dataclass(frozen=True)
class SliceUniform:
    ones: int


@dataclass(frozen=True)
class Explicit:
    weights: Mapping[Tuple[int, ...], Fraction]


Distribution = Union[Reluctant, SliceUniform, Explicit]


@dataclass
class OracleResult:
    value: Fraction
    strategy: Dict[Cylinder, Optional[int]] = field(repr=False)
    states_explored: int
    root: Cylinder = field(repr=False, default=())

    @property
    def first_query(self) -> Optional[int]:
        return self.strategy.get(self.root)

    def to_json(self) -> dict:
        return {"value": fmt_rational(self.value), "first_query": self.first_query,
                "states_explored": self.states_explored}


class _CylinderDP:
    """Optimal adaptive query strategy over cylinders of ``m`` variables.

    ``weights`` maps full assignments to non-negative masses. With ``label``
    given, a cylinder is terminal once the label is constant on every
    completion (or the cylinder has no mass); without it, stopping is
    allowed anywhere except at the root.
    """

    def __init__(self, m: int, weights: Dict[Tuple[int, ...], Fraction], costs, label=None):
        self.m = m
        self.weights = weights
        self.costs = costs
        self.label = label
        self._mass: Dict[Cylinder, Fraction] = {}
        self._const: Dict[Cylinder, Optional[int]] = {}
        self._value: Dict[Cylinder, Fraction] = {}
        self.strategy: Dict[Cylinder, Optional[int]] = {}

    def mass(self, cyl: Cylinder) -> Fraction:
        if cyl in self._mass:
            return self._mass[cyl]
        try:
            v = cyl.index(None)
        except ValueError:
            out = self.weights.get(cyl, Fraction(0))
        else:
            out = self.mass(_set(cyl, v, 0)) + self.mass(_set(cyl, v, 1))
        self._mass[cyl] = out
        return out

    def constant(self, cyl: Cylinder) -> Optional[int]:
        """Label value shared by every completion of ``cyl``, else None."""
        if cyl in self._const:
            return self._const[cyl]
        try:
            v = cyl.index(None)
        except ValueError:
            out = self.label(cyl)
        else:
            lo, hi = self.constant(_set(cyl, v, 0)), self.constant(_set(cyl, v, 1))
            out = lo if lo is not None and lo == hi else None
        self._const[cyl] = out
        return out

    def best_query(self, cyl: Cylinder) -> Tuple[Optional[Fraction], Optional[int]]:
        best, arg = None, None
        for v, state in enumerate(cyl):
            if state is not None:
                continue
            zero, one = _set(cyl, v, 0), _set(cyl, v, 1)
            c0, c1 = self.costs[v]
            total = self.mass(zero) * c0 + self.mass(one) * c1 + self.value(zero) + self.value(one)
            if best is None or total < best:
                best, arg = total, v
        return best, arg

    def value(self, cyl: Cylinder, forced: bool = False) -> Fraction:
        """Mass-weighted optimal cost below ``cyl``."""
        if not forced and cyl in self._value:
            return self._value[cyl]
        if self.mass(cyl) == 0 and not forced:
            out, arg = Fraction(0), None
        elif self.label is not None:
            if self.constant(cyl) is not None:
                out, arg = Fraction(0), None
            else:
                out, arg = self.best_query(cyl)
        else:
            q, arg = self.best_query(cyl)
            if q is None or (not forced and q >= 0):
                out, arg = Fraction(0), None
            else:
                out = q
        if forced:
            return out, arg
        self._value[cyl] = out
        self.strategy[cyl] = arg
        return out

    def solve(self, forced_root: bool = False) -> OracleResult:
        root = (None,) * self.m
        total = self.mass(root)
        if total == 0:
            raise DomainError("distribution has zero total mass")
        if forced_root:
            raw, arg = self.value(root, forced=True)
            self.strategy[root] = arg
        else:
            raw = self.value(root)
        return OracleResult(raw / total, dict(self.strategy), len(self._value) + forced_root, root)


def _set(cyl: Cylinder, v: int, bit: int) -> Cylinder:
    return cyl[:v] + (bit,) + cyl[v + 1 :]


def _weights(f: FormulaSpec, dist: Distribution) -> Dict[Tuple[int, ...], Fraction]:
    m = f.n_leaves
    if isinstance(dist, Reluctant):
        return {a: Fraction(1) for a in enumerate_reluctant(f)}
    if isinstance(dist, SliceUniform):
        if not 0 <= dist.ones <= m:
            raise DomainError(f"slice needs 0 <= ones <= {m}")
        out = {}
        for ones in itertools.combinations(range(m), dist.ones):
            out[tuple(int(i in ones) for i in range(m))] = Fraction(1)
        return out
    if isinstance(dist, Explicit):
        out = {}
        for a, w in dist.weights.items():
            out[check_assignment(f, a)] = check_nonnegative(w, "weight")
        return out
    raise DomainError(f"unknown distribution {dist!r}")


def _guard(m: int, limit: int, what: str) -> None:
    if m > limit:
        raise InstanceTooLarge(f"{what} has {m} variables, limit is {limit}", 3**m)


def optimal_expected_cost(f: FormulaSpec, dist: Distribution = Reluctant(), cost: CostModel = UNIT) -> OracleResult:
    """Minimum expected cost over all zero-error deterministic decision trees for ``f``.

    A fixed input distribution always admits a deterministic optimum, so this
    is also the distributional randomized complexity under ``dist``.
    """
    m = f.n_leaves
    _guard(m, MAX_VARS, str(f))
    dp = _CylinderDP(m, _weights(f, dist), cost.pairs(m), label=lambda a: evaluate(f, a))
    return dp.solve()


def optimal_tree_over_slice(k: int, n: int, eta, limit: int = MAX_SLICE) -> Fraction:
    """Best cost over all non-empty trees on the k-ones slice, reading 0 costs 1 and 1 costs -eta."""
    if not (isinstance(k, int) and isinstance(n, int)) or n < 1 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, n >= 1; got k={k}, n={n}")
    eta = check_nonnegative(eta, "eta")
    _guard(n, limit, f"slice ({k},{n})")
    weights = {}
    for ones in itertools.combinations(range(n), k):
        weights[tuple(int(i in ones) for i in range(n))] = Fraction(1)
    costs = ((Fraction(1), -eta),) * n
    return _CylinderDP(n, weights, costs).solve(forced_root=True).value


def replay_cost(f: FormulaSpec, dist: Distribution, cost: CostModel, result: OracleResult) -> Fraction:
    """Expected cost of following ``result.strategy`` from the root on every input."""
    weights = _weights(f, dist)
    pairs = cost.pairs(f.n_leaves)
    total = sum(weights.values())
    acc = Fraction(0)
    for a, w in weights.items():
        if not w:
            continue
        cyl = result.root
        while (v := result.strategy.get(cyl)) is not None:
            c0, c1 = pairs[v]
            acc += w * (c1 if a[v] else c0)
            cyl = _set(cyl, v, a[v])
    return acc / total


def _expected_directional(f: FormulaSpec, a, level: int, offset: int) -> Fraction:
    if level == f.depth:
        return Fraction(1)
    g = f.gate(level)
    width = g.n ** (f.depth - level - 1)
    children = []
    for c in range(g.n):
        start = offset + c * width
        sub = a[start : start + width]
        value = evaluate(_sub_formula(f, level + 1), sub)
        children.append((value, _expected_directional(f, a, level + 1, start)))
    total, count = Fraction(0), 0
    for order in itertools.permutations(range(g.n)):
        ones = zeros = 0
        for c in order:
            value, cost = children[c]
            total += cost
            ones += value
            zeros += 1 - value
            if ones == g.k or zeros == g.n - g.k + 1:
                break
        count += 1
    return total / count


def _sub_formula(f: FormulaSpec, level: int) -> FormulaSpec:
    depth = f.depth - level
    if f.k is not None:
        return FormulaSpec.constant(f.k, f.n, depth)
    root = f.root if level % 2 == 0 else ("or" if f.root == "and" else "and")
    return FormulaSpec.alternating(f.n, depth, root)


def directional_exact_small(f: FormulaSpec) -> Tuple[Fraction, Fraction]:
    """(Φ, Ψ) of the directional algorithm by averaging over every child order and reluctant input."""
    if f.depth > 2 or f.n > 3:
        raise InstanceTooLarge(f"{f} exceeds depth 2 / fan-out 3", reluctant_counts(f).total)
    sums = {0: Fraction(0), 1: Fraction(0)}
    counts = {0: 0, 1: 0}
    for a in enumerate_reluctant(f):
        v = evaluate(f, a)
        sums[v] += _expected_directional(f, a, 0, 0)
        counts[v] += 1
    return sums[1] / counts[1], sums[0] / counts[0]


@dataclass(frozen=True)
class ShrinkReport:
    k: int
    n: int
    cost: CostModel
    lhs: Fraction
    shrunk: CostPair
    rhs_average: Fraction
    rhs_min: Fraction
    rhs_marginal: Fraction

    @property
    def passed(self) -> bool:
        return self.lhs >= self.rhs_average

    @property
    def passed_min(self) -> bool:
        return self.lhs >= self.rhs_min

    @property
    def passed_marginal(self) -> bool:
        return self.lhs >= self.rhs_marginal

    def to_json(self) -> dict:
        return {
            "k": self.k, "n": self.n,
            "lhs": fmt_rational(self.lhs),
            "shrunk": self.shrunk.to_json(),
            "rhs_average": fmt_rational(self.rhs_average),
            "rhs_min": fmt_rational(self.rhs_min),
            "rhs_marginal": fmt_rational(self.rhs_marginal),
            "passed": self.passed,
        }


def check_shrink_inequality(k: int, n: int, cost: CostModel = UNIT) -> ShrinkReport:
    """Compare the optimal one-level cost with the cost of the single variable it shrinks to.

    The left side is the exact optimum for one ``T_k^n`` gate under the
    reluctant distribution and the local cost ``cost``. The right side
    charges one query at the shrunk cost pair; it is reported with the
    uniform root marginal (the depth-0 reluctant distribution), with the
    minimum entry, and with the gate's actual root marginal.
    """
    from .bounds import gamma_exact

    if n > MAX_SLICE:
        raise InstanceTooLarge(f"shrink check limited to n <= {MAX_SLICE}", 3**n)
    if not isinstance(cost.c0, Fraction) and isinstance(cost.c0, (tuple, list)):
        raise DomainError("shrink check needs a uniform cost model")
    f = FormulaSpec.constant(k, n, 1)
    lhs = optimal_expected_cost(f, Reluctant(), cost).value
    shrunk = gamma_exact(k, n) @ CostPair(c1=cost.c1, c0=cost.c0)
    counts = reluctant_counts(f)
    marginal = (counts.n1 * shrunk.c1 + counts.n0 * shrunk.c0) / counts.total
    return ShrinkReport(k, n, cost, lhs, shrunk, (shrunk.c1 + shrunk.c0) / 2, shrunk.min(), marginal)
