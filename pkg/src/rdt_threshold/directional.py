"""The directional evaluation algorithm: exact expected cost and simulation.

The algorithm evaluates a gate by evaluating its children in a uniformly
random order and stops as soon as the output is forced, i.e. after seeing
``k`` ones or ``n - k + 1`` zeros. On reluctant inputs its expected cost
obeys a 2x2 linear recurrence per level.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Sequence

import numpy as np

from ._validation import DomainError, check_gate, fmt_rational
from .formula import FormulaSpec, check_assignment, reluctant_counts
from .linalg import ONES, CostMatrix, CostPair

_CHUNK = 20_000


def expected_zero_children(k: int, n: int) -> Fraction:
    """Expected number of 0-children read at a gate with exactly ``k`` one-children."""
    check_gate(k, n)
    return Fraction((n - k) * k, k + 1)


def expected_one_children(k: int, n: int) -> Fraction:
    """Expected number of 1-children read at a gate with exactly ``n - k + 1`` zero-children."""
    check_gate(k, n)
    return Fraction((k - 1) * (n - k + 1), n - k + 2)


def delta_matrix(k: int, n: int) -> CostMatrix:
    """Per-level matrix mapping children's (Φ, Ψ) to the parent's."""
    return CostMatrix(k, expected_zero_children(k, n), expected_one_children(k, n), n - k + 1)


@dataclass(frozen=True)
class DirectionalCost:
    phi: Fraction  # expected queries when the root evaluates to 1
    psi: Fraction  # ... and when it evaluates to 0
    depth: int

    def as_pair(self) -> CostPair:
        return CostPair(self.phi, self.psi)

    def to_json(self) -> dict:
        return {"phi": fmt_rational(self.phi), "psi": fmt_rational(self.psi), "depth": self.depth}


def level_product(f: FormulaSpec) -> CostMatrix:
    m = CostMatrix.identity()
    for g in f.gates():
        m = m @ delta_matrix(g.k, g.n)
    return m


def exact_cost(f: FormulaSpec) -> DirectionalCost:
    pair = level_product(f) @ ONES
    return DirectionalCost(phi=pair.c1, psi=pair.c0, depth=f.depth)


def expected_mean(f: FormulaSpec) -> Fraction:
    """Expected cost under the uniform distribution on all reluctant inputs."""
    cost, counts = exact_cost(f), reluctant_counts(f)
    return (counts.n1 * cost.phi + counts.n0 * cost.psi) / counts.total


def _run(f: FormulaSpec, a, level: int, offset: int, rng: random.Random):
    if level == f.depth:
        return a[offset], 1
    g = f.gate(level)
    width = g.n ** (f.depth - level - 1)
    ones = zeros = queries = 0
    for child in rng.sample(range(g.n), g.n):
        value, q = _run(f, a, level + 1, offset + child * width, rng)
        queries += q
        if value:
            ones += 1
            if ones == g.k:
                return 1, queries
        else:
            zeros += 1
            if zeros == g.n - g.k + 1:
                return 0, queries
    raise AssertionError("gate output was never forced")


def run_directional(f: FormulaSpec, a: Sequence[int], seed=None, rng: Optional[random.Random] = None) -> int:
    """Number of leaves read by one run of the directional algorithm on ``a``.

    Subtrees are only visited when the algorithm descends into them, and all
    randomness comes from ``rng`` (or a fresh generator seeded with ``seed``).
    """
    a = check_assignment(f, a)
    if rng is None:
        rng = random.Random(seed)
    return _run(f, a, 0, 0, rng)[1]


@dataclass
class SimulationReport:
    formula: str
    trials: int
    seed: int
    mean: float
    variance: float
    counts: Dict[int, int]
    cond_means: Dict[int, float]
    cond_variances: Dict[int, float]
    target_phi: Fraction
    target_psi: Fraction
    target_mean: Fraction
    condition: Optional[int] = None
    z: float = field(default=4.0)

    def _sigma(self, variance: float, count: int) -> float:
        return math.sqrt(variance / count) if count else math.inf

    def deviations(self) -> Dict[str, tuple]:
        """(|empirical - exact|, standard error) for each estimated quantity."""
        out = {}
        if self.condition is None:
            out["mean"] = (abs(self.mean - float(self.target_mean)), self._sigma(self.variance, self.trials))
        targets = {1: self.target_phi, 0: self.target_psi}
        for v, cnt in self.counts.items():
            if cnt:
                err = abs(self.cond_means[v] - float(targets[v]))
                out["phi" if v else "psi"] = (err, self._sigma(self.cond_variances[v], cnt))
        return out

    def within(self, z: Optional[float] = None) -> bool:
        """True when every estimate lies within ``z`` standard errors of its exact value."""
        z = self.z if z is None else z
        return all(err <= z * se + 1e-9 for err, se in self.deviations().values())

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "formula": self.formula,
            "trials": self.trials,
            "seed": self.seed,
            "condition": self.condition,
            "mean": self.mean,
            "variance": self.variance,
            "counts": {str(v): c for v, c in sorted(self.counts.items())},
            "conditional_means": {str(v): m for v, m in sorted(self.cond_means.items())},
            "conditional_variances": {str(v): s for v, s in sorted(self.cond_variances.items())},
            "target_phi": fmt_rational(self.target_phi),
            "target_psi": fmt_rational(self.target_psi),
            "target_mean": fmt_rational(self.target_mean),
            "within_4sigma": self.within(4.0),
        }


def _root_values(f: FormulaSpec, size: int, rng: np.random.Generator, condition) -> np.ndarray:
    if condition is not None:
        return np.full(size, int(condition), dtype=np.int8)
    counts = reluctant_counts(f)
    if counts.total < 2**62:
        return (rng.integers(0, counts.total, size=size) < counts.n1).astype(np.int8)
    exact = random.Random(int(rng.integers(2**63)))
    return np.fromiter((exact.randrange(counts.total) < counts.n1 for _ in range(size)), dtype=np.int8, count=size)


def _random_ranks(rng: np.random.Generator, shape) -> np.ndarray:
    return np.argsort(rng.random(shape), axis=-1)


def _simulate_chunk(f: FormulaSpec, size: int, rng: np.random.Generator, condition):
    """Root values and query counts for ``size`` independent runs on fresh reluctant inputs.

    Every subtree's cost is computed, but only visited children are summed,
    so the result has the same distribution as the lazy simulator.
    """
    root = _root_values(f, size, rng, condition)
    values = [root[:, None]]
    for g in f.gates():
        parent = values[-1]
        need = np.where(parent == 1, g.k, g.k - 1)[..., None]
        ranks = np.argsort(_random_ranks(rng, parent.shape + (g.n,)), axis=-1)
        values.append((ranks < need).astype(np.int8).reshape(size, -1))

    cost = np.ones_like(values[-1], dtype=np.int64)
    for level in reversed(range(f.depth)):
        g = f.gate(level)
        child_vals = values[level + 1].reshape(size, -1, g.n)
        child_cost = cost.reshape(size, -1, g.n)
        order = _random_ranks(rng, child_vals.shape)
        vals = np.take_along_axis(child_vals, order, axis=-1)
        costs = np.take_along_axis(child_cost, order, axis=-1)
        ones = np.cumsum(vals, axis=-1)
        zeros = np.cumsum(1 - vals, axis=-1)
        forced = (ones >= g.k) | (zeros >= g.n - g.k + 1)
        stop = np.argmax(forced, axis=-1)[..., None]
        visited = np.arange(g.n) <= stop
        cost = np.where(visited, costs, 0).sum(axis=-1)
    return root, cost[:, 0]


def simulate(f: FormulaSpec, trials: int, seed: int = 0, condition: Optional[int] = None):
    """Raw (root values, query counts) arrays for ``trials`` seeded runs."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(seed)
    roots, costs = [], []
    remaining = trials
    while remaining:
        size = min(remaining, _CHUNK)
        r, c = _simulate_chunk(f, size, rng, condition)
        roots.append(r)
        costs.append(c)
        remaining -= size
    return np.concatenate(roots), np.concatenate(costs)


def _var(x: np.ndarray) -> float:
    return float(x.var(ddof=1)) if len(x) > 1 else 0.0


def monte_carlo(f: FormulaSpec, trials: int, seed: int = 0, condition: Optional[int] = None) -> SimulationReport:
    """Run the directional algorithm on ``trials`` sampled reluctant inputs and aggregate."""
    roots, costs = simulate(f, trials, seed, condition)
    costs = costs.astype(np.float64)
    counts, cond_means, cond_vars = {}, {}, {}
    for v in (0, 1):
        sel = costs[roots == v]
        counts[v] = int(len(sel))
        if len(sel):
            cond_means[v] = float(sel.mean())
            cond_vars[v] = _var(sel)
    exact = exact_cost(f)
    return SimulationReport(
        formula=str(f),
        trials=trials,
        seed=seed,
        mean=float(costs.mean()),
        variance=_var(costs),
        counts=counts,
        cond_means=cond_means,
        cond_variances=cond_vars,
        target_phi=exact.phi,
        target_psi=exact.psi,
        target_mean=expected_mean(f),
        condition=condition,
    )
