"""Local, tripartite-biseparable and sampled m-separable bounds of Bell functionals."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator

import numpy as np

from .behavior import (
    RESPONSES,
    Behavior,
    DeterministicStrategy,
    all_ones_strategy,
    bipartite_ns_vertices,
    enumerate_deterministic,
    index_to_bits,
    ns_box,
    product_behavior,
    validate_grouping,
)
from .functional import BellFunctional, evaluate
from .quantum import MeasurementAssignment, behavior_from_state, haar_random_state

LOCAL_CAP = 8


@dataclass(frozen=True)
class BoundCertificate:
    kind: str                    # "local" | "biseparable" | "grouped-sampled"
    value: Any                   # Fraction for exact kinds, float for sampled
    witness: Any                 # DeterministicStrategy, or the maximizing Behavior
    sample_count: int | None = None
    grouping: tuple | None = None

    def to_json(self) -> dict:
        if isinstance(self.witness, DeterministicStrategy):
            witness = {"strategy": self.witness.to_json()}
        elif isinstance(self.witness, Behavior):
            witness = {"behavior": self.witness.to_json()}
        else:
            witness = None
        return {
            "kind": self.kind,
            "value": str(self.value) if isinstance(self.value, Fraction) else float(self.value),
            "witness": witness,
            "sample_count": self.sample_count,
            "grouping": [list(g) for g in self.grouping] if self.grouping else None,
        }


def _integer_coefficients(f: BellFunctional) -> tuple[np.ndarray, int]:
    coefs = list(f.terms.values())
    den = math.lcm(*(c.denominator for c in coefs)) if coefs else 1
    ints = [int(c * den) for c in coefs]
    if sum(abs(v) for v in ints) >= 2**62:
        raise OverflowError("coefficients too large for int64 enumeration")
    return np.array(ints, dtype=np.int64), den


def local_bound(f: BellFunctional, cap: int = LOCAL_CAP) -> BoundCertificate:
    """Exact maximum over all 4^n deterministic strategies.

    Ties go to the lexicographically smallest strategy.
    """
    n = f.n_parties
    if n > cap:
        raise ValueError(f"n={n} exceeds the enumeration cap {cap}")
    if not f.terms:
        return BoundCertificate("local", Fraction(0), next(enumerate_deterministic(n)))
    cint, den = _integer_coefficients(f)
    keys = list(f.terms)
    X = np.array([x for x, _ in keys], dtype=np.int64)
    A = np.array([a for _, a in keys], dtype=np.int64)
    resp = np.array(RESPONSES, dtype=np.int64)
    # strategy index -> per-party response index, party 0 most significant
    idx = np.arange(4**n)
    choice = np.stack([(idx >> (2 * (n - 1 - i))) & 3 for i in range(n)], axis=1)
    fired = np.ones((4**n, len(keys)), dtype=bool)
    for i in range(n):
        out = resp[choice[:, i]]                 # (S, 2)
        fired &= out[:, X[:, i]] == A[:, i]      # (S, T)
    values = fired.astype(np.int64) @ cint
    best = int(np.argmax(values))
    strategy = DeterministicStrategy(tuple(RESPONSES[c] for c in choice[best]))
    return BoundCertificate("local", Fraction(int(values[best]), den), strategy)


def bipartitions(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Unordered splits of range(n) into two non-empty groups; the group holding party 0 first."""
    out = []
    rest = list(range(1, n))
    for r in range(0, n - 1):
        for combo in itertools.combinations(rest, r):
            g = (0,) + combo
            out.append((g, tuple(p for p in range(n) if p not in g)))
    return out


def biseparable_bound_tripartite(f: BellFunctional) -> BoundCertificate:
    """Exact maximum over pair-NS-vertex x single-party-deterministic products.

    Every tripartite hybrid behavior is a mixture of these 3 * 24 * 4 = 288
    points, and evaluation is linear, so the maximum is the bound.
    """
    if f.n_parties != 3:
        raise ValueError("biseparable enumeration is implemented for n = 3")
    vertices = bipartite_ns_vertices()
    singles = [s.behavior() for s in enumerate_deterministic(1)]
    best = None
    for pair, single in [((0, 1), (2,)), ((0, 2), (1,)), ((1, 2), (0,))]:
        for v in vertices:
            for s in singles:
                b = product_behavior([(v, pair), (s, single)])
                val = evaluate(f, b)
                if best is None or val > best[0]:
                    best = (val, b, (pair, single))
    return BoundCertificate("biseparable", best[0], best[1], sample_count=288, grouping=best[2])


def count_potentially_positive_pairs(n: int, grouping) -> int:
    """Number of party pairs sharing a group, i.e. lifted CHSH copies that can be positive."""
    groups = validate_grouping(grouping, n)
    return sum(math.comb(len(g), 2) for g in groups)


def groupings(n: int, m: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All partitions of range(n) into exactly m non-empty groups."""
    def rec(i, blocks):
        if i == n:
            if len(blocks) == m:
                yield tuple(tuple(b) for b in blocks)
            return
        if len(blocks) + (n - i) < m:
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1, blocks)
            b.pop()
        if len(blocks) < m:
            blocks.append([i])
            yield from rec(i + 1, blocks)
            blocks.pop()
    yield from rec(0, [])


# --- sampled m-separable inner approximation -------------------------------

def _relabel(table: np.ndarray, k: int, rng) -> np.ndarray:
    """Apply a random local relabeling of settings and outcomes."""
    sflip = rng.integers(0, 2, k)
    oflip0 = rng.integers(0, 2, k)
    oflip1 = rng.integers(0, 2, k)
    side = 2**k
    xs = np.array([index_to_bits(i, k) for i in range(side)])
    xsrc = xs ^ sflip
    weights = 1 << np.arange(k - 1, -1, -1)
    out = np.empty_like(table)
    for xi in range(side):
        aflip = oflip0 ^ (oflip1 & xs[xi])
        asrc = (xs ^ aflip) @ weights
        out[xi] = table[xsrc[xi] @ weights, asrc]
    return out


class _GroupSampler:
    """Draws NS behaviors for a group of k parties (floats)."""

    def __init__(self, rng, pure_fraction: float = 0.3, pool: int = 4):
        self.rng = rng
        self.pure_fraction = pure_fraction
        self.pool = pool
        self._singles = [s.behavior().to_float().table for s in enumerate_deterministic(1)]
        self._pairs = [v.to_float().table for v in bipartite_ns_vertices()]
        self._boxes: dict[int, np.ndarray] = {}

    def _candidate(self, k: int) -> np.ndarray:
        rng = self.rng
        if rng.random() < 0.5:
            if k not in self._boxes:
                self._boxes[k] = ns_box(k).to_float().table
            return _relabel(self._boxes[k], k, rng)
        state = haar_random_state(k, rng)
        angles = np.stack([rng.uniform(0, np.pi, (k, 2)), rng.uniform(0, 2 * np.pi, (k, 2))], axis=-1)
        return behavior_from_state(state, MeasurementAssignment.from_angles(angles)).table

    def draw(self, k: int) -> np.ndarray:
        rng = self.rng
        if k == 1:
            cands = self._singles
        elif k == 2:
            cands = self._pairs
        else:
            cands = [self._candidate(k) for _ in range(self.pool)]
        if rng.random() < self.pure_fraction:
            return cands[rng.integers(len(cands))]
        w = rng.dirichlet(np.ones(len(cands)))
        return np.tensordot(w, np.array(cands), axes=1)


def _random_grouping(n: int, m: int, rng) -> tuple[tuple[int, ...], ...]:
    while True:
        labels = rng.integers(0, m, n)
        if len(set(labels.tolist())) == m:
            return validate_grouping([np.flatnonzero(labels == g).tolist() for g in range(m)], n)


def grouped_bound_sampled(f: BellFunctional, m: int, samples: int = 10_000, rng_seed=None,
                          pure_fraction: float = 0.3) -> BoundCertificate:
    """Empirical maximum of ``f`` over randomly drawn m-separable product behaviors.

    One-party groups are deterministic responses or mixtures of them,
    two-party groups are NS vertices or mixtures, larger groups are drawn
    from relabeled n-party NS boxes and Haar-random quantum behaviors.
    Sample 0 is always the all-ones product.  The result is a lower bound
    on the true m-separable maximum.
    """
    n = f.n_parties
    if not 2 <= m < n:
        raise ValueError(f"need 2 <= m < n, got m={m}, n={n}")
    rng = np.random.default_rng(rng_seed)
    sampler = _GroupSampler(rng, pure_fraction)
    best = all_ones_strategy(n).behavior().to_float()
    best_val = evaluate(f, best)
    best_grouping = tuple((i,) for i in range(n))
    for _ in range(1, samples):
        grouping = _random_grouping(n, m, rng)
        parts = [(Behavior(sampler.draw(len(g))), g) for g in grouping]
        b = product_behavior(parts)
        val = evaluate(f, b)
        if val > best_val:
            best, best_val, best_grouping = b, val, grouping
    return BoundCertificate("grouped-sampled", best_val, best, sample_count=samples, grouping=best_grouping)
