"""Behaviors: conditional outcome tables P(a|x) for n two-setting, two-outcome parties.

Index convention: party 0 is the most significant bit of both the setting
index and the outcome index, so ``table[x_index, a_index]`` with
``x_index = sum(x[i] << (n - 1 - i))``.  Exact behaviors carry
``fractions.Fraction`` entries in an object array; quantum behaviors are
float64.  Conversion between the two is explicit (:meth:`Behavior.to_float`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

MAX_PARTIES = 10


class BehaviorError(ValueError):
    """Raised for structurally invalid behaviors (shape, missing entries)."""


def bits_to_index(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | int(b)
    return idx


def index_to_bits(idx: int, n: int) -> tuple[int, ...]:
    return tuple((idx >> (n - 1 - i)) & 1 for i in range(n))


def _as_fraction(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    raise BehaviorError(f"cannot convert {v!r} to an exact rational")


class Behavior:
    """Dense table of P(a|x), immutable after construction."""

    __slots__ = ("n_parties", "table")

    def __init__(self, table, max_parties: int = MAX_PARTIES):
        table = np.asarray(table)
        if table.ndim != 2 or table.shape[0] != table.shape[1]:
            raise BehaviorError(f"table must be square 2^n x 2^n, got {table.shape}")
        n = int(table.shape[0]).bit_length() - 1
        if n < 1 or 2**n != table.shape[0]:
            raise BehaviorError(f"table side {table.shape[0]} is not a power of two")
        if n > max_parties:
            raise BehaviorError(f"n={n} exceeds the party cap {max_parties}")
        if table.dtype == object:
            if any(v is None for v in table.flat):
                raise BehaviorError("table has missing entries")
            table = np.array([[_as_fraction(v) for v in row] for row in table], dtype=object)
        else:
            table = np.array(table, dtype=float)
            if np.isnan(table).any():
                raise BehaviorError("table has missing (NaN) entries")
        table.flags.writeable = False
        self.n_parties = n
        self.table = table

    @property
    def exact(self) -> bool:
        return self.table.dtype == object

    def prob(self, x: Sequence[int], a: Sequence[int]):
        return self.table[bits_to_index(x), bits_to_index(a)]

    def tensor(self) -> np.ndarray:
        """View with axes (x_0..x_{n-1}, a_0..a_{n-1})."""
        return self.table.reshape((2,) * (2 * self.n_parties))

    def to_float(self) -> "Behavior":
        return Behavior(self.table.astype(float))

    def __repr__(self):
        kind = "exact" if self.exact else "float"
        return f"Behavior(n={self.n_parties}, {kind})"

    def __eq__(self, other):
        if not isinstance(other, Behavior) or other.n_parties != self.n_parties:
            return NotImplemented
        return bool(np.all(self.table == other.table))

    def __hash__(self):
        return hash((self.n_parties, tuple(self.table.flat)))

    def mix(self, other: "Behavior", weight) -> "Behavior":
        """Return ``weight * self + (1 - weight) * other``."""
        return Behavior(weight * self.table + (1 - weight) * other.table)

    # JSON: {"n": int, "entries": [{"x": [...], "a": [...], "p": "num/den" | float}]}
    def to_json(self) -> dict:
        n = self.n_parties
        entries = []
        for xi in range(2**n):
            for ai in range(2**n):
                p = self.table[xi, ai]
                entries.append({
                    "x": list(index_to_bits(xi, n)),
                    "a": list(index_to_bits(ai, n)),
                    "p": str(p) if self.exact else float(p),
                })
        return {"n": n, "entries": entries}

    @classmethod
    def from_json(cls, data: dict) -> "Behavior":
        try:
            n = int(data["n"])
            entries = data["entries"]
        except (KeyError, TypeError) as exc:
            raise BehaviorError(f"malformed behavior JSON: {exc}") from None
        if n < 1 or n > MAX_PARTIES:
            raise BehaviorError(f"n={n} outside [1, {MAX_PARTIES}]")
        exact = any(isinstance(e.get("p"), str) for e in entries)
        table = np.full((2**n, 2**n), None, dtype=object)
        for e in entries:
            x, a = e["x"], e["a"]
            if len(x) != n or len(a) != n:
                raise BehaviorError(f"entry {e} has wrong vector length")
            p = e["p"]
            table[bits_to_index(x), bits_to_index(a)] = Fraction(p) if exact else float(p)
        if any(v is None for v in table.flat):
            raise BehaviorError("behavior JSON does not cover all 4^n (x, a) pairs")
        if not exact:
            table = table.astype(float)
        return cls(table)


@dataclass(frozen=True)
class BehaviorReport:
    normalization_residual: float
    min_entry: float
    ns_residual: float
    tol: float

    @property
    def ok(self) -> bool:
        return (self.normalization_residual <= self.tol
                and self.ns_residual <= self.tol
                and self.min_entry >= -self.tol)


def check_behavior(b: Behavior, tol: float = 1e-12) -> BehaviorReport:
    """Normalization, positivity and no-signalling residuals of ``b``.

    The NS residual is the largest change of any (n-1)-party marginal when
    the marginalized party switches its setting.  Residuals are exact
    Fractions for exact behaviors.
    """
    n = b.n_parties
    t = b.tensor()
    sums = b.table.sum(axis=1)
    norm_res = max(abs(s - 1) for s in sums)
    min_entry = min(b.table.flat)
    ns_res = Fraction(0) if b.exact else 0.0
    for i in range(n):
        marg = t.sum(axis=n + i)
        diff = np.take(marg, 0, axis=i) - np.take(marg, 1, axis=i)
        ns_res = max(ns_res, max(abs(v) for v in np.ravel(diff)))
    return BehaviorReport(norm_res, min_entry, ns_res, tol)


def uniform_behavior(n: int) -> Behavior:
    side = 2**n
    return Behavior(np.full((side, side), Fraction(1, side), dtype=object))


@dataclass(frozen=True, order=True)
class DeterministicStrategy:
    """Per party, the outcomes ``(f(0), f(1))`` for settings 0 and 1."""

    outputs: tuple[tuple[int, int], ...]

    @property
    def n_parties(self) -> int:
        return len(self.outputs)

    def outcome(self, x: Sequence[int]) -> tuple[int, ...]:
        return tuple(f[xi] for f, xi in zip(self.outputs, x))

    def behavior(self) -> Behavior:
        n = self.n_parties
        side = 2**n
        table = np.full((side, side), Fraction(0), dtype=object)
        for xi in range(side):
            table[xi, bits_to_index(self.outcome(index_to_bits(xi, n)))] = Fraction(1)
        return Behavior(table)

    def to_json(self) -> list[list[int]]:
        return [list(f) for f in self.outputs]

    @classmethod
    def from_json(cls, data) -> "DeterministicStrategy":
        return cls(tuple((int(f[0]), int(f[1])) for f in data))


# single-party response functions in lexicographic order: (0,0), (0,1), (1,0), (1,1)
RESPONSES = ((0, 0), (0, 1), (1, 0), (1, 1))


def enumerate_deterministic(n: int) -> Iterator[DeterministicStrategy]:
    """All 4^n deterministic strategies, lexicographically ordered."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for combo in itertools.product(RESPONSES, repeat=n):
        yield DeterministicStrategy(combo)


def all_ones_strategy(n: int) -> DeterministicStrategy:
    """Every party outputs 1 whatever its setting; saturates the CHSH-seeded families."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return DeterministicStrategy(((1, 1),) * n)


def pr_box(alpha: int = 0, beta: int = 0, gamma: int = 0) -> Behavior:
    """P(ab|xy) = 1/2 iff a ^ b == x*y ^ alpha*x ^ beta*y ^ gamma."""
    table = np.full((4, 4), Fraction(0), dtype=object)
    for x, y, a, b in itertools.product((0, 1), repeat=4):
        if a ^ b == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma:
            table[2 * x + y, 2 * a + b] = Fraction(1, 2)
    return Behavior(table)


def bipartite_ns_vertices() -> list[Behavior]:
    """The 24 vertices of the two-party binary NS polytope.

    16 deterministic points followed by the 8 PR-box relabelings.
    """
    verts = [s.behavior() for s in enumerate_deterministic(2)]
    verts += [pr_box(al, be, ga) for al, be, ga in itertools.product((0, 1), repeat=3)]
    return verts


def ns_box(n: int) -> Behavior:
    """n-party PR-box generalisation: P(a|x) = 2^(1-n) iff XOR(a) == XOR_{i<j} x_i x_j."""
    if n < 2:
        raise ValueError("ns_box needs n >= 2")
    side = 2**n
    w = Fraction(1, 2 ** (n - 1))
    table = np.full((side, side), Fraction(0), dtype=object)
    for xi in range(side):
        x = index_to_bits(xi, n)
        target = 0
        for i, j in itertools.combinations(range(n), 2):
            target ^= x[i] & x[j]
        for ai in range(side):
            if bin(ai).count("1") % 2 == target:
                table[xi, ai] = w
    return Behavior(table)


def validate_grouping(groups: Sequence[Sequence[int]], n: int | None = None) -> tuple[tuple[int, ...], ...]:
    """Normalize a grouping to sorted tuples and check it partitions range(n)."""
    norm = tuple(tuple(sorted(int(i) for i in g)) for g in groups)
    if any(len(g) == 0 for g in norm):
        raise ValueError("groups must be non-empty")
    flat = [i for g in norm for i in g]
    if len(flat) != len(set(flat)):
        raise ValueError(f"groups overlap: {norm}")
    if n is None:
        n = len(flat)
    if sorted(flat) != list(range(n)):
        raise ValueError(f"groups {norm} do not cover parties 0..{n - 1}")
    return norm


def product_behavior(parts: Sequence[tuple[Behavior, Sequence[int]]]) -> Behavior:
    """Joint behavior of independent groups.

    ``parts`` pairs each group behavior with the (0-based) parties it acts
    on; the k-th party of a group behavior is placed at the k-th smallest
    index of its group.
    """
    groups = validate_grouping([idx for _, idx in parts])
    for (b, _), g in zip(parts, groups):
        if b.n_parties != len(g):
            raise ValueError(f"behavior on {b.n_parties} parties given for group {g}")
    n = sum(len(g) for g in groups)
    exact = all(b.exact for b, _ in parts)
    joint = None
    axes_x: list[int] = []
    axes_a: list[int] = []
    pos = 0
    for (b, _), g in zip(parts, groups):
        if not exact and b.exact:
            b = b.to_float()
        t = b.tensor()
        joint = t if joint is None else np.multiply.outer(joint, t)
        k = len(g)
        axes_x += [(pos + j, g[j]) for j in range(k)]
        axes_a += [(pos + k + j, g[j]) for j in range(k)]
        pos += 2 * k
    perm = [ax for ax, _ in sorted(axes_x, key=lambda t: t[1])]
    perm += [ax for ax, _ in sorted(axes_a, key=lambda t: t[1])]
    joint = np.transpose(joint, perm).reshape(2**n, 2**n)
    return Behavior(joint)
