"""Bell functionals, seeds, lifting and the seed-based inequality families."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .behavior import Behavior, bits_to_index

Key = tuple[tuple[int, ...], tuple[int, ...]]


class SeedError(ValueError):
    """A functional is not of the canonical seed form."""


class TrivialInequalityWarning(UserWarning):
    pass


def _frac(v) -> Fraction:
    if isinstance(v, float):
        raise TypeError(f"coefficients must be exact (int, Fraction or 'p/q' string), got float {v!r}")
    return Fraction(v)


class BellFunctional:
    """Sum of c(x, a) P(a|x) over a sparse set of (x, a) pairs, with a bound.

    Keys are ``(x, a)`` tuples of bits, party 0 first.  Identical keys are
    merged on construction and zero coefficients dropped, so two functionals
    are equal iff their coefficient maps are.
    """

    __slots__ = ("n_parties", "terms", "bound", "meta", "_compiled")

    def __init__(self, n_parties: int, terms: Mapping[Key, Any] | Iterable[tuple[Key, Any]] = (),
                 bound=0, meta: dict | None = None):
        if n_parties < 1:
            raise ValueError("n_parties must be >= 1")
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Key, Fraction] = {}
        for (x, a), c in items:
            x, a = tuple(int(v) for v in x), tuple(int(v) for v in a)
            if len(x) != n_parties or len(a) != n_parties:
                raise ValueError(f"key {(x, a)} does not have length {n_parties}")
            if any(v not in (0, 1) for v in x + a):
                raise ValueError(f"key {(x, a)} has non-binary entries")
            merged[(x, a)] = merged.get((x, a), Fraction(0)) + _frac(c)
        self.n_parties = n_parties
        self.terms = {k: v for k, v in sorted(merged.items()) if v != 0}
        self.bound = _frac(bound)
        self.meta = dict(meta or {})
        self._compiled = None

    def coefficient(self, x: Sequence[int], a: Sequence[int]) -> Fraction:
        return self.terms.get((tuple(x), tuple(a)), Fraction(0))

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, BellFunctional):
            return NotImplemented
        return self.n_parties == other.n_parties and self.terms == other.terms

    def __hash__(self):
        return hash((self.n_parties, tuple(self.terms.items())))

    def __repr__(self):
        tag = self.meta.get("family", "functional")
        return f"BellFunctional({tag}, n={self.n_parties}, terms={len(self.terms)})"

    def __add__(self, other: "BellFunctional") -> "BellFunctional":
        if other.n_parties != self.n_parties:
            raise ValueError("cannot add functionals on different party counts")
        return BellFunctional(self.n_parties, itertools.chain(self.terms.items(), other.terms.items()),
                              self.bound + other.bound)

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other: "BellFunctional") -> "BellFunctional":
        return self + (-other)

    def scaled(self, factor) -> "BellFunctional":
        factor = _frac(factor)
        return BellFunctional(self.n_parties, {k: factor * c for k, c in self.terms.items()},
                              factor * self.bound)

    def with_meta(self, **meta) -> "BellFunctional":
        return BellFunctional(self.n_parties, self.terms, self.bound, {**self.meta, **meta})

    def compiled(self):
        """Index arrays (x_idx, a_idx, coef_float, coef_exact) for fast evaluation."""
        if self._compiled is None:
            keys = list(self.terms)
            xi = np.array([bits_to_index(x) for x, _ in keys], dtype=np.int64)
            ai = np.array([bits_to_index(a) for _, a in keys], dtype=np.int64)
            exact = np.array(list(self.terms.values()), dtype=object)
            self._compiled = (xi, ai, exact.astype(float), exact)
        return self._compiled

    def to_json(self) -> dict:
        return {
            "n": self.n_parties,
            "bound": str(self.bound),
            "terms": [{"x": list(x), "a": list(a), "c": str(c)} for (x, a), c in self.terms.items()],
            "meta": _jsonable(self.meta),
        }

    @classmethod
    def from_json(cls, data: dict) -> "BellFunctional":
        try:
            terms = [((t["x"], t["a"]), str(t["c"])) for t in data["terms"]]
            return cls(int(data["n"]), terms, str(data.get("bound", "0")), data.get("meta"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed functional JSON: {exc}") from None


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def root_term(n: int) -> BellFunctional:
    """The single term P(0...0|0...0)."""
    return BellFunctional(n, {((0,) * n, (0,) * n): 1})


def evaluate(f: BellFunctional, b: Behavior):
    """Sum of c * P over the functional's terms; exact if ``b`` is exact."""
    if f.n_parties != b.n_parties:
        raise ValueError(f"functional on {f.n_parties} parties, behavior on {b.n_parties}")
    xi, ai, cf, ce = f.compiled()
    vals = b.table[xi, ai]
    if b.exact:
        return sum((c * p for c, p in zip(ce, vals)), Fraction(0))
    return float(np.dot(cf, vals))


# --- seeds -----------------------------------------------------------------

@dataclass(frozen=True)
class Seed:
    functional: BellFunctional
    certificate: Any = field(default=None, compare=False)

    @property
    def m(self) -> int:
        return self.functional.n_parties


def validate_seed(f: BellFunctional, certify: bool = True) -> Seed:
    """Accept ``f`` as a seed iff it reads P(0|0) minus nonnegative multiples of other terms.

    With ``certify`` the exact local (m=2) or biseparable (m=3) bound is
    attached to the returned seed.
    """
    n = f.n_parties
    root = ((0,) * n, (0,) * n)
    if f.coefficient(*root) != 1:
        raise SeedError(f"root coefficient c{root} = {f.coefficient(*root)}, expected 1")
    for key, c in f.terms.items():
        if key != root and c > 0:
            raise SeedError(f"positive coefficient {c} at {key}")
    cert = None
    if certify:
        from . import bounds
        if n == 2:
            cert = bounds.local_bound(f)
        elif n == 3:
            cert = bounds.biseparable_bound_tripartite(f)
    return Seed(f, cert)


def chsh_variant() -> Seed:
    """P(00|00) - P(01|01) - P(10|10) - P(00|11) <= 0."""
    f = BellFunctional(2, {
        ((0, 0), (0, 0)): 1,
        ((0, 1), (0, 1)): -1,
        ((1, 0), (1, 0)): -1,
        ((1, 1), (0, 0)): -1,
    }, meta={"family": "chsh"})
    return Seed(f)


def correlator_chsh() -> BellFunctional:
    """<A0B0> + <A1B0> + <A0B1> - <A1B1> written on probabilities, bound 2."""
    terms = {}
    for x, y, a, b in itertools.product((0, 1), repeat=4):
        sign = -1 if (x & y) else 1
        terms[((x, y), (a, b))] = sign * (1 if a == b else -1)
    return BellFunctional(2, terms, bound=2, meta={"family": "chsh-correlator"})


def tilted_chsh(beta) -> Seed:
    """CHSH variant minus (beta/2) P_A1(1|0); the marginal is taken at x2 = 0."""
    beta = _frac(beta)
    if beta < 0:
        raise ValueError(f"beta must be >= 0, got {beta}")
    f = chsh_variant().functional
    marg = BellFunctional(2, {((0, 0), (1, 0)): 1, ((0, 0), (1, 1)): 1})
    f = (f - marg.scaled(beta / 2)).with_meta(family="tilted-chsh", beta=beta)
    return Seed(f)


def tripartite_seed() -> Seed:
    """Seven-term tripartite GMNL inequality in seed form."""
    f = BellFunctional(3, {
        ((0, 0, 0), (0, 0, 0)): 1,
        ((1, 1, 1), (0, 1, 0)): -1,
        ((0, 1, 1), (0, 0, 0)): -1,
        ((0, 0, 1), (0, 0, 1)): -1,
        ((1, 1, 0), (1, 0, 0)): -1,
        ((0, 1, 0), (0, 1, 0)): -1,
        ((1, 0, 0), (1, 0, 0)): -1,
    }, meta={"family": "tripartite"})
    return Seed(f)


# --- lifting and families --------------------------------------------------

def lift(f: BellFunctional, n: int, parties: Sequence[int] | None = None,
         fixed: Mapping[int, tuple[int, int]] | None = None) -> BellFunctional:
    """Embed ``f`` into n parties.

    The k-th party of ``f`` becomes ``parties[k]``; every other party is
    pinned to the ``(setting, outcome)`` given in ``fixed`` (default (0, 0)).
    Coefficients are unchanged.
    """
    m = f.n_parties
    if n < m:
        raise ValueError(f"cannot lift {m} parties down to {n}")
    fixed = dict(fixed or {})
    if parties is None:
        parties = [p for p in range(n) if p not in fixed] if fixed else list(range(m))
    parties = list(parties)
    if len(parties) != m or len(set(parties)) != m:
        raise ValueError(f"need {m} distinct target parties, got {parties}")
    if set(parties) & set(fixed):
        raise ValueError(f"parties {sorted(set(parties) & set(fixed))} are both lifted and fixed")
    rest = [p for p in range(n) if p not in parties]
    if set(fixed) - set(rest) or not all(0 <= p < n for p in parties):
        raise ValueError(f"fixed parties {sorted(fixed)} must lie in 0..{n - 1} outside {parties}")
    pin = {p: fixed.get(p, (0, 0)) for p in rest}
    terms = []
    for (x, a), c in f.terms.items():
        xx, aa = [0] * n, [0] * n
        for k, p in enumerate(parties):
            xx[p], aa[p] = x[k], a[k]
        for p, (s, o) in pin.items():
            xx[p], aa[p] = s, o
        terms.append(((tuple(xx), tuple(aa)), c))
    return BellFunctional(n, terms, f.bound, dict(f.meta))


def _seed_functional(seed) -> BellFunctional:
    return seed.functional if isinstance(seed, Seed) else seed


def build_symmetric(seed, n: int) -> BellFunctional:
    """Lifted seed on every m-subset minus C(n-1, m) P(0|0)."""
    s = _seed_functional(seed)
    m = s.n_parties
    if n < m:
        raise ValueError(f"need n >= m = {m}")
    total = BellFunctional(n)
    for combo in itertools.combinations(range(n), m):
        total = total + lift(s, n, combo)
    total = total - root_term(n).scaled(comb(n - 1, m))
    return BellFunctional(n, total.terms, 0, {"family": "sym", "seed": s.meta.get("family"), "n": n,
                                              **_seed_params(s)})


def build_centered(seed, n: int, center: Sequence[int] | None = None) -> BellFunctional:
    """Seed on ``center`` plus each remaining party, minus (n-m) P(0|0)."""
    s = _seed_functional(seed)
    m = s.n_parties
    if n <= m:
        raise ValueError(f"need n > m = {m}")
    center = list(range(m - 1)) if center is None else sorted(center)
    if len(center) != m - 1 or len(set(center)) != m - 1 or not all(0 <= c < n for c in center):
        raise ValueError(f"center must be {m - 1} distinct parties in 0..{n - 1}, got {center}")
    total = BellFunctional(n)
    for j in range(n):
        if j not in center:
            total = total + lift(s, n, center + [j])
    total = total - root_term(n).scaled(n - m)
    return BellFunctional(n, total.terms, 0, {"family": "centered", "seed": s.meta.get("family"), "n": n,
                                              "center": center, **_seed_params(s)})


def _seed_params(s: BellFunctional) -> dict:
    return {"beta": s.meta["beta"]} if "beta" in s.meta else {}


def build_mu_family(mu12, mu13, mu23) -> BellFunctional:
    """mu-weighted lifted CHSH on the three pairs minus P(000|000)."""
    mus = [_frac(v) for v in (mu12, mu13, mu23)]
    if any(not 0 <= v <= 1 for v in mus):
        raise ValueError(f"weights must lie in [0, 1], got {[str(v) for v in mus]}")
    if sum(mus) <= 1:
        warnings.warn("mu12 + mu13 + mu23 <= 1: the inequality holds for every behavior",
                      TrivialInequalityWarning, stacklevel=2)
    chsh = chsh_variant().functional
    total = BellFunctional(3)
    for mu, pair in zip(mus, [(0, 1), (0, 2), (1, 2)]):
        total = total + lift(chsh, 3, pair).scaled(mu)
    total = total - root_term(3)
    return BellFunctional(3, total.terms, 0, {"family": "mu", "mu": [str(v) for v in mus]})


def build_m_separable(seed=None, n: int = 3, m: int = 2, variant: str = "symmetric") -> BellFunctional:
    """CHSH-seeded witnesses of non-m-separability."""
    s = _seed_functional(seed if seed is not None else chsh_variant())
    if s.n_parties != 2:
        raise ValueError("m-separable families take a two-party seed")
    if not 2 <= m < n:
        raise ValueError(f"need 2 <= m < n, got m={m}, n={n}")
    total = BellFunctional(n)
    if variant == "symmetric":
        for pair in itertools.combinations(range(n), 2):
            total = total + lift(s, n, pair)
        total = total - root_term(n).scaled(comb(n + 1 - m, 2))
    elif variant == "centered":
        for j in range(1, n):
            total = total + lift(s, n, (0, j))
        total = total - root_term(n).scaled(n - m)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return BellFunctional(n, total.terms, 0, {"family": f"msep-{variant}", "n": n, "m": m,
                                              **_seed_params(s)})


def build_recursive_symmetric(n: int) -> BellFunctional:
    """(1/(n-2)) sum_i [symmetric (n-1)-party functional lifted with party i pinned] - P(0|0)."""
    if n < 3:
        raise ValueError("recursive form needs n >= 3")
    prev = chsh_variant().functional
    for k in range(3, n + 1):
        total = BellFunctional(k)
        for i in range(k):
            total = total + lift(prev, k, fixed={i: (0, 0)})
        prev = total.scaled(Fraction(1, k - 2)) - root_term(k)
    return BellFunctional(n, prev.terms, 0, {"family": "sym-recursive", "n": n})
