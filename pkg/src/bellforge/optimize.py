"""Measurement search maximizing a Bell functional on a fixed pure state.

The see-saw update is exact: with every other party fixed, the functional is
linear in the rank-1 projector of each of this party's settings, so the best
outcome-0 vector is the top eigenvector of a 2x2 Hermitian matrix.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .functional import BellFunctional
from .quantum import MeasurementAssignment, PureState, QubitMeasurement, haar_random_state

VIOLATION_THRESHOLD = 1e-8


class _Objective:
    """Fast evaluation of a functional on (state, assignment) pairs.

    Measurements are held as ``mats[i, x]``, party i's 2x2 bra matrix for
    setting x.  Coefficients are stored densely with axes interleaved as
    (x_0, a_0, x_1, a_1, ...), which is the order the contractions produce.
    """

    def __init__(self, f: BellFunctional, state: PureState):
        if f.n_parties != state.n_qubits:
            raise ValueError(f"functional on {f.n_parties} parties, state on {state.n_qubits} qubits")
        self.n = n = f.n_parties
        self.psi = state.tensor()
        coef = np.zeros((2,) * (2 * n))
        for (x, a), c in f.terms.items():
            coef[x + a] = float(c)
        self.coef = np.transpose(coef, [k for i in range(n) for k in (i, n + i)])
        self._party_coef = []
        for i in range(n):
            rest = [k for k in range(2 * n) if k not in (2 * i, 2 * i + 1)]
            self._party_coef.append(np.transpose(self.coef, [2 * i, 2 * i + 1] + rest).reshape(2, 2, -1))

    def value(self, mats: np.ndarray) -> float:
        t = self.psi
        for i in range(self.n):
            t = np.tensordot(t, mats[i], axes=([0], [2]))
        return float(np.sum(self.coef * (t.real**2 + t.imag**2)))

    def party_update(self, mats: np.ndarray, i: int) -> None:
        """Replace party i's two measurements by the exact block maximizer (in place)."""
        t = np.moveaxis(self.psi, i, -1)
        for j in range(self.n):
            if j != i:
                t = np.tensordot(t, mats[j], axes=([0], [2]))
        t = t.reshape(2, -1)              # party i's qubit x (other parties' settings, outcomes)
        W = np.einsum("sak,qk,rk->saqr", self._party_coef[i], t, t.conj())
        for s in (0, 1):
            D = W[s, 0] - W[s, 1]
            if not np.any(D):
                continue
            _, vecs = np.linalg.eigh(D)
            r = vecs[:, -1].conj()
            mats[i, s] = [r, [np.conj(r[1]), -np.conj(r[0])]]


def _mats_from_angles(angles: np.ndarray) -> np.ndarray:
    a = np.asarray(angles).reshape(-1, 2, 2)
    alpha, delta = a[..., 0], a[..., 1]
    c, s, ph = np.cos(alpha), np.sin(alpha), np.exp(1j * delta)
    row0 = np.stack([c, ph * s], axis=-1)
    row1 = np.stack([s, -ph * c], axis=-1)
    return np.stack([row0, row1], axis=-2).astype(complex)


def _assignment_from_mats(mats: np.ndarray) -> MeasurementAssignment:
    return MeasurementAssignment(tuple(
        tuple(QubitMeasurement.from_bra(mats[i, x, 0]) for x in (0, 1)) for i in range(mats.shape[0])))


def _seed_sequence(seed) -> np.random.SeedSequence:
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def _seed_json(seed):
    if isinstance(seed, np.random.SeedSequence):
        return {"entropy": seed.entropy, "spawn_key": list(seed.spawn_key)}
    return seed


def _random_angles(n: int, rng) -> np.ndarray:
    return np.stack([rng.uniform(0, math.pi, (n, 2)), rng.uniform(0, 2 * math.pi, (n, 2))], axis=-1)


@dataclass
class OptimizationResult:
    value: float
    assignment: MeasurementAssignment
    restarts: int
    converged: bool
    rng_seed: object
    restart_values: list[float] = field(default_factory=list)
    trace: list[float] = field(default_factory=list)   # sweep values of the best restart

    @property
    def first_violation(self) -> int | None:
        """1-based index of the first restart exceeding the violation threshold."""
        for k, v in enumerate(self.restart_values):
            if v > VIOLATION_THRESHOLD:
                return k + 1
        return None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "assignment": self.assignment.to_json(),
            "restarts": self.restarts,
            "converged": self.converged,
            "rng_seed": _seed_json(self.rng_seed),
            "restart_values": self.restart_values,
        }


def _see_saw(obj: _Objective, mats: np.ndarray, tol: float, max_sweeps: int):
    value = obj.value(mats)
    trace = [value]
    for _ in range(max_sweeps):
        for i in range(obj.n):
            obj.party_update(mats, i)
        new = obj.value(mats)
        trace.append(new)
        if new - value < tol:
            return mats, new, True, trace
        value = new
    return mats, value, False, trace


def _direct_search(obj: _Objective, angles: np.ndarray, tol: float, max_sweeps: int):
    res = minimize(lambda v: -obj.value(_mats_from_angles(v)), np.ravel(angles), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": tol, "maxiter": max_sweeps * 40 * obj.n,
                            "adaptive": True})
    mats = _mats_from_angles(res.x)
    return mats, obj.value(mats), bool(res.success), [-res.fun]


def analytic_start(f: BellFunctional, state: PureState) -> MeasurementAssignment | None:
    """GHZ-angle assignment when ``state`` is cos t|0..0> - sin t|1..1> with 0 < t < pi/4."""
    from .analytic import ghz_assignment

    n = state.n_qubits
    amps = state.amplitudes
    if n < 3 or f.meta.get("family") != "sym" or f.meta.get("seed") != "chsh":
        return None
    if np.abs(amps[1:-1]).max(initial=0) > 1e-12 or abs(amps[0].imag) > 1e-12 or abs(amps[-1].imag) > 1e-12:
        return None
    c, s = amps[0].real, -amps[-1].real
    if c <= 0 or s <= 0:
        return None
    theta = math.atan2(s, c)
    if not 1e-9 < theta < math.pi / 4 - 1e-9:
        return None
    return ghz_assignment(n, theta)


def optimize(f: BellFunctional, state: PureState, restarts: int = 10, rng_seed=0,
             method: str = "see-saw", initial: MeasurementAssignment | None = None,
             tol: float = 1e-10, max_sweeps: int = 200) -> OptimizationResult:
    """Best value of ``f`` over projective qubit measurements on ``state``.

    Restart 0 starts from ``initial`` (or the GHZ construction when it
    applies); every other restart from uniformly random angles drawn from
    its own child stream of ``rng_seed``.
    """
    if method not in ("see-saw", "direct-search"):
        raise ValueError(f"unknown method {method!r}")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    obj = _Objective(f, state)
    n = obj.n
    if initial is None:
        initial = analytic_start(f, state)
    streams = _seed_sequence(rng_seed).spawn(restarts)
    best = None
    values = []
    for k, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        if k == 0 and initial is not None:
            if initial.n_parties != n:
                raise ValueError("initial assignment has the wrong party count")
            angles = initial.angles()
        else:
            angles = _random_angles(n, rng)
        if method == "see-saw":
            mats, val, conv, trace = _see_saw(obj, _mats_from_angles(angles), tol, max_sweeps)
        else:
            mats, val, conv, trace = _direct_search(obj, angles, tol, max_sweeps)
        values.append(val)
        if best is None or val > best[0]:
            best = (val, mats, conv, trace)
    val, mats, conv, trace = best
    assignment = _assignment_from_mats(mats)
    # report the value of the assignment actually returned
    val = obj.value(_mats_from_angles(assignment.angles()))
    return OptimizationResult(val, assignment, restarts, conv, rng_seed, values, trace)


@dataclass
class ScanSummary:
    n: int
    count: int
    fraction_violating: float
    min_best: float
    max_best: float
    results: list[OptimizationResult]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "count": self.count,
            "fraction_violating": self.fraction_violating,
            "min_best_value": self.min_best,
            "max_best_value": self.max_best,
            "results": [{"state_index": k, "best_value": r.value, "restarts_to_first_violation": r.first_violation}
                        for k, r in enumerate(self.results)],
        }


def _scan_one(args):
    f, n, ss, restarts, method = args
    state_seed, opt_seed = ss.spawn(2)
    state = haar_random_state(n, np.random.default_rng(state_seed))
    return optimize(f, state, restarts, opt_seed, method)


def scan_random_states(f: BellFunctional, n: int | None = None, count: int = 10, rng_seed=0,
                       restarts: int = 20, method: str = "see-saw", workers: int = 1) -> ScanSummary:
    """Optimize ``f`` on ``count`` Haar-random states; results do not depend on ``workers``."""
    n = f.n_parties if n is None else n
    if n != f.n_parties:
        raise ValueError(f"functional acts on {f.n_parties} parties, asked for {n}-qubit states")
    if count < 1:
        raise ValueError("count must be >= 1")
    jobs = [(f, n, ss, restarts, method) for ss in _seed_sequence(rng_seed).spawn(count)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_one, jobs))
    else:
        results = [_scan_one(j) for j in jobs]
    best = [r.value for r in results]
    frac = sum(v > VIOLATION_THRESHOLD for v in best) / count
    return ScanSummary(n, count, frac, min(best), max(best), results)


def product_state(factors: Sequence[PureState]) -> PureState:
    """Tensor product of pure states, first factor on the most significant qubits."""
    amps = np.array([1.0 + 0j])
    for s in factors:
        amps = np.kron(amps, s.amplitudes)
    return PureState(amps)
