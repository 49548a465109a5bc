"""Pure qubit states, projective measurements and Born-rule behaviors.

Qubit 0 is the most significant bit of the amplitude index, matching the
party ordering of :mod:`bellforge.behavior`.  Measurements are written as
bras: outcome 0 of ``QubitMeasurement(alpha, delta)`` is
``cos(alpha) <0| + exp(i delta) sin(alpha) <1|``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .behavior import MAX_PARTIES, Behavior


class StateError(ValueError):
    pass


class PureState:
    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, amplitudes, normalize: bool = False, tol: float = 1e-12):
        amps = np.array(amplitudes, dtype=complex).ravel()
        n = amps.size.bit_length() - 1
        if n < 1 or amps.size != 2**n:
            raise StateError(f"amplitude vector length {amps.size} is not 2^n")
        if n > MAX_PARTIES:
            raise StateError(f"{n} qubits exceeds the cap {MAX_PARTIES}")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise StateError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm**2 - 1) > tol:
            raise StateError(f"state is not normalized: |psi|^2 = {norm**2!r}")
        amps.flags.writeable = False
        self.n_qubits = n
        self.amplitudes = amps

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def __repr__(self):
        return f"PureState(n={self.n_qubits})"

    def to_json(self) -> dict:
        return {"n": self.n_qubits, "amps": [[float(z.real), float(z.imag)] for z in self.amplitudes]}

    @classmethod
    def from_json(cls, data: dict) -> "PureState":
        try:
            amps = [complex(re, im) for re, im in data["amps"]]
            n = int(data["n"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StateError(f"malformed state JSON: {exc}") from None
        state = cls(amps)
        if state.n_qubits != n:
            raise StateError(f"declared n={n} but {len(amps)} amplitudes given")
        return state


@dataclass(frozen=True)
class QubitMeasurement:
    alpha: float
    delta: float = 0.0

    @property
    def bras(self) -> np.ndarray:
        """2x2 matrix whose row k is the outcome-k bra."""
        c, s = math.cos(self.alpha), math.sin(self.alpha)
        ph = cmath.exp(1j * self.delta)
        return np.array([[c, ph * s], [s, -ph * c]], dtype=complex)

    @classmethod
    def from_bra(cls, row) -> "QubitMeasurement":
        """Measurement whose outcome-0 bra is ``row`` up to norm and global phase."""
        r = np.asarray(row, dtype=complex)
        norm = np.linalg.norm(r)
        if norm == 0:
            raise ValueError("zero measurement vector")
        r = r / norm
        alpha = math.atan2(abs(r[1]), abs(r[0]))
        if abs(r[0]) < 1e-15 or abs(r[1]) < 1e-15:
            delta = 0.0
        else:
            delta = (cmath.phase(r[1]) - cmath.phase(r[0])) % (2 * math.pi)
        return cls(alpha, delta)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "delta": self.delta}


@dataclass(frozen=True)
class MeasurementAssignment:
    """``settings[i][x]`` is party i's measurement for setting x."""

    settings: tuple[tuple[QubitMeasurement, QubitMeasurement], ...]

    def __post_init__(self):
        for i, pair in enumerate(self.settings):
            if len(pair) != 2:
                raise ValueError(f"party {i} needs exactly two settings")

    @property
    def n_parties(self) -> int:
        return len(self.settings)

    @classmethod
    def identical(cls, n: int, m0: QubitMeasurement, m1: QubitMeasurement) -> "MeasurementAssignment":
        return cls(((m0, m1),) * n)

    @classmethod
    def from_angles(cls, angles) -> "MeasurementAssignment":
        """From an array of shape (n, 2, 2): [party, setting, (alpha, delta)]."""
        a = np.asarray(angles, dtype=float).reshape(-1, 2, 2)
        return cls(tuple((QubitMeasurement(*p[0]), QubitMeasurement(*p[1])) for p in a))

    def angles(self) -> np.ndarray:
        return np.array([[[m.alpha, m.delta] for m in pair] for pair in self.settings])

    def matrices(self) -> np.ndarray:
        """Array (n, 2, 2, 2): [party, setting, outcome, component]."""
        return np.array([[m.bras for m in pair] for pair in self.settings])

    def to_json(self) -> dict:
        return {"parties": [{"settings": [m.to_json() for m in pair]} for pair in self.settings]}

    @classmethod
    def from_json(cls, data: dict) -> "MeasurementAssignment":
        try:
            return cls(tuple(
                tuple(QubitMeasurement(float(s["alpha"]), float(s.get("delta", 0.0))) for s in p["settings"])
                for p in data["parties"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed assignment JSON: {exc}") from None


def ghz_state(n: int, theta: float) -> PureState:
    """cos(theta)|0...0> - sin(theta)|1...1>, theta in [0, pi/4]."""
    if n < 2:
        raise StateError("GHZ state needs n >= 2")
    if not 0 <= theta <= math.pi / 4 + 1e-15:
        raise StateError(f"theta={theta} outside [0, pi/4]")
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = math.cos(theta)
    amps[-1] = -math.sin(theta)
    return PureState(amps)


def canonical_three_qubit_state(h0, h1, h2, h3, h4, phi=0.0, tol: float = 1e-12) -> PureState:
    """Three-qubit canonical form h0|000> + h1 e^{i phi}|100> + h2|101> + h3|110> + h4|111>."""
    hs = (h0, h1, h2, h3, h4)
    if any(h < 0 for h in hs):
        raise StateError("coefficients h_i must be nonnegative")
    if abs(sum(h * h for h in hs) - 1) > tol:
        raise StateError("coefficients must satisfy sum h_i^2 = 1")
    if not 0 <= phi <= math.pi:
        raise StateError(f"phase phi={phi} outside [0, pi]")
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = h0
    amps[0b100] = h1 * cmath.exp(1j * phi)
    amps[0b101] = h2
    amps[0b110] = h3
    amps[0b111] = h4
    return PureState(amps, tol=tol)


def haar_random_state(n: int, rng_seed=None) -> PureState:
    """Haar-uniform pure state from normalized i.i.d. complex Gaussians."""
    if n < 1:
        raise StateError("n must be >= 1")
    rng = np.random.default_rng(rng_seed)
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return PureState(v, normalize=True)


def apply_local(tensor: np.ndarray, axis: int, mat: np.ndarray) -> np.ndarray:
    """Contract ``mat`` (rows = bras) into ``axis`` of a state tensor, in place of that axis."""
    return np.moveaxis(np.tensordot(mat, tensor, axes=([1], [axis])), 0, axis)


def outcome_amplitudes(state: PureState, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Amplitudes <m_{a_1}|...<m_{a_n}|psi> for all outcome vectors, as a (2,)*n tensor."""
    t = state.tensor()
    for i, m in enumerate(mats):
        t = apply_local(t, i, m)
    return t


def behavior_from_state(state: PureState, assignment: MeasurementAssignment) -> Behavior:
    """Born-rule behavior of ``state`` under the projective ``assignment``."""
    n = state.n_qubits
    if assignment.n_parties != n:
        raise ValueError(f"assignment for {assignment.n_parties} parties, state has {n} qubits")
    mats = assignment.matrices()
    # stack both settings per party: the contraction produces axes (x_i, a_i) per party
    t = state.tensor()
    for i in range(n):
        t = np.tensordot(t, mats[i], axes=([0], [2]))
    # t axes: (x_0, a_0, x_1, a_1, ...)
    t = np.transpose(t, list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2)))
    probs = np.abs(t.reshape(2**n, 2**n)) ** 2
    return Behavior(probs)


def conditional_two_party_state(state: PureState, fixed) -> tuple[PureState, float]:
    """Post-measurement state of the two unmeasured parties.

    ``fixed`` lists ``(party, QubitMeasurement, outcome)`` for exactly n-2
    parties.  Returns the normalized two-qubit state (free parties in
    increasing order) and the probability of the fixed outcomes.
    """
    n = state.n_qubits
    fixed = list(fixed)
    parties = [p for p, _, _ in fixed]
    if len(fixed) != n - 2 or len(set(parties)) != len(parties) or not all(0 <= p < n for p in parties):
        raise ValueError(f"need n-2 = {n - 2} distinct fixed parties, got {parties}")
    t = state.tensor()
    # contract from the highest axis down so lower axis numbers stay valid
    for p, m, a in sorted(fixed, key=lambda f: -f[0]):
        t = np.tensordot(m.bras[a], t, axes=([0], [p]))
    vec = t.reshape(4)
    prob = float(np.vdot(vec, vec).real)
    if prob < 1e-14:
        raise StateError("projection has zero probability")
    return PureState(vec / math.sqrt(prob)), prob


@dataclass(frozen=True)
class SchmidtForm:
    """``(u_a kron u_b) |psi> = cos(theta)|00> + sin(theta)|11>``."""

    theta: float
    u_a: np.ndarray
    u_b: np.ndarray


def schmidt_decompose(state: PureState) -> SchmidtForm:
    if state.n_qubits != 2:
        raise StateError("Schmidt decomposition is implemented for two qubits")
    c = state.amplitudes.reshape(2, 2)
    w, s, vh = np.linalg.svd(c)
    theta = math.atan2(s[1], s[0])
    return SchmidtForm(theta, w.conj().T, vh.conj())
