"""Closed-form violations: GHZ-family angles, Hardy measurements, symmetric three-qubit states."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .behavior import Behavior
from .functional import build_centered, build_symmetric, chsh_variant, evaluate
from .quantum import (
    MeasurementAssignment,
    PureState,
    QubitMeasurement,
    behavior_from_state,
    conditional_two_party_state,
    ghz_state,
    schmidt_decompose,
)


class ConstructionError(ValueError):
    """Inputs fall on a line where the construction does not apply."""


class CertificationError(RuntimeError):
    """A constructed behavior misses its zero conditions or positivity."""


# --- GHZ family --------------------------------------------------------------

def ghz_angles(n: int, theta: float) -> tuple[float, float]:
    """Setting angles shared by all parties that zero the two cross terms of I_sym."""
    if n < 3:
        raise ConstructionError("GHZ construction needs n >= 3")
    if not 0 < theta < math.pi / 4:
        raise ConstructionError(f"theta={theta} must lie strictly inside (0, pi/4); "
                                "use the optimizer for the maximally entangled state")
    t = math.tan(theta)
    alpha0 = math.atan(t ** (-3 / (3 * n - 4)))
    alpha1 = -math.atan(t ** (-1 / (3 * n - 4)))
    return alpha0, alpha1


def ghz_closed_form(n: int, theta: float, alpha0: float, alpha1: float) -> tuple[float, float, float]:
    """P(0..0|0..0), P(10..0|10..0), P(00..0|110..0) for identical measurements on the GHZ state."""
    c0, s0, c1, s1 = math.cos(alpha0), math.sin(alpha0), math.cos(alpha1), math.sin(alpha1)
    ct, st = math.cos(theta), math.sin(theta)
    p_root = (c0**n * ct - s0**n * st) ** 2
    p_flip = (c0 ** (n - 1) * s1 * ct + s0 ** (n - 1) * c1 * st) ** 2
    p_pair = (c0 ** (n - 2) * c1**2 * ct - s0 ** (n - 2) * s1**2 * st) ** 2
    return p_root, p_flip, p_pair


def ghz_value_closed(n: int, theta: float) -> float:
    """(n-1) P(0|0) at the GHZ angles."""
    a0, _ = ghz_angles(n, theta)
    return (n - 1) * (math.cos(a0) ** n * math.cos(theta) - math.sin(a0) ** n * math.sin(theta)) ** 2


@dataclass(frozen=True)
class GhzCertificate:
    n: int
    theta: float
    alpha0: float
    alpha1: float
    value: float            # simulator value of I_sym
    value_closed: float
    flip_residual: float    # P(10..0|10..0)
    pair_residual: float    # P(00..0|110..0)
    assignment: MeasurementAssignment

    @property
    def residual(self) -> float:
        return abs(self.value - self.value_closed)


def ghz_assignment(n: int, theta: float) -> MeasurementAssignment:
    a0, a1 = ghz_angles(n, theta)
    return MeasurementAssignment.identical(n, QubitMeasurement(a0), QubitMeasurement(a1))


def ghz_violation(n: int, theta: float, tol: float = 1e-10) -> GhzCertificate:
    """Simulate I_sym on the GHZ state at the closed-form angles and cross-check."""
    a0, a1 = ghz_angles(n, theta)
    assignment = ghz_assignment(n, theta)
    b = behavior_from_state(ghz_state(n, theta), assignment)
    value = evaluate(build_symmetric(chsh_variant(), n), b)
    x_flip = (1,) + (0,) * (n - 1)
    x_pair = (1, 1) + (0,) * (n - 2)
    zero = (0,) * n
    flip, pair = b.prob(x_flip, x_flip), b.prob(x_pair, zero)
    closed = ghz_value_closed(n, theta)
    cert = GhzCertificate(n, theta, a0, a1, value, closed, flip, pair, assignment)
    if max(flip, pair, cert.residual) > tol or value <= 0:
        raise CertificationError(f"GHZ certificate failed: value={value}, closed={closed}, "
                                 f"zeros=({flip:.3e}, {pair:.3e})")
    return cert


# --- Hardy paradox on cos(t)|00> + sin(t)|11> --------------------------------

def _hardy_rows(theta: float, alpha: float, delta: float) -> dict[str, np.ndarray]:
    """Outcome-0 bras of the four Hardy measurements (unnormalized).

    M is the party whose setting-0 measurement is free.  The setting-1
    vectors below are the orthogonal complements of the vectors annihilating
    the conditioned states, so that P(01|01) = P(10|10) = P(00|11) = 0.
    """
    c, s = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    ph = np.exp(1j * delta)
    m00 = np.array([ca, ph * sa])
    m11 = np.array([c**2 * ca, ph * s**2 * sa])     # outcome-1 bra, setting 1
    n00 = np.array([ph * s**3 * sa, -c**3 * ca])
    n11 = np.array([ph * s * sa, -c * ca])          # outcome-1 bra, setting 1
    return {"M0": m00, "M1": _complement(m11), "N0": n00, "N1": _complement(n11)}


def _complement(row: np.ndarray) -> np.ndarray:
    return np.array([np.conj(row[1]), -np.conj(row[0])])


@dataclass(frozen=True)
class HardyCertificate:
    theta: float
    alpha: float
    delta: float
    measurements: MeasurementAssignment   # party 0 = M, party 1 = N
    p_00_00: float
    p_01_01: float
    p_10_10: float
    p_00_11: float

    @property
    def zero_residual(self) -> float:
        return max(self.p_01_01, self.p_10_10, self.p_00_11)


def schmidt_state(theta: float) -> PureState:
    return PureState([math.cos(theta), 0, 0, math.sin(theta)])


def hardy_measurements(theta: float, alpha: float, delta: float = 0.0, forbidden_tol: float = 1e-9) -> HardyCertificate:
    """Hardy measurements for the free bra cos(alpha)<0| + e^{i delta} sin(alpha)<1|."""
    if not forbidden_tol < theta < math.pi / 4 - forbidden_tol:
        raise ConstructionError(f"theta={theta}: the state must be entangled but not maximally (0 < theta < pi/4)")
    a = alpha % math.pi
    if min(abs(a), abs(a - math.pi / 2), abs(a - math.pi)) < forbidden_tol:
        raise ConstructionError(f"alpha={alpha} is forbidden (alpha = 0, pi/2 kill P(00|00))")
    return _hardy_certificate(theta, alpha, delta)


def _hardy_certificate(theta, alpha, delta) -> HardyCertificate:
    rows = _hardy_rows(theta, alpha, delta)
    meas = MeasurementAssignment((
        (QubitMeasurement.from_bra(rows["M0"]), QubitMeasurement.from_bra(rows["M1"])),
        (QubitMeasurement.from_bra(rows["N0"]), QubitMeasurement.from_bra(rows["N1"])),
    ))
    b = behavior_from_state(schmidt_state(theta), meas)
    return HardyCertificate(theta, alpha, delta, meas,
                            b.prob((0, 0), (0, 0)), b.prob((0, 1), (0, 1)),
                            b.prob((1, 0), (1, 0)), b.prob((1, 1), (0, 0)))


# --- symmetric three-qubit states ------------------------------------------

@dataclass(frozen=True)
class SymmetricHardyResult:
    assignment: MeasurementAssignment
    value: float                 # I_centered(3) on the produced behavior
    zeros: dict[str, float]      # the Hardy zero probabilities
    p_root: float                # P(000|000)
    alpha: float                 # shared setting-0 angle of parties 1 and 2
    schmidt_theta: float
    behavior: Behavior

    @property
    def zero_residual(self) -> float:
        return max(self.zeros.values())


def _default_alphas(h2: float, h4: float):
    first = math.pi / 4
    if abs(math.tan(first) + h2 / h4) < 1e-6:
        first = math.pi / 3
    yield first
    # deterministic fallbacks used only if the prepared state is degenerate
    for k in range(1, 50):
        yield first + 0.01 * k * (-1) ** k


def symmetric_hardy_construction(state: PureState, alpha: float | str | None = None, tol: float = 1e-10,
                          sym_tol: float = 1e-12) -> SymmetricHardyResult:
    """Measurements violating the centered three-party inequality on an A2<->A3 symmetric state.

    ``state`` must be in the canonical form h0|000> + h1 e^{i phi}|100> +
    h2|101> + h3|110> + h4|111> with h2 = h3 and h0, h2, h4 > 0.  Parties 1
    and 2 share every measurement; party 2 projecting on outcome 0 of
    setting 0 leaves parties 0, 1 in a non-maximally entangled state, on
    which a Hardy paradox is set up with party 1's setting-0 measurement
    fixed to the shared one.

    ``alpha`` is the shared setting-0 angle.  ``None`` uses pi/4 (pi/3 if
    that makes the prepared state a product), ``"scan"`` keeps the largest
    certified violation over a fixed grid of angles in (0, pi).
    """
    if state.n_qubits != 3:
        raise ConstructionError("needs a three-qubit state")
    amps = state.amplitudes
    support = {0b000, 0b100, 0b101, 0b110, 0b111}
    if any(abs(amps[i]) > sym_tol for i in range(8) if i not in support):
        raise ConstructionError("state is not in the canonical three-qubit form")
    h0, h2, h3, h4 = (amps[i] for i in (0b000, 0b101, 0b110, 0b111))
    if max(abs(h0.imag), abs(h2.imag), abs(h3.imag), abs(h4.imag)) > sym_tol or min(h0.real, h2.real, h4.real) < 0:
        raise ConstructionError("canonical coefficients h0, h2, h3, h4 must be real and nonnegative")
    h0, h2, h3, h4 = h0.real, h2.real, h3.real, h4.real
    if abs(h2 - h3) > sym_tol:
        raise ConstructionError(f"state is not symmetric under exchanging parties 2 and 3 (h2={h2}, h3={h3})")
    if h0 <= sym_tol:
        raise ConstructionError("h0 = 0: state is not genuinely multipartite entangled")
    if h2 <= sym_tol or h4 <= sym_tol:
        raise ConstructionError("h2 = 0 or h4 = 0: state is not genuinely multipartite entangled")

    functional = build_centered(chsh_variant(), 3)
    if alpha == "scan":
        best = None
        for a in np.linspace(0.05, math.pi - 0.05, 41):
            try:
                r = _symmetric_hardy_attempt(state, functional, float(a), tol)
            except (ConstructionError, CertificationError):
                continue
            if best is None or r.value > best.value:
                best = r
        if best is not None:
            return best
        alpha = None
    candidates = [alpha] if alpha is not None else _default_alphas(h2, h4)
    last_err = None
    for a in candidates:
        try:
            return _symmetric_hardy_attempt(state, functional, a, tol)
        except (ConstructionError, CertificationError) as exc:
            last_err = exc
    raise ConstructionError(f"no admissible angle found: {last_err}")


def _symmetric_hardy_attempt(state, functional, alpha, tol) -> SymmetricHardyResult:
    shared0 = QubitMeasurement(alpha, 0.0)
    cond, _ = conditional_two_party_state(state, [(2, shared0, 0)])
    sf = schmidt_decompose(cond)
    if not 1e-9 < sf.theta < math.pi / 4 - 1e-9:
        raise ConstructionError(f"prepared state has Schmidt angle {sf.theta}; retry with another alpha")
    # the free Hardy bra belongs to party 1 (role M); party 0 takes role N
    free = shared0.bras[0] @ sf.u_b.conj().T
    hm = QubitMeasurement.from_bra(free)
    a_s = hm.alpha % math.pi
    if min(abs(a_s), abs(a_s - math.pi / 2), abs(a_s - math.pi)) < 1e-9:
        raise ConstructionError("free measurement is diagonal in the Schmidt basis")
    rows = _hardy_rows(sf.theta, hm.alpha, hm.delta)
    m1 = QubitMeasurement.from_bra(rows["M1"] @ sf.u_b)
    n0 = QubitMeasurement.from_bra(rows["N0"] @ sf.u_a)
    n1 = QubitMeasurement.from_bra(rows["N1"] @ sf.u_a)
    assignment = MeasurementAssignment(((n0, n1), (shared0, m1), (shared0, m1)))
    b = behavior_from_state(state, assignment)
    zeros = {
        "P(010|010)": b.prob((0, 1, 0), (0, 1, 0)),
        "P(100|100)": b.prob((1, 0, 0), (1, 0, 0)),
        "P(000|110)": b.prob((1, 1, 0), (0, 0, 0)),
        "P(001|001)": b.prob((0, 0, 1), (0, 0, 1)),
        "P(000|101)": b.prob((1, 0, 1), (0, 0, 0)),
    }
    value = evaluate(functional, b)
    p_root = b.prob((0, 0, 0), (0, 0, 0))
    result = SymmetricHardyResult(assignment, value, zeros, p_root, alpha, sf.theta, b)
    if result.zero_residual > tol or value <= 0:
        raise CertificationError(f"alpha={alpha}: zeros {result.zero_residual:.2e}, value {value:.2e}")
    return result
