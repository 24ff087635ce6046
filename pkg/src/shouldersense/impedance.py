"""Complex impedance arithmetic and the two-shoulder body network.

The body between the shoulder electrodes is modelled as a small passive
network: a baseline trunk+head path, plus one optional path per arm that
closes when that hand touches the face. A closed contact adds a current
path in parallel with the baseline, so it can only lower the magnitude
seen between the shoulders.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum


class GestureClass(IntEnum):
    """The seven recognized classes. Integer codes are stable and are used
    on the wire, in session files and as classifier labels."""

    NULL = 0
    MOUTH_GUARD = 1
    PINCH_NOSE_BRIDGE = 2
    BOREDOM = 3
    INTERESTED = 4
    FORGETFULNESS = 5
    MAKING_DECISION = 6


class DegenerateNetworkError(ValueError):
    """Parallel combination of impedances summing to complex zero."""


class _Open:
    """Sentinel for an unconnected branch (hand not touching)."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "OPEN"


OPEN = _Open()

#: Either a finite impedance or the OPEN sentinel.
Branch = "ComplexImpedance | _Open"


@dataclass(frozen=True)
class ComplexImpedance:
    """An impedance value in ohms: resistance (real) + j * reactance."""

    resistance: float
    reactance: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.resistance) and math.isfinite(self.reactance)):
            raise ValueError("impedance components must be finite (use OPEN for no contact)")

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexImpedance":
        return cls(z.real, z.imag)

    @classmethod
    def from_polar(cls, magnitude: float, phase_deg: float) -> "ComplexImpedance":
        rad = math.radians(phase_deg)
        return cls(magnitude * math.cos(rad), magnitude * math.sin(rad))

    def as_complex(self) -> complex:
        return complex(self.resistance, self.reactance)

    @property
    def magnitude(self) -> float:
        return abs(self.as_complex())

    @property
    def phase_deg(self) -> float:
        return math.degrees(math.atan2(self.reactance, self.resistance))


def to_polar(z: ComplexImpedance) -> tuple[float, float]:
    """(magnitude ohms, phase degrees); phase in (-180, 180] via atan2."""
    return z.magnitude, z.phase_deg


def series(a, b):
    """Series composition. OPEN in series blocks the whole branch."""
    if isinstance(a, _Open) or isinstance(b, _Open):
        return OPEN
    return ComplexImpedance(a.resistance + b.resistance, a.reactance + b.reactance)


def parallel(a, b):
    """Parallel composition 1/(1/a + 1/b). An OPEN branch carries no current."""
    if isinstance(a, _Open) and isinstance(b, _Open):
        raise ValueError("parallel() requires at least one finite branch")
    if isinstance(a, _Open):
        return b
    if isinstance(b, _Open):
        return a
    za, zb = a.as_complex(), b.as_complex()
    if za + zb == 0:
        raise DegenerateNetworkError("branch impedances sum to zero")
    return ComplexImpedance.from_complex(za * zb / (za + zb))


def parallel_many(first, *rest):
    out = first
    for z in rest:
        out = parallel(out, z)
    return out


@dataclass(frozen=True)
class BodyNetwork:
    """Per-subject segment impedances between the shoulder electrodes."""

    z_trunk_head: ComplexImpedance
    z_arm_left: ComplexImpedance
    z_arm_right: ComplexImpedance

    def __post_init__(self) -> None:
        for name in ("z_trunk_head", "z_arm_left", "z_arm_right"):
            z = getattr(self, name)
            if z.resistance <= 0:
                raise ValueError(f"{name}: segment resistance must be > 0")


@dataclass(frozen=True)
class GestureState:
    """Contact topology a gesture induces: per-arm hand-to-face contact
    impedance, OPEN when that arm is not touching."""

    gesture: GestureClass
    contact_left: object = OPEN
    contact_right: object = OPEN

    def __post_init__(self) -> None:
        left_open = isinstance(self.contact_left, _Open)
        right_open = isinstance(self.contact_right, _Open)
        if self.gesture == GestureClass.NULL and not (left_open and right_open):
            raise ValueError("Null gesture must have both contacts OPEN")
        if self.gesture == GestureClass.BOREDOM and (left_open or right_open):
            raise ValueError("Boredom gesture must have both contacts closed")


def shoulder_impedance(net: BodyNetwork, state: GestureState) -> ComplexImpedance:
    """Impedance between the shoulders for a given contact topology.

    Each touching arm contributes series(z_arm, contact) in parallel with
    the baseline trunk+head path; with no contact the baseline is returned
    unchanged.
    """
    branches = [net.z_trunk_head]
    if not isinstance(state.contact_left, _Open):
        branches.append(series(net.z_arm_left, state.contact_left))
    if not isinstance(state.contact_right, _Open):
        branches.append(series(net.z_arm_right, state.contact_right))
    return parallel_many(*branches)
