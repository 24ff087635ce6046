"""Seed-deterministic synthetic 20 Hz impedance streams.

Stands in for live recordings: a SubjectProfile fixes the body network and
per-gesture contact topology, a SessionScript fixes the choreography of one
sitting, and synthesize() renders the resulting magnitude/phase trace with
configurable noise. Identical inputs always give bit-identical streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .impedance import (
    OPEN,
    BodyNetwork,
    ComplexImpedance,
    GestureClass,
    GestureState,
    shoulder_impedance,
)

GESTURE_CLASSES = tuple(GestureClass)
ACTIVE_CLASSES = tuple(g for g in GestureClass if g != GestureClass.NULL)

# Contact defaults per gesture: (resistance ohms, reactance/resistance ratio,
# which arms close, settle-time factor). Resistance encodes contact area:
# large even contact (head resting on both hands) conducts far better than a
# fingertip pinch. The settle factor scales the transition ramp: settling the
# head onto both hands is slow, a quick pinch is abrupt. Values are
# plausibility placeholders, not measurements; they are ordered so the
# boredom pose perturbs the baseline most and the nose pinch least, and
# spaced so the ordering survives the per-subject / per-repetition jitter.
# Skin interfaces are strongly capacitive at low frequency, so the contact
# reactance fraction is large and varies with hand pose; it drives the phase
# channel the same way contact area drives magnitude. Each class gets its
# own magnitude/phase strength pattern (e.g. a flat palm over the mouth
# couples resistively: strong magnitude dip, faint phase shift), so the two
# channels carry complementary evidence.
CONTACT_DEFAULTS: dict[GestureClass, tuple[float, float, str, float]] = {
    GestureClass.MOUTH_GUARD: (1800.0, 0.03, "dominant", 0.5),
    GestureClass.PINCH_NOSE_BRIDGE: (55000.0, 0.30, "dominant", 0.33),
    GestureClass.BOREDOM: (900.0, 0.08, "both", 2.67),
    GestureClass.INTERESTED: (13000.0, 0.38, "dominant", 1.5),
    GestureClass.FORGETFULNESS: (3500.0, 0.28, "dominant", 1.17),
    GestureClass.MAKING_DECISION: (7000.0, 0.50, "dominant", 2.0),
}


@dataclass(frozen=True)
class SubjectProfile:
    """One simulated participant: body network plus how each gesture lands."""

    subject_id: int
    network: BodyNetwork
    per_gesture_contacts: dict[GestureClass, GestureState]
    dominant_side: str  # "left" | "right"
    settle_factors: dict[GestureClass, float] | None = None  # ramp multipliers

    def __post_init__(self) -> None:
        missing = [g for g in GestureClass if g not in self.per_gesture_contacts]
        if missing:
            raise ValueError(f"profile missing gesture states: {missing}")
        if self.settle_factors is None:
            object.__setattr__(self, "settle_factors",
                               {g: 1.0 for g in GestureClass})

    def settle_factor(self, gesture: GestureClass) -> float:
        return self.settle_factors.get(gesture, 1.0)

    def baseline(self) -> ComplexImpedance:
        return shoulder_impedance(self.network, self.per_gesture_contacts[GestureClass.NULL])

    def gesture_impedance(self, gesture: GestureClass) -> ComplexImpedance:
        return shoulder_impedance(self.network, self.per_gesture_contacts[gesture])

    def magnitude_delta(self, gesture: GestureClass) -> float:
        """Noise-free |Z| drop relative to the no-contact baseline."""
        return self.baseline().magnitude - self.gesture_impedance(gesture).magnitude


@dataclass(frozen=True)
class ScriptSegment:
    gesture: GestureClass
    gap_before_s: float  # idle (Null) time preceding the hold
    hold_s: float

    def __post_init__(self) -> None:
        if self.gap_before_s <= 0 or self.hold_s <= 0:
            raise ValueError("segment durations must be > 0")
        if self.gesture == GestureClass.NULL:
            raise ValueError("script segments are gesture holds; gaps model Null")


@dataclass(frozen=True)
class SessionScript:
    """Gesture holds separated by idle gaps; starts and ends idle."""

    segments: tuple[ScriptSegment, ...]
    tail_gap_s: float

    def __post_init__(self) -> None:
        if self.tail_gap_s <= 0:
            raise ValueError("tail gap must be > 0")

    @property
    def total_seconds(self) -> float:
        return sum(s.gap_before_s + s.hold_s for s in self.segments) + self.tail_gap_s


@dataclass(frozen=True)
class NoiseModel:
    """Measurement imperfections layered on the noise-free network response.

    white_sigma / drift_step_sigma are in ohms on the magnitude channel;
    phase gets white noise scaled by phase_noise_factor (degrees per ohm of
    magnitude sigma). contact_jitter_rel varies each repetition's contact
    resistance multiplicatively, modelling touch-to-touch variation.
    """

    white_sigma: float = 5.0
    drift_step_sigma: float = 0.25
    transition_ramp: float = 0.3
    contact_jitter_rel: float = 0.10
    phase_noise_factor: float = 0.02

    def __post_init__(self) -> None:
        for name in ("white_sigma", "drift_step_sigma", "transition_ramp",
                     "contact_jitter_rel", "phase_noise_factor"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def defaults_for(cls, profile: SubjectProfile, **overrides) -> "NoiseModel":
        """White noise at 0.9 % of the subject's baseline magnitude, drift
        step at 0.03 %; calibrated so the stock benchmark is hard but
        passable."""
        base = profile.baseline().magnitude
        params = dict(white_sigma=0.009 * base, drift_step_sigma=0.0003 * base)
        params.update(overrides)
        return cls(**params)

    @classmethod
    def silent(cls) -> "NoiseModel":
        return cls(white_sigma=0.0, drift_step_sigma=0.0, transition_ramp=0.0,
                   contact_jitter_rel=0.0, phase_noise_factor=0.0)


@dataclass(frozen=True)
class LabelInterval:
    gesture: GestureClass
    start_ms: int
    end_ms: int


@dataclass
class LabeledStream:
    """A session's frames plus ground-truth hold intervals."""

    sample_rate: float
    timestamps_ms: np.ndarray  # int64, strictly increasing on the rate grid
    magnitude: np.ndarray      # float64 ohms
    phase: np.ndarray          # float64 degrees
    labels: list[LabelInterval]

    def __post_init__(self) -> None:
        n = len(self.timestamps_ms)
        if not (len(self.magnitude) == len(self.phase) == n):
            raise ValueError("frame arrays must have equal length")
        if n > 1 and not np.all(np.diff(self.timestamps_ms) > 0):
            raise ValueError("timestamps must be strictly increasing")
        span_end = (self.timestamps_ms[-1] + 1000.0 / self.sample_rate) if n else 0
        prev_end = None
        for lab in sorted(self.labels, key=lambda l: l.start_ms):
            if not (0 <= lab.start_ms < lab.end_ms <= span_end):
                raise ValueError("label interval outside stream bounds")
            if prev_end is not None and lab.start_ms < prev_end:
                raise ValueError("label intervals must not overlap")
            prev_end = lab.end_ms

    def __len__(self) -> int:
        return len(self.timestamps_ms)

    def sample_labels(self) -> np.ndarray:
        """Per-sample class codes; Null wherever no interval covers a sample.
        Intervals are half-open [start_ms, end_ms)."""
        out = np.full(len(self), int(GestureClass.NULL), dtype=np.int64)
        for lab in self.labels:
            mask = (self.timestamps_ms >= lab.start_ms) & (self.timestamps_ms < lab.end_ms)
            out[mask] = int(lab.gesture)
        return out


# Per-subject randomization ranges. Segment values vary broadly; the
# per-gesture wiggle is kept narrow enough (±15 %) that the contact-
# resistance ordering above cannot flip for any seed.
_TRUNK_R = (400.0, 650.0)
_TRUNK_X = (-30.0, -10.0)
_ARM_R = (250.0, 400.0)
_ARM_X = (-15.0, -5.0)
_CONTACT_SUBJECT_FACTOR = (0.90, 1.22)
_CONTACT_GESTURE_WIGGLE = (0.85, 1.15)
_REACTANCE_WIGGLE = (0.8, 1.2)


def generate_subject(seed: int, *, subject_id: int | None = None) -> SubjectProfile:
    """Draw one participant's body network and contact topology.

    Deterministic for equal seeds. The per-gesture contact resistances keep
    the pinch largest and the boredom pose smallest for every seed.
    """
    rng = np.random.default_rng(seed)
    trunk = ComplexImpedance(rng.uniform(*_TRUNK_R), rng.uniform(*_TRUNK_X))
    arm_l = ComplexImpedance(rng.uniform(*_ARM_R), rng.uniform(*_ARM_X))
    arm_r = ComplexImpedance(rng.uniform(*_ARM_R), rng.uniform(*_ARM_X))
    network = BodyNetwork(z_trunk_head=trunk, z_arm_left=arm_l, z_arm_right=arm_r)
    dominant = "right" if rng.uniform() < 0.7 else "left"
    subject_factor = rng.uniform(*_CONTACT_SUBJECT_FACTOR)

    contacts: dict[GestureClass, GestureState] = {
        GestureClass.NULL: GestureState(GestureClass.NULL, OPEN, OPEN)
    }
    settle: dict[GestureClass, float] = {GestureClass.NULL: 1.0}
    for gesture in ACTIVE_CLASSES:
        base_r, x_ratio, arms, settle_base = CONTACT_DEFAULTS[gesture]
        r = base_r * subject_factor * rng.uniform(*_CONTACT_GESTURE_WIGGLE)
        x = -r * x_ratio * rng.uniform(*_REACTANCE_WIGGLE)
        contact = ComplexImpedance(r, x)
        if arms == "both":
            state = GestureState(gesture, contact, contact)
        elif dominant == "left":
            state = GestureState(gesture, contact, OPEN)
        else:
            state = GestureState(gesture, OPEN, contact)
        contacts[gesture] = state
        settle[gesture] = settle_base * rng.uniform(0.85, 1.15)

    return SubjectProfile(
        subject_id=seed if subject_id is None else subject_id,
        network=network,
        per_gesture_contacts=contacts,
        dominant_side=dominant,
        settle_factors=settle,
    )


def build_script(reps_per_gesture: int, hold_s: float = 2.0, gap_s: float = 3.0,
                 seed: int = 0) -> SessionScript:
    """One sitting: every non-Null gesture repeated reps_per_gesture times in
    shuffled order, holds and gaps jittered by ±20 %."""
    if reps_per_gesture < 1:
        raise ValueError("reps_per_gesture must be >= 1")
    if hold_s <= 0 or gap_s <= 0:
        raise ValueError("hold_s and gap_s must be > 0")
    rng = np.random.default_rng(seed)
    order = [g for g in ACTIVE_CLASSES for _ in range(reps_per_gesture)]
    rng.shuffle(order)
    segments = tuple(
        ScriptSegment(
            gesture=g,
            gap_before_s=gap_s * rng.uniform(0.8, 1.2),
            hold_s=hold_s * rng.uniform(0.8, 1.2),
        )
        for g in order
    )
    return SessionScript(segments=segments, tail_gap_s=gap_s * rng.uniform(0.8, 1.2))


def _jittered_state(state: GestureState, jitter_rel: float,
                    rng: np.random.Generator) -> GestureState:
    """Scale each closed contact by an independent multiplicative draw."""
    def jitter(contact):
        if contact is OPEN or isinstance(contact, type(OPEN)):
            return OPEN
        factor = max(float(rng.normal(1.0, jitter_rel)), 0.05)
        return ComplexImpedance(contact.resistance * factor, contact.reactance * factor)

    if jitter_rel == 0.0:
        return state
    return replace(state, contact_left=jitter(state.contact_left),
                   contact_right=jitter(state.contact_right))


def synthesize(profile: SubjectProfile, script: SessionScript, noise: NoiseModel,
               rate: float = 20.0, seed: int = 0) -> LabeledStream:
    """Render a script into a labeled stream.

    The trace sits at the subject's baseline, ramps linearly (in polar
    coordinates, over noise.transition_ramp seconds inside the surrounding
    gaps) to each hold's jittered gesture impedance, and ramps back. Labels
    cover exactly the full-amplitude hold intervals. White noise and a
    random-walk drift go on magnitude; scaled white noise goes on phase.
    """
    if rate <= 0:
        raise ValueError("rate must be > 0")
    rng = np.random.default_rng(seed)
    period_ms = 1000.0 / rate
    n = int(np.floor(script.total_seconds * rate + 1e-9))
    t = np.arange(n) / rate

    base = profile.baseline()
    base_mag, base_phase = base.magnitude, base.phase_deg
    mag = np.full(n, base_mag)
    phase = np.full(n, base_phase)
    labels: list[LabelInterval] = []

    cursor = 0.0
    for seg in script.segments:
        hold_start = cursor + seg.gap_before_s
        hold_end = hold_start + seg.hold_s
        state = _jittered_state(profile.per_gesture_contacts[seg.gesture],
                                noise.contact_jitter_rel, rng)
        target = shoulder_impedance(profile.network, state)
        tgt_mag, tgt_phase = target.magnitude, target.phase_deg

        ramp = min(noise.transition_ramp * profile.settle_factor(seg.gesture),
                   seg.gap_before_s)
        up0, up1 = hold_start - ramp, hold_start
        down0, down1 = hold_end, hold_end + ramp
        if ramp > 0:
            rising = (t >= up0) & (t < up1)
            frac = (t[rising] - up0) / ramp
            mag[rising] = base_mag + frac * (tgt_mag - base_mag)
            phase[rising] = base_phase + frac * (tgt_phase - base_phase)
        holding = (t >= hold_start) & (t < hold_end)
        mag[holding] = tgt_mag
        phase[holding] = tgt_phase
        if ramp > 0:
            falling = (t >= down0) & (t < down1)
            frac = (t[falling] - down0) / ramp
            mag[falling] = tgt_mag + frac * (base_mag - tgt_mag)
            phase[falling] = tgt_phase + frac * (base_phase - tgt_phase)

        start_idx = int(np.ceil(hold_start * rate - 1e-9))
        end_idx = min(int(np.ceil(hold_end * rate - 1e-9)), n)
        if start_idx < end_idx:
            labels.append(LabelInterval(
                gesture=seg.gesture,
                start_ms=int(round(start_idx * period_ms)),
                end_ms=int(round(end_idx * period_ms)),
            ))
        cursor = hold_end

    if noise.white_sigma > 0:
        mag = mag + rng.normal(0.0, noise.white_sigma, n)
    if noise.drift_step_sigma > 0:
        mag = mag + np.cumsum(rng.normal(0.0, noise.drift_step_sigma, n))
    phase_sigma = noise.white_sigma * noise.phase_noise_factor
    if phase_sigma > 0:
        phase = phase + rng.normal(0.0, phase_sigma, n)

    timestamps = np.round(np.arange(n) * period_ms).astype(np.int64)
    return LabeledStream(sample_rate=rate, timestamps_ms=timestamps,
                         magnitude=mag, phase=phase, labels=labels)
