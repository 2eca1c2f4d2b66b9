"""Ground-truth dynamics for the four stimulus domains.

All positions are in image coordinates: x grows rightward, y grows
downward, so gravity is +y.  Every function here is pure and operates on
value types; the closed-form trajectory and the stepper agree to 1e-9 px
(bounce events are sub-resolved inside a step, so stepping is
step-size independent).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .errors import ContractViolationError

DEFAULT_GRAVITY = 400.0           # px/s^2, configurable per spec
FLUID_RATE_PER_FLOW_UNIT = 0.004  # fill fraction per second per flow unit
LAUNCH_MARGIN = 96                # px inset of the launch positions
BALL_RADIUS_2D = 40               # px, Motion2D / Gravity2D disc
BALL_RADIUS_BOUNCE = 60           # px, bouncing surrogate disc
DEFAULT_FRAME_TIMES = (0.0, 0.2, 0.4, 0.6, 0.8)

# Rebound speeds below this are treated as the ball coming to rest.
_REST_SPEED = 1e-6


class Domain(str, enum.Enum):
    MOTION_2D = "Motion2D"
    GRAVITY_2D = "Gravity2D"
    FLUIDS = "Fluids"
    BOUNCING = "Bouncing"


class LaunchPosition(str, enum.Enum):
    LEFT_BOTTOM = "leftbottom"
    LEFT_MIDDLE = "leftmiddle"
    RIGHT_BOTTOM = "rightbottom"
    RIGHT_MIDDLE = "rightmiddle"


class MugSize(str, enum.Enum):
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


class BouncePhase(enum.IntEnum):
    # Ordered so a valid label sequence is non-decreasing.
    BEFORE = 0
    DURING = 1
    AFTER = 2


@dataclass(frozen=True)
class MotionParams:
    speed_px_per_sec: float
    heading_unit: tuple[float, float] = (1.0, 0.0)
    start_pos: tuple[float, float] = (96.0, 512.0)

    def validate(self) -> None:
        if self.speed_px_per_sec <= 0:
            raise ContractViolationError("speed must be > 0")
        norm = math.hypot(*self.heading_unit)
        if abs(norm - 1.0) > 1e-12:
            raise ContractViolationError(f"heading must be a unit vector, |h|={norm!r}")


@dataclass(frozen=True)
class ProjectileParams:
    launch_speed: float
    launch_angle_deg: float
    launch_position: LaunchPosition
    gravity_px_per_sec2: float = DEFAULT_GRAVITY

    def validate(self) -> None:
        if self.launch_speed <= 0:
            raise ContractViolationError("launch speed must be > 0")
        if not 0 < self.launch_angle_deg < 90:
            raise ContractViolationError("launch angle must be in (0, 90) degrees")
        if self.gravity_px_per_sec2 <= 0:
            raise ContractViolationError("gravity must be > 0")


@dataclass(frozen=True)
class FluidParams:
    flow_rate_param: float
    mug_size: MugSize
    initial_fill_fraction: float
    fill_rate_per_sec: float | None = None  # derived from flow_rate_param when None

    @property
    def rate(self) -> float:
        if self.fill_rate_per_sec is not None:
            return self.fill_rate_per_sec
        return self.flow_rate_param * FLUID_RATE_PER_FLOW_UNIT

    def validate(self) -> None:
        if not 0 <= self.initial_fill_fraction <= 1:
            raise ContractViolationError("initial fill fraction must be in [0, 1]")
        if self.rate < 0:
            raise ContractViolationError("fill rate must be >= 0")


@dataclass(frozen=True)
class BounceParams:
    restitution: float
    drop_height_px: float
    gravity_px_per_sec2: float = DEFAULT_GRAVITY
    contact_duration_sec: float = 0.1
    ground_y: float = 650.0
    ball_radius_px: float = BALL_RADIUS_BOUNCE

    @property
    def contact_y(self) -> float:
        """y of the ball center while resting on the ground."""
        return self.ground_y - self.ball_radius_px

    def validate(self) -> None:
        if not 0 < self.restitution <= 1:
            raise ContractViolationError("restitution must be in (0, 1]")
        if self.contact_duration_sec < 0:
            raise ContractViolationError("contact duration must be >= 0")
        if self.drop_height_px <= self.ball_radius_px:
            raise ContractViolationError("drop height must exceed the ball radius")


Params = MotionParams | ProjectileParams | FluidParams | BounceParams

_PARAMS_BY_DOMAIN = {
    Domain.MOTION_2D: MotionParams,
    Domain.GRAVITY_2D: ProjectileParams,
    Domain.FLUIDS: FluidParams,
    Domain.BOUNCING: BounceParams,
}

_DEFAULT_CANVAS = {
    Domain.MOTION_2D: (1024, 1024),
    Domain.GRAVITY_2D: (1024, 1024),
    Domain.FLUIDS: (1024, 1024),
    Domain.BOUNCING: (1080, 720),
}


@dataclass(frozen=True)
class WorldState:
    """Low-dimensional latent state of one stimulus at one instant.

    ``ball_pos``/``ball_vel`` are present for the three ball domains,
    ``fill_fraction`` for Fluids.  ``contact_elapsed_sec`` tracks progress
    through the bounce contact dwell; it is what makes mid-dwell states
    steppable without hidden bookkeeping.
    """

    domain: Domain
    time_sec: float
    ball_pos: tuple[float, float] | None = None
    ball_vel: tuple[float, float] | None = None
    fill_fraction: float | None = None
    bounce_phase: BouncePhase | None = None
    contact_elapsed_sec: float | None = None


@dataclass(frozen=True)
class StimulusSpec:
    domain: Domain
    params: Params
    canvas_width: int = 0   # 0 -> domain default
    canvas_height: int = 0
    input_frame_times: tuple[float, ...] = DEFAULT_FRAME_TIMES
    stimulus_id: str = ""

    def __post_init__(self):
        if self.canvas_width == 0 or self.canvas_height == 0:
            w, h = _DEFAULT_CANVAS[self.domain]
            object.__setattr__(self, "canvas_width", self.canvas_width or w)
            object.__setattr__(self, "canvas_height", self.canvas_height or h)

    def validate(self) -> None:
        if not isinstance(self.params, _PARAMS_BY_DOMAIN[self.domain]):
            raise ContractViolationError(
                f"params type {type(self.params).__name__} does not match domain {self.domain.value}")
        self.params.validate()
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise ContractViolationError("canvas dimensions must be > 0")
        times = self.input_frame_times
        if any(t < 0 for t in times):
            raise ContractViolationError("frame times must be >= 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ContractViolationError("frame times must be strictly increasing")


def _require_domain(state: WorldState, spec: StimulusSpec) -> None:
    if state.domain != spec.domain:
        raise ContractViolationError(
            f"state domain {state.domain.value} does not match spec domain {spec.domain.value}")


def initial_state(spec: StimulusSpec) -> WorldState:
    """State at t = 0 (not necessarily the first input frame time)."""
    p = spec.params
    if spec.domain == Domain.MOTION_2D:
        return WorldState(
            domain=spec.domain, time_sec=0.0, ball_pos=p.start_pos,
            ball_vel=(p.speed_px_per_sec * p.heading_unit[0],
                      p.speed_px_per_sec * p.heading_unit[1]))
    if spec.domain == Domain.GRAVITY_2D:
        x0, y0 = launch_point(p.launch_position, spec.canvas_width, spec.canvas_height)
        theta = math.radians(p.launch_angle_deg)
        sign = 1.0 if p.launch_position in (LaunchPosition.LEFT_BOTTOM, LaunchPosition.LEFT_MIDDLE) else -1.0
        vx = sign * p.launch_speed * math.cos(theta)
        vy = -p.launch_speed * math.sin(theta)  # upward launch in y-down coords
        return WorldState(domain=spec.domain, time_sec=0.0, ball_pos=(x0, y0), ball_vel=(vx, vy))
    if spec.domain == Domain.FLUIDS:
        return WorldState(domain=spec.domain, time_sec=0.0, fill_fraction=p.initial_fill_fraction)
    # Bouncing: released from rest, centered horizontally.
    y0 = p.ground_y - p.drop_height_px
    return WorldState(
        domain=spec.domain, time_sec=0.0,
        ball_pos=(spec.canvas_width / 2.0, y0), ball_vel=(0.0, 0.0),
        bounce_phase=BouncePhase.BEFORE)


def launch_point(position: LaunchPosition, width: int, height: int) -> tuple[float, float]:
    m = LAUNCH_MARGIN
    return {
        LaunchPosition.LEFT_BOTTOM: (float(m), float(height - m)),
        LaunchPosition.LEFT_MIDDLE: (float(m), height / 2.0),
        LaunchPosition.RIGHT_BOTTOM: (float(width - m), float(height - m)),
        LaunchPosition.RIGHT_MIDDLE: (float(width - m), height / 2.0),
    }[position]


def step(state: WorldState, dt: float, spec: StimulusSpec) -> WorldState:
    """Advance one state by dt using the exact analytic update."""
    if dt <= 0:
        raise ContractViolationError("dt must be > 0")
    _require_domain(state, spec)
    p = spec.params
    t1 = state.time_sec + dt

    if state.domain == Domain.MOTION_2D:
        x, y = state.ball_pos
        vx, vy = state.ball_vel
        return replace(state, time_sec=t1, ball_pos=(x + vx * dt, y + vy * dt))

    if state.domain == Domain.GRAVITY_2D:
        g = p.gravity_px_per_sec2
        x, y = state.ball_pos
        vx, vy = state.ball_vel
        return replace(
            state, time_sec=t1,
            ball_pos=(x + vx * dt, y + vy * dt + 0.5 * g * dt * dt),
            ball_vel=(vx, vy + g * dt))

    if state.domain == Domain.FLUIDS:
        fill = min(1.0, state.fill_fraction + p.rate * dt)
        return replace(state, time_sec=t1, fill_fraction=fill)

    return _step_bounce(state, dt, p)


def _step_bounce(state: WorldState, dt: float, p: BounceParams) -> WorldState:
    """Event-driven bounce advance: fall, dwell at the contact band, rebound.

    The dwell stores the impact speed in ball_vel so restitution applies
    exactly on exit; contact_elapsed_sec carries dwell progress across
    step boundaries.
    """
    g = p.gravity_px_per_sec2
    e = p.restitution
    cy = p.contact_y
    x, y = state.ball_pos
    vy = state.ball_vel[1]
    phase = state.bounce_phase
    in_dwell = state.contact_elapsed_sec is not None
    elapsed = state.contact_elapsed_sec or 0.0
    # States below the contact band (e.g. de-rendered from a squashed
    # frame) are clamped onto it.
    if y > cy:
        y = cy
        if not in_dwell and vy >= 0:
            in_dwell, elapsed = True, 0.0

    remaining = dt
    while remaining > 1e-15:
        if in_dwell:
            stay = min(remaining, p.contact_duration_sec - elapsed)
            elapsed += stay
            remaining -= stay
            if phase is not None:
                phase = BouncePhase.DURING if phase <= BouncePhase.DURING else phase
            if elapsed >= p.contact_duration_sec - 1e-15:
                in_dwell = False
                rebound = e * abs(vy)
                vy = 0.0 if rebound < _REST_SPEED else -rebound
                if phase is not None and remaining > 1e-15:
                    phase = BouncePhase.AFTER if phase >= BouncePhase.DURING else phase
        else:
            if vy == 0.0 and y >= cy - 1e-12:
                # At rest on the band.
                y = cy
                remaining = 0.0
                break
            # Time until the center reaches the contact band.
            disc = vy * vy + 2.0 * g * (cy - y)
            t_hit = (-vy + math.sqrt(disc)) / g if disc >= 0 else math.inf
            if t_hit > remaining:
                y = y + vy * remaining + 0.5 * g * remaining * remaining
                vy = vy + g * remaining
                remaining = 0.0
            else:
                vy = vy + g * t_hit
                y = cy
                remaining -= t_hit
                in_dwell, elapsed = True, 0.0
                if phase is not None:
                    phase = BouncePhase.DURING if phase <= BouncePhase.DURING else phase

    if phase is not None and not in_dwell and vy < 0:
        phase = BouncePhase.AFTER
    return replace(
        state, time_sec=state.time_sec + dt, ball_pos=(x, y), ball_vel=(0.0, vy),
        bounce_phase=phase, contact_elapsed_sec=elapsed if in_dwell else None)


@dataclass(frozen=True)
class BounceSchedule:
    """Analytic contact schedule: k-th contact starts at contact_times[k]
    with downward impact speed impact_speeds[k]."""
    contact_times: tuple[float, ...]
    impact_speeds: tuple[float, ...]
    dwell: float

    def first_contact(self) -> float:
        return self.contact_times[0]


def bounce_schedule(spec: StimulusSpec, horizon_sec: float) -> BounceSchedule:
    p = spec.params
    if spec.domain != Domain.BOUNCING:
        raise ContractViolationError("bounce schedule requires a Bouncing spec")
    g = p.gravity_px_per_sec2
    fall = p.drop_height_px - p.ball_radius_px
    t = math.sqrt(2.0 * fall / g)
    v = g * t
    times, speeds = [t], [v]
    while True:
        u = p.restitution * v
        if u < _REST_SPEED:
            break
        t = t + p.contact_duration_sec + 2.0 * u / g
        v = u
        if t > horizon_sec:
            break
        times.append(t)
        speeds.append(v)
    return BounceSchedule(tuple(times), tuple(speeds), p.contact_duration_sec)


def _bounce_state_at(spec: StimulusSpec, t: float) -> WorldState:
    p = spec.params
    g = p.gravity_px_per_sec2
    cy = p.contact_y
    x = spec.canvas_width / 2.0
    sched = bounce_schedule(spec, t)
    t1 = sched.contact_times[0]
    if t < t1:
        y0 = p.ground_y - p.drop_height_px
        y = y0 + 0.5 * g * t * t
        return WorldState(Domain.BOUNCING, t, (x, y), (0.0, g * t),
                          bounce_phase=BouncePhase.BEFORE)
    phase = BouncePhase.DURING if t <= t1 + sched.dwell else BouncePhase.AFTER
    # Locate the segment containing t.
    for k in range(len(sched.contact_times) - 1, -1, -1):
        tk = sched.contact_times[k]
        vk = sched.impact_speeds[k]
        if t < tk:
            continue
        tau = t - tk
        if tau <= sched.dwell:
            return WorldState(Domain.BOUNCING, t, (x, cy), (0.0, vk),
                              bounce_phase=phase, contact_elapsed_sec=tau)
        u = p.restitution * vk
        if u < _REST_SPEED:
            return WorldState(Domain.BOUNCING, t, (x, cy), (0.0, 0.0), bounce_phase=phase)
        tau -= sched.dwell
        y = cy - u * tau + 0.5 * g * tau * tau
        vy = -u + g * tau
        # Never report below the band; the next contact starts a new segment.
        if y > cy:
            y, vy = cy, 0.0
        return WorldState(Domain.BOUNCING, t, (x, y), (0.0, vy), bounce_phase=phase)
    raise AssertionError("unreachable: t precedes first contact")


def ground_truth_trajectory(spec: StimulusSpec, times: list[float]) -> list[WorldState]:
    """Closed-form states at the requested (ascending) times."""
    if any(b < a for a, b in zip(times, times[1:])):
        raise ContractViolationError("times must be sorted ascending")
    if not times:
        return []
    p = spec.params
    out: list[WorldState] = []
    if spec.domain == Domain.MOTION_2D:
        x0, y0 = p.start_pos
        vx = p.speed_px_per_sec * p.heading_unit[0]
        vy = p.speed_px_per_sec * p.heading_unit[1]
        for t in times:
            out.append(WorldState(spec.domain, t, (x0 + vx * t, y0 + vy * t), (vx, vy)))
    elif spec.domain == Domain.GRAVITY_2D:
        s0 = initial_state(spec)
        (x0, y0), (vx, vy0) = s0.ball_pos, s0.ball_vel
        g = p.gravity_px_per_sec2
        for t in times:
            out.append(WorldState(
                spec.domain, t,
                (x0 + vx * t, y0 + vy0 * t + 0.5 * g * t * t), (vx, vy0 + g * t)))
    elif spec.domain == Domain.FLUIDS:
        f0 = p.initial_fill_fraction
        for t in times:
            out.append(WorldState(spec.domain, t, fill_fraction=min(1.0, f0 + p.rate * t)))
    else:
        for t in times:
            out.append(_bounce_state_at(spec, t))
    return out


def partition_bounce(trajectory: list[WorldState]) -> list[BouncePhase]:
    """Phase labels of a time-sorted bouncing trajectory.

    Labels are relative to the first ground contact: everything past its
    dwell window counts as After, so the sequence is non-decreasing even
    when the ball bounces again.
    """
    if not trajectory:
        return []
    for a, b in zip(trajectory, trajectory[1:]):
        if b.time_sec < a.time_sec:
            raise ContractViolationError("trajectory must be time-sorted")
    labels = []
    for s in trajectory:
        if s.domain != Domain.BOUNCING:
            raise ContractViolationError("partitioning requires a Bouncing trajectory")
        if s.bounce_phase is None:
            raise ContractViolationError("trajectory state lacks a bounce phase label")
        labels.append(s.bounce_phase)
    for a, b in zip(labels, labels[1:]):
        if b < a:
            raise ContractViolationError("phase labels are not monotone")
    return labels


# ---------------------------------------------------------------------------
# Stimulus grid enumeration
# ---------------------------------------------------------------------------

MOTION_SPEEDS = (100.0, 300.0, 500.0)
GRAVITY_SPEEDS = (230.0, 240.0, 250.0)
GRAVITY_ANGLES = (45.0, 60.0)
# Grid gravity differs from the per-spec default: at g=400 the bottom
# launches leave a 1024px canvas before t=1.6s, at g=230 all 24 stay in.
GRAVITY_GRID_G = 230.0
FLUID_FLOWS = (25.0, 50.0, 75.0)
FLUID_FILL_TWELFTHS = (1, 3, 5, 7, 9)
BOUNCE_PARTITIONS = ("before", "during", "after")
# Surrogate ball materials: ball index -> restitution; balls 1-5 pair with
# rates {25, 50}, balls 6-9 with rates {10, 15} (18 combos x 3 partitions).
BOUNCE_RESTITUTIONS = {k: round(0.85 - 0.05 * (k - 1), 2) for k in range(1, 10)}
BOUNCE_RATES = {**{k: (25, 50) for k in range(1, 6)}, **{k: (10, 15) for k in range(6, 10)}}
# Surrogate contact dwell is one CoT step wide so 0.2s rollouts can land
# inside the During window (the per-spec default stays 0.1s).
BOUNCE_GRID_DWELL = 0.2


def _bounce_grid_spec(ball: int, rate: int, partition: str) -> StimulusSpec:
    drop = 300.0 + 3.0 * rate
    params = BounceParams(
        restitution=BOUNCE_RESTITUTIONS[ball], drop_height_px=drop,
        contact_duration_sec=BOUNCE_GRID_DWELL)
    base = StimulusSpec(domain=Domain.BOUNCING, params=params)
    t_c = bounce_schedule(base, 10.0).first_contact()
    # Place the 5-frame input window so predictions sample the partition.
    if partition == "before":
        offset = t_c - 1.05
    elif partition == "during":
        offset = t_c + BOUNCE_GRID_DWELL / 2.0 - 0.8
    else:
        offset = t_c + BOUNCE_GRID_DWELL + 0.1 - 0.8
    offset = max(0.0, round(offset, 4))
    times = tuple(round(offset + 0.2 * i, 4) for i in range(5))
    return StimulusSpec(
        domain=Domain.BOUNCING, params=params, input_frame_times=times,
        stimulus_id=f"bounce-b{ball}-r{rate}-{partition}")


def enumerate_stimuli(domain: Domain) -> list[StimulusSpec]:
    """The full stimulus grid for one domain (3 / 24 / 45 / 54 entries)."""
    specs: list[StimulusSpec] = []
    if domain == Domain.MOTION_2D:
        for v in MOTION_SPEEDS:
            specs.append(StimulusSpec(
                domain=domain, params=MotionParams(speed_px_per_sec=v),
                stimulus_id=f"motion2d-v{v:g}"))
    elif domain == Domain.GRAVITY_2D:
        for v in GRAVITY_SPEEDS:
            for a in GRAVITY_ANGLES:
                for pos in LaunchPosition:
                    specs.append(StimulusSpec(
                        domain=domain,
                        params=ProjectileParams(
                            launch_speed=v, launch_angle_deg=a, launch_position=pos,
                            gravity_px_per_sec2=GRAVITY_GRID_G),
                        stimulus_id=f"gravity2d-v{v:g}-a{a:g}-{pos.value}"))
    elif domain == Domain.FLUIDS:
        for f in FLUID_FLOWS:
            for mug in MugSize:
                for tw in FLUID_FILL_TWELFTHS:
                    specs.append(StimulusSpec(
                        domain=domain,
                        params=FluidParams(
                            flow_rate_param=f, mug_size=mug,
                            initial_fill_fraction=tw / 12.0),
                        stimulus_id=f"fluids-f{f:g}-{mug.value}-l{tw}"))
    else:
        for ball, rates in BOUNCE_RATES.items():
            for rate in rates:
                for part in BOUNCE_PARTITIONS:
                    specs.append(_bounce_grid_spec(ball, rate, part))
    for s in specs:
        s.validate()
    return specs


def enumerate_all() -> dict[Domain, list[StimulusSpec]]:
    return {d: enumerate_stimuli(d) for d in Domain}


# ---------------------------------------------------------------------------
# Spec serialization (YAML-friendly plain dicts)
# ---------------------------------------------------------------------------

def spec_to_dict(spec: StimulusSpec) -> dict:
    p = spec.params
    d = {
        "domain": spec.domain.value,
        "stimulus_id": spec.stimulus_id,
        "canvas_width": spec.canvas_width,
        "canvas_height": spec.canvas_height,
        "input_frame_times": list(spec.input_frame_times),
    }
    if isinstance(p, MotionParams):
        d["params"] = {"speed_px_per_sec": p.speed_px_per_sec,
                       "heading_unit": list(p.heading_unit),
                       "start_pos": list(p.start_pos)}
    elif isinstance(p, ProjectileParams):
        d["params"] = {"launch_speed": p.launch_speed,
                       "launch_angle_deg": p.launch_angle_deg,
                       "launch_position": p.launch_position.value,
                       "gravity_px_per_sec2": p.gravity_px_per_sec2}
    elif isinstance(p, FluidParams):
        d["params"] = {"flow_rate_param": p.flow_rate_param,
                       "mug_size": p.mug_size.value,
                       "initial_fill_fraction": p.initial_fill_fraction,
                       "fill_rate_per_sec": p.fill_rate_per_sec}
    else:
        d["params"] = {"restitution": p.restitution,
                       "drop_height_px": p.drop_height_px,
                       "gravity_px_per_sec2": p.gravity_px_per_sec2,
                       "contact_duration_sec": p.contact_duration_sec,
                       "ground_y": p.ground_y,
                       "ball_radius_px": p.ball_radius_px}
    return d


def spec_from_dict(d: dict) -> StimulusSpec:
    domain = Domain(d["domain"])
    raw = dict(d["params"])
    if domain == Domain.MOTION_2D:
        raw["heading_unit"] = tuple(raw.get("heading_unit", (1.0, 0.0)))
        raw["start_pos"] = tuple(raw.get("start_pos", (96.0, 512.0)))
        params: Params = MotionParams(**raw)
    elif domain == Domain.GRAVITY_2D:
        raw["launch_position"] = LaunchPosition(raw["launch_position"])
        params = ProjectileParams(**raw)
    elif domain == Domain.FLUIDS:
        raw["mug_size"] = MugSize(raw["mug_size"])
        params = FluidParams(**raw)
    else:
        params = BounceParams(**raw)
    spec = StimulusSpec(
        domain=domain, params=params,
        canvas_width=int(d.get("canvas_width", 0)),
        canvas_height=int(d.get("canvas_height", 0)),
        input_frame_times=tuple(d.get("input_frame_times", DEFAULT_FRAME_TIMES)),
        stimulus_id=d.get("stimulus_id", ""))
    spec.validate()
    return spec
