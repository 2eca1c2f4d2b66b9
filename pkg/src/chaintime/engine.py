"""Noisy de-render / simulate / render kernels and the oracle backend core.

The oracle impersonates an image-generation service: each call it
de-renders the latest frame(s) of the conversation, advances the
estimated state by the requested step, and renders the result.  State is
never carried between calls, so the rollout is a strict Markov chain
over images and per-step noise compounds exactly as the step count
grows.

Randomness comes from numpy's PCG64 ("pcg64" in session records); every
stream is derived from explicit integer seeds so runs replay bit-exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

import numpy as np

from .detect import detect_for_domain, water_params_for
from .errors import ContractViolationError, DerenderFailureError
from .physics import Domain, StimulusSpec, WorldState, step
from .render import CanvasStyle, Frame, Provenance, default_style, fluid_geometry, render_scene

RNG_ALGORITHM = "pcg64"

TAU_SCALING_PER_STEP = "per-step"
TAU_SCALING_LINEAR = "linear-in-dt"
TAU_REFERENCE_DT = 0.2

VELOCITY_LAST_TWO = "last-two"
VELOCITY_REGRESSION = "regression"


def make_rng(*seed_parts: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(list(seed_parts))))


@dataclass(frozen=True)
class NoiseConfig:
    sigma_derender: float = 0.0   # px on each estimated position/level
    sigma_simulate: float = 0.0   # px per simulate invocation
    sigma_render: float = 0.0     # px of draw jitter
    rng_seed: int = 0
    tau_scaling: str = TAU_SCALING_PER_STEP
    velocity_estimator: str = VELOCITY_LAST_TWO

    def __post_init__(self):
        if min(self.sigma_derender, self.sigma_simulate, self.sigma_render) < 0:
            raise ContractViolationError("noise sigmas must be >= 0")
        if self.tau_scaling not in (TAU_SCALING_PER_STEP, TAU_SCALING_LINEAR):
            raise ContractViolationError(f"unknown tau scaling {self.tau_scaling!r}")
        if self.velocity_estimator not in (VELOCITY_LAST_TWO, VELOCITY_REGRESSION):
            raise ContractViolationError(
                f"unknown velocity estimator {self.velocity_estimator!r}")


@dataclass(frozen=True)
class StateEstimate:
    state: WorldState
    source_frame_time: float
    noise_applied: bool
    partial: bool = False   # velocity unavailable (single observed frame)


@dataclass
class Conversation:
    """What a backend sees: the spec, style, and time-ordered frames."""
    spec: StimulusSpec
    style: CanvasStyle
    frames: list[Frame]
    prompts: list[str] = field(default_factory=list)


def _clamp_state(state: WorldState, spec: StimulusSpec) -> WorldState:
    if state.fill_fraction is not None:
        return replace(state, fill_fraction=min(1.0, max(0.0, state.fill_fraction)))
    x, y = state.ball_pos
    x = min(float(spec.canvas_width - 1), max(0.0, x))
    y = min(float(spec.canvas_height - 1), max(0.0, y))
    if spec.domain == Domain.BOUNCING:
        y = min(y, spec.params.contact_y)
    return replace(state, ball_pos=(x, y))


def _observe(frame: Frame, spec: StimulusSpec) -> tuple[float, float] | float:
    """Detected observable of one frame: (x, y) center or fill fraction."""
    det = detect_for_domain(frame, spec)
    if not det.found:
        raise DerenderFailureError(
            f"detector missed on frame t={frame.time_sec:.3f}s of {spec.stimulus_id!r}")
    if spec.domain == Domain.FLUIDS:
        mug, _ = fluid_geometry(spec)
        return (mug.y1 - float(det.top_y)) / mug.height
    return float(det.center[0]), float(det.center[1])


def derender_noisy(frames: list[Frame], spec: StimulusSpec, noise: NoiseConfig,
                   rng: np.random.Generator) -> StateEstimate:
    """Estimate the latest frame's state; velocity from the frame history."""
    if not frames:
        raise ContractViolationError("need at least one frame to de-render")
    frames = sorted(frames, key=lambda f: f.time_sec)
    last = frames[-1]

    if spec.domain == Domain.FLUIDS:
        fill = _observe(last, spec)
        fill += float(rng.normal(0.0, noise.sigma_derender)) / fluid_geometry(spec)[0].height
        state = WorldState(spec.domain, last.time_sec, fill_fraction=fill)
        return StateEstimate(_clamp_state(state, spec), last.time_sec,
                             noise.sigma_derender > 0)

    partial = len(frames) < 2
    if noise.velocity_estimator == VELOCITY_REGRESSION and len(frames) >= 2:
        ts = np.array([f.time_sec for f in frames])
        obs = np.array([_observe(f, spec) for f in frames])
        vel = []
        pos = []
        for c in range(2):
            slope, intercept = np.polyfit(ts, obs[:, c], 1)
            vel.append(float(slope))
            pos.append(float(slope * last.time_sec + intercept))
        pos, vel = tuple(pos), tuple(vel)
    else:
        pos = _observe(last, spec)
        if partial:
            vel = None
        else:
            prev = frames[-2]
            p0 = _observe(prev, spec)
            dt = last.time_sec - prev.time_sec
            vel = ((pos[0] - p0[0]) / dt, (pos[1] - p0[1]) / dt)

    jitter = rng.normal(0.0, noise.sigma_derender, size=2)
    state = WorldState(spec.domain, last.time_sec,
                       ball_pos=(pos[0] + float(jitter[0]), pos[1] + float(jitter[1])),
                       ball_vel=vel)
    return StateEstimate(_clamp_state(state, spec), last.time_sec,
                         noise.sigma_derender > 0, partial=partial)


def simulate_noisy(est: StateEstimate, dt: float, spec: StimulusSpec,
                   noise: NoiseConfig, rng: np.random.Generator) -> StateEstimate:
    """physics step plus one additive noise draw on position/level."""
    if est.partial and spec.domain != Domain.FLUIDS:
        raise ContractViolationError("cannot simulate a partial (velocity-less) estimate")
    advanced = step(est.state, dt, spec)
    sigma = noise.sigma_simulate
    if noise.tau_scaling == TAU_SCALING_LINEAR:
        sigma = sigma * dt / TAU_REFERENCE_DT
    if sigma > 0:
        if advanced.fill_fraction is not None:
            level = float(rng.normal(0.0, sigma)) / fluid_geometry(spec)[0].height
            advanced = replace(advanced, fill_fraction=advanced.fill_fraction + level)
        else:
            jx, jy = rng.normal(0.0, sigma, size=2)
            x, y = advanced.ball_pos
            advanced = replace(advanced, ball_pos=(x + float(jx), y + float(jy)))
    return StateEstimate(_clamp_state(advanced, spec), est.source_frame_time,
                         est.noise_applied or sigma > 0)


def render_noisy(est: StateEstimate, spec: StimulusSpec, style: CanvasStyle,
                 noise: NoiseConfig, rng: np.random.Generator) -> Frame:
    """Render the estimate with draw jitter; zero sigma is bit-identical
    to the deterministic renderer."""
    state = est.state
    if noise.sigma_render > 0:
        if state.fill_fraction is not None:
            level = float(rng.normal(0.0, noise.sigma_render)) / fluid_geometry(spec)[0].height
            state = replace(state, fill_fraction=state.fill_fraction + level)
        else:
            jx, jy = rng.normal(0.0, noise.sigma_render, size=2)
            x, y = state.ball_pos
            state = replace(state, ball_pos=(x + float(jx), y + float(jy)))
        state = _clamp_state(state, spec)
    return render_scene(state, spec, style, Provenance.ORACLE_RENDERED)


_SECONDS_RE = re.compile(r"(\d+(?:\.\d+)?)\s*[Ss]econds?")


def parse_step_seconds(prompt: str) -> float:
    """The simulation step requested by a prompt (first 'N seconds' figure)."""
    m = _SECONDS_RE.search(prompt)
    if m is None:
        raise ContractViolationError("prompt does not state a step size in seconds")
    return float(m.group(1))


def oracle_generate(conversation: Conversation, prompt: str, noise: NoiseConfig,
                    rng: np.random.Generator) -> Frame:
    """One oracle generation: de-render, simulate the prompt's step, render.

    The estimate is rebuilt from the conversation's latest frames every
    call, never threaded through hidden state.
    """
    dt = parse_step_seconds(prompt)
    frames = sorted(conversation.frames, key=lambda f: f.time_sec)
    window = frames if noise.velocity_estimator == VELOCITY_REGRESSION else frames[-2:]
    est = derender_noisy(window, conversation.spec, noise, rng)
    est = simulate_noisy(est, dt, conversation.spec, noise, rng)
    return render_noisy(est, conversation.spec, conversation.style, noise, rng)
