"""The step-by-step prediction protocol: one session = one rollout.

A session sends the Simulation Instruction prompt with the five input
frames, then one Follow-Up per remaining step inside the same
conversation, collecting exactly horizon/step generated frames at
t+s, t+2s, ..., T.  Sessions persist atomically under idempotent cache
keys: re-running a completed key is a no-op that returns the stored
session, which is what makes interrupted runs crash-safe.
"""

from __future__ import annotations

import enum
import time as _time
from dataclasses import dataclass, field, replace

import numpy as np

from .backends import Backend
from .engine import Conversation, make_rng, RNG_ALGORITHM
from .errors import (
    BackendFailureError,
    ContractViolationError,
    DerenderFailureError,
    OutOfFrameError,
)
from .physics import StimulusSpec
from .prompts import (
    PromptRole,
    family_for_domain,
    fill_prompt,
    load_template,
    prompt_params_for,
)
from .render import CanvasStyle, Frame, Provenance, default_style
from .store import CacheKey, FrameStore

CONTEXT_FULL = "full"
CONTEXT_LAST_FRAME = "last-frame-only"


@dataclass(frozen=True)
class MethodConfig:
    step_size_sec: float
    horizon_sec: float = 0.8

    def __post_init__(self):
        if self.step_size_sec not in (0.2, 0.4, 0.8):
            raise ContractViolationError("step size must be 0.2, 0.4 or 0.8 seconds")
        ratio = self.horizon_sec / self.step_size_sec
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ContractViolationError("horizon must be an integer multiple of step size")

    @property
    def step_count(self) -> int:
        return round(self.horizon_sec / self.step_size_sec)

    @property
    def label(self) -> str:
        if self.step_count == 1:
            return "DirectPrediction"
        return f"CoT-{self.step_size_sec:.1f}"


METHODS = {
    "CoT-0.2": MethodConfig(0.2),
    "CoT-0.4": MethodConfig(0.4),
    "DirectPrediction": MethodConfig(0.8),
}


def parse_method(label: str) -> MethodConfig:
    if label not in METHODS:
        raise ContractViolationError(
            f"unknown method {label!r}; expected one of {sorted(METHODS)}")
    return METHODS[label]


class SessionStatus(str, enum.Enum):
    COMPLETE = "Complete"
    DERENDER_FAILED = "DerenderFailed"
    BACKEND_FAILED = "BackendFailed"
    INVALID = "Invalid"


@dataclass
class TranscriptEntry:
    prompt_text: str
    attached_frame_refs: list[str]
    generated_frame_ref: str | None
    attempts: int = 1
    wall_clock_sec: float | None = None


@dataclass
class Session:
    session_id: str
    stimulus_id: str
    method_label: str
    backend_id: str
    sample_index: int
    rng_seed: int
    rng_algorithm: str
    context_mode: str
    status: SessionStatus
    transcript: list[TranscriptEntry] = field(default_factory=list)
    generated_frame_times: list[float] = field(default_factory=list)
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "stimulus_id": self.stimulus_id,
            "method": self.method_label,
            "backend_id": self.backend_id,
            "sample_index": self.sample_index,
            "rng_seed": self.rng_seed,
            "rng_algorithm": self.rng_algorithm,
            "context_mode": self.context_mode,
            "status": self.status.value,
            "error": self.error,
            "generated_frame_times": self.generated_frame_times,
            "transcript": [
                {"prompt": e.prompt_text, "attached": e.attached_frame_refs,
                 "generated": e.generated_frame_ref, "attempts": e.attempts}
                for e in self.transcript
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        return cls(
            session_id=d["session_id"], stimulus_id=d["stimulus_id"],
            method_label=d["method"], backend_id=d["backend_id"],
            sample_index=d["sample_index"], rng_seed=d["rng_seed"],
            rng_algorithm=d.get("rng_algorithm", RNG_ALGORITHM),
            context_mode=d.get("context_mode", CONTEXT_FULL),
            status=SessionStatus(d["status"]), error=d.get("error", ""),
            generated_frame_times=list(d.get("generated_frame_times", [])),
            transcript=[TranscriptEntry(t["prompt"], list(t["attached"]),
                                        t["generated"], t.get("attempts", 1))
                        for t in d.get("transcript", [])])


def validate_transcript(session: Session, method: MethodConfig) -> None:
    """Shape invariants asserted on every completed session."""
    n = method.step_count
    if session.status != SessionStatus.COMPLETE:
        return
    if len(session.transcript) != n:
        raise ContractViolationError(
            f"transcript has {len(session.transcript)} prompts, expected {n}")
    if len(session.generated_frame_times) != n:
        raise ContractViolationError("generated frame count must equal step count")
    for i, entry in enumerate(session.transcript):
        if entry.generated_frame_ref is None:
            raise ContractViolationError("complete session with a missing frame ref")


def session_seed(config_seed: int, stimulus_id: str, sample_index: int) -> int:
    """Stable 64-bit per-session seed (sha256 of the identifying tuple)."""
    import hashlib

    digest = hashlib.sha256(
        f"{config_seed}|{stimulus_id}|{sample_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def run_session(spec: StimulusSpec, input_frames: list[Frame], method: MethodConfig,
                backend: Backend, store: FrameStore, config_seed: int,
                sample_index: int, style: CanvasStyle | None = None,
                context_mode: str = CONTEXT_FULL) -> Session:
    """Run (or reload) one complete protocol session."""
    if context_mode not in (CONTEXT_FULL, CONTEXT_LAST_FRAME):
        raise ContractViolationError(f"unknown context mode {context_mode!r}")
    if style is None:
        style = default_style(spec)
    seed = session_seed(config_seed, spec.stimulus_id, sample_index)
    base_key = CacheKey(spec.stimulus_id, method.label, backend.backend_id,
                        config_seed, sample_index, 0)
    existing = store.read_json(store.session_path(base_key).relative_to(store.root))
    if existing is not None and existing.get("status") == SessionStatus.COMPLETE.value:
        return Session.from_dict(existing)

    family = family_for_domain(spec.domain)
    params = prompt_params_for(spec)
    t_last = spec.input_frame_times[-1]
    session = Session(
        session_id=f"{spec.stimulus_id}/{method.label}/{backend.backend_id}"
                   f"/seed{config_seed}/s{sample_index:03d}",
        stimulus_id=spec.stimulus_id, method_label=method.label,
        backend_id=backend.backend_id, sample_index=sample_index,
        rng_seed=seed, rng_algorithm=RNG_ALGORITHM, context_mode=context_mode,
        status=SessionStatus.COMPLETE)

    input_refs = [f"input/frame_{round(f.time_sec * 1000):06d}ms" for f in input_frames]
    conversation = Conversation(spec, style, list(input_frames), prompts=[])
    timings: list[float] = []
    try:
        for k in range(method.step_count):
            role = PromptRole.INSTRUCTION if k == 0 else PromptRole.FOLLOW_UP
            prompt = fill_prompt(load_template(family, role),
                                 method.step_size_sec, **params)
            if context_mode == CONTEXT_LAST_FRAME and k > 0:
                visible = list(input_frames) + [conversation.frames[-1]]
            else:
                visible = list(conversation.frames)
            view = Conversation(spec, style, visible, list(conversation.prompts))
            key = replace(base_key, step_index=k)
            rng = make_rng(seed, k)
            t0 = _time.monotonic()
            frame = backend.generate(view, prompt, rng, key)
            elapsed = _time.monotonic() - t0
            t_frame = round(t_last + (k + 1) * method.step_size_sec, 9)
            frame = Frame.from_array(frame.pixels, t_frame, frame.provenance)
            ref = store.save_frame(key, frame)
            attached = list(input_refs) if k == 0 or context_mode == CONTEXT_FULL \
                else [session.transcript[-1].generated_frame_ref]
            if k > 0 and context_mode == CONTEXT_FULL:
                attached = input_refs + [e.generated_frame_ref for e in session.transcript]
            session.transcript.append(TranscriptEntry(
                prompt_text=prompt, attached_frame_refs=attached,
                generated_frame_ref=ref, attempts=1, wall_clock_sec=elapsed))
            session.generated_frame_times.append(t_frame)
            conversation.frames.append(frame)
            conversation.prompts.append(prompt)
            timings.append(elapsed)
    except DerenderFailureError as exc:
        session.status = SessionStatus.DERENDER_FAILED
        session.error = str(exc)
    except OutOfFrameError as exc:
        session.status = SessionStatus.INVALID
        session.error = str(exc)
    except BackendFailureError as exc:
        session.status = SessionStatus.BACKEND_FAILED
        session.error = str(exc)

    if session.status == SessionStatus.COMPLETE:
        validate_transcript(session, method)
    rel = store.session_path(base_key).relative_to(store.root)
    store.write_json(rel, session.to_dict())
    store.write_json(rel.with_name("timing.json"),
                     {"wall_clock_sec": timings, "written_at": _time.time()})
    return session
