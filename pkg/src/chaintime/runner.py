"""Executes the configured grid of sessions against a backend.

Sessions are independent units and may run on a thread pool; steps
inside one session stay strictly sequential.  Every session gets its own
backend instance so per-conversation backend state (server session
tokens) and retry jitter never leak across rollouts; generation calls
are summed into the returned stats for budget audits.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backends import build_backend
from .config import RunConfig
from .errors import BackendFailureError
from .physics import StimulusSpec, enumerate_stimuli
from .render import default_style, render_input_frames
from .session import Session, SessionStatus, parse_method, run_session
from .store import FrameStore


@dataclass
class RunStats:
    sessions_total: int = 0
    generate_calls: int = 0
    by_status: dict = field(default_factory=dict)
    sessions: list[Session] = field(default_factory=list)

    def record(self, session: Session, calls: int) -> None:
        self.sessions_total += 1
        self.generate_calls += calls
        self.by_status[session.status.value] = \
            self.by_status.get(session.status.value, 0) + 1
        self.sessions.append(session)

    @property
    def complete(self) -> int:
        return self.by_status.get(SessionStatus.COMPLETE.value, 0)


def select_stimuli(cfg: RunConfig) -> list[StimulusSpec]:
    specs = [s for d in cfg.domains for s in enumerate_stimuli(d)]
    if cfg.stimulus_ids:
        wanted = set(cfg.stimulus_ids)
        specs = [s for s in specs if s.stimulus_id in wanted]
        missing = wanted - {s.stimulus_id for s in specs}
        if missing:
            raise BackendFailureError(f"unknown stimulus ids: {sorted(missing)}")
    return specs


def expected_generate_calls(cfg: RunConfig, specs: list[StimulusSpec]) -> int:
    """Closed-form call budget: sum over stimuli of samples x steps."""
    steps = sum(parse_method(m).step_count for m in cfg.methods)
    return sum(cfg.samples.get(s.domain, 0) * steps for s in specs)


def run_grid(cfg: RunConfig, specs: list[StimulusSpec] | None = None) -> RunStats:
    if specs is None:
        specs = select_stimuli(cfg)
    store = FrameStore(cfg.cache_dir)
    stats = RunStats()

    styles = {s.stimulus_id: default_style(s) for s in specs}
    inputs = {s.stimulus_id: render_input_frames(s, styles[s.stimulus_id])
              for s in specs}

    tasks = []
    for spec in specs:
        for label in cfg.methods:
            for sample in range(cfg.samples.get(spec.domain, 0)):
                tasks.append((spec, parse_method(label), sample))

    def execute(task):
        spec, method, sample = task
        backend = build_backend(cfg.backend, cfg.noise)
        session = run_session(
            spec, inputs[spec.stimulus_id], method, backend, store,
            cfg.seed, sample, style=styles[spec.stimulus_id],
            context_mode=cfg.context)
        return session, backend.call_count

    if cfg.parallel > 1:
        with ThreadPoolExecutor(max_workers=cfg.parallel) as pool:
            for session, calls in pool.map(execute, tasks):
                stats.record(session, calls)
    else:
        for task in tasks:
            stats.record(*execute(task))
    return stats
