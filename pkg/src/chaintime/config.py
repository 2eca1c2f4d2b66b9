"""Run configuration: a single YAML file drives the whole pipeline.

Schema (all keys optional unless noted):

    backend:
      kind: oracle | remote | replay      # default oracle
      backend_id: <str>                   # defaults to kind
      endpoint_url: <url>                 # remote only (required)
      model_name: <str>
      image_size: [w, h]                  # 1024x1024 or 1536x1024
      timeout_sec: <float>
      max_retries: <int>
      credential_env: <ENV_VAR_NAME>      # remote only (required); never the key itself
      conversation_mode: stateless-full | server-session
      replay_store: <path>                # replay only (required)
      replay_source_backend: <str>
      replay_source_seed: <int>
    run:
      methods: [CoT-0.2, CoT-0.4, DirectPrediction]
      domains: [Motion2D, Gravity2D, Fluids, Bouncing]
      stimulus_ids: [...]                 # optional explicit subset
      samples: {Motion2D: 5, Gravity2D: 20, Fluids: 10, Bouncing: 10}
      seed: 0
      parallel: 1
      cache_dir: store
      context: full | last-frame-only
    noise:
      sigma_derender / sigma_simulate / sigma_render: <float px>
      tau_scaling: per-step | linear-in-dt
      velocity_estimator: last-two | regression
    detect:
      min_coverage: 0.9
    analyze:
      error_mode: final-only | all-steps
      bootstrap_resamples: 10000
      two_stage: false
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .backends import BackendDescriptor
from .engine import NoiseConfig
from .errors import ConfigError
from .physics import Domain

DEFAULT_SAMPLES = {Domain.MOTION_2D: 5, Domain.GRAVITY_2D: 20,
                   Domain.FLUIDS: 10, Domain.BOUNCING: 10}


@dataclass
class RunConfig:
    backend: BackendDescriptor = field(default_factory=BackendDescriptor)
    methods: list[str] = field(default_factory=lambda: ["CoT-0.2", "CoT-0.4",
                                                        "DirectPrediction"])
    domains: list[Domain] = field(default_factory=lambda: list(Domain))
    stimulus_ids: list[str] = field(default_factory=list)
    samples: dict[Domain, int] = field(default_factory=lambda: dict(DEFAULT_SAMPLES))
    seed: int = 0
    parallel: int = 1
    cache_dir: str = "store"
    context: str = "full"
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    min_coverage: float = 0.9
    error_mode: str = "final-only"
    bootstrap_resamples: int = 10000
    two_stage: bool = False


def _parse_domains(raw) -> list[Domain]:
    try:
        return [Domain(d) for d in raw]
    except ValueError as exc:
        raise ConfigError(f"unknown domain in {raw!r}: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> RunConfig:
    cfg = RunConfig()
    b = raw.get("backend", {}) or {}
    try:
        cfg.backend = BackendDescriptor(
            kind=b.get("kind", "oracle"),
            backend_id=b.get("backend_id", ""),
            endpoint_url=b.get("endpoint_url", ""),
            model_name=b.get("model_name", ""),
            image_size=tuple(b.get("image_size", (1024, 1024))),
            timeout_sec=float(b.get("timeout_sec", 60.0)),
            max_retries=int(b.get("max_retries", 5)),
            backoff_base_sec=float(b.get("backoff_base_sec", 2.0)),
            credential_env=b.get("credential_env", ""),
            conversation_mode=b.get("conversation_mode", "stateless-full"),
            replay_store=b.get("replay_store", ""),
            replay_source_backend=b.get("replay_source_backend", ""),
            replay_source_seed=b.get("replay_source_seed"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad backend block: {exc}") from exc

    r = raw.get("run", {}) or {}
    cfg.methods = list(r.get("methods", cfg.methods))
    if "domains" in r:
        cfg.domains = _parse_domains(r["domains"])
    cfg.stimulus_ids = list(r.get("stimulus_ids", []))
    if "samples" in r:
        try:
            cfg.samples = {Domain(k): int(v) for k, v in r["samples"].items()}
        except ValueError as exc:
            raise ConfigError(f"bad samples block: {exc}") from exc
    cfg.seed = int(r.get("seed", 0))
    cfg.parallel = int(r.get("parallel", 1))
    cfg.cache_dir = str(r.get("cache_dir", "store"))
    cfg.context = str(r.get("context", "full"))

    n = raw.get("noise", {}) or {}
    try:
        cfg.noise = NoiseConfig(
            sigma_derender=float(n.get("sigma_derender", 0.0)),
            sigma_simulate=float(n.get("sigma_simulate", 0.0)),
            sigma_render=float(n.get("sigma_render", 0.0)),
            rng_seed=cfg.seed,
            tau_scaling=n.get("tau_scaling", "per-step"),
            velocity_estimator=n.get("velocity_estimator", "last-two"),
        )
    except Exception as exc:
        raise ConfigError(f"bad noise block: {exc}") from exc

    d = raw.get("detect", {}) or {}
    cfg.min_coverage = float(d.get("min_coverage", 0.9))
    a = raw.get("analyze", {}) or {}
    cfg.error_mode = str(a.get("error_mode", "final-only"))
    if cfg.error_mode not in ("final-only", "all-steps"):
        raise ConfigError(f"unknown error_mode {cfg.error_mode!r}")
    cfg.bootstrap_resamples = int(a.get("bootstrap_resamples", 10000))
    cfg.two_stage = bool(a.get("two_stage", False))
    return cfg
