"""Content-addressed frame/session store with atomic writes.

Layout (human-readable, injective over every key field):

    <root>/<stimulusId>/<method>/<backend>/seed<seed>/s<sample>/step<k>.png
    <root>/<stimulusId>/<method>/<backend>/seed<seed>/s<sample>/session.json
    <root>/<stimulusId>/<method>/<backend>/seed<seed>/s<sample>/timing.json

Every write lands in a temp file in the same directory followed by an
atomic rename, so concurrent writers and crash-restarts leave only
whole files behind.  ``session.json`` is the completion marker and its
content is deterministic; wall-clock timings go to the ``timing.json``
sidecar so stores from identical seeded runs are bit-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import ReplayMissError
from .render import Frame, Provenance, load_frame, save_frame


@dataclass(frozen=True)
class CacheKey:
    stimulus_id: str
    method_label: str
    backend_id: str
    seed: int
    sample_index: int
    step_index: int

    def directory(self) -> str:
        return (f"{self.stimulus_id}/{self.method_label}/{self.backend_id}/"
                f"seed{self.seed}/s{self.sample_index:03d}")

    def frame_name(self) -> str:
        return f"step{self.step_index}.png"

    def path(self) -> str:
        return f"{self.directory()}/{self.frame_name()}"


def cache_key(stimulus_id: str, method_label: str, sample_index: int,
              step_index: int, backend_id: str, seed: int) -> str:
    """Stable relative path for one generated frame."""
    return CacheKey(stimulus_id, method_label, backend_id, seed,
                    sample_index, step_index).path()


class FrameStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def frame_path(self, key: CacheKey) -> Path:
        return self.root / key.path()

    def session_dir(self, key: CacheKey) -> Path:
        return self.root / key.directory()

    def session_path(self, key: CacheKey) -> Path:
        return self.session_dir(key) / "session.json"

    def save_frame(self, key: CacheKey, frame: Frame) -> str:
        save_frame(frame, self.frame_path(key))  # atomic inside
        return key.path()

    def has_frame(self, key: CacheKey) -> bool:
        return self.frame_path(key).is_file()

    def load_frame(self, key: CacheKey, time_sec: float,
                   provenance: Provenance = Provenance.GENERATED) -> Frame:
        path = self.frame_path(key)
        if not path.is_file():
            raise ReplayMissError(f"no stored frame at {key.path()}")
        return load_frame(path, time_sec, provenance)

    def load_frame_ref(self, ref: str, time_sec: float,
                       provenance: Provenance = Provenance.GENERATED) -> Frame:
        path = self.root / ref
        if not path.is_file():
            raise ReplayMissError(f"no stored frame at {ref}")
        return load_frame(path, time_sec, provenance)

    def write_json(self, rel: str | Path, payload: dict) -> None:
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
        os.replace(tmp, path)

    def read_json(self, rel: str | Path) -> dict | None:
        path = self.root / rel
        if not path.is_file():
            return None
        return json.loads(path.read_text())

    def session_manifests(self) -> list[Path]:
        return sorted(self.root.rglob("session.json"))
