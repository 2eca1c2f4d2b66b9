"""Image-generation backends: remote HTTP service, local oracle, replay.

All three satisfy one contract: ``generate(conversation, prompt, rng,
key) -> Frame``.  The remote adapter speaks a single documented
JSON-over-HTTP shape (see README); alternative services plug in by
subclassing and overriding the request/response mapping.
"""

from __future__ import annotations

import base64
import io
import os
import time
from dataclasses import dataclass, field

import numpy as np
import requests
from PIL import Image

from .engine import Conversation, NoiseConfig, oracle_generate
from .errors import BackendFailureError, ConfigError, ReplayMissError
from .render import Frame, Provenance
from .store import CacheKey, FrameStore
from .vision import resize_area

KIND_ORACLE = "oracle"
KIND_REMOTE = "remote"
KIND_REPLAY = "replay"

CONTEXT_STATELESS = "stateless-full"   # resend every image each call
CONTEXT_SERVER = "server-session"      # server holds the conversation


@dataclass
class BackendDescriptor:
    kind: str = KIND_ORACLE
    backend_id: str = ""
    # remote service
    endpoint_url: str = ""
    model_name: str = ""
    image_size: tuple[int, int] = (1024, 1024)
    timeout_sec: float = 60.0
    max_retries: int = 5
    backoff_base_sec: float = 2.0
    credential_env: str = ""   # name of the env var holding the API key
    conversation_mode: str = CONTEXT_STATELESS
    # replay
    replay_store: str = ""
    replay_source_backend: str = ""
    replay_source_seed: int | None = None

    def __post_init__(self):
        if not self.backend_id:
            self.backend_id = self.kind
        if self.kind == KIND_REMOTE and not self.endpoint_url:
            raise ConfigError("remote backend requires endpoint_url")
        if self.kind == KIND_REMOTE and not self.credential_env:
            raise ConfigError("remote backend requires a credential env var name")
        if self.kind == KIND_REPLAY and not self.replay_store:
            raise ConfigError("replay backend requires replay_store")


class Backend:
    """Common counter so runs can audit their generation-call budget."""

    def __init__(self, descriptor: BackendDescriptor):
        self.descriptor = descriptor
        self.call_count = 0

    @property
    def backend_id(self) -> str:
        return self.descriptor.backend_id

    def generate(self, conversation: Conversation, prompt: str,
                 rng: np.random.Generator, key: CacheKey) -> Frame:
        self.call_count += 1
        return self._generate(conversation, prompt, rng, key)

    def _generate(self, conversation, prompt, rng, key):
        raise NotImplementedError


class OracleBackend(Backend):
    def __init__(self, descriptor: BackendDescriptor, noise: NoiseConfig):
        super().__init__(descriptor)
        self.noise = noise

    def _generate(self, conversation, prompt, rng, key):
        return oracle_generate(conversation, prompt, self.noise, rng)


class ReplayBackend(Backend):
    """Serves frames from a completed store; never touches the network."""

    def __init__(self, descriptor: BackendDescriptor):
        super().__init__(descriptor)
        self.source = FrameStore(descriptor.replay_store)

    def _generate(self, conversation, prompt, rng, key):
        src_key = CacheKey(
            stimulus_id=key.stimulus_id, method_label=key.method_label,
            backend_id=self.descriptor.replay_source_backend or key.backend_id,
            seed=(self.descriptor.replay_source_seed
                  if self.descriptor.replay_source_seed is not None else key.seed),
            sample_index=key.sample_index, step_index=key.step_index)
        if not self.source.has_frame(src_key):
            raise ReplayMissError(f"replay store lacks {src_key.path()}")
        t = conversation.frames[-1].time_sec
        return self.source.load_frame(src_key, time_sec=t, provenance=Provenance.GENERATED)


def _png_base64(frame: Frame) -> str:
    buf = io.BytesIO()
    mode = "RGBA" if frame.channels == 4 else "RGB"
    Image.fromarray(frame.pixels, mode=mode).save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


class RemoteImageServiceBackend(Backend):
    """JSON-over-HTTP adapter with retry/backoff.

    Request:  POST <endpoint_url> with
        {"model": ..., "prompt": ..., "size": "WxH",
         "images": [{"name": ..., "data_base64": ...}, ...],
         "session": null | opaque token}
    Response: 200 with {"image_base64": ..., "session": optional token}.

    In "stateless-full" mode every call re-attaches the whole
    conversation; in "server-session" mode only new frames ride along and
    the returned session token is replayed on follow-ups.
    """

    def __init__(self, descriptor: BackendDescriptor, session_factory=requests.Session,
                 sleep=time.sleep):
        super().__init__(descriptor)
        self._http = session_factory()
        self._sleep = sleep
        self._server_token: str | None = None
        self._sent_frame_count = 0

    def _credential(self) -> str:
        key = os.environ.get(self.descriptor.credential_env, "")
        if not key:
            raise BackendFailureError(
                f"credential env var {self.descriptor.credential_env!r} is not set")
        return key

    def _attachments(self, conversation: Conversation) -> list[dict]:
        if self.descriptor.conversation_mode == CONTEXT_SERVER and self._server_token:
            frames = conversation.frames[self._sent_frame_count:]
        else:
            frames = conversation.frames
        return [{"name": f"frame_{round(f.time_sec * 1000):06d}ms.png",
                 "data_base64": _png_base64(f)} for f in frames]

    def _generate(self, conversation, prompt, rng, key):
        d = self.descriptor
        payload = {
            "model": d.model_name,
            "prompt": prompt,
            "size": f"{d.image_size[0]}x{d.image_size[1]}",
            "images": self._attachments(conversation),
            "session": self._server_token,
        }
        headers = {"Authorization": f"Bearer {self._credential()}"}
        last_error: Exception | None = None
        for attempt in range(d.max_retries):
            if attempt:
                base = d.backoff_base_sec * (2 ** (attempt - 1))
                self._sleep(base * float(rng.uniform(0.5, 1.5)))
            try:
                resp = self._http.post(d.endpoint_url, json=payload,
                                       headers=headers, timeout=d.timeout_sec)
                if resp.status_code in (429,) or resp.status_code >= 500:
                    last_error = BackendFailureError(f"HTTP {resp.status_code}")
                    continue
                resp.raise_for_status()
                body = resp.json()
                frame = self._decode(body, conversation)
                if d.conversation_mode == CONTEXT_SERVER:
                    self._server_token = body.get("session") or self._server_token
                    self._sent_frame_count = len(conversation.frames)
                return frame
            except (requests.RequestException, ValueError, KeyError) as exc:
                last_error = exc
        raise BackendFailureError(
            f"backend {d.backend_id!r} failed after {d.max_retries} attempts: {last_error}")

    def _decode(self, body: dict, conversation: Conversation) -> Frame:
        data = body.get("image_base64")
        if not data:
            raise BackendFailureError(f"malformed image payload: keys={sorted(body)}")
        try:
            img = Image.open(io.BytesIO(base64.b64decode(data)))
            img = img.convert("RGB")
            px = np.asarray(img)
        except Exception as exc:
            raise BackendFailureError(f"malformed image payload: {exc}") from exc
        spec = conversation.spec
        if px.shape[:2] != (spec.canvas_height, spec.canvas_width):
            px = resize_area(px, spec.canvas_width, spec.canvas_height)
        t = conversation.frames[-1].time_sec
        return Frame.from_array(px, t, Provenance.GENERATED)


def build_backend(descriptor: BackendDescriptor, noise: NoiseConfig) -> Backend:
    if descriptor.kind == KIND_ORACLE:
        return OracleBackend(descriptor, noise)
    if descriptor.kind == KIND_REPLAY:
        return ReplayBackend(descriptor)
    if descriptor.kind == KIND_REMOTE:
        return RemoteImageServiceBackend(descriptor)
    raise ConfigError(f"unknown backend kind {descriptor.kind!r}")
