"""HTTP batch server.

Distributed training workers pull augmented batches by (epoch, batch_index)
instead of sharing files. Responses are pure functions of the startup state
and the request, so identical requests get byte-identical bodies across
retries, concurrent readers, and server restarts; no request mutates
anything.

Routes (HTTP/1.1, JSON, UTF-8):
    GET /healthz                          200 ok | 503 loading | 500 failed
    GET /meta                             corpus/plan/config summary
    GET /epochs/{epoch}/batches/{index}   one augmented batch

Batch payloads are a JSON array whose elements are byte-identical to the
augment command's JSONL lines for the same configuration. Query parameters
alpha, beta, languages (comma-separated subset) and mode override those
config fields per request; anything else about the run is fixed at startup.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

from fastapi import FastAPI, Response

from . import __version__
from .augment import AugmentationConfig, augmented_to_json_line
from .corpus import Corpus
from .dictionary import DictionaryPack
from .errors import ConfigError
from .stream import generate_batch, plan_epoch
from .subword import WordPieceVocab, encode_instance, encoding_to_obj

OVERRIDABLE = ("alpha", "beta", "languages", "mode")


@dataclass(slots=True)
class ServiceState:
    """Everything a request needs; immutable after startup."""

    corpus: Corpus
    pack: DictionaryPack
    config: AugmentationConfig
    batch_size: int
    vocab: WordPieceVocab | None = None
    max_len: int = 512

    @property
    def batches_per_epoch(self) -> int:
        return math.ceil(len(self.corpus) / self.batch_size)


class StateHolder:
    """Tracks the load lifecycle so routes can answer 503/500 before readiness."""

    def __init__(self):
        self.state: ServiceState | None = None
        self.error: str | None = None

    def set_ready(self, state: ServiceState) -> None:
        self.state = state
        self.error = None

    def set_failed(self, reason: str) -> None:
        self.state = None
        self.error = reason


def _json_response(obj, status_code: int = 200) -> Response:
    body = json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
    return Response(content=body, status_code=status_code, media_type="application/json")


def _error(status_code: int, message: str) -> Response:
    return _json_response({"error": message}, status_code)


def apply_overrides(config: AugmentationConfig, params: dict) -> AugmentationConfig:
    """Build the per-request config; only a fixed field subset may change."""
    unknown = set(params) - set(OVERRIDABLE)
    if unknown:
        raise ConfigError(f"overrides {sorted(unknown)} not permitted")
    changes: dict = {}
    for name in ("alpha", "beta"):
        if name in params:
            try:
                value = float(params[name])
            except ValueError:
                raise ConfigError(f"{name} must be a number") from None
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
            changes[name] = value
    if "languages" in params:
        requested = tuple(lang for lang in params["languages"].split(",") if lang)
        if not requested:
            raise ConfigError("languages override must name at least one language")
        outside = [lang for lang in requested if lang not in config.languages]
        if outside:
            raise ConfigError(f"languages {outside} not in the configured set")
        if len(set(requested)) != len(requested):
            raise ConfigError("languages override contains duplicates")
        changes["languages"] = requested
    if "mode" in params:
        if params["mode"] not in ("dynamic", "static"):
            raise ConfigError(f"mode must be dynamic or static, got {params['mode']!r}")
        changes["mode"] = params["mode"]
    return replace(config, **changes) if changes else config


def create_app(holder: StateHolder) -> FastAPI:
    app = FastAPI(title="csaug batch server", version=__version__)

    def _state_or_response() -> ServiceState | Response:
        if holder.error is not None:
            return _error(500, f"load failed: {holder.error}")
        if holder.state is None:
            return _error(503, "loading")
        return holder.state

    @app.get("/healthz")
    def healthz():
        if holder.error is not None:
            return _json_response({"status": "error", "reason": holder.error}, 500)
        if holder.state is None:
            return _json_response({"status": "loading"}, 503)
        return _json_response({"status": "ok"})

    @app.get("/meta")
    def meta():
        state = _state_or_response()
        if isinstance(state, Response):
            return state
        config = state.config
        return _json_response(
            {
                "version": __version__,
                "n_instances": len(state.corpus),
                "batch_size": state.batch_size,
                "batches_per_epoch": state.batches_per_epoch,
                "source_lang": state.pack.source_lang,
                "languages": list(config.languages),
                "config": {
                    "alpha": config.alpha,
                    "beta": config.beta,
                    "seed": config.seed,
                    "mode": config.mode,
                    "oov_policy": config.oov_policy,
                    "oov_max_attempts": config.oov_max_attempts,
                    "multiword_policy": config.multiword_policy,
                    "case_policy": config.case_policy,
                    "shuffle": config.shuffle,
                },
                "encodings": state.vocab is not None,
            }
        )

    @app.get("/epochs/{epoch}/batches/{index}")
    def batch(epoch: int, index: int, alpha: str | None = None, beta: str | None = None,
              languages: str | None = None, mode: str | None = None):
        state = _state_or_response()
        if isinstance(state, Response):
            return state
        if epoch < 0:
            return _error(404, f"epoch {epoch} out of range")
        params = {
            name: value
            for name, value in (
                ("alpha", alpha), ("beta", beta), ("languages", languages), ("mode", mode)
            )
            if value is not None
        }
        try:
            config = apply_overrides(state.config, params)
        except ConfigError as exc:
            return _error(422, str(exc))
        specs = plan_epoch(state.corpus, state.batch_size, epoch, config)
        if not 0 <= index < len(specs):
            return _error(404, f"batch {index} out of range (epoch has {len(specs)} batches)")
        batch_lines = []
        for aug in generate_batch(specs[index], state.corpus, state.pack, config):
            line = augmented_to_json_line(aug)
            if state.vocab is not None:
                encoding = encode_instance(aug.instance, state.vocab, state.max_len)
                embedded = encoding_to_obj(encoding, aug.instance.id, state.vocab)
                del embedded["id"]  # redundant with the element's own id
                obj = json.loads(line)
                obj["encoding"] = embedded
                line = json.dumps(obj, ensure_ascii=False, separators=(",", ":"))
            batch_lines.append(line)
        body = "[" + ",".join(batch_lines) + "]"
        return Response(content=body, media_type="application/json")

    return app
