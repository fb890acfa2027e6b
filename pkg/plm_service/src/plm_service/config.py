"""Training and serving configuration, one JSON file for everything.

``base_checkpoint`` is either the name of a built-in size preset ("tiny",
"small") for training from random initialization, or a directory produced
by an earlier run to continue from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

SIZE_PRESETS = {
    "tiny": {"hidden": 64, "layers": 2, "heads": 2, "ff": 128},
    "small": {"hidden": 128, "layers": 2, "heads": 4, "ff": 256},
    "medium": {"hidden": 192, "layers": 2, "heads": 4, "ff": 384},
}


@dataclass(frozen=True)
class MLMFinetuneConfig:
    base_checkpoint: str = "medium"
    learning_rate: float = 5e-4  # encoder body
    head_learning_rate: float = 0.1  # vocabulary decoder
    weight_decay: float = 0.0
    epochs: int = 20
    batch_size: int = 0  # 0 = full batch
    label_words: tuple[str, str] = ("related", "unrelated")
    max_seq_len: int = 64
    initializer_range: float = 0.3
    dropout: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class Seq2SeqConfig:
    base_checkpoint: str = "tiny"
    learning_rate: float = 1e-4
    weight_decay: float = 0.01
    beam_size: int = 4
    denoise_epochs: int = 1
    finetune_epochs: int = 5
    batch_size: int = 0  # 0 = full batch
    corruption_rate: float = 0.15
    mean_span_length: int = 3
    max_input_len: int = 96
    max_target_len: int = 64
    special_tokens: tuple[str, ...] = ("<HEAD>", "<TAIL>", "<SEP>")
    seed: int = 0


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8301
    scorer_dir: str | None = None
    verbalizer_dir: str | None = None
    mlm: MLMFinetuneConfig = field(default_factory=MLMFinetuneConfig)
    seq2seq: Seq2SeqConfig = field(default_factory=Seq2SeqConfig)


def _build(cls, obj: dict, context: str):
    allowed = {f for f in cls.__dataclass_fields__}
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown key(s) in {context}: {', '.join(sorted(unknown))}")
    kwargs = dict(obj)
    for name in ("label_words", "special_tokens"):
        if name in kwargs:
            kwargs[name] = tuple(kwargs[name])
    return cls(**kwargs)


def load_service_config(path: str | Path) -> ServiceConfig:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    mlm = _build(MLMFinetuneConfig, payload.pop("mlm", {}), "mlm")
    seq2seq = _build(Seq2SeqConfig, payload.pop("seq2seq", {}), "seq2seq")
    base = _build(ServiceConfig, {**payload, "mlm": mlm, "seq2seq": seq2seq}, "config")
    return base
