"""Masked-LM link scorer: fine-tuning and label-word scoring.

The model fills the [MASK] slot of a serialized link sample; only the two
label words compete. Training minimizes cross-entropy of the gold label
word at the mask position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import BertConfig, BertForMaskedLM

from .config import SIZE_PRESETS, MLMFinetuneConfig
from .data import read_samples
from .vocab import WordVocab

VOCAB_FILE = "vocab.json"
TRAINING_FILE = "training.json"


@dataclass
class MLMScorer:
    model: BertForMaskedLM
    vocab: WordVocab
    label_ids: tuple[int, int]
    max_seq_len: int

    def score_sequences(self, sequences: list[str]) -> list[list[float]]:
        """(related, unrelated) label-word logits at the mask position."""
        if not sequences:
            return []
        self.model.eval()
        ids, mask_positions, attention = _encode_batch(self.vocab, sequences, self.max_seq_len)
        with torch.no_grad():
            logits = self.model(input_ids=ids, attention_mask=attention).logits
        rows = torch.arange(len(sequences))
        at_mask = logits[rows, mask_positions]
        related = at_mask[:, self.label_ids[0]]
        unrelated = at_mask[:, self.label_ids[1]]
        return [[float(r), float(u)] for r, u in zip(related, unrelated)]


def _encode_batch(vocab: WordVocab, texts: list[str],
                  max_len: int) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    encoded = [vocab.encode(t, max_len=max_len) for t in texts]
    width = max(len(e) for e in encoded)
    ids = torch.full((len(encoded), width), vocab.pad_id, dtype=torch.long)
    attention = torch.zeros((len(encoded), width), dtype=torch.long)
    mask_positions = torch.zeros(len(encoded), dtype=torch.long)
    for i, row in enumerate(encoded):
        ids[i, : len(row)] = torch.tensor(row, dtype=torch.long)
        attention[i, : len(row)] = 1
        if vocab.mask_id not in row:
            raise ValueError(f"sequence {i} lost its [MASK] slot (too long?): {texts[i]!r}")
        mask_positions[i] = row.index(vocab.mask_id)
    return ids, mask_positions, attention


def build_mlm(vocab: WordVocab, cfg: MLMFinetuneConfig) -> BertForMaskedLM:
    preset = SIZE_PRESETS.get(cfg.base_checkpoint)
    if preset is None:
        return BertForMaskedLM.from_pretrained(cfg.base_checkpoint)
    # Untied embeddings and a wide initializer keep the mask-slot state
    # context-sensitive from step one; defaults are tuned for fast overfit.
    bert_cfg = BertConfig(
        vocab_size=len(vocab),
        hidden_size=preset["hidden"],
        num_hidden_layers=preset["layers"],
        num_attention_heads=preset["heads"],
        intermediate_size=preset["ff"],
        max_position_embeddings=max(cfg.max_seq_len, 64),
        pad_token_id=vocab.pad_id,
        tie_word_embeddings=False,
        initializer_range=cfg.initializer_range,
        hidden_dropout_prob=cfg.dropout,
        attention_probs_dropout_prob=cfg.dropout,
    )
    return BertForMaskedLM(bert_cfg)


def _batches(n: int, batch_size: int):
    step = n if batch_size <= 0 else batch_size
    for start in range(0, n, step):
        yield start, min(start + step, n)


def finetune_mlm(samples_path: str | Path, cfg: MLMFinetuneConfig,
                 outdir: str | Path) -> MLMScorer:
    """Train on a sampler export; saves checkpoint, vocab, and loss curve."""
    rows = read_samples(samples_path)
    torch.manual_seed(cfg.seed)
    vocab = WordVocab.build((r.text for r in rows), extra_words=cfg.label_words)
    label_ids = tuple(vocab.single_token_id(w) for w in cfg.label_words)
    model = build_mlm(vocab, cfg)

    ids, mask_positions, attention = _encode_batch(vocab, [r.text for r in rows],
                                                   cfg.max_seq_len)
    gold = torch.tensor([label_ids[0] if r.label == "related" else label_ids[1] for r in rows])
    labels = torch.full_like(ids, -100)
    labels[torch.arange(len(rows)), mask_positions] = gold

    # The vocabulary decoder trains hot (it is the per-sample discriminator);
    # the encoder body trains gently to stay stable over few steps.
    head_params, body_params = [], []
    for name, param in model.named_parameters():
        if "decoder" in name or name == "cls.predictions.bias":
            head_params.append(param)
        else:
            body_params.append(param)
    optimizer = torch.optim.AdamW(
        [{"params": head_params, "lr": cfg.head_learning_rate},
         {"params": body_params, "lr": cfg.learning_rate}],
        weight_decay=cfg.weight_decay,
    )
    loss_curve: list[float] = []
    model.train()
    for _ in range(cfg.epochs):
        for start, end in _batches(len(rows), cfg.batch_size):
            optimizer.zero_grad()
            out = model(input_ids=ids[start:end], attention_mask=attention[start:end],
                        labels=labels[start:end])
            out.loss.backward()
            optimizer.step()
            loss_curve.append(float(out.loss.detach()))

    scorer = MLMScorer(model=model, vocab=vocab, label_ids=label_ids,
                       max_seq_len=cfg.max_seq_len)
    accuracy = same_set_accuracy(scorer, rows)

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(outdir)
    vocab.save(outdir / VOCAB_FILE)
    (outdir / TRAINING_FILE).write_text(json.dumps({
        "loss_curve": loss_curve,
        "same_set_accuracy": accuracy,
        "label_words": list(cfg.label_words),
        "max_seq_len": cfg.max_seq_len,
    }, indent=2) + "\n", encoding="utf-8")
    return scorer


def same_set_accuracy(scorer: MLMScorer, rows) -> float:
    logits = scorer.score_sequences([r.text for r in rows])
    correct = sum(
        1 for (related, unrelated), row in zip(logits, rows)
        if (related > unrelated) == (row.label == "related")
    )
    return correct / len(rows)


def load_mlm_scorer(checkpoint_dir: str | Path) -> MLMScorer:
    checkpoint_dir = Path(checkpoint_dir)
    vocab = WordVocab.load(checkpoint_dir / VOCAB_FILE)
    meta = json.loads((checkpoint_dir / TRAINING_FILE).read_text(encoding="utf-8"))
    model = BertForMaskedLM.from_pretrained(checkpoint_dir)
    label_ids = tuple(vocab.single_token_id(w) for w in meta["label_words"])
    return MLMScorer(model=model, vocab=vocab, label_ids=label_ids,
                     max_seq_len=meta["max_seq_len"])
