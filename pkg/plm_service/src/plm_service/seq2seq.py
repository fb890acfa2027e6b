"""Sequence-to-sequence verbalizer: span-corruption denoising, supervised
fine-tuning on quintuple (seq -> idea) pairs, and beam-search generation.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import T5Config, T5ForConditionalGeneration

from .config import SIZE_PRESETS, Seq2SeqConfig
from .data import read_corpus_sentences, read_quintuples
from .vocab import WordVocab, sentinel, tokenize

VOCAB_FILE = "vocab.json"
TRAINING_FILE = "training.json"


@dataclass
class Verbalizer:
    model: T5ForConditionalGeneration
    vocab: WordVocab
    beam_size: int
    max_input_len: int
    max_target_len: int

    def generate(self, seq_text: str, beam_size: int | None = None) -> str:
        self.model.eval()
        ids = torch.tensor([self.vocab.encode(seq_text, max_len=self.max_input_len)])
        with torch.no_grad():
            out = self.model.generate(
                input_ids=ids,
                attention_mask=torch.ones_like(ids),
                num_beams=beam_size or self.beam_size,
                max_new_tokens=self.max_target_len,
                early_stopping=True,
            )
        return self.vocab.decode(out[0].tolist())


def build_seq2seq(vocab: WordVocab, cfg: Seq2SeqConfig) -> T5ForConditionalGeneration:
    preset = SIZE_PRESETS.get(cfg.base_checkpoint)
    if preset is None:
        return T5ForConditionalGeneration.from_pretrained(cfg.base_checkpoint)
    t5_cfg = T5Config(
        vocab_size=len(vocab),
        d_model=preset["hidden"],
        d_kv=preset["hidden"] // preset["heads"],
        d_ff=preset["ff"],
        num_layers=preset["layers"],
        num_heads=preset["heads"],
        pad_token_id=vocab.pad_id,
        eos_token_id=vocab.eos_id,
        decoder_start_token_id=vocab.pad_id,
    )
    return T5ForConditionalGeneration(t5_cfg)


def span_corrupt(tokens: list[str], rng: random.Random, rate: float,
                 mean_span: int) -> tuple[list[str], list[str]]:
    """T5-style corruption: drop spans behind sentinels; target restores them."""
    if not tokens:
        return [], []
    n_to_mask = max(1, round(len(tokens) * rate))
    masked: set[int] = set()
    while len(masked) < n_to_mask:
        span = max(1, min(round(rng.gauss(mean_span, 1)), n_to_mask - len(masked)))
        start = rng.randrange(len(tokens))
        masked.update(range(start, min(start + span, len(tokens))))
    source: list[str] = []
    target: list[str] = []
    sentinel_index = 0
    inside_span = False
    for i, tok in enumerate(tokens):
        if i in masked:
            if not inside_span:
                source.append(sentinel(sentinel_index))
                target.append(sentinel(sentinel_index))
                sentinel_index += 1
                inside_span = True
            target.append(tok)
        else:
            source.append(tok)
            inside_span = False
    target.append(sentinel(sentinel_index))
    return source, target


def _pad_batch(rows: list[list[int]], pad_id: int) -> tuple[torch.Tensor, torch.Tensor]:
    width = max(len(r) for r in rows)
    ids = torch.full((len(rows), width), pad_id, dtype=torch.long)
    attention = torch.zeros((len(rows), width), dtype=torch.long)
    for i, row in enumerate(rows):
        ids[i, : len(row)] = torch.tensor(row, dtype=torch.long)
        attention[i, : len(row)] = 1
    return ids, attention


def _label_batch(rows: list[list[int]], pad_id: int) -> torch.Tensor:
    width = max(len(r) for r in rows)
    labels = torch.full((len(rows), width), -100, dtype=torch.long)
    for i, row in enumerate(rows):
        labels[i, : len(row)] = torch.tensor(row, dtype=torch.long)
    return labels


def _train_pairs(model, vocab: WordVocab, pairs: list[tuple[list[int], list[int]]],
                 cfg: Seq2SeqConfig, epochs: int) -> list[float]:
    """One optimizer step per (epoch, batch); returns per-step losses."""
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate,
                                  weight_decay=cfg.weight_decay)
    step = len(pairs) if cfg.batch_size <= 0 else cfg.batch_size
    losses: list[float] = []
    model.train()
    for _ in range(epochs):
        for start in range(0, len(pairs), step):
            chunk = pairs[start : start + step]
            ids, attention = _pad_batch([src for src, _ in chunk], vocab.pad_id)
            labels = _label_batch([tgt for _, tgt in chunk], vocab.pad_id)
            optimizer.zero_grad()
            out = model(input_ids=ids, attention_mask=attention, labels=labels)
            out.loss.backward()
            optimizer.step()
            losses.append(float(out.loss.detach()))
    return losses


def eval_loss(model, vocab: WordVocab, pairs: list[tuple[list[int], list[int]]]) -> float:
    model.eval()
    ids, attention = _pad_batch([src for src, _ in pairs], vocab.pad_id)
    labels = _label_batch([tgt for _, tgt in pairs], vocab.pad_id)
    with torch.no_grad():
        return float(model(input_ids=ids, attention_mask=attention, labels=labels).loss)


def _encode_pair(vocab: WordVocab, source: str, target: str,
                 cfg: Seq2SeqConfig) -> tuple[list[int], list[int]]:
    src = vocab.encode(source, max_len=cfg.max_input_len)
    tgt = vocab.encode(target, max_len=cfg.max_target_len - 1) + [vocab.eos_id]
    return src, tgt


def denoise_then_finetune_seq2seq(corpus_path: str | Path, quintuples_path: str | Path,
                                  cfg: Seq2SeqConfig, outdir: str | Path,
                                  denoise_sentence_limit: int | None = 2000) -> Verbalizer:
    """Stage 1: denoising on corpus sentences. Stage 2: MLE of idea given seq.

    Saves the checkpoint, the vocabulary, and both stages' loss curves plus
    the stage-2 evaluation losses recorded after every optimizer step.
    """
    sentences = read_corpus_sentences(corpus_path, limit=denoise_sentence_limit)
    quintuples = read_quintuples(quintuples_path)
    rng = random.Random(cfg.seed)
    torch.manual_seed(cfg.seed)

    vocab = WordVocab.build(
        [q.seq for q in quintuples] + [q.idea for q in quintuples] + sentences,
        extra_words=cfg.special_tokens,
    )
    for marker in cfg.special_tokens:
        vocab.single_token_id(marker)  # must be registered before training
    model = build_seq2seq(vocab, cfg)

    denoise_pairs = []
    for sent in sentences:
        source, target = span_corrupt(tokenize(sent), rng, cfg.corruption_rate,
                                      cfg.mean_span_length)
        if source and target:
            denoise_pairs.append((
                [vocab.id_of(t) for t in source][: cfg.max_input_len],
                ([vocab.id_of(t) for t in target] + [vocab.eos_id])[: cfg.max_target_len],
            ))
    denoise_losses = _train_pairs(model, vocab, denoise_pairs, cfg, cfg.denoise_epochs)

    finetune_pairs = [_encode_pair(vocab, q.seq, q.idea, cfg) for q in quintuples]
    finetune_losses: list[float] = []
    eval_losses: list[float] = [eval_loss(model, vocab, finetune_pairs)]
    for _ in range(cfg.finetune_epochs):
        finetune_losses.extend(_train_pairs(model, vocab, finetune_pairs, cfg, 1))
        eval_losses.append(eval_loss(model, vocab, finetune_pairs))

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    model.save_pretrained(outdir)
    vocab.save(outdir / VOCAB_FILE)
    (outdir / TRAINING_FILE).write_text(json.dumps({
        "denoise_loss_curve": denoise_losses,
        "finetune_loss_curve": finetune_losses,
        "finetune_eval_losses": eval_losses,
        "beam_size": cfg.beam_size,
        "max_input_len": cfg.max_input_len,
        "max_target_len": cfg.max_target_len,
    }, indent=2) + "\n", encoding="utf-8")
    return Verbalizer(model=model, vocab=vocab, beam_size=cfg.beam_size,
                      max_input_len=cfg.max_input_len, max_target_len=cfg.max_target_len)


def load_verbalizer(checkpoint_dir: str | Path) -> Verbalizer:
    checkpoint_dir = Path(checkpoint_dir)
    vocab = WordVocab.load(checkpoint_dir / VOCAB_FILE)
    meta = json.loads((checkpoint_dir / TRAINING_FILE).read_text(encoding="utf-8"))
    model = T5ForConditionalGeneration.from_pretrained(checkpoint_dir)
    return Verbalizer(model=model, vocab=vocab, beam_size=meta["beam_size"],
                      max_input_len=meta["max_input_len"],
                      max_target_len=meta["max_target_len"])
