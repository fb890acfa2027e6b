"""Entry points: train the two models, serve the protocol."""

from __future__ import annotations

import argparse

from .config import MLMFinetuneConfig, Seq2SeqConfig, load_service_config
from .mlm import finetune_mlm
from .seq2seq import denoise_then_finetune_seq2seq
from .service import serve


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plm-service")
    sub = parser.add_subparsers(dest="command", required=True)

    train_mlm = sub.add_parser("train-mlm", help="fine-tune the masked-LM link scorer")
    train_mlm.add_argument("--samples", required=True, help="sampler export JSONL")
    train_mlm.add_argument("--out", required=True, help="checkpoint output directory")
    train_mlm.add_argument("--config", default=None, help="service config JSON")

    train_s2s = sub.add_parser("train-seq2seq", help="denoise then fine-tune the verbalizer")
    train_s2s.add_argument("--corpus", required=True, help="corpus JSONL for denoising")
    train_s2s.add_argument("--quintuples", required=True, help="quintuple export JSONL")
    train_s2s.add_argument("--out", required=True, help="checkpoint output directory")
    train_s2s.add_argument("--config", default=None, help="service config JSON")

    serve_cmd = sub.add_parser("serve", help="serve /score and /verbalize")
    serve_cmd.add_argument("--config", default=None, help="service config JSON")
    serve_cmd.add_argument("--port", type=int, default=None)
    serve_cmd.add_argument("--scorer-dir", default=None)
    serve_cmd.add_argument("--verbalizer-dir", default=None)

    args = parser.parse_args(argv)
    cfg = load_service_config(args.config) if args.config else None

    if args.command == "train-mlm":
        mlm_cfg = cfg.mlm if cfg else MLMFinetuneConfig()
        scorer = finetune_mlm(args.samples, mlm_cfg, args.out)
        from .data import read_samples
        from .mlm import same_set_accuracy

        accuracy = same_set_accuracy(scorer, read_samples(args.samples))
        print(f"checkpoint written to {args.out} (same-set accuracy {accuracy:.3f})")
        return 0

    if args.command == "train-seq2seq":
        s2s_cfg = cfg.seq2seq if cfg else Seq2SeqConfig()
        denoise_then_finetune_seq2seq(args.corpus, args.quintuples, s2s_cfg, args.out)
        print(f"checkpoint written to {args.out}")
        return 0

    service_cfg = cfg if cfg else None
    serve(
        port=args.port or (service_cfg.port if service_cfg else 8301),
        host=service_cfg.host if service_cfg else "127.0.0.1",
        scorer_dir=args.scorer_dir or (service_cfg.scorer_dir if service_cfg else None),
        verbalizer_dir=args.verbalizer_dir
        or (service_cfg.verbalizer_dir if service_cfg else None),
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
