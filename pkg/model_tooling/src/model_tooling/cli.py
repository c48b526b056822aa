"""Command line for training, exporting, and serving.

Subcommands:
  finetune-embedder  - fine-tune a sentence encoder on ArgKP pairs
  finetune-matcher   - fine-tune the two-logit pair classifier
  export-embeddings  - encode a topic's arguments to embedding JSONL
  export-matches     - score all argument/key-point pairs to match JSONL
  eval-matcher       - micro precision of a classifier on labeled pairs
  serve              - run the /v1/embed + /v1/match endpoint
"""
from __future__ import annotations

import argparse
import sys

from .argkp import load_argument_texts, load_pairs
from .recipes import TrainingRecipe


def _add_data_flags(parser):
    parser.add_argument("--arguments", required=True)
    parser.add_argument("--key-points", dest="key_points", required=True)
    parser.add_argument("--labels", required=True)


def _add_recipe_flags(parser, default_base):
    parser.add_argument("--base-model", default=default_base)
    parser.add_argument("--loss", choices=["cosine-similarity", "contrastive"],
                        default="cosine-similarity")
    parser.add_argument("--epochs", type=int, default=1)
    parser.add_argument("--learning-rate", type=float, default=2e-5)
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--max-seq-length", type=int, default=128)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--output-dir", required=True)


def _recipe(args) -> TrainingRecipe:
    return TrainingRecipe(
        base_model=args.base_model, loss=args.loss, epochs=args.epochs,
        learning_rate=args.learning_rate, batch_size=args.batch_size,
        max_seq_length=args.max_seq_length, seed=args.seed,
        output_dir=args.output_dir,
    ).validate()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="model-tooling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finetune-embedder")
    _add_data_flags(p)
    _add_recipe_flags(p, "sentence-transformers/all-mpnet-base-v2")

    p = sub.add_parser("finetune-matcher")
    _add_data_flags(p)
    _add_recipe_flags(p, "bert-base-uncased")

    p = sub.add_parser("export-embeddings")
    p.add_argument("--encoder", required=True)
    p.add_argument("--arguments", required=True)
    p.add_argument("--topic", default=None, help="restrict to one topic text")
    p.add_argument("--output", required=True)
    p.add_argument("--batch-size", type=int, default=32)

    p = sub.add_parser("export-matches")
    p.add_argument("--classifier", required=True)
    _add_data_flags(p)
    p.add_argument("--output", required=True)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--scope", choices=["labels", "topic-pairs"], default="labels",
                   help="labels: the labeled (argument, key point) pairs; "
                        "topic-pairs: every ordered pair the toolkit's file "
                        "backend can query, catch-all sentinels included")

    p = sub.add_parser("eval-matcher")
    p.add_argument("--classifier", required=True)
    _add_data_flags(p)

    p = sub.add_parser("serve")
    p.add_argument("--encoder", default=None)
    p.add_argument("--classifier", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8400)

    args = parser.parse_args(argv)

    if args.command == "finetune-embedder":
        from .embedder import finetune_embedder
        pairs = load_pairs(args.arguments, args.key_points, args.labels)
        _, log = finetune_embedder(_recipe(args), pairs)
        print(f"saved encoder to {args.output_dir} after {log.steps} steps")
        return 0

    if args.command == "finetune-matcher":
        from .matcher import finetune_matcher
        pairs = load_pairs(args.arguments, args.key_points, args.labels)
        _, _, log = finetune_matcher(_recipe(args), pairs)
        print(f"saved classifier to {args.output_dir} after {log.steps} steps")
        return 0

    if args.command == "export-embeddings":
        from .embedder import export_embeddings, load_encoder
        texts = load_argument_texts(args.arguments, args.topic)
        model = load_encoder(args.encoder)
        count = export_embeddings(model, texts, args.output, args.batch_size)
        print(f"wrote {count} vectors -> {args.output}")
        return 0

    if args.command == "export-matches":
        from .argkp import toolkit_topic_pairs
        from .matcher import export_match_scores, load_classifier
        if args.scope == "labels":
            pairs = load_pairs(args.arguments, args.key_points, args.labels)
            texts = {p.argument_id: p.argument for p in pairs}
            texts.update({p.key_point_id: p.key_point for p in pairs})
            id_pairs = [(p.argument_id, p.key_point_id) for p in pairs]
        else:
            id_pairs, texts = toolkit_topic_pairs(args.arguments, args.key_points)
        tokenizer, model = load_classifier(args.classifier)
        count = export_match_scores(
            tokenizer, model, id_pairs, texts, args.output, args.batch_size,
        )
        print(f"wrote {count} scores -> {args.output}")
        return 0

    if args.command == "eval-matcher":
        from .matcher import load_classifier, micro_precision
        pairs = load_pairs(args.arguments, args.key_points, args.labels)
        tokenizer, model = load_classifier(args.classifier)
        value = micro_precision(tokenizer, model, pairs)
        print(f"micro precision over {len(pairs)} pairs: {value:.4f}")
        return 0

    if args.command == "serve":
        import uvicorn

        from .server import build_app
        app = build_app(args.encoder, args.classifier)
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
