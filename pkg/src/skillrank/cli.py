"""Pipeline driver: one subcommand per stage, files between stages.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import corpus as corpus_mod
from . import embedding as emb_mod
from . import idf as idf_mod
from . import model as model_mod
from . import rankeval
from . import weaklabel as wl_mod
from .ranker import SkillRanker

USAGE_ERROR = 1
DATA_ERROR = 2

_DATA_ERRORS = (
    corpus_mod.CorpusError,
    emb_mod.EmbeddingError,
    wl_mod.WeakLabelError,
    model_mod.ModelError,
    idf_mod.IdfError,
    rankeval.EvalError,
    OSError,
    json.JSONDecodeError,
    ValueError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skillrank",
                     description="Skill-importance ranking pipeline")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    p = sub.add_parser("ingest", help="clean, dedup and merge a raw corpus")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("split", help="deterministic 70:10:20 split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-dev", required=True)
    p.add_argument("--out-test", required=True)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("--families", type=int, required=True)
    p.add_argument("--synonyms", type=int, required=True)
    p.add_argument("--skills", type=int, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--generic", nargs="*",
                   default=list(corpus_mod.DEFAULT_GENERIC_SKILLS),
                   help="skills injected into every title")
    p.add_argument("--out", required=True)

    p = sub.add_parser("embed", help="embed corpus titles with the fallback embedder")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dim", type=int, default=emb_mod.DEFAULT_DIMENSION)

    p = sub.add_parser("weaklabel", help="build weak labels from neighborhoods")
    p.add_argument("--train", required=True)
    p.add_argument("--emb", required=True)
    p.add_argument("--threshold", type=float, default=emb_mod.DEFAULT_THRESHOLD)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train the sigmoid linear head")
    p.add_argument("--labels", required=True)
    p.add_argument("--emb", required=True)
    p.add_argument("--dev", help="dev corpus for early stopping (optional)")
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch", type=int, default=32)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--k", type=int, default=rankeval.DEFAULT_K)
    p.add_argument("--loss", choices=["bce", "mse"], default="bce")

    p = sub.add_parser("idf", help="compute per-skill IDF from training titles")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--log-base", default="e")
    p.add_argument("--smoothing", action="store_true")

    p = sub.add_parser("rank", help="rank skills for one title")
    p.add_argument("--model", required=True)
    p.add_argument("--idf")
    p.add_argument("--no-idf", action="store_true")
    p.add_argument("--emb", help="embedding store for known titles (optional)")
    p.add_argument("--title", required=True)
    p.add_argument("--top", type=int, default=rankeval.DEFAULT_K)

    p = sub.add_parser("eval", help="MAP@k of a checkpoint on a test corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--emb", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--k", type=int, default=rankeval.DEFAULT_K)
    p.add_argument("--idf", help="boost with this IDF table before ranking")
    p.add_argument("--report", help="write the full JSON report here")

    p = sub.add_parser("serve", help="HTTP ranking service")
    p.add_argument("--model", required=True)
    p.add_argument("--idf")
    p.add_argument("--emb")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)

    return parser


def _parse_log_base(raw: str):
    if raw == "e":
        return "e"
    return float(raw)


def _cmd_ingest(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as f:
        result = corpus_mod.parse_corpus(f)
    corpus_mod.write_corpus(result.records, args.out)
    print(
        f"ingested {len(result.records)} records "
        f"({result.merged_duplicates} merged, "
        f"{result.rejected_empty_skills} rejected for empty skills)",
        file=sys.stderr,
    )
    return 0


def _cmd_split(args) -> int:
    records = corpus_mod.read_corpus(args.infile)
    split = corpus_mod.split_dataset(records, args.seed)
    corpus_mod.write_corpus(split.train, args.out_train)
    corpus_mod.write_corpus(split.dev, args.out_dev)
    corpus_mod.write_corpus(split.test, args.out_test)
    print(
        f"split {len(records)} records into "
        f"{len(split.train)}/{len(split.dev)}/{len(split.test)}",
        file=sys.stderr,
    )
    return 0


def _cmd_synth(args) -> int:
    records = corpus_mod.generate_synthetic_corpus(
        families=args.families,
        synonyms_per_family=args.synonyms,
        skills=args.skills,
        seed=args.seed,
        generic_skills=args.generic,
    )
    corpus_mod.write_corpus(records, args.out)
    print(f"generated {len(records)} records", file=sys.stderr)
    return 0


def _cmd_embed(args) -> int:
    records = corpus_mod.read_corpus(args.infile)
    store = emb_mod.build_fallback_store((r.title for r in records), args.dim)
    emb_mod.save_embedding_store(store, args.out)
    print(f"embedded {len(store)} titles at dimension {args.dim}", file=sys.stderr)
    return 0


def _cmd_weaklabel(args) -> int:
    train = corpus_mod.read_corpus(args.train)
    store = emb_mod.load_embedding_store(args.emb)
    config = emb_mod.NeighborhoodConfig(threshold=args.threshold)
    labels = wl_mod.build_weak_labels(train, store, config)
    wl_mod.save_weak_labels(labels, args.out)
    print(f"labeled {len(labels.labels)} titles", file=sys.stderr)
    return 0


def _cmd_train(args) -> int:
    labels = wl_mod.load_weak_labels(args.labels)
    store = emb_mod.load_embedding_store(args.emb)
    dev = corpus_mod.read_corpus(args.dev) if args.dev else []
    config = model_mod.TrainConfig(
        learning_rate=args.lr,
        epochs=args.epochs,
        batch_size=args.batch,
        seed=args.seed,
        patience=args.patience,
        eval_k=args.k,
        loss=args.loss,
    )
    head, history = model_mod.train_head(labels, dev, store, config)
    model_mod.save_checkpoint(head, args.out)
    last = history[-1]
    dev_part = f", dev MAP@{args.k} {last.dev_map:.4f}" if last.dev_map is not None else ""
    print(
        f"trained {len(head.skill_order)} skill nodes over {len(history)} epochs "
        f"(final loss {last.loss:.6f}{dev_part})",
        file=sys.stderr,
    )
    return 0


def _cmd_idf(args) -> int:
    train = corpus_mod.read_corpus(args.train)
    table = idf_mod.compute_idf(train, log_base=_parse_log_base(args.log_base),
                                smoothing=args.smoothing)
    idf_mod.save_idf(table, args.out)
    print(f"computed IDF for {len(table.idf)} skills over {table.n_titles} titles",
          file=sys.stderr)
    return 0


def _load_ranker(model_path, idf_path, emb_path) -> SkillRanker:
    head = model_mod.load_checkpoint(model_path)
    table = idf_mod.load_idf(idf_path) if idf_path else None
    store = emb_mod.load_embedding_store(emb_path) if emb_path else None
    return SkillRanker(head=head, idf_table=table, store=store)


def _cmd_rank(args, parser) -> int:
    use_idf = not args.no_idf
    if use_idf and not args.idf:
        parser.error("rank needs --idf FILE unless --no-idf is given")
    ranker = _load_ranker(args.model, args.idf, args.emb)
    _, ranked = ranker.rank(args.title, args.top, use_idf=use_idf)
    for skill, score in ranked.entries:
        print(f"{skill}\t{score}")
    return 0


def _cmd_eval(args) -> int:
    ranker = _load_ranker(args.model, args.idf, args.emb)
    test = corpus_mod.read_corpus(args.test)
    use_idf = args.idf is not None

    def predictor(record):
        scores = ranker.scores(record.title, use_idf=use_idf)
        return rankeval.rank_skills(scores, ranker.head.skill_order, args.k)

    report = rankeval.mean_average_precision(test, predictor, args.k)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(report.to_json() + "\n")
    print(report.mean_ap)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    ranker = _load_ranker(args.model, args.idf, args.emb)  # fail fast
    app = create_app(ranker)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "ingest": _cmd_ingest,
        "split": _cmd_split,
        "synth": _cmd_synth,
        "embed": _cmd_embed,
        "weaklabel": _cmd_weaklabel,
        "train": _cmd_train,
        "idf": _cmd_idf,
        "eval": _cmd_eval,
        "serve": _cmd_serve,
    }
    try:
        if args.command == "rank":
            return _cmd_rank(args, parser)
        return handlers[args.command](args)
    except SystemExit:
        raise
    except _DATA_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
