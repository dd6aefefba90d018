"""Command line interface: ``emopattern <command> ...``."""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import _kernels, categorize as cat, cograph, corpus, embclust, evaluation, evm, patterns, weighting
from .config import ConfigError, load_config
from .pipeline import StageError, evaluate_model, parse_stages, run, write_predictions

EXIT_OK, EXIT_VALIDATION, EXIT_STAGE = 0, 2, 3

logger = logging.getLogger("emopattern")


def cmd_ingest(args):
    emotions = args.emotions.split(",") if args.emotions else None
    hmap = corpus.load_hashtag_map(args.hashtags, emotions) if args.hashtags else None
    c = corpus.ingest(corpus.read_records(args.input), hmap, emotions)
    corpus.save_corpus(c, args.out)
    print(json.dumps({"documents": len(c), "labels": dict(sorted(c.label_counts.items()))}, sort_keys=True))


def cmd_split(args):
    c = corpus.load_corpus(args.corpus)
    train, test = corpus.split(c, args.test_fraction, args.seed)
    corpus.save_corpus(train, args.train)
    corpus.save_corpus(test, args.test)


def cmd_build_graph(args):
    g = cograph.build_graph(corpus.load_corpus(args.input), args.window)
    if g.freq:
        g = cograph.normalize_weights(g)
    cograph.save_graph(g, args.out)


def cmd_aggregate(args):
    subj = cograph.load_graph(args.subjective)
    obj = cograph.load_graph(args.objective)
    subj = subj if subj.weight is not None else cograph.normalize_weights(subj)
    obj = obj if obj.weight is not None else cograph.normalize_weights(obj)
    cograph.save_graph(cograph.prune(cograph.aggregate(subj, obj), args.phi_w), args.out)


def cmd_categorize(args):
    m = cat.adjacency(cograph.load_graph(args.graph))
    scores = cat.score_nodes(m, args.tol, args.max_iter)
    sets = cat.categorize(scores, args.phi_eig, args.phi_cl)
    cat.save_token_sets(sets, scores, args.out)


def cmd_cluster(args):
    table = embclust.load_embeddings(args.embeddings)
    if args.corpus:
        table = embclust.reduce_vocab(table, corpus.load_corpus(args.corpus), args.top_n)
    k = args.k if args.k else embclust.default_k(len(table))
    assignment = embclust.cluster(table, k)
    embclust.save_clusters(assignment, args.out)
    out = {"words": len(table), "k": k}
    if args.ref:
        ref = embclust.load_reference(args.ref)
        out["homogeneity"] = embclust.homogeneity(assignment, ref)
        out["completeness"] = embclust.completeness(assignment, ref)
    print(json.dumps(out, sort_keys=True))


def cmd_extract(args):
    docs = corpus.load_corpus(args.corpus)
    sets = cat.load_token_sets(args.tokens)
    templates = patterns.parse_templates(args.templates)
    if args.clusters:
        clusters = embclust.load_clusters(args.clusters).assignment
        found = patterns.extract_enriched(docs, sets, clusters, templates, args.min_freq)
    else:
        found = patterns.extract_basic(docs, sets, templates, args.min_freq)
    patterns.save_lexicon(found, args.out)


def cmd_weigh(args):
    kinds = None if args.kind == "all" else {args.kind}
    lex = patterns.load_lexicon(args.lexicon, kinds)
    docs = corpus.load_corpus(args.corpus)
    emotions = args.emotions.split(",") if args.emotions else sorted({d.label for d in docs if d.label})
    counts = weighting.count(lex, docs, emotions)
    evm.save_model(evm.EvmModel.from_counts(counts), args.out)


def cmd_classify(args):
    model = evm.load_model(args.model, args.fallback)
    write_predictions(corpus.load_corpus(args.input), model, args.out)


def cmd_evaluate(args):
    model = evm.load_model(args.model, args.fallback)
    recs = evaluate_model(model, corpus.load_corpus(args.test))
    with open(args.report, "w", encoding="utf-8") as fh:
        for r in recs:
            fh.write(json.dumps(r, sort_keys=True) + "\n")
    summary = next(r for r in recs if r["type"] == "summary")
    print(json.dumps(summary, sort_keys=True))


def cmd_coverage(args):
    lex = patterns.load_lexicon(args.lexicon, {args.kind} if args.kind != "all" else None)
    print(evaluation.coverage(corpus.load_corpus(args.corpus), lex))


def cmd_run(args):
    cfg = load_config(args.config, args.set or ())
    try:
        stages = parse_stages(args.stages)
    except ValueError as exc:
        raise ConfigError([str(exc)]) from None
    manifest = run(cfg, stages, threads=args.threads, force=args.force)
    for name, entry in manifest["stages"].items():
        print(f"{name}\t{entry['status']}")


def cmd_toy(args):
    from importlib import resources
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    src = resources.files("emopattern") / "data" / "toy"
    for item in sorted(src.iterdir(), key=lambda p: p.name):
        if item.is_file():
            (out / item.name).write_bytes(item.read_bytes())
    print(out / "toy.cfg")


def build_parser():
    p = argparse.ArgumentParser(prog="emopattern", description=__doc__)
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--backend", choices=_kernels.BACKENDS, help="kernel backend (default: env or numba)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="normalize raw records and label them from trailing hashtags")
    s.add_argument("--input", required=True)
    s.add_argument("--hashtags")
    s.add_argument("--emotions", help="comma-separated label set")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("split", help="stratified train/test split")
    s.add_argument("--corpus", required=True)
    s.add_argument("--test-fraction", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--train", required=True)
    s.add_argument("--test", required=True)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("build-graph", help="co-occurrence graph of a corpus")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--window", type=int, default=2)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_build_graph)

    s = sub.add_parser("aggregate", help="subtract the objective graph and prune")
    s.add_argument("--subjective", required=True)
    s.add_argument("--objective", required=True)
    s.add_argument("--phi-w", type=float, default=0.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_aggregate)

    s = sub.add_parser("categorize", help="split graph tokens into connector and subject words")
    s.add_argument("--graph", required=True)
    s.add_argument("--phi-eig", default="p90")
    s.add_argument("--phi-cl", default="p90")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_categorize)

    s = sub.add_parser("cluster", help="Ward-cluster word embeddings")
    s.add_argument("--embeddings", required=True)
    s.add_argument("--corpus")
    s.add_argument("--top-n", type=int, default=20000)
    s.add_argument("--k", type=int)
    s.add_argument("--ref")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_cluster)

    s = sub.add_parser("extract", help="extract basic (or, with --clusters, enriched) patterns")
    s.add_argument("--corpus", required=True)
    s.add_argument("--tokens", required=True)
    s.add_argument("--clusters")
    s.add_argument("--templates", default="default")
    s.add_argument("--min-freq", type=int, default=10)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("weigh", help="pf-ief rank model from a lexicon and labeled corpus")
    s.add_argument("--lexicon", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--emotions")
    s.add_argument("--kind", choices=("basic", "enriched", "all"), default="all")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_weigh)

    s = sub.add_parser("classify", help="classify documents with a model")
    s.add_argument("--model", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--fallback", help="emotion for documents without matches (default: abstain)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("evaluate", help="F1 report of a model on a labeled corpus")
    s.add_argument("--model", required=True)
    s.add_argument("--test", required=True)
    s.add_argument("--fallback")
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("coverage", help="fraction of documents matching any lexicon pattern")
    s.add_argument("--lexicon", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--kind", choices=("basic", "enriched", "all"), default="all")
    s.set_defaults(func=cmd_coverage)

    s = sub.add_parser("run", help="run the configured pipeline")
    s.add_argument("--config", required=True)
    s.add_argument("--stages", help="comma-separated subset of stages")
    s.add_argument("--threads", type=int)
    s.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    s.add_argument("--force", action="store_true", help="ignore cached stage outputs")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("toy", help="copy the bundled toy corpus and config to a directory")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_toy)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    if args.backend:
        import os
        os.environ["EMOPATTERN_BACKEND"] = args.backend
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAGE if args.command == "run" else EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
