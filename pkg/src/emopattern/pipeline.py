"""End-to-end pipeline with content-hash stage caching.

A stage is skipped when its stamp (hash of its parameters and input file
contents) matches the one recorded in ``manifest.json`` and its outputs are
still on disk with the recorded hashes.
"""

import hashlib
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from . import _kernels, categorize as cat, cograph, corpus, embclust, evaluation, evm, patterns, weighting

logger = logging.getLogger(__name__)

STAGES = ("ingest", "graphs", "categorize", "cluster", "extract", "weigh", "classify", "evaluate")


class StageError(RuntimeError):
    pass


def file_hash(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class Stage:
    name: str
    inputs: dict      # path -> producing stage, or None for user files
    outputs: list
    params: dict
    func: object


class Layout:
    """Artifact paths inside the work directory."""

    def __init__(self, workdir):
        w = Path(workdir)
        self.root = w
        self.labeled = w / "corpus" / "labeled.jsonl"
        self.train = w / "corpus" / "train.jsonl"
        self.test = w / "corpus" / "test.jsonl"
        self.subjective = w / "corpus" / "subjective.jsonl"
        self.objective = w / "corpus" / "objective.jsonl"
        self.g_subj = w / "graphs" / "subjective.tsv"
        self.g_obj = w / "graphs" / "objective.tsv"
        self.g_emo = w / "graphs" / "emotion.tsv"
        self.tokens = w / "tokens.tsv"
        self.clusters = w / "clusters.tsv"
        self.cluster_report = w / "cluster_report.json"
        self.lexicon = w / "lexicon.tsv"
        self.model = w / "model.tsv"
        self.predictions = w / "predictions.tsv"
        self.report = w / "report.jsonl"
        self.manifest = w / "manifest.json"


# ---------------------------------------------------------------------------
# stage bodies
# ---------------------------------------------------------------------------

def _ingest(cfg, L):
    hmap = corpus.load_hashtag_map(cfg.hashtags, cfg.emotions) if cfg.hashtags else None
    labeled = corpus.ingest(corpus.read_records(cfg.labeled), hmap, cfg.emotions).labeled()
    counts = labeled.label_counts
    missing = [e for e in cfg.emotions if counts[e] == 0]
    if missing:
        logger.warning("no labeled documents for %s", ", ".join(missing))
    train, test = corpus.split(labeled, cfg.test_fraction, cfg.seed)
    objective = corpus.ingest(corpus.read_records(cfg.objective))
    if cfg.subjective is not None:
        subjective = corpus.ingest(corpus.read_records(cfg.subjective), hmap)
    else:
        subjective = train
    for c, p in ((labeled, L.labeled), (train, L.train), (test, L.test),
                 (subjective, L.subjective), (objective, L.objective)):
        corpus.save_corpus(c, p)
    logger.info("ingest: %d labeled (%d train / %d test), %d objective",
                len(labeled), len(train), len(test), len(objective))


def _graphs(cfg, L):
    subj = cograph.normalize_weights(cograph.build_graph(corpus.load_corpus(L.subjective), cfg.window))
    obj = cograph.normalize_weights(cograph.build_graph(corpus.load_corpus(L.objective), cfg.window))
    emo = cograph.prune(cograph.aggregate(subj, obj), cfg.phi_w)
    cograph.save_graph(subj, L.g_subj)
    cograph.save_graph(obj, L.g_obj)
    cograph.save_graph(emo, L.g_emo)
    logger.info("graphs: emotion graph has %d nodes, %d arcs", len(emo.nodes), len(emo))


def _categorize(cfg, L):
    g = cograph.load_graph(L.g_emo)
    m = cat.adjacency(g)
    scores = cat.score_nodes(m, cfg.tol, cfg.max_iter)
    sets = cat.categorize(scores, cfg.phi_eig, cfg.phi_cl)
    cat.save_token_sets(sets, scores, L.tokens)
    logger.info("categorize: %d connector, %d subject words", len(sets.connector), len(sets.subject))


def _cluster(cfg, L):
    table = embclust.load_embeddings(cfg.embeddings)
    table = embclust.reduce_vocab(table, corpus.load_corpus(L.train), cfg.top_n)
    k = embclust.default_k(len(table)) if cfg.k == "auto" else min(int(cfg.k), len(table))
    assignment = embclust.cluster(table, k)
    embclust.save_clusters(assignment, L.clusters)
    report = {"words": len(table), "k": k}
    if cfg.reference is not None:
        ref = embclust.load_reference(cfg.reference)
        shared = [w for w in assignment.assignment if w in ref]
        if shared:
            report["homogeneity"] = embclust.homogeneity(assignment, ref)
            report["completeness"] = embclust.completeness(assignment, ref)
            report["reference_words"] = len(shared)
    L.cluster_report.write_text(json.dumps(report, sort_keys=True) + "\n", encoding="utf-8")
    logger.info("cluster: %s", report)


def _extract(cfg, L):
    sets = cat.load_token_sets(L.tokens)
    templates = patterns.parse_templates(cfg.templates)
    found = patterns.extract_basic(corpus.load_corpus(L.subjective), sets, templates, cfg.min_freq)
    if cfg.embeddings is not None:
        clusters = embclust.load_clusters(L.clusters).assignment
        found += patterns.extract_enriched(corpus.load_corpus(L.train), sets, clusters, templates,
                                           cfg.enriched_min_freq)
    patterns.save_lexicon(found, L.lexicon)
    logger.info("extract: %d patterns", len(found))


def _pattern_kinds(cfg):
    return {"basic": {patterns.BASIC}, "enriched": {patterns.ENRICHED},
            "all": {patterns.BASIC, patterns.ENRICHED}}[cfg.evm_patterns]


def _weigh(cfg, L):
    lex = patterns.load_lexicon(L.lexicon, _pattern_kinds(cfg))
    if not lex:
        raise StageError("lexicon holds no patterns of the selected kind; lower min_freq or thresholds")
    counts = weighting.count(lex, corpus.load_corpus(L.train), cfg.emotions)
    evm.save_model(evm.EvmModel.from_counts(counts), L.model)


def write_predictions(docs, model, path):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            label, sc = evm.classify(doc, model)
            es = ",".join(str(int(x)) for x in sc.es)
            fh.write(f"{doc.id}\t{label if label is not None else '<abstain>'}\t{es}\n")


def _classify(cfg, L):
    model = evm.load_model(L.model, cfg.fallback)
    write_predictions(corpus.load_corpus(L.test), model, L.predictions)


def evaluate_model(model, test):
    """EVM F1 report plus confusion-matrix record for a labeled test corpus."""
    docs = [d for d in test if d.label is not None]
    pred = [evm.classify(d, model)[0] for d in docs]
    cm = evaluation.ConfusionMatrix.from_pairs([d.label for d in docs], pred, model.emotions)
    recs = evaluation.f1_report(cm).to_records("evm")
    recs.append({"type": "confusion", "model": "evm", "labels": list(model.emotions),
                 "counts": cm.counts.tolist()})
    return recs


def _evaluate(cfg, L):
    model = evm.load_model(L.model, cfg.fallback)
    test = corpus.load_corpus(L.test)
    train = corpus.load_corpus(L.train)
    recs = evaluate_model(model, test)
    lex = patterns.load_lexicon(L.lexicon)
    for kind in (patterns.BASIC, patterns.ENRICHED):
        subset = [p for p in lex if p.kind == kind]
        recs.append({"type": "coverage", "patterns": kind, "split": "test", "n_patterns": len(subset),
                     "value": evaluation.coverage(test, subset)})
    base = evaluation.tfidf_baseline(train, test, cfg.baseline_epochs, cfg.seed, cfg.emotions)
    recs += base.to_records("tfidf_sgd")
    with open(L.report, "w", encoding="utf-8") as fh:
        for r in recs:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

def build_stages(cfg):
    L = Layout(cfg.workdir)
    user = {p: None for p in (cfg.labeled, cfg.objective, cfg.hashtags, cfg.subjective) if p is not None}
    enriched = cfg.embeddings is not None
    stages = [
        Stage("ingest", user, [L.labeled, L.train, L.test, L.subjective, L.objective],
              cfg.params("emotions", "test_fraction", "seed"), _ingest),
        Stage("graphs", {L.subjective: "ingest", L.objective: "ingest"}, [L.g_subj, L.g_obj, L.g_emo],
              cfg.params("window", "phi_w"), _graphs),
        Stage("categorize", {L.g_emo: "graphs"}, [L.tokens],
              cfg.params("phi_eig", "phi_cl", "tol", "max_iter"), _categorize),
    ]
    if enriched:
        inputs = {cfg.embeddings: None, L.train: "ingest"}
        if cfg.reference is not None:
            inputs[cfg.reference] = None
        stages.append(Stage("cluster", inputs, [L.clusters, L.cluster_report],
                            cfg.params("top_n", "k"), _cluster))
    ext_in = {L.subjective: "ingest", L.train: "ingest", L.tokens: "categorize"}
    if enriched:
        ext_in[L.clusters] = "cluster"
    stages += [
        Stage("extract", ext_in, [L.lexicon],
              cfg.params("templates", "min_freq", "enriched_min_freq", "embeddings"), _extract),
        Stage("weigh", {L.lexicon: "extract", L.train: "ingest"}, [L.model],
              cfg.params("evm_patterns", "emotions"), _weigh),
        Stage("classify", {L.model: "weigh", L.test: "ingest"}, [L.predictions],
              cfg.params("abstain"), _classify),
        Stage("evaluate", {L.model: "weigh", L.test: "ingest", L.train: "ingest", L.lexicon: "extract"},
              [L.report], cfg.params("abstain", "baseline_epochs", "seed", "emotions"), _evaluate),
    ]
    return L, stages


def parse_stages(text):
    if text in (None, "", "all"):
        return list(STAGES)
    names = [s.strip() for s in text.split(",") if s.strip()]
    bad = [n for n in names if n not in STAGES]
    if bad:
        raise ValueError(f"unknown stage(s): {', '.join(bad)}; known: {', '.join(STAGES)}")
    return names


def _stamp(stage, input_hashes):
    blob = json.dumps({"stage": stage.name, "params": stage.params, "inputs": input_hashes},
                      sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _rel(path, root):
    try:
        return str(Path(path).relative_to(root))
    except ValueError:
        return str(path)


def run(cfg, stages=None, threads=None, force=False):
    """Run the requested stages in dependency order.

    Returns the manifest dict; per-stage status is ``ran`` or ``cached``.
    """
    wanted = set(parse_stages(stages) if isinstance(stages, (str, type(None))) else stages)
    _kernels.set_threads(threads if threads is not None else cfg.threads)
    L, plan = build_stages(cfg)
    L.root.mkdir(parents=True, exist_ok=True)
    for sub in ("corpus", "graphs"):
        (L.root / sub).mkdir(exist_ok=True)

    old = {}
    if L.manifest.exists():
        try:
            old = json.loads(L.manifest.read_text(encoding="utf-8")).get("stages", {})
        except json.JSONDecodeError:
            old = {}
    manifest = {"stages": dict(old)}

    for stage in plan:
        if stage.name not in wanted:
            continue
        for path, producer in stage.inputs.items():
            if not Path(path).exists():
                if producer is None:
                    raise StageError(f"{stage.name}: input file not found: {path}")
                raise StageError(f"{stage.name}: missing {_rel(path, L.root)}: run {producer} first")
        in_hashes = {_rel(p, L.root): file_hash(p) for p in stage.inputs}
        stamp = _stamp(stage, in_hashes)
        prev = old.get(stage.name)
        if (not force and prev and prev.get("stamp") == stamp
                and all(Path(p).exists() and prev.get("outputs", {}).get(_rel(p, L.root)) == file_hash(p)
                        for p in stage.outputs)):
            manifest["stages"][stage.name] = dict(prev, status="cached")
            logger.info("%s: cached", stage.name)
            continue
        t0 = time.perf_counter()
        try:
            stage.func(cfg, L)
        except StageError:
            raise
        except Exception as exc:
            raise StageError(f"{stage.name} failed: {exc}") from exc
        manifest["stages"][stage.name] = {
            "status": "ran",
            "stamp": stamp,
            "params": stage.params,
            "inputs": in_hashes,
            "outputs": {_rel(p, L.root): file_hash(p) for p in stage.outputs},
            "seconds": round(time.perf_counter() - t0, 4),
        }
        logger.info("%s: done in %.2fs", stage.name, manifest["stages"][stage.name]["seconds"])
        L.manifest.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n",
                              encoding="utf-8")
    L.manifest.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n",
                          encoding="utf-8")
    return manifest
