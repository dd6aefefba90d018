"""Corpus ingestion: normalization, hashtag distant supervision, splitting."""

import json
import logging
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

logger = logging.getLogger(__name__)

PLUTCHIK = ("anger", "anticipation", "disgust", "fear", "joy", "sadness", "surprise", "trust")

USER_MENTION = "<usermention>"
URL = "<url>"
HASHTAG = "<hashtag>"

_URL_RE = re.compile(r"^(https?:|www\.)")


class CorpusError(ValueError):
    pass


@dataclass
class Document:
    id: str
    tokens: list
    raw: str = ""
    label: Optional[str] = None

    def to_record(self):
        rec = {"id": self.id, "text": self.raw, "tokens": self.tokens}
        if self.label is not None:
            rec["label"] = self.label
        return rec


@dataclass
class LabeledCorpus:
    docs: list = field(default_factory=list)

    def __len__(self):
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)

    @property
    def label_counts(self):
        return Counter(d.label for d in self.docs if d.label is not None)

    def labeled(self):
        return LabeledCorpus([d for d in self.docs if d.label is not None])


def normalize_token(token):
    token = token.lower()
    if token.startswith("@"):
        return USER_MENTION
    if token.startswith("#"):
        return HASHTAG
    if _URL_RE.match(token):
        return URL
    return token


def normalize(raw):
    """Whitespace-tokenize, lower-case and mask mentions, URLs and hashtags.

    >>> normalize("@John check https://t.co/x #fun")
    ['<usermention>', 'check', '<url>', '<hashtag>']
    """
    return [normalize_token(t) for t in raw.split()]


def label_from_hashtag(raw, hashtag_map):
    """Emotion of the trailing hashtag of ``raw``, or None.

    Must run on the raw text: normalization masks every hashtag.
    """
    parts = raw.split()
    if not parts or not parts[-1].startswith("#"):
        return None
    return hashtag_map.get(parts[-1].lower())


def load_hashtag_map(path, emotions=None):
    """Read a ``hashtag<TAB>emotion`` file into a lower-cased lookup."""
    mapping = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("//"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusError(f"{path}:{lineno}: expected 'hashtag<TAB>emotion'")
        tag, emotion = parts[0].strip().lower(), parts[1].strip()
        if not tag.startswith("#"):
            tag = "#" + tag
        if emotions is not None and emotion not in emotions:
            raise CorpusError(f"{path}:{lineno}: emotion {emotion!r} not in label set")
        mapping[tag] = emotion
    if not mapping:
        raise CorpusError(f"{path}: empty hashtag map")
    return mapping


def make_document(doc_id, text, label=None, hashtag_map=None):
    if label is None and hashtag_map:
        label = label_from_hashtag(text, hashtag_map)
    return Document(id=str(doc_id), tokens=normalize(text), raw=text, label=label)


def read_records(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from None
            if "id" not in rec or ("text" not in rec and "tokens" not in rec):
                raise CorpusError(f"{path}:{lineno}: record needs 'id' and 'text'")
            yield rec


def ingest(records: Iterable[dict], hashtag_map=None, emotions=None):
    """Build a corpus from raw ``{id, text, label?}`` records.

    An explicit label wins over the hashtag-derived one.  Labels outside
    ``emotions`` are an error.
    """
    docs = []
    seen = set()
    for rec in records:
        doc = make_document(rec["id"], rec.get("text", ""), rec.get("label"), hashtag_map)
        if doc.id in seen:
            raise CorpusError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)
        if emotions is not None and doc.label is not None and doc.label not in emotions:
            raise CorpusError(f"document {doc.id!r}: label {doc.label!r} not in label set")
        docs.append(doc)
    return LabeledCorpus(docs)


def load_corpus(path):
    """Load a corpus file; records without ``tokens`` are normalized on the fly."""
    docs = []
    for rec in read_records(path):
        text = rec.get("text", "")
        tokens = rec.get("tokens")
        if tokens is None:
            tokens = normalize(text)
        docs.append(Document(id=str(rec["id"]), tokens=list(tokens), raw=text, label=rec.get("label")))
    return LabeledCorpus(docs)


def save_corpus(corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus:
            fh.write(json.dumps(doc.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def _quotas(sizes, n_test):
    """Largest-remainder allocation of ``n_test`` over strata of ``sizes``."""
    total = sum(sizes)
    exact = [s * n_test / total for s in sizes]
    quota = [int(np.floor(e)) for e in exact]
    left = n_test - sum(quota)
    order = sorted(range(len(sizes)), key=lambda i: (-(exact[i] - quota[i]), i))
    for i in order[:left]:
        quota[i] += 1
    return quota


def split(corpus, test_fraction=0.1, seed=42):
    """Stratified, seeded train/test split.

    Every label keeps at least one document on each side, so a label with
    fewer than two documents cannot be split.  Unlabeled documents form their
    own stratum.
    """
    if not 0 < test_fraction < 1:
        raise CorpusError(f"test_fraction must be in (0, 1), got {test_fraction}")
    groups = defaultdict(list)
    for doc in corpus:
        groups[doc.label].append(doc)
    small = sorted(lab for lab, docs in groups.items() if lab is not None and len(docs) < 2)
    if small:
        raise CorpusError(f"cannot stratify: labels with fewer than 2 documents: {small}")

    keys = sorted(groups, key=lambda k: (k is None, k or ""))
    sizes = [len(groups[k]) for k in keys]
    n_test = int(round(len(corpus) * test_fraction))
    quota = _quotas(sizes, n_test)

    rng = np.random.default_rng(seed)
    test_ids = set()
    for key, q in zip(keys, quota):
        docs = sorted(groups[key], key=lambda d: d.id)
        if key is not None:
            q = min(max(q, 1), len(docs) - 1)
        perm = rng.permutation(len(docs))
        test_ids.update(docs[i].id for i in perm[:q])
    train = [d for d in corpus if d.id not in test_ids]
    test = [d for d in corpus if d.id in test_ids]
    return LabeledCorpus(train), LabeledCorpus(test)
