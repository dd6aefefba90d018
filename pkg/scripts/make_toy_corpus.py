"""Generate the bundled toy corpus under src/emopattern/data/toy.

Four emotions, 50 hashtag-labeled posts each, with class-correlated phrases
planted among shared filler; 200 news-style objective posts; synthetic word
embeddings in which each emotion's vocabulary sits around its own centroid.

    python scripts/make_toy_corpus.py [OUT_DIR]
"""

import json
import random
import sys
from pathlib import Path

import numpy as np

SEED = 20180701
DIM = 16

EMOTIONS = ("anger", "fear", "joy", "sadness")

HASHTAGS = {
    "anger": ("#mad", "#pissed", "#angry"),
    "fear": ("#fear", "#worried", "#scared"),
    "joy": ("#fun", "#joy", "#happy"),
    "sadness": ("#depressed", "#grief", "#sad"),
}

# feeling words slot into the shared connector frames below
FEELING = {
    "anger": ("mad", "furious", "annoyed"),
    "fear": ("scared", "terrified", "nervous"),
    "joy": ("happy", "glad", "excited"),
    "sadness": ("sad", "lonely", "miserable"),
}

# emotion-specific verbs and objects
ACTION = {
    "anger": ("hate", "despise"),
    "fear": ("dread", "fear"),
    "joy": ("love", "enjoy"),
    "sadness": ("miss", "regret"),
}

FRAMES = (
    "i am so {f}",
    "i feel so {f}",
    "so {f} right now",
    "i am {f} about it",
    "feeling so {f} and {f2}",
    "i am so {f} i {a} this",
    "i {a} my life",
    "why do i {a} it so {f}",
)

OPENERS = ("", "", "ugh", "omg", "honestly", "well", "<m>", "today", "lol", "this morning")
CLOSERS = ("", "", "", "today", "again", "tbh", "right now", "!!!", "<u>", "for real")
GENERIC = (
    "just got home from work",
    "long day at the office",
    "waiting for the bus",
    "watching the game tonight",
    "coffee and then more emails",
)

NEWS_SUBJ = ("the government", "officials", "the council", "the ministry", "police", "the company",
             "the president", "analysts", "the committee", "investors")
NEWS_VERB = ("announced", "said", "reported", "confirmed", "approved", "rejected", "published")
NEWS_OBJ = ("new rules for the city", "the budget for next year", "a report on the economy",
            "plans for the new bridge", "the results of the election", "a deal with the union",
            "the schedule for the trial", "changes to the tax code")
NEWS_TAIL = ("on monday", "on friday", "in march", "this week", "in a statement", "after the meeting",
             "", "")

FILLER_WORDS = ("ugh", "omg", "honestly", "well", "today", "lol", "this", "morning", "again", "tbh",
                "right", "now", "for", "real", "just", "got", "home", "from", "work", "long", "day",
                "at", "the", "office", "waiting", "bus", "watching", "game", "tonight", "coffee",
                "and", "then", "more", "emails", "i", "am", "so", "feel", "about", "it", "feeling",
                "my", "life", "why", "do")


def mention(rng):
    return "@" + rng.choice(("jen", "mike_t", "Sam", "dana99", "news_junkie"))


def url(rng):
    return rng.choice(("https://t.co/", "http://bit.ly/", "www.example.com/")) + str(rng.randrange(10**5))


def fill(text, rng):
    return " ".join(mention(rng) if t == "<m>" else url(rng) if t == "<u>" else t for t in text.split())


def emotional_post(emotion, rng):
    parts = [rng.choice(OPENERS)]
    if rng.random() < 0.08:
        parts.append(rng.choice(GENERIC))
    else:
        frame = rng.choice(FRAMES)
        f, f2 = rng.sample(FEELING[emotion], 2)
        parts.append(frame.format(f=f, f2=f2, a=rng.choice(ACTION[emotion])))
        if rng.random() < 0.3:
            parts.append(rng.choice(GENERIC))
    parts.append(rng.choice(CLOSERS))
    text = fill(" ".join(p for p in parts if p), rng)
    if rng.random() < 0.3:
        text = text.capitalize()
    return text + " " + rng.choice(HASHTAGS[emotion])


def news_post(rng):
    parts = [rng.choice(NEWS_SUBJ), rng.choice(NEWS_VERB), rng.choice(NEWS_OBJ), rng.choice(NEWS_TAIL)]
    text = " ".join(p for p in parts if p)
    if rng.random() < 0.4:
        text += " " + url(rng)
    return text[0].upper() + text[1:]


def embeddings(rng_np):
    groups = {e: FEELING[e] + ACTION[e] for e in EMOTIONS}
    news = sorted({w for phrase in NEWS_SUBJ + NEWS_VERB + NEWS_OBJ + NEWS_TAIL for w in phrase.split()})
    groups["news"] = tuple(w for w in news if w not in FILLER_WORDS)
    groups["filler"] = FILLER_WORDS
    centroids = {g: rng_np.normal(0, 1, DIM) * 4 for g in groups}
    rows = {}
    for g in sorted(groups):
        for w in groups[g]:
            if w not in rows:
                rows[w] = centroids[g] + rng_np.normal(0, 0.5, DIM)
    return rows


def main(out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    rng_np = np.random.default_rng(SEED)

    labeled = []
    for e in EMOTIONS:
        for i in range(50):
            labeled.append({"id": f"{e[:3]}{i:03d}", "text": emotional_post(e, rng)})
    rng.shuffle(labeled)
    with open(out / "labeled.jsonl", "w", encoding="utf-8") as fh:
        for rec in labeled:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")

    with open(out / "objective.jsonl", "w", encoding="utf-8") as fh:
        for i in range(200):
            fh.write(json.dumps({"id": f"news{i:03d}", "text": news_post(rng)}, sort_keys=True) + "\n")

    with open(out / "hashtags.tsv", "w", encoding="utf-8") as fh:
        for e in EMOTIONS:
            for tag in HASHTAGS[e]:
                fh.write(f"{tag}\t{e}\n")

    with open(out / "embeddings.txt", "w", encoding="utf-8") as fh:
        for w, v in sorted(embeddings(rng_np).items()):
            fh.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")

    with open(out / "synsets.tsv", "w", encoding="utf-8") as fh:
        for e in EMOTIONS:
            for w in sorted(set(FEELING[e] + ACTION[e])):
                fh.write(f"{w}\t{e}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src/emopattern/data/toy")
