#!/usr/bin/env python3
"""Writes data/minicorpus.jsonl: 200 short synthetic labeled texts.

Texts are built from templates, so some carry a category's weaker terms only,
some mix categories and some contain no lexicon term at all. The output is
committed; rerunning with the same seed reproduces it byte for byte.
"""
import json
import random
import sys

SEED = 2020
STRONG = {
    "sexism": ["misogyny", "sexist", "misogynist"],
    "racism": ["racist", "racial", "supremacist"],
    "xenophobia": ["immigrants", "foreigners", "xenophobic", "deport"],
    "ableism": ["ableist", "disabled", "handicapped"],
    "homophobia": ["homophobic", "gays", "lesbians"],
    "religious_intolerance": ["infidels", "heathens", "blasphemers", "heretics"],
}
WEAK = {
    "sexism": ["feminists", "housewife", "bossy"],
    "racism": ["segregation", "ghetto"],
    "xenophobia": ["invaders", "border"],
    "ableism": ["wheelchair", "lunatic"],
    "homophobia": ["unnatural", "closet"],
    "religious_intolerance": ["godless", "zealots"],
}
FILLER = ["people", "today", "again", "online", "downtown", "everyone", "news", "street", "talk", "school"]
TEMPLATES = [
    "so many {w} posts {f} {g}",
    "why is everyone {f} about {w} {g}",
    "heard more {w} talk {f}",
    "{f} {g} and the {w} thing",
]


def text(rng, words):
    parts = rng.choice(TEMPLATES).format(w=" ".join(words), f=rng.choice(FILLER), g=rng.choice(FILLER))
    return parts


def main(path):
    rng = random.Random(SEED)
    cats = list(STRONG)
    rows = []
    for i in range(200):
        label = cats[i % len(cats)]
        kind = rng.random()
        if kind < 0.65:
            words = [rng.choice(STRONG[label])]
        elif kind < 0.80:
            words = [rng.choice(WEAK[label])]
        elif kind < 0.92:
            other = rng.choice([c for c in cats if c != label])
            words = [rng.choice(STRONG[label]), rng.choice(STRONG[other])]
        else:
            words = [rng.choice(FILLER)]
        rows.append({"text": text(rng, words), "label": label})
    with open(path, "w", encoding="utf-8") as out:
        for r in rows:
            out.write(json.dumps(r, sort_keys=True) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/minicorpus.jsonl")
