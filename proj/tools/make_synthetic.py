#!/usr/bin/env python3
# Copyright 2026 sessim developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Generates the bundled synthetic test collection.

Five topics, each with a pool of relevant documents that share a small set of
aspect terms, a pool of judged non-relevant distractors that share the topic
title and their own distractor terms, and unjudged background documents.
Output is deterministic for a given --seed.

Usage: make_synthetic.py [--out data/synthetic] [--seed 7]
"""

import argparse
import json
import pathlib
import random

TOPICS = [
    {
        "title": "coral reef",
        "aspects": ["bleaching", "acidification", "symbiosis", "polyps", "zooxanthellae"],
        "distractors": ["aquarium", "snorkeling", "souvenir", "jewelry", "diving"],
        "description": "How do ocean warming and acidification cause coral reef bleaching, "
        "and what happens to the symbiosis between polyps and zooxanthellae?",
        "narrative": "Relevant documents explain bleaching, acidification or the symbiosis of coral polyps. "
        "Documents about aquarium snorkeling trips or reef jewelry are not relevant.",
    },
    {
        "title": "solar storms",
        "aspects": ["geomagnetic", "aurora", "flares", "magnetosphere", "outages"],
        "distractors": ["sunscreen", "tanning", "eclipse", "horoscope", "photovoltaic"],
        "description": "What are the effects of solar storms, such as geomagnetic disturbances of the "
        "magnetosphere, aurora displays and power grid outages caused by flares?",
        "narrative": "Relevant documents describe geomagnetic storms, flares or aurora and their impact. "
        "Documents about sunscreen, tanning or eclipse viewing are not relevant.",
    },
    {
        "title": "honey bees",
        "aspects": ["pollination", "varroa", "pesticides", "hive", "colony"],
        "distractors": ["recipes", "sweetener", "candles", "cosmetics", "beeswax"],
        "description": "Why are honey bees declining? Consider varroa mites, pesticides, "
        "colony collapse and the loss of pollination.",
        "narrative": "Relevant documents discuss hive health, varroa, pesticides or pollination services. "
        "Documents about honey recipes, sweetener or beeswax candles are not relevant.",
    },
    {
        "title": "glacier melt",
        "aspects": ["runoff", "sealevel", "albedo", "moraine", "ablation"],
        "distractors": ["skiing", "hiking", "postcards", "cocktail", "mountaineering"],
        "description": "How does glacier melt change runoff and sealevel, and what role do albedo "
        "and ablation play?",
        "narrative": "Relevant documents measure ablation, runoff, albedo or sealevel rise from glacier melt. "
        "Documents about skiing, hiking or mountaineering holidays are not relevant.",
    },
    {
        "title": "jazz history",
        "aspects": ["bebop", "ragtime", "improvisation", "swing", "saxophone"],
        "distractors": ["festival", "tickets", "playlist", "karaoke", "merchandise"],
        "description": "Trace the history of jazz from ragtime and swing to bebop, including the "
        "role of improvisation and the saxophone.",
        "narrative": "Relevant documents cover ragtime, swing, bebop or improvisation in jazz history. "
        "Documents selling festival tickets, merchandise or playlist subscriptions are not relevant.",
    },
]

RELEVANT_PER_TOPIC = 40
DISTRACTORS_PER_TOPIC = 40
BACKGROUND_DOCS = 100
VOCABULARY_SIZE = 1500
POOL_SIZE = 100

CONSONANTS = "bdfgklmnprstvz"
VOWELS = "aeiou"


def pseudo_words(rng, n, reserved):
    words = []
    seen = set(reserved)
    while len(words) < n:
        syllables = rng.randint(2, 4)
        word = "".join(rng.choice(CONSONANTS) + rng.choice(VOWELS) for _ in range(syllables))
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def zipf_sampler(rng, vocabulary):
    weights = [1.0 / (rank + 1) ** 0.9 for rank in range(len(vocabulary))]

    def sample(k):
        return rng.choices(vocabulary, weights=weights, k=k)

    return sample


def relevant_doc(rng, topic, grade, background):
    tokens = []
    for word in topic["title"].split():
        tokens += [word] * rng.randint(1, 2)
    count = {1: 3, 2: rng.choice([3, 4]), 3: 4}[grade]
    for term in rng.sample(topic["aspects"], count):
        tokens += [term] * rng.randint(3, 5)
    tokens += background(rng.randint(25, 35))
    rng.shuffle(tokens)
    return " ".join(tokens)


def distractor_doc(rng, topic, background):
    tokens = []
    for word in topic["title"].split():
        tokens += [word] * rng.randint(1, 2)
    for term in rng.sample(topic["distractors"], rng.choice([3, 4])):
        tokens += [term] * rng.randint(3, 5)
    tokens += background(rng.randint(25, 35))
    rng.shuffle(tokens)
    return " ".join(tokens)


def background_doc(rng, background):
    tokens = background(rng.randint(30, 45))
    if rng.random() < 0.3:
        tokens.append(rng.choice(rng.choice(TOPICS)["title"].split()))
    rng.shuffle(tokens)
    return " ".join(tokens)


def make_pool(rng, topic, vocabulary, aspect_share, distractor_share):
    """Keyword queries in the style of a chat model's numbered list."""
    title = topic["title"].split()
    aspects, distractors = topic["aspects"], topic["distractors"]

    def on_topic():
        form = rng.randrange(4)
        if form == 0:
            return f"{topic['title']} {rng.choice(aspects)}"
        if form == 1:
            return f"{rng.choice(title)} {rng.choice(aspects)}"
        if form == 2:
            a, b = rng.sample(aspects, 2)
            return f"{rng.choice(title)} {a} {b}"
        return f"{rng.choice(aspects)} {topic['title']} causes"

    def off_topic():
        form = rng.randrange(3)
        if form == 0:
            return f"{topic['title']} {rng.choice(distractors)}"
        if form == 1:
            return f"{rng.choice(title)} {rng.choice(distractors)}"
        a, b = rng.sample(distractors, 2)
        return f"{rng.choice(title)} {a} {b}"

    def mixed():
        form = rng.randrange(3)
        if form == 0:
            return f"{rng.choice(title)} {rng.choice(aspects)} {rng.choice(distractors)}"
        if form == 1:
            return f"{topic['title']} {rng.choice(vocabulary[:200])}"
        return f"{rng.choice(title)} {rng.choice(vocabulary[:400])} {rng.choice(vocabulary[:400])}"

    queries, seen = [], set()
    while len(queries) < POOL_SIZE:
        u = rng.random()
        if u < aspect_share:
            query = on_topic()
        elif u < aspect_share + distractor_share:
            query = off_topic()
        else:
            query = mixed()
        key = " ".join(sorted(query.split()))
        if key not in seen:
            seen.add(key)
            queries.append(query)
    return queries


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for row in rows:
            out.write(json.dumps(row, ensure_ascii=False) + "\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/synthetic", type=pathlib.Path)
    parser.add_argument("--seed", default=7, type=int)
    args = parser.parse_args()
    rng = random.Random(args.seed)

    reserved = {w for t in TOPICS for w in t["title"].split() + t["aspects"] + t["distractors"]}
    vocabulary = pseudo_words(rng, VOCABULARY_SIZE, reserved)
    background = zipf_sampler(rng, vocabulary)

    docs, qrels, topics = [], [], []
    for t, topic in enumerate(TOPICS, start=1):
        topic_id = str(t)
        topics.append(
            {
                "topic_id": topic_id,
                "title": topic["title"],
                "description": topic["description"],
                "narrative": topic["narrative"],
            }
        )
        grades = [1] * 14 + [2] * 14 + [3] * 12
        for i, grade in enumerate(grades):
            doc_id = f"syn-{t}-r{i:02d}"
            docs.append({"doc_id": doc_id, "text": relevant_doc(rng, topic, grade, background)})
            qrels.append((topic_id, doc_id, grade))
        for i in range(DISTRACTORS_PER_TOPIC):
            doc_id = f"syn-{t}-d{i:02d}"
            docs.append({"doc_id": doc_id, "text": distractor_doc(rng, topic, background)})
            qrels.append((topic_id, doc_id, 0))
    for i in range(BACKGROUND_DOCS):
        docs.append({"doc_id": f"syn-bg-{i:03d}", "text": background_doc(rng, background)})
    rng.shuffle(docs)

    args.out.mkdir(parents=True, exist_ok=True)
    write_jsonl(args.out / "corpus.jsonl", docs)
    write_jsonl(args.out / "topics.jsonl", topics)
    with open(args.out / "qrels.txt", "w", encoding="utf-8", newline="\n") as out:
        for topic_id, doc_id, grade in sorted(qrels):
            out.write(f"{topic_id} 0 {doc_id} {grade}\n")

    pools = args.out / "pools"
    pools.mkdir(exist_ok=True)
    for name, aspect_share, distractor_share in [("gpt", 0.35, 0.35), ("gpt_plus", 0.6, 0.15)]:
        rows = []
        for t, topic in enumerate(TOPICS, start=1):
            for rank, query in enumerate(make_pool(rng, topic, vocabulary, aspect_share, distractor_share), 1):
                rows.append({"topic_id": str(t), "rank": rank, "query": query})
        write_jsonl(pools / f"{name}.jsonl", rows)


if __name__ == "__main__":
    main()
