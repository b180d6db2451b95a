#!/usr/bin/env python3
# Copyright 2026 the impactir authors
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

"""Writes the small synthetic corpus under tests/data/fixture.

Passages are built from topic word pools so that queries drawn from a
topic have a known relevant passage. Predicted queries mix words from the
passage with unseen topic words, which is what expansion is meant to add.
"""

import json
import random
import sys
from pathlib import Path

TOPICS = 40
PASSAGES_PER_TOPIC = 6
QUERIES = 120

FILLER = ("the of and a to in is for on with as by at from that this are was be it or "
          "an which has have its their were also been more than into other some").split()


def topic_words(t):
    return [f"w{t}x{i}" for i in range(25)]


def main(out_dir):
    rng = random.Random(20260101)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pools = [topic_words(t) for t in range(TOPICS)]

    docs, expansions, passages_by_topic = [], [], {}
    for t in range(TOPICS):
        for p in range(PASSAGES_PER_TOPIC):
            doc_id = f"P{t:02d}{p}"
            own = rng.sample(pools[t], 10)
            words = [rng.choice(own if rng.random() < 0.5 else FILLER) for _ in range(rng.randint(15, 40))]
            text = " ".join(words).capitalize() + "."
            docs.append((doc_id, text))
            passages_by_topic.setdefault(t, []).append((doc_id, own))
            preds = []
            for _ in range(3):
                pred = rng.sample(own, 2) + rng.sample(pools[t], 2)
                preds.append(" ".join(pred) + "?")
            expansions.append({"id": doc_id, "queries": preds})

    rng.shuffle(docs)
    with open(out / "corpus.tsv", "w", encoding="utf-8", newline="\n") as f:
        for doc_id, text in docs:
            f.write(f"{doc_id}\t{text}\n")
    with open(out / "expansions.jsonl", "w", encoding="utf-8", newline="\n") as f:
        for rec in expansions:
            f.write(json.dumps(rec, sort_keys=True) + "\n")

    with open(out / "queries.tsv", "w", encoding="utf-8", newline="\n") as fq, \
         open(out / "qrels.txt", "w", encoding="utf-8", newline="\n") as fr:
        for q in range(QUERIES):
            t = rng.randrange(TOPICS)
            target, own = rng.choice(passages_by_topic[t])
            words = rng.sample(own, 2) + rng.sample(pools[t], 1) + [rng.choice(FILLER)]
            rng.shuffle(words)
            qid = f"Q{q:03d}"
            fq.write(f"{qid}\t{' '.join(words)}\n")
            fr.write(f"{qid} 0 {target} 2\n")
            other = rng.choice([d for d, _ in passages_by_topic[t] if d != target])
            fr.write(f"{qid} 0 {other} 1\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/fixture")
