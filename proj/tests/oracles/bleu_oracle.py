#!/usr/bin/env python3
# Copyright 2026 The gcnn Authors.
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

"""Reference corpus BLEU-4 and string accuracy for the metrics fixture.

Clipped n-gram counts pooled over the corpus, uniform geometric mean,
add-one smoothing for n >= 2, brevity penalty when the candidate corpus is
shorter than the reference corpus. Exact rational arithmetic until the final
root and exponential.

usage: bleu_oracle.py FIXTURE.json   (rewrites the expected values in place)
"""

import json
import math
import sys
from collections import Counter
from fractions import Fraction


def ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(cands, refs):
    cand_len = sum(len(c) for c in cands)
    ref_len = sum(len(r) for r in refs)
    if cand_len == 0:
        return 1.0 if ref_len == 0 else 0.0
    log_sum = 0.0
    for n in range(1, 5):
        match = 0
        total = 0
        for c, r in zip(cands, refs):
            cc = ngrams(c, n)
            rc = ngrams(r, n)
            match += sum(min(v, rc[g]) for g, v in cc.items())
            total += max(len(c) - n + 1, 0)
        p = Fraction(match, total) if n == 1 else Fraction(match + 1, total + 1)
        if p == 0:
            return 0.0
        log_sum += math.log(p) / 4
    bp = 1.0 if cand_len >= ref_len else math.exp(1 - ref_len / cand_len)
    return bp * math.exp(log_sum)


def main():
    path = sys.argv[1]
    with open(path) as f:
        fx = json.load(f)
    cands = [p if p is not None else [] for p in fx["predictions"]]
    refs = fx["golds"]
    fx["bleu"] = round(corpus_bleu(cands, refs), 10)
    hits = sum(1 for p, g in zip(fx["predictions"], refs) if p == g)
    fx["string_accuracy"] = round(hits / len(refs), 10)
    with open(path, "w") as f:
        json.dump(fx, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
