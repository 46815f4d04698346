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

"""Brute-force rule inventory for a dataset file.

Collects every (lhs, rhs, terminal) production into a sorted set, then assigns
ids by a separate first-occurrence pre-order sweep. Writes the manifest that
the grammar tests compare against.

usage: grammar_manifest.py DATASET.jsonl MANIFEST.json
"""

import json
import sys


def productions(node, out):
    kids = node.get("children", [])
    if "terminal" in node or not kids:
        return
    rhs = tuple(k["symbol"] for k in kids)
    term = None
    if len(kids) == 1 and "terminal" in kids[0]:
        term = kids[0]["terminal"]
    out.append((node["symbol"], rhs, term))
    for k in kids:
        productions(k, out)


def scopes(node, out):
    if "scope" in node and node["scope"] not in out:
        out.append(node["scope"])
    for k in node.get("children", []):
        scopes(k, out)


def main():
    src, dst = sys.argv[1], sys.argv[2]
    trees = []
    with open(src) as f:
        for line in f:
            rec = json.loads(line)
            if "format" in rec:
                continue
            trees.append(rec["ast"])

    all_prods = []
    per_tree = []
    for t in trees:
        p = []
        productions(t, p)
        per_tree.append(len(p))
        all_prods.extend(p)
    distinct = sorted(set(all_prods), key=lambda r: (r[0], r[1], r[2] or ""))

    order = []
    for p in all_prods:
        if p not in order:
            order.append(p)
    assert set(order) == set(distinct)

    lhs_counts = {}
    for lhs, _, _ in distinct:
        lhs_counts[lhs] = lhs_counts.get(lhs, 0) + 1

    scope_vocab = ["<none>"]
    for t in trees:
        scopes(t, scope_vocab)

    manifest = {
        "rule_count": len(distinct),
        "rules": [
            {"id": i, "lhs": l, "rhs": list(r), "terminal": v}
            for i, (l, r, v) in enumerate(order)
        ],
        "lhs_counts": dict(sorted(lhs_counts.items())),
        "derivation_lengths": per_tree,
        "scope_vocab": scope_vocab,
    }
    with open(dst, "w") as f:
        json.dump(manifest, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
