#!/usr/bin/env python3
"""Convert the Planetoid pickles (ind.<name>.x, .y, .tx, ...) into the
directory layout read by `pcwinter` (edges.tsv, features.csv, labels.csv,
split.json).

Split: the usual public one. Labeled train nodes are the rows of ind.<name>.y
(the first 140 for cora), val is the next 500 ids and test comes from
test.index. Every other node is an unlabeled train node.

    python3 tools/planetoid_to_tsv.py /path/to/planetoid/data data/cora
"""

import argparse
import json
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load_pickle(path):
    with open(path, "rb") as f:
        return pickle.load(f, encoding="latin1")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("raw_dir", type=Path)
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--name", default="cora")
    args = ap.parse_args()

    obj = {}
    for key in ("x", "y", "tx", "ty", "allx", "ally", "graph"):
        obj[key] = load_pickle(args.raw_dir / f"ind.{args.name}.{key}")
    test_index = [int(line) for line in (args.raw_dir / f"ind.{args.name}.test.index").read_text().split()]

    features = sp.vstack((obj["allx"], obj["tx"])).tolil()
    labels = np.vstack((obj["ally"], obj["ty"]))
    order = np.sort(test_index)
    # test rows are stored in sorted order; put them back at their ids
    features[test_index, :] = features[order, :]
    labels[test_index, :] = labels[order, :]
    features = features.toarray()
    n = features.shape[0]

    edges = set()
    for u, nbrs in obj["graph"].items():
        for v in nbrs:
            if u != v and u < n and v < n:
                edges.add((min(u, v), max(u, v)))

    num_labeled = obj["y"].shape[0]
    labeled = list(range(num_labeled))
    val = list(range(num_labeled, num_labeled + 500))
    test = sorted(test_index)
    held = set(val) | set(test)
    train = [v for v in range(n) if v not in held]

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "edges.tsv", "w") as f:
        for u, v in sorted(edges):
            f.write(f"{u}\t{v}\n")
    np.savetxt(out / "features.csv", features, delimiter=",", fmt="%.17g")
    with open(out / "labels.csv", "w") as f:
        for v in range(n):
            # a few citeseer test nodes have no label row
            if labels[v].any():
                f.write(f"{v},{int(labels[v].argmax())}\n")
    with open(out / "split.json", "w") as f:
        json.dump({"train": train, "val": val, "test": test, "labeled_train": labeled}, f)
        f.write("\n")
    print(f"{n} nodes, {len(edges)} edges, {len(train)} train ({len(labeled)} labeled), "
          f"{len(val)} val, {len(test)} test", file=sys.stderr)


if __name__ == "__main__":
    main()
