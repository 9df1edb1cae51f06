#!/usr/bin/env python3
"""Regenerate data/wdbc.csv from scikit-learn's bundled copy of the dataset.

The output follows the canonical 32-field layout: id, diagnosis (M/B),
30 real-valued features per row, no header. scikit-learn does not ship the
original UCI patient ids, so ids are synthesized as sequential integers;
feature values and row order match the published file exactly.
"""
import argparse
from pathlib import Path

from sklearn.datasets import load_breast_cancer


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/wdbc.csv", type=Path)
    args = parser.parse_args()

    bunch = load_breast_cancer()
    # sklearn target: 0 = malignant, 1 = benign
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w") as fh:
        for i, (row, target) in enumerate(zip(bunch.data, bunch.target)):
            diagnosis = "M" if target == 0 else "B"
            feats = ",".join(repr(float(v)) for v in row)
            fh.write(f"{10001 + i},{diagnosis},{feats}\n")
    print(f"wrote {len(bunch.data)} rows to {args.out}")


if __name__ == "__main__":
    main()
