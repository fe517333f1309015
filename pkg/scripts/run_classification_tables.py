#!/usr/bin/env python3
"""Produce the classification result tables (both Iris pairs, and the fraud
table when the transaction file is available) in exact and/or trained mode.

    python scripts/run_classification_tables.py --out-dir runs/tables
    python scripts/run_classification_tables.py --mode trained --iters 400
"""

import argparse
from pathlib import Path

from shadowenc.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mode", choices=("exact", "trained"), default="exact")
    ap.add_argument("--iters", type=int, default=400)
    ap.add_argument("--layers", type=int, default=12)
    ap.add_argument("--grad-mode", choices=("shadow", "exact"), default="shadow")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--creditcard", type=Path, default=None)
    ap.add_argument("--out-dir", type=Path, default=Path("runs/tables"))
    args = ap.parse_args()

    common = ["--mode", args.mode, "--iters", str(args.iters),
              "--layers", str(args.layers), "--grad-mode", args.grad_mode,
              "--seed", str(args.seed)]
    for pair in ("setosa:versicolor", "versicolor:virginica"):
        out = args.out_dir / pair.replace(":", "_")
        rc = cli_main(["classify-iris", "--pair", pair, "--out-dir", str(out)]
                      + common)
        if rc != 0:
            raise SystemExit(rc)
    if args.creditcard is not None:
        out = args.out_dir / "fraud"
        rc = cli_main(["classify-fraud", "--data", str(args.creditcard),
                       "--out-dir", str(out)] + common)
        if rc != 0:
            raise SystemExit(rc)
    else:
        print("fraud table skipped (pass --creditcard path/to/creditcard.csv)")


if __name__ == "__main__":
    main()
