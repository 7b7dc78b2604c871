"""Write data/synthetic_spray.csv: a 17-point design in 4 measured variables.

The process settings form a 2^4 factorial with one center point; the
measured responses are linear-plus-interaction functions of the
settings with Gaussian measurement noise.  Values are rounded to one
decimal so the file parses to exact rationals.
"""
import argparse
import itertools
from pathlib import Path

import numpy as np

HEADER = ["T", "V", "W", "I"]
BASE = np.array([1850.0, 650.0, 9.0, 60.0])
MAIN = np.array([
    [45.0, 20.0, -15.0, 10.0],
    [30.0, 12.0, 8.0, -6.0],
    [0.9, -0.3, 0.5, 0.2],
    [4.0, 2.5, -1.5, 3.0],
])
NOISE = np.array([15.0, 8.0, 0.35, 1.8])


def settings() -> np.ndarray:
    pts = [p for p in itertools.product((-1, 1), repeat=4)]
    return np.array(pts + [(0, 0, 0, 0)], dtype=float)


def responses(X: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    Y = BASE + X @ MAIN.T
    Y[:, 0] += 12.0 * X[:, 0] * X[:, 1]
    Y[:, 1] += 6.0 * X[:, 1] * X[:, 2]
    return np.round(Y + rng.normal(scale=NOISE, size=Y.shape), 1)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=20190824)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "synthetic_spray.csv"))
    args = ap.parse_args()
    Y = responses(settings(), np.random.default_rng(args.seed))
    with open(args.out, "w") as fh:
        fh.write(",".join(HEADER) + "\n")
        for row in Y:
            fh.write(",".join(f"{v:.1f}" for v in row) + "\n")
    print(f"wrote {len(Y)} points to {args.out}")


if __name__ == "__main__":
    main()
