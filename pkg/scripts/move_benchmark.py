#!/usr/bin/env python3
"""Camera-move classifier benchmark over synthetic clips.

Renders scripted clips for every move class and prints the confusion
matrix plus overall accuracy:

    python3 scripts/move_benchmark.py --trials 20 --noise 0.01
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cinemeta import synthetic  # noqa: E402
from cinemeta.camera_move import classify_camera_move  # noqa: E402
from cinemeta.model import CameraMove  # noqa: E402

CLASSES = (
    CameraMove.STATIC,
    CameraMove.PAN,
    CameraMove.TILT,
    CameraMove.TRUCK,
    CameraMove.PEDESTAL,
    CameraMove.DOLLY,
    CameraMove.ZOOM,
    CameraMove.HANDHELD,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--noise", type=float, default=0.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    confusion: dict[tuple[str, str], int] = {}
    correct = 0
    t0 = time.time()
    for trial in range(args.trials):
        for i, move in enumerate(CLASSES):
            rng = np.random.default_rng(args.seed + 1000 * trial + i)
            frames = synthetic.move_clip(move, rng, noise=args.noise)
            result = classify_camera_move(frames, seed=trial * 31 + i)
            confusion[(move.value, result.move.value)] = (
                confusion.get((move.value, result.move.value), 0) + 1
            )
            if result.move is move:
                correct += 1
    elapsed = time.time() - t0

    names = [c.value for c in CLASSES]
    width = max(len(n) for n in names) + 1
    header = " " * width + "".join(f"{n:>{width}}" for n in names + ["unknown"])
    print(header)
    for truth in names:
        row = f"{truth:>{width}}"
        for pred in names + ["unknown"]:
            row += f"{confusion.get((truth, pred), 0):>{width}}"
        print(row)
    total = args.trials * len(CLASSES)
    print(f"\naccuracy {correct}/{total} = {correct / total:.3f}  ({elapsed:.1f}s)")
    return 0 if correct == total else 1


if __name__ == "__main__":
    raise SystemExit(main())
