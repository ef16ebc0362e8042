#!/usr/bin/env python3
"""Slate alignment benchmark: random board placements, reprojection error.

    python3 scripts/slate_benchmark.py --trials 50
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cinemeta import slate, synthetic  # noqa: E402

FRAME_SIZE = (320, 180)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=50)
    parser.add_argument("--sigma", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    board = synthetic.slate_board(rng, 12, 3, 1)
    regions = {
        name: slate.FieldRegion(x, y, w, h)
        for name, (x, y, w, h) in board.regions.items()
    }
    template = slate.SlateTemplate("bench", board.image, regions)

    errors = []
    misses = 0
    t0 = time.time()
    for trial in range(args.trials):
        trial_rng = np.random.default_rng(args.seed + 100 + trial)
        bh, bw = board.image.shape
        placement = synthetic.random_homography(
            trial_rng, bw, bh, sigma=args.sigma, offset=(40.0, 10.0)
        )
        frame = synthetic.render_slate_frame(
            board.image, placement, FRAME_SIZE, trial_rng
        )
        try:
            alignment = slate.align_to_template(frame, template, seed=trial)
        except slate.NoSlateFoundError:
            misses += 1
            continue
        err = slate.reprojection_error(alignment, placement, template)
        errors.append(err)
        print(
            f"trial {trial:3d}: {alignment.n_inliers}/{alignment.n_matches} inliers, "
            f"reprojection {err:6.3f} px"
        )
    elapsed = time.time() - t0
    if errors:
        print(
            f"\naligned {len(errors)}/{args.trials}"
            f" (misses {misses}), mean error {np.mean(errors):.3f} px,"
            f" worst {np.max(errors):.3f} px  ({elapsed:.1f}s)"
        )
    else:
        print(f"\nno alignments in {args.trials} trials ({elapsed:.1f}s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
