#!/usr/bin/env python3
"""Generate the synthetic demo project and optionally ingest it.

    python3 scripts/make_demo.py demo_dir --ingest
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cinemeta import demo, pipeline  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("root", help="directory to create the project in")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--ingest", action="store_true", help="run the pipeline too")
    args = parser.parse_args()

    paths = demo.write_demo_project(args.root, seed=args.seed)
    print(f"demo project at {args.root}")
    print(f"  config: {paths['config']}")
    print(f"  truth:  {paths['truth']}")
    if args.ingest:
        summary = pipeline.run_ingest(pipeline.load_config(paths["config"]))
        print(f"  catalog: {summary['catalog']}")
        print(f"  export:  {summary['export']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
