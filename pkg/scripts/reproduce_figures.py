"""Run every config in configs/ and write the result tables.

    python scripts/reproduce_figures.py [--analytic] [--outdir results]

Tables are plain CSV with a ``#`` header; plot them with any tool.
"""

import argparse
from pathlib import Path

from geophase.config import load
from geophase.config import ExperimentConfig
from geophase.runner import run

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--configs", default=ROOT / "configs", type=Path)
    ap.add_argument("--outdir", default=ROOT / "results", type=Path)
    ap.add_argument("--analytic", action="store_true")
    args = ap.parse_args()

    for path in sorted(args.configs.glob("*.yaml")):
        raw = load(path)
        raw["output_path"] = str(args.outdir / f"{path.stem}.csv")
        if args.analytic:
            raw["analytic_mode"] = True
        table = run(ExperimentConfig.from_mapping(raw))
        print(f"{path.name:32s} -> {raw['output_path']} ({len(table.rows)} rows)")


if __name__ == "__main__":
    main()
