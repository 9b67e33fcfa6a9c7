"""Command-line entry point: ``nearfield-isac <experiment> --scenario --out --seed``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .beamforming import ZFSingularityError
from .geometry import GeometryError
from .scenario import PAPER_DEFAULT, ScenarioError, load_scenario

EXIT_SCENARIO = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5

RUNNERS = {
    "dof": ex.run_fig1_dof,
    "correlation": ex.run_fig2_correlation,
    "beampattern": ex.run_fig3_beampattern,
    "tradeoff": ex.run_fig4_tradeoff,
    "power": ex.run_fig5_power,
    "music": ex.run_music,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nearfield-isac", description="Near-field ISAC experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", default=PAPER_DEFAULT,
                       help=f"scenario JSON file or '{PAPER_DEFAULT}' (default)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the scenario rng_seed")
        if name == "music":
            p.add_argument("--snr-db", type=float, default=20.0)
            p.add_argument("--snapshots", type=int, default=200)
    return parser


def write_tables(tables, scenario, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for t in tables:
        path = out / (t.name + (".dat" if t.kind == "gnuplot" else ".csv"))
        path.write_text(ex.render(t, scenario))
        written.append(path)
    return written


def run(args) -> list:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.replace(rng_seed=args.seed)
    kwargs = {}
    if args.command == "music":
        kwargs = {"snr_db": args.snr_db, "snapshots": args.snapshots}
    tables = RUNNERS[args.command](scenario, **kwargs)
    return write_tables(tables, scenario, Path(args.out))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        for path in run(args):
            print(path)
    except (ScenarioError, GeometryError, FileNotFoundError) as exc:
        print(f"error[scenario] {args.command}: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (ZFSingularityError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"error[numerical] {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error[io] {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
