"""Command-line entry points.

``agrnn solve --config cfg.json [--seed N] [--out-dir D]`` runs a
configuration and writes results.csv, solution_grid.csv, and
config_echo.json. ``agrnn reproduce <case-id>`` runs a built-in
configuration with reference errors attached. ``agrnn spectrum --config
cfg.json`` dumps the one-sided DFT magnitude of the right-hand side.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import runner
from .cases import CASES
from .errors import AgrnnError, InvalidConfigError


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise InvalidConfigError(f"cannot read config {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise InvalidConfigError(f"config {path} is not valid JSON: {err}") from err


def _run_and_write(cfg: dict, out_dir: str, paper_refs=None) -> int:
    result = runner.execute(cfg, paper_refs=paper_refs)
    paths = runner.write_artifacts(result, out_dir)
    final = result.records[-1]
    print(f"{len(result.records)} stage(s) executed; final M = {final.M}")
    if final.e0 is not None:
        ref = f" (reference {final.e0_paper:.3g})" if final.e0_paper is not None else ""
        print(f"relative L2 error: {final.e0:.6g}{ref}")
    for name, p in paths.items():
        print(f"{name}: {p}")
    return 0


def cmd_solve(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    return _run_and_write(cfg, args.out_dir)


def cmd_reproduce(args) -> int:
    if args.case not in CASES:
        print(f"unknown case {args.case!r}; known cases:", file=sys.stderr)
        for name in sorted(CASES):
            print(f"  {name}", file=sys.stderr)
        return 2
    spec = CASES[args.case]
    cfg = json.loads(json.dumps(spec.config))  # deep copy
    if args.seed is not None:
        cfg["seed"] = args.seed
    if spec.note:
        print(spec.note)
    out_dir = args.out_dir if args.out_dir is not None else f"results/{args.case}"
    return _run_and_write(cfg, out_dir, paper_refs=spec.paper_refs)


def cmd_spectrum(args) -> int:
    cfg = _load_config(args.config)
    csv_text = runner.spectrum_csv(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "spectrum.csv"
    path.write_text(csv_text)
    print(f"spectrum: {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agrnn", description="Adaptive growing randomized neural network PDE solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run a JSON configuration")
    p_solve.add_argument("--config", required=True, help="path to a run configuration")
    p_solve.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_solve.add_argument("--out-dir", default="results", help="output directory")
    p_solve.set_defaults(fn=cmd_solve)

    p_rep = sub.add_parser("reproduce", help="run a built-in benchmark case")
    p_rep.add_argument("case", help="case id, e.g. poisson-case1")
    p_rep.add_argument("--seed", type=int, default=None)
    p_rep.add_argument("--out-dir", default=None)
    p_rep.set_defaults(fn=cmd_reproduce)

    p_spec = sub.add_parser("spectrum", help="dump the DFT magnitude of the right-hand side")
    p_spec.add_argument("--config", required=True)
    p_spec.add_argument("--out-dir", default="results")
    p_spec.set_defaults(fn=cmd_spectrum)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except AgrnnError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
