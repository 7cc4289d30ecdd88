"""Command-line entry point.

One run prints one JSON object.  Giving several comma-separated values to
``--epsilon``, ``--ell`` or ``--seed`` runs the cartesian product (a sweep)
and prints CSV with a fixed header instead.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from dataclasses import replace
from typing import Optional, Sequence

from ..errors import StreamCoverError
from ..geometry import Norm
from .experiment import ALGORITHMS, RunConfig, RunRecord, run_experiment

CSV_FIELDS = ["algo", "epsilon", "ell", "dim", "norm", "seed", "copies", "samplers", "points", "estimate", "opt",
              "ratio", "bound", "space_bits", "passes", "wall_time_s"]


def _list(conv):
    def parse(text: str):
        try:
            return [conv(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad value list {text!r}") from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="streamcover", description="Estimate unit-ball cover sizes of point streams.")
    ap.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    ap.add_argument("--epsilon", type=_list(float), default=[0.2], help="accuracy parameter (comma list sweeps)")
    ap.add_argument("--ell", type=_list(int), default=[4], help="shifting parameter; windows have side 2*ell")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--norm", choices=[n.value for n in Norm])
    ap.add_argument("--seed", type=_list(int), default=[0])
    ap.add_argument("--copies", type=int, help="independent copies combined by minimum")
    ap.add_argument("--samplers", type=int, help="override the min-wise sampler count r")
    ap.add_argument("--combiner", choices=["min", "median"], default="min")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="FILE", help="point file, or - for standard input")
    src.add_argument("--gen", metavar="SPEC", help='generator spec, e.g. "clusters:k=50,seed=3"')
    ap.add_argument("--format", dest="fmt", choices=["text"], default="text")
    ap.add_argument("--radius", type=float, help="ball radius of the input (default: header or 1)")
    ap.add_argument("--output", metavar="FILE", help="write the result here instead of stdout")
    ap.add_argument("--oracle", choices=["auto", "off"], default="auto")
    return ap


def _csv_row(rec: RunRecord) -> dict:
    c = rec.config
    return {
        "algo": c["algo"], "epsilon": c["epsilon"], "ell": c["ell"], "dim": c["dim"], "norm": c["norm"],
        "seed": c["seed"], "copies": c["copies"], "samplers": c["samplers"] or "", "points": rec.points_processed,
        "estimate": rec.estimate, "opt": "" if rec.opt is None else rec.opt,
        "ratio": "" if rec.ratio is None else rec.ratio, "bound": "" if rec.bound is None else rec.bound,
        "space_bits": rec.space_bits["total"], "passes": rec.passes, "wall_time_s": f"{rec.wall_time_s:.6f}",
    }


def configs_from_args(args: argparse.Namespace) -> list[RunConfig]:
    base = RunConfig(algo=args.algo, dim=args.dim, norm=args.norm, copies=args.copies, samplers=args.samplers,
                     input=args.input, gen=args.gen, output=args.output, oracle=args.oracle, fmt=args.fmt,
                     radius=args.radius, combiner=args.combiner)
    return [replace(base, epsilon=e, ell=l, seed=s) for e, l, s in itertools.product(args.epsilon, args.ell, args.seed)]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configs = configs_from_args(args)
        for cfg in configs:
            cfg.validate()
        records = [run_experiment(cfg) for cfg in configs]
    except StreamCoverError as exc:
        print(f"streamcover: error: {exc}", file=sys.stderr)
        return 2
    if len(records) == 1:
        text = json.dumps(records[0].to_dict(), indent=2, sort_keys=True) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow(_csv_row(rec))
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
