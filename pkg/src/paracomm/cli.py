"""Command line entry point: ``paracomm run --config cfg.json`` and ``paracomm list``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments as E
from . import symbols as S


def _write(rep: E.ExperimentReport, out: Path):
    out.mkdir(parents=True, exist_ok=True)
    stem = rep.name
    for name, text in sorted(rep.tables.items()):
        (out / f"{stem}_{name}.csv").write_text(text)
    (out / f"{stem}_summary.json").write_text(rep.to_json() + "\n")
    (out / f"{stem}_summary.txt").write_text(rep.text())


def cmd_list(_args) -> int:
    print("experiments:")
    for name in sorted(E.EXPERIMENTS):
        print(f"  {name}")
    print("presets:")
    for name, desc in sorted(S.PRESETS.items()):
        print(f"  {name}: {desc}")
    return 0


def cmd_run(args) -> int:
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg["seed"] = args.seed
    try:
        rep = E.run(cfg)
    except E.ConfigError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out or cfg.get("out", "reports"))
    _write(rep, out)
    print(rep.text(), end="")
    return 0 if rep.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="paracomm", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one experiment from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=None, help="output directory (default: config 'out' or ./reports)")
    r.add_argument("--seed", type=int, default=None)
    r.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list experiments and symbol presets")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
