#!/usr/bin/env python3
"""Run the halting-dichotomy experiment on the bundled machines.

For each machine description in scripts/machines/ this drives the
theorem-check pipeline: interpret the machine, compile the
language-preserving encoding, and compare the zero-period reference
language against a list of positive periods.  A halting machine should
come out "consistent with halting" (some period reproduces the
reference language up to the probe depth); a non-halting one should
show a blocking-word witness at every period that is small enough for
the bound to expose it.

Usage:
    python3 scripts/run_theorem_experiment.py [--depth K] [--out FILE]
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from pathlib import Path

from peralab.cli import main as cli_main

HERE = Path(__file__).resolve().parent
MACHINES = HERE / "machines"

# periods chosen so the per-machine verdict is decisive at the default depth
RUNS = (
    ("inc3.2cm", "2,3,5"),
    ("loop.2cm", "1,2"),
    ("halt.2cm", "1,2,3"),
)


def run_one(path: Path, values: str, depth: int) -> str:
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = cli_main([
            "theorem-check", str(path),
            "--values", values,
            "-k", str(depth),
        ])
    if code != 0:
        raise SystemExit(f"theorem-check failed on {path.name} (exit {code})")
    return buf.getvalue()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--depth", type=int, default=8, help="word-length bound (default 8)")
    ap.add_argument("--out", help="also write the report to this file")
    args = ap.parse_args(argv)

    sections = []
    for name, values in RUNS:
        banner = f"==== {name} (p in {{{values}}}, depth {args.depth}) ===="
        sections.append(banner + "\n" + run_one(MACHINES / name, values, args.depth))
    report = "\n".join(sections)
    print(report, end="")
    if args.out:
        Path(args.out).write_text(report)
        print(f"\nreport written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
