"""Command-line front end.

Subcommands cover the full pipeline: compile a counter machine to an
automaton (encode), enumerate one valuation's language (lang), compare
two valuations (compare), run the halting-dichotomy experiment
(theorem-check), and step the machine interpreter itself
(simulate-2cm).  Reports are deterministic; wall-clock timings live in
a delimited footer so golden tests can strip them.

Exit codes: 0 success, 1 input or model error, 2 resource exhaustion.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from .core import ModelError, Pera, integerize, parse_valuation
from .encoder import VARIANTS, build
from .language import SEMANTICS, LanguageSample, compare as compare_samples, enumerate_language
from .minsky import parse_machine, run
from .semantics import ExplorationConfig, ResourceExhausted

TIMING_HEADER = "--- timings ---"


class _Timings:
    def __init__(self):
        self.rows: list[tuple[str, float]] = []

    def time(self, label: str):
        timings = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timings.rows.append((label, time.perf_counter() - self.t0))

        return _Ctx()

    def footer(self) -> str:
        lines = [TIMING_HEADER]
        lines += [f"{label}: {dt:.3f}s" for label, dt in self.rows]
        return "\n".join(lines)


def _read_machine(path: str):
    return parse_machine(Path(path).read_text(), name=Path(path).stem)


def _read_pera(path: str) -> Pera:
    return Pera.from_text(Path(path).read_text())


def _parse_valuation_flag(flag: str) -> dict[str, Fraction]:
    return parse_valuation([part.strip() for part in flag.split(",")])


def _valuate_rescaled(a: Pera, *valuations: dict[str, Fraction]):
    """Valuate under a common integer scale; returns (scale, list of Peras)."""
    merged: dict[str, Fraction] = {}
    for i, v in enumerate(valuations):
        for name, x in v.items():
            merged[f"{i}:{name}"] = x
    ints, scale = integerize(merged)
    scaled = a.rescale(scale) if scale != 1 else a
    out = []
    for i, v in enumerate(valuations):
        out.append(scaled.valuate({name: ints[f"{i}:{name}"] for name in v}))
    return scale, out


def _check_parameters(a: Pera, vals: dict[str, Fraction]) -> None:
    missing = [p for p in a.parameters if p not in vals]
    if missing:
        raise ModelError(f"no value given for parameter(s): {', '.join(missing)}")
    extra = [p for p in vals if p not in a.parameters]
    if extra:
        raise ModelError(f"valuation names unknown parameter(s): {', '.join(extra)}")


def _fmt_valuation(vals: dict[str, Fraction]) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(vals.items()))


def _sample_stats(s: LanguageSample) -> list[str]:
    lines = [f"prefix words: {len(s.prefix_words)}"]
    if s.semantics == "maximal":
        lines.append(f"maximal finite words: {len(s.maximal_finite_words)}")
    elif s.semantics in ("reach", "safety"):
        lines.append(f"accepted words: {len(s.accepted_words)}")
    else:
        lines = [f"lassos: {len(s.lassos)}"]
    return lines


def _sample_body(s: LanguageSample) -> list[str]:
    lines = []
    if s.semantics == "buchi":
        lines.append("-- lassos --")
        lines.append(s.lassos_text().rstrip("\n"))
        return lines
    lines.append("-- prefix --")
    lines.append(s.words_text("prefix").rstrip("\n"))
    if s.semantics == "maximal":
        lines.append("-- maximal finite --")
        lines.append(s.words_text("maximal_finite").rstrip("\n"))
    else:
        lines.append("-- accepted --")
        lines.append(s.words_text("accepted").rstrip("\n"))
    return lines


def _verdict_line(res, left: str, right: str) -> str:
    if res.equal:
        return "verdict: equal up to bound"
    if res.field == "lassos":
        stem, cyc = res.witness
        shown = " ".join(stem) + " | " + " ".join(cyc)
    else:
        shown = " ".join(res.witness) if res.witness else "(empty word)"
    owner = left if res.owner == "left" else right
    field = res.field.replace("_", " ")
    return f"verdict: differs; {field} witness [{shown}] only on the {owner} side"


# -- subcommands ---------------------------------------------------------


def cmd_encode(args) -> int:
    m = _read_machine(args.machine)
    a = build(m, args.variant)
    out = Path(args.output) if args.output else Path(f"{Path(args.machine).stem}.{args.variant}.pera")
    out.write_text(a.to_text())
    print(f"wrote {out}: {len(a.locations)} locations, {len(a.edges)} edges")
    return 0


def cmd_lang(args) -> int:
    timings = _Timings()
    with timings.time("parse"):
        a = _read_pera(args.pera)
        vals = _parse_valuation_flag(args.valuation) if args.valuation else {}
        _check_parameters(a, vals)
        scale, (va,) = _valuate_rescaled(a, vals)
    cfg = ExplorationConfig(depth=args.depth, node_limit=args.node_limit)
    with timings.time("enumerate"):
        sample = enumerate_language(va, cfg, args.semantics)
    print(f"automaton: {args.pera}")
    print(f"valuation: {_fmt_valuation(vals) or '(none)'}")
    if scale != 1:
        print(f"rescaled by {scale} to clear denominators")
    print(f"semantics: {args.semantics}  depth: {args.depth}")
    for line in _sample_stats(sample):
        print(line)
    for line in _sample_body(sample):
        print(line)
    print(timings.footer())
    return 0


def cmd_compare(args) -> int:
    timings = _Timings()
    if len(args.valuation) != 2:
        raise ModelError("compare needs exactly two -p flags (valuation A and valuation B)")
    with timings.time("parse"):
        a = _read_pera(args.pera)
        va_flag, vb_flag = (_parse_valuation_flag(f) for f in args.valuation)
        _check_parameters(a, va_flag)
        _check_parameters(a, vb_flag)
        scale, (va, vb) = _valuate_rescaled(a, va_flag, vb_flag)
    cfg = ExplorationConfig(depth=args.depth, node_limit=args.node_limit)
    with timings.time("enumerate A"):
        sa = enumerate_language(va, cfg, args.semantics)
    with timings.time("enumerate B"):
        sb = enumerate_language(vb, cfg, args.semantics)
    res = compare_samples(sa, sb)
    print(f"automaton: {args.pera}")
    print(f"valuation A: {_fmt_valuation(va_flag)}")
    print(f"valuation B: {_fmt_valuation(vb_flag)}")
    if scale != 1:
        print(f"rescaled by {scale} to clear denominators")
    print(f"semantics: {args.semantics}  depth: {args.depth}")
    for side, s in (("A", sa), ("B", sb)):
        print(f"{side}: " + ", ".join(_sample_stats(s)))
    print(_verdict_line(res, "A", "B"))
    print(timings.footer())
    return 0


def cmd_theorem_check(args) -> int:
    timings = _Timings()
    with timings.time("encode"):
        m = _read_machine(args.machine)
        a = build(m, "wrapped")
    probe = run(m, 1000)
    halt_note = (
        f"halts after {probe.steps_taken} steps"
        if probe.halted
        else "no halt within 1000 steps"
    )
    values = [Fraction(v.strip()) for v in args.values.split(",") if v.strip()]
    if not values:
        raise ModelError("--values must list at least one rational")
    cfg = ExplorationConfig(depth=args.depth, node_limit=args.node_limit)

    print(f"machine: {m.name}  states: {len(m.states)}  initial: {m.initial}  halt: {m.halt}")
    print(f"interpreter: {halt_note}")
    print(f"encoding: wrapped  locations: {len(a.locations)}  edges: {len(a.edges)}")
    print("reference valuation: p=0")
    print(f"semantics: {args.semantics}  depth: {args.depth}")

    with timings.time("enumerate p=0"):
        scale, (ref_auto,) = _valuate_rescaled(a, {"p": Fraction(0)})
        ref = enumerate_language(ref_auto, cfg, args.semantics)
    any_equal = False
    all_differ = True
    for v in values:
        label = f"p={v}"
        print(f"-- valuation {label} --")
        try:
            with timings.time(f"enumerate {label}"):
                scale, (va,) = _valuate_rescaled(a, {"p": v})
                if scale != 1:
                    ref_v = enumerate_language(
                        a.rescale(scale).valuate({"p": 0}), cfg, args.semantics
                    )
                else:
                    ref_v = ref
                s = enumerate_language(va, cfg, args.semantics)
        except ResourceExhausted as exc:
            print(f"resource exhaustion: {exc}")
            all_differ = False
            continue
        if scale != 1:
            print(f"rescaled by {scale} to clear denominators")
        for line in _sample_stats(s):
            print(line)
        res = compare_samples(ref_v, s)
        print(_verdict_line(res, "reference", label))
        if res.equal:
            any_equal = True
            all_differ = False
    if any_equal:
        print("verdict: consistent with halting")
    elif all_differ:
        print("verdict: consistent with non-halting")
    else:
        print("verdict: inconclusive (some valuations exhausted resources)")
    print(timings.footer())
    return 0


def cmd_simulate_2cm(args) -> int:
    m = _read_machine(args.machine)
    result = run(m, args.steps)
    print(f"machine: {m.name}  states: {len(m.states)}  initial: {m.initial}  halt: {m.halt}")
    for i, (state, c1, c2) in enumerate(result.configs):
        print(f"step {i}: {state} c1={c1} c2={c2}")
    if result.halted:
        print(f"halted after {result.steps_taken} steps")
    else:
        print(f"not halted within {args.steps} steps")
    return 0


# -- wiring ---------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="peralab",
        description="workbench for parametric event-recording automata",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="compile a counter machine to an automaton")
    enc.add_argument("machine", help="machine description file")
    enc.add_argument("--variant", choices=VARIANTS, default="plain")
    enc.add_argument("-o", "--output", help="output path (default: <machine>.<variant>.pera)")
    enc.set_defaults(fn=cmd_encode)

    lang = sub.add_parser("lang", help="enumerate one valuation's language")
    lang.add_argument("pera", help="serialized automaton file")
    lang.add_argument("-p", "--valuation", help="parameter values, e.g. p=2 or p=1/2")
    lang.add_argument("-k", "--depth", type=int, default=8)
    lang.add_argument("--semantics", choices=SEMANTICS, default="maximal")
    lang.add_argument("--node-limit", type=int, default=200_000)
    lang.set_defaults(fn=cmd_lang)

    cmp_ = sub.add_parser("compare", help="compare two valuations of one automaton")
    cmp_.add_argument("pera", help="serialized automaton file")
    cmp_.add_argument("-p", "--valuation", action="append", default=[],
                      help="give twice: valuation A, then valuation B")
    cmp_.add_argument("-k", "--depth", type=int, default=8)
    cmp_.add_argument("--semantics", choices=SEMANTICS, default="maximal")
    cmp_.add_argument("--node-limit", type=int, default=200_000)
    cmp_.set_defaults(fn=cmd_compare)

    thm = sub.add_parser("theorem-check", help="halting-dichotomy experiment on a machine")
    thm.add_argument("machine", help="machine description file")
    thm.add_argument("--values", required=True, help="comma list of p values, e.g. 1,2,3,4")
    thm.add_argument("-k", "--depth", type=int, default=8)
    thm.add_argument("--semantics", choices=SEMANTICS, default="maximal")
    thm.add_argument("--node-limit", type=int, default=200_000)
    thm.set_defaults(fn=cmd_theorem_check)

    sim = sub.add_parser("simulate-2cm", help="step the counter-machine interpreter")
    sim.add_argument("machine", help="machine description file")
    sim.add_argument("--steps", type=int, default=10)
    sim.set_defaults(fn=cmd_simulate_2cm)

    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ResourceExhausted as exc:
        print(f"resource exhaustion: {exc}", file=sys.stderr)
        return 2
    except (ModelError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
