"""Compiling two-counter machines into event-recording automata.

The compiled automaton simulates the machine against a parametric
period: one machine step per period, ticks marked by a dedicated clock,
counter values carried as clock offsets, and a step-budget clock that
cuts the simulation off after one period's worth of steps.  A wrapper
turns the gadget into the language-comparison harness; sink, acceptance
and relabeling variants adapt it to the other language definitions.

Conventions: parameter `p`; actions `a_t, a_1, a_2, a_z` with clocks
`t, x1, x2, z`; variants add `a_3`/`x3`.  The machine state `s` becomes
locations `l_<s>` (main) and `lbar_<s>` (intermediary); the halt state
always becomes `l_halt`/`lbar_halt` regardless of its source name.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Atom, Edge, Guard, ModelError, Pera
from .minsky import Inc, Machine, TestDec, step as machine_step

PARAM = "p"
SIGMA = (("a_t", "t"), ("a_1", "x1"), ("a_2", "x2"), ("a_z", "z"))
EXTRA_ACTION = ("a_3", "x3")

RESERVED = ("start", "acc1", "acc2", "sink")


def main_loc(m: Machine, state: str) -> str:
    return "l_halt" if state == m.halt else f"l_{state}"


def bar_loc(m: Machine, state: str) -> str:
    return "lbar_halt" if state == m.halt else f"lbar_{state}"


def _counter_clock(k: int) -> str:
    return "x1" if k == 1 else "x2"


def _counter_action(k: int) -> str:
    return "a_1" if k == 1 else "a_2"


def encode_core(m: Machine) -> Pera:
    """The simulation gadget: two locations per machine state.

    Counter semantics: at every tick instant the counter clocks equal
    the counter values.  An increment is realized by resetting the
    counter clock one time unit before the tick, a decrement one unit
    after, and the zero test by firing exactly at the tick when the
    counter clock was just reset there.  The budget clock `z` is only
    reset on the return edge of each step; its strict invariant stops
    every simulation after one period's worth of machine steps.
    """
    for s in m.states:
        if s != m.halt and s in RESERVED + ("halt",):
            raise ModelError(f"machine state name {s!r} collides with an encoding location")

    inv: Guard = (
        Atom("t", "<=", 0, PARAM),
        Atom("x1", "<=", 0, PARAM),
        Atom("x2", "<=", 0, PARAM),
        Atom("z", "<", 0, PARAM),
    )
    locations = [main_loc(m, s) for s in m.states] + [bar_loc(m, s) for s in m.states]
    edges: list[Edge] = []

    for loc in locations:
        edges.append(Edge(loc, (Atom("t", "=", 0, PARAM),), "a_t", loc))
        edges.append(Edge(loc, (Atom("x1", "=", 0, PARAM),), "a_1", loc))
        edges.append(Edge(loc, (Atom("x2", "=", 0, PARAM),), "a_2", loc))

    for s, ins in m.program:
        src = main_loc(m, s)
        if isinstance(ins, Inc):
            xk = _counter_clock(ins.counter)
            edges.append(Edge(src, (Atom(xk, "=", -1, PARAM),), _counter_action(ins.counter), bar_loc(m, ins.goto)))
        else:
            xk = _counter_clock(ins.counter)
            edges.append(Edge(src, (Atom("t", "=", 0), Atom(xk, "=", 0)), "a_t", bar_loc(m, ins.if_zero)))
            for t_side in (Atom("t", "<", 1), Atom("t", ">", 1)):
                edges.append(
                    Edge(src, (Atom(xk, "=", 1), t_side), _counter_action(ins.counter), bar_loc(m, ins.if_pos))
                )

    for s in m.states:
        edges.append(
            Edge(
                bar_loc(m, s),
                (Atom("z", "=", -1, PARAM), Atom("t", ">", 0), Atom("t", "<", 0, PARAM)),
                "a_z",
                main_loc(m, s),
            )
        )

    return Pera(
        actions=SIGMA,
        parameters=(PARAM,),
        locations=tuple(locations),
        initial=main_loc(m, m.initial),
        edges=tuple(edges),
        invariants={loc: inv for loc in locations},
    )


def wrap_preservation(gadget: Pera) -> Pera:
    """The comparison harness around a gadget.

    A fresh start location branches three ways on any action: into the
    gadget (possible only for positive periods), into a free-running
    accepting loop (always), or into a second loop reachable only at
    period zero.  The halt location gets an unconditional way out, so a
    successfully finished simulation never blocks.
    """
    if "l_halt" not in gadget.locations:
        raise ModelError("gadget has no l_halt location; wrap the output of encode_core")
    for name in ("l_start", "l_acc1", "l_acc2"):
        if name in gadget.locations:
            raise ModelError(f"location {name!r} already present")
    edges = list(gadget.edges)
    for act, clk in SIGMA:
        edges.append(Edge("l_start", (Atom(clk, "=", 0), Atom(clk, "<", 0, PARAM)), act, gadget.initial))
        edges.append(Edge("l_start", (), act, "l_acc1"))
        edges.append(Edge("l_start", (Atom(clk, "=", 0), Atom(clk, "=", 0, PARAM)), act, "l_acc2"))
        edges.append(Edge("l_halt", (), act, "l_acc2"))
        edges.append(Edge("l_acc1", (), act, "l_acc1"))
        edges.append(Edge("l_acc2", (), act, "l_acc2"))
    return Pera(
        actions=gadget.actions,
        parameters=gadget.parameters,
        locations=gadget.locations + ("l_start", "l_acc1", "l_acc2"),
        initial="l_start",
        edges=tuple(edges),
        invariants=dict(gadget.invariants),
        accepting=gadget.accepting,
    )


def add_sink(a: Pera) -> Pera:
    """Escape hatch for exhausted simulations.

    Every intermediary location gets edges into a fresh sink, enabled
    exactly when the budget clock has expired at a tick boundary.  The
    tick clock reads either a full period or zero there depending on
    whether the blocked step was a zero test (which pins it to zero),
    so both readings are provided.
    """
    bars = [loc for loc in a.locations if loc.startswith("lbar_")]
    if not bars:
        raise ModelError("no intermediary locations; sink applies to encoded gadgets")
    if "l_sink" in a.locations:
        raise ModelError("l_sink already present")
    edges = list(a.edges)
    for bar in bars:
        for act, _ in SIGMA:
            edges.append(Edge(bar, (Atom("t", "=", 0, PARAM), Atom("z", "=", -1, PARAM)), act, "l_sink"))
            edges.append(Edge(bar, (Atom("t", "=", 0), Atom("z", "=", -1, PARAM)), act, "l_sink"))
    return Pera(
        actions=a.actions,
        parameters=a.parameters,
        locations=a.locations + ("l_sink",),
        initial=a.initial,
        edges=tuple(edges),
        invariants=dict(a.invariants),
        accepting=a.accepting,
    )


def buchi_variant(a: Pera) -> Pera:
    """Acceptance marking plus a fresh self-loop action on the sink."""
    for need in ("l_sink", "l_acc1", "l_acc2"):
        if need not in a.locations:
            raise ModelError(f"{need!r} missing; build the wrapped+sink automaton first")
    return Pera(
        actions=a.actions + (EXTRA_ACTION,),
        parameters=a.parameters,
        locations=a.locations,
        initial=a.initial,
        edges=a.edges + (Edge("l_sink", (), EXTRA_ACTION[0], "l_sink"),),
        invariants=dict(a.invariants),
        accepting=frozenset({"l_acc1", "l_acc2", "l_sink"}),
    )


def safety_variant(a: Pera) -> Pera:
    """Sink entry relabeled with the fresh action, duplicates removed.

    Relabeling makes the sink visible in the word itself, which is what
    the prefix-language comparison keys on.
    """
    if "l_sink" not in a.locations:
        raise ModelError("l_sink missing; build the wrapped+sink automaton first")
    seen: set[Edge] = set()
    edges: list[Edge] = []
    for e in a.edges:
        if e.target == "l_sink" and e.source != "l_sink":
            e = Edge(e.source, e.guard, EXTRA_ACTION[0], e.target)
        if e in seen:
            continue
        seen.add(e)
        edges.append(e)
    return Pera(
        actions=a.actions + (EXTRA_ACTION,),
        parameters=a.parameters,
        locations=a.locations,
        initial=a.initial,
        edges=tuple(edges),
        invariants=dict(a.invariants),
        accepting=a.accepting,
    )


VARIANTS = ("plain", "wrapped", "sink", "buchi", "safety")


def build(m: Machine, variant: str = "wrapped") -> Pera:
    if variant not in VARIANTS:
        raise ModelError(f"unknown variant {variant!r}; pick one of {', '.join(VARIANTS)}")
    a = encode_core(m)
    if variant == "plain":
        return a
    a = wrap_preservation(a)
    if variant == "wrapped":
        return a
    a = add_sink(a)
    if variant == "sink":
        return a
    return buchi_variant(a) if variant == "buchi" else safety_variant(a)


# -- deterministic schedule ----------------------------------------------


@dataclass(frozen=True)
class Checkpoint:
    """Expectation at a settled tick: counter clocks mirror the counters.

    `after_index` is the script position after which the check applies;
    -1 means the initial instant, before any step.
    """

    after_index: int
    steps_done: int
    c1: int
    c2: int


@dataclass(frozen=True)
class Schedule:
    """A concrete replay script through the plain gadget encoding."""

    period: int
    steps: int
    script: tuple[tuple[Fraction, str, str], ...]   # (delay, action, target)
    checkpoints: tuple[Checkpoint, ...]


def derive_schedule(m: Machine, period: int) -> Schedule:
    """Forced run of the gadget encoding at a given integer period.

    Simulates the machine for as many steps as the budget (one less
    than the period) or the halting time allows, emitting the exact
    delays at which each wrap, instruction and return edge fires, plus
    a checkpoint at every settled tick instant.  The generator tracks
    clock values itself and fails loudly if the construction's timing
    story ever disagrees with it.
    """
    if period < 1:
        raise ModelError("schedule derivation needs a positive integer period")
    # how many steps the machine itself can make
    budget = period - 1
    cfg = (m.initial, 0, 0)
    halins = 0
    probe = cfg
    while halins < budget and m.instruction(probe[0]) is not None:
        probe = machine_step(m, probe)
        halins += 1
    n_steps = halins

    clocks = {"t": Fraction(0), "x1": Fraction(0), "x2": Fraction(0), "z": Fraction(0)}
    script: list[tuple[Fraction, str, str]] = []
    checkpoints: list[Checkpoint] = []
    at_main = True
    state, c1, c2 = cfg
    steps_done = 0
    p = Fraction(period)

    def advance(d: Fraction) -> None:
        for c in clocks:
            clocks[c] += d

    def emit(d: Fraction, action: str, target: str, reset: str) -> None:
        advance(d)
        clocks[reset] = Fraction(0)
        script.append((d, action, target))

    def maybe_checkpoint() -> None:
        if clocks["t"] == 0 and clocks["x1"] < p and clocks["x2"] < p:
            if clocks["x1"] != c1 or clocks["x2"] != c2:
                raise AssertionError(
                    f"tick desync: clocks ({clocks['x1']},{clocks['x2']}) vs counters ({c1},{c2})"
                )
            checkpoints.append(Checkpoint(len(script) - 1, steps_done, c1, c2))

    guard_rounds = 0
    while not (at_main and steps_done == n_steps):
        guard_rounds += 1
        if guard_rounds > 20 * period * (n_steps + 2) + 100:
            raise AssertionError("schedule generator failed to converge")
        here = main_loc(m, state) if at_main else bar_loc(m, state)
        cand: list[tuple[Fraction, int, str]] = []
        for prio, (clk, act) in enumerate((("t", "a_t"), ("x1", "a_1"), ("x2", "a_2"))):
            cand.append((p - clocks[clk], prio, f"wrap:{act}:{clk}"))
        if at_main:
            ins = m.instruction(state)
            if isinstance(ins, Inc):
                xk = _counter_clock(ins.counter)
                d = (p - 1) - clocks[xk]
                if d >= 0:
                    cand.append((d, 3, f"inc:{ins.counter}:{ins.goto}"))
            elif isinstance(ins, TestDec):
                xk = _counter_clock(ins.counter)
                val = c1 if ins.counter == 1 else c2
                if val == 0:
                    d = -clocks["t"] % p
                    cand.append((d, 3, f"ifz:{ins.counter}:{ins.if_zero}"))
                else:
                    d = 1 - clocks[xk] if clocks[xk] <= 1 else (p - clocks[xk]) + 1
                    cand.append((d, 3, f"dec:{ins.counter}:{ins.if_pos}"))
        else:
            d = (p - 1) - clocks["z"]
            if d < 0:
                raise AssertionError("budget clock overran the return moment")
            cand.append((d, 3, f"ret:{state}"))
        delay, _, ev = min(cand, key=lambda c: (c[0], c[1]))
        if delay < 0:
            raise AssertionError(f"negative delay for {ev}")
        kind, _, rest = ev.partition(":")
        if kind == "wrap":
            act, clk = rest.split(":")
            # fires only when the clock really is at the period boundary
            if clocks[clk] + delay != p:
                raise AssertionError("wrap scheduled off the boundary")
            emit(delay, act, here, clk)
            maybe_checkpoint()
            continue
        if kind == "inc":
            kstr, goto = rest.split(":")
            k = int(kstr)
            xk = _counter_clock(k)
            if clocks[xk] + delay != p - 1:
                raise AssertionError("increment scheduled off its firing value")
            emit(delay, _counter_action(k), bar_loc(m, goto), xk)
            state = goto
            if k == 1:
                c1 += 1
            else:
                c2 += 1
            steps_done += 1
            at_main = False
            continue
        if kind == "ifz":
            kstr, goto = rest.split(":")
            xk = _counter_clock(int(kstr))
            if clocks["t"] + delay != 0 and clocks["t"] + delay != p:
                raise AssertionError("zero test away from a tick")
            if clocks[xk] + delay not in (Fraction(0), p):
                raise AssertionError("zero test with a nonzero counter clock")
            emit(delay, "a_t", bar_loc(m, goto), "t")
            state = goto
            steps_done += 1
            at_main = False
            maybe_checkpoint()
            continue
        if kind == "dec":
            kstr, goto = rest.split(":")
            k = int(kstr)
            xk = _counter_clock(k)
            if clocks[xk] + delay != 1:
                raise AssertionError("decrement away from its firing value")
            if clocks["t"] + delay == 1:
                raise AssertionError("decrement at the forbidden tick offset")
            emit(delay, _counter_action(k), bar_loc(m, goto), xk)
            state = goto
            if k == 1:
                c1 -= 1
            else:
                c2 -= 1
            steps_done += 1
            at_main = False
            continue
        # return edge
        t_after = clocks["t"] + delay
        if clocks["z"] + delay != p - 1 or not (0 < t_after < p):
            raise AssertionError("return scheduled outside its window")
        emit(delay, "a_z", main_loc(m, state), "z")
        at_main = True

    # settle to the next tick so the last step is witnessed at t = 0
    here = main_loc(m, state)
    settle_rounds = 0
    while not (clocks["t"] == 0 and clocks["x1"] < p and clocks["x2"] < p):
        settle_rounds += 1
        if settle_rounds > 8:
            raise AssertionError("settling phase failed to reach a tick")
        delay, _, act, clk = min(
            (p - clocks[clk], prio, act, clk)
            for prio, (clk, act) in enumerate((("t", "a_t"), ("x1", "a_1"), ("x2", "a_2")))
        )
        emit(delay, act, here, clk)
    maybe_checkpoint()

    return Schedule(period, n_steps, tuple(script), tuple(checkpoints))
