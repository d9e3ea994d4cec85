"""Concrete and symbolic semantics of a valuated automaton.

The symbolic layer computes delay-closed discrete successors over
zones, detects blocking states (concrete states from which no delay
reaches any fireable edge), and builds a finite zone graph via
maximum-constant widening.  The concrete layer replays explicit
delay/action scripts with exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import Atom, Edge, Guard, ModelError, Pera
from . import zones as Z


class ResourceExhausted(RuntimeError):
    """Exploration hit the configured node limit."""


class SimulationError(ValueError):
    """A script step could not be replayed; carries the failing index."""

    def __init__(self, index: int, reason: str):
        super().__init__(f"step {index}: {reason}")
        self.index = index
        self.reason = reason


@dataclass(frozen=True)
class ExplorationConfig:
    depth: int = 8
    max_const: int | None = None
    node_limit: int = 200_000
    extrapolate: bool = True


Sym = tuple[str, Z.Dbm]


def _atom_constraints(atom: Atom, clocks: Sequence[str]) -> list[tuple[int, int, int]]:
    """Encode one constant atom as DBM constraint triples."""
    if atom.param is not None:
        raise ModelError(f"atom {atom.text()} still parametric; valuate first")
    i = clocks.index(atom.clock) + 1
    c = atom.offset
    out = []
    if atom.rel in ("<", "<=", "="):
        out.append((i, 0, Z.lt(c) if atom.rel == "<" else Z.le(c)))
    if atom.rel in (">", ">=", "="):
        out.append((0, i, Z.lt(-c) if atom.rel == ">" else Z.le(-c)))
    return out


def guard_zone(guard: Guard, clocks: Sequence[str]) -> Z.Dbm | None:
    cons: list[tuple[int, int, int]] = []
    for a in guard:
        cons.extend(_atom_constraints(a, clocks))
    return Z.from_constraints(clocks, cons)


def atom_holds(atom: Atom, val: Mapping[str, Fraction]) -> bool:
    v = val[atom.clock]
    c = atom.offset
    return {
        "<": v < c,
        "<=": v <= c,
        "=": v == c,
        ">=": v >= c,
        ">": v > c,
    }[atom.rel]


def guard_holds(guard: Guard, val: Mapping[str, Fraction]) -> bool:
    return all(atom_holds(a, val) for a in guard)


class Analyzer:
    """Per-automaton caches for symbolic stepping.

    Requires a fully valuated automaton.  Locations whose invariant is
    unsatisfiable are legal (they are simply uninhabitable); an edge
    whose guard is unsatisfiable never fires.
    """

    def __init__(self, a: Pera, cfg: ExplorationConfig | None = None):
        if a.parameters:
            raise ModelError("automaton still has parameters; valuate it first")
        self.automaton = a
        self.cfg = cfg or ExplorationConfig()
        self.clocks = a.clocks
        self.max_const = self.cfg.max_const if self.cfg.max_const is not None else a.max_constant()
        if self.max_const < a.max_constant():
            raise ModelError("max_const below the largest constant in the automaton")
        self.inv_zone: dict[str, Z.Dbm | None] = {
            loc: guard_zone(a.invariant(loc), self.clocks) for loc in a.locations
        }
        self.edges_from: dict[str, list[Edge]] = {loc: [] for loc in a.locations}
        for e in a.edges:
            self.edges_from[e.source].append(e)
        self._guard_cache: dict[Edge, Z.Dbm | None] = {}
        self._fire_cache: dict[Edge, Z.Dbm | None] = {}
        self._blocking_cache: dict[Sym, bool] = {}

    # -- symbolic steps ------------------------------------------------

    def initial(self) -> Sym:
        inv = self.inv_zone[self.automaton.initial]
        zero = Z.origin(self.clocks)
        if inv is None or Z.intersect(zero, inv) is None:
            raise ModelError("initial invariant excludes the all-zero valuation")
        return (self.automaton.initial, Z.intersect(zero, inv))

    def _guard_dbm(self, e: Edge) -> Z.Dbm | None:
        if e not in self._guard_cache:
            self._guard_cache[e] = guard_zone(e.guard, self.clocks)
        return self._guard_cache[e]

    def _fire_region(self, e: Edge) -> Z.Dbm | None:
        """Zone of source-invariant points where `e` can fire usefully.

        Conjoins guard, source invariant, and the pull-back of the
        target invariant through the edge's reset: atoms on the reset
        clock are decided at zero, the rest constrain the unchanged
        clocks directly.
        """
        if e in self._fire_cache:
            return self._fire_cache[e]
        reset_clock = self.automaton.clock_of(e.action)
        cons: list[tuple[int, int, int]] = []
        feasible = True
        for atom in e.guard:
            cons.extend(_atom_constraints(atom, self.clocks))
        for atom in self.automaton.invariant(e.source):
            cons.extend(_atom_constraints(atom, self.clocks))
        for atom in self.automaton.invariant(e.target):
            if atom.clock == reset_clock:
                if not atom_holds(atom, {reset_clock: Fraction(0)}):
                    feasible = False
                    break
                continue
            cons.extend(_atom_constraints(atom, self.clocks))
        region = Z.from_constraints(self.clocks, cons) if feasible else None
        self._fire_cache[e] = region
        return region

    def successor(self, s: Sym, e: Edge) -> Sym | None:
        """Delay-closed discrete successor, None when unfireable."""
        loc, zone = s
        if e.source != loc:
            raise ModelError("edge does not start at the state's location")
        inv = self.inv_zone[loc]
        if inv is None:
            return None
        stepped = Z.intersect(Z.up(zone), inv)
        if stepped is None:
            return None
        g = self._guard_dbm(e)
        if g is None:
            return None
        stepped = Z.intersect(stepped, g)
        if stepped is None:
            return None
        stepped = Z.reset(stepped, self.automaton.clock_of(e.action))
        tinv = self.inv_zone[e.target]
        if tinv is None:
            return None
        stepped = Z.intersect(stepped, tinv)
        if stepped is None:
            return None
        return (e.target, stepped)

    def successors(self, s: Sym) -> list[tuple[Edge, Sym]]:
        out = []
        for e in self.edges_from[s[0]]:
            nxt = self.successor(s, e)
            if nxt is not None:
                out.append((e, nxt))
        return out

    def widen(self, s: Sym) -> Sym:
        return (s[0], Z.extrapolate(s[1], self.max_const))

    # -- blocking ----------------------------------------------------------

    def blocking_subset(self, s: Sym) -> Z.Federation:
        """Concrete states in `s` with no delay-then-discrete extension.

        Start from the whole zone and carve out, per edge, every point
        that can wait (inside the invariant) until the edge's firing
        region.  What remains blocks.
        """
        loc, zone = s
        inv = self.inv_zone[loc]
        fed = Z.Federation(self.clocks, (zone,))
        if inv is None:
            return fed
        for e in self.edges_from[loc]:
            region = self._fire_region(e)
            if region is None:
                continue
            reachable = Z.time_pred(region, inv)
            if reachable is None:
                continue
            fed = fed.subtract_zone(reachable)
            if fed.is_empty():
                break
        return fed

    def is_blocking(self, s: Sym) -> bool:
        if s not in self._blocking_cache:
            self._blocking_cache[s] = not self.blocking_subset(s).is_empty()
        return self._blocking_cache[s]


# -- zone graph --------------------------------------------------------------


@dataclass
class ZoneGraph:
    nodes: list[Sym]
    edges: list[tuple[int, str, int]]            # (source id, action, target id)
    blocking: list[bool]
    initial: int = 0
    node_index: dict[Sym, int] = field(default_factory=dict)

    def to_text(self) -> str:
        lines = []
        for i, (loc, zone) in enumerate(self.nodes):
            flag = "blocking" if self.blocking[i] else "live"
            lines.append(f"node {i} {loc} [{flag}] {zone.pretty()}")
        for src, act, dst in self.edges:
            lines.append(f"edge {src} {act} {dst}")
        return "\n".join(lines) + "\n"


def zone_graph(a: Pera, cfg: ExplorationConfig | None = None, *, depth: int | None = None) -> ZoneGraph:
    """Widened reachability graph; explores to fixpoint unless bounded.

    Nodes are deduplicated by location plus widened zone; each carries
    a flag saying whether it contains blocking concrete states.
    """
    cfg = cfg or ExplorationConfig()
    ana = Analyzer(a, cfg)
    start = ana.widen(ana.initial())
    g = ZoneGraph(nodes=[start], edges=[], blocking=[ana.is_blocking(start)])
    g.node_index[start] = 0
    frontier = [(0, start)]
    level = 0
    while frontier:
        if depth is not None and level >= depth:
            break
        level += 1
        nxt: list[tuple[int, Sym]] = []
        for sid, s in frontier:
            for e, succ in ana.successors(s):
                w = ana.widen(succ)
                tid = g.node_index.get(w)
                if tid is None:
                    tid = len(g.nodes)
                    if tid >= cfg.node_limit:
                        raise ResourceExhausted(f"zone graph exceeded {cfg.node_limit} nodes")
                    g.nodes.append(w)
                    g.blocking.append(ana.is_blocking(w))
                    g.node_index[w] = tid
                    nxt.append((tid, w))
                g.edges.append((sid, e.action, tid))
        frontier = nxt
    # drop duplicate edges from re-expansion of shared successors
    g.edges = sorted(set(g.edges))
    return g


# -- concrete replay ----------------------------------------------------------


ScriptStep = tuple[Fraction | int, str, str]      # (delay, action, target location)


@dataclass(frozen=True)
class RunStep:
    delay: Fraction
    edge: Edge
    valuation: tuple[Fraction, ...]   # clock values right after the discrete step


@dataclass(frozen=True)
class Run:
    clocks: tuple[str, ...]
    steps: tuple[RunStep, ...]
    final_location: str

    @property
    def untimed_word(self) -> tuple[str, ...]:
        return tuple(s.edge.action for s in self.steps)

    @property
    def timed_word(self) -> tuple[tuple[str, Fraction], ...]:
        out = []
        now = Fraction(0)
        for s in self.steps:
            now += s.delay
            out.append((s.edge.action, now))
        return tuple(out)


def concrete_simulate(a: Pera, script: Sequence[ScriptStep]) -> Run:
    """Replay an explicit script from the initial state.

    Every delay is checked against the location invariant at both ends
    (invariants are convex, so the whole delay is covered), and every
    discrete step must match exactly one satisfiable edge with the
    scripted action and target.
    """
    if a.parameters:
        raise ModelError("automaton still has parameters; valuate it first")
    clocks = a.clocks
    val: dict[str, Fraction] = {c: Fraction(0) for c in clocks}
    loc = a.initial
    if not guard_holds(a.invariant(loc), val):
        raise SimulationError(0, "initial state violates its invariant")
    steps: list[RunStep] = []
    for idx, (delay, action, target) in enumerate(script):
        d = Fraction(delay)
        if d < 0:
            raise SimulationError(idx, "negative delay")
        after = {c: v + d for c, v in val.items()}
        if not guard_holds(a.invariant(loc), after):
            raise SimulationError(idx, f"delay {d} leaves the invariant of {loc}")
        fired = None
        for e in a.edges:
            if e.source != loc or e.action != action or e.target != target:
                continue
            if not guard_holds(e.guard, after):
                continue
            if fired is not None:
                raise SimulationError(idx, "ambiguous edge choice")
            fired = e
        if fired is None:
            raise SimulationError(idx, f"no fireable {action} edge {loc} -> {target}")
        after[a.clock_of(action)] = Fraction(0)
        if not guard_holds(a.invariant(target), after):
            raise SimulationError(idx, f"target invariant of {target} violated")
        val = after
        loc = target
        steps.append(RunStep(d, fired, tuple(val[c] for c in clocks)))
    return Run(tuple(clocks), tuple(steps), loc)
