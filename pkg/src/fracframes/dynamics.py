"""One-dimensional transition dynamics ``t -> (t - l) / R`` and the search for
finite minimal invariant sets, which decides completeness of the frame."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .candidate import DEFAULT_TOL, FrameCandidate, check_isometry
from .errors import IsometryError, UnsupportedError
from .ifs import mask, mask_vanishes_exact


def _require_supported(c: FrameCandidate):
    if c.d != 1:
        raise UnsupportedError("transition dynamics are implemented for d == 1 only")
    if c.sys.scalar < 2:
        raise UnsupportedError("confinement interval is only known for R >= 2")
    if c.sys.N < 2:
        raise UnsupportedError("need at least two digits")


def _g(R: int, t: Fraction, l: int) -> Fraction:
    return (t - l) / R


@dataclass(frozen=True)
class Transition:
    source: Fraction
    label: int
    target: Fraction
    weight: float


def transition_targets(c: FrameCandidate, t) -> list[Transition]:
    """Possible one-step transitions from ``t``.

    A transition with label ``l`` is possible iff ``alpha_l != 0`` and the
    mask does not vanish at ``g_l(t)``; feasibility is decided exactly, the
    weight ``|alpha_l|^2 |m_B(g_l t)|^2`` is numeric.
    """
    if c.d != 1:
        raise UnsupportedError("transition dynamics are implemented for d == 1 only")
    t = Fraction(t)
    R = c.sys.scalar
    out = []
    for i in c.active:
        l = c.L[i][0]
        y = _g(R, t, l)
        if mask_vanishes_exact(c.sys, y):
            continue
        out.append(Transition(t, l, y, float(c.alpha_sq[i]) * abs(mask(c.sys, y)) ** 2))
    return out


def transition_weight_total(c: FrameCandidate, t) -> float:
    """``sum over all labels`` of the transition weights (1 under the isometry)."""
    R = c.sys.scalar
    t = Fraction(t)
    return sum(float(c.alpha_sq[i]) * abs(mask(c.sys, _g(R, t, c.L[i][0]))) ** 2
               for i in range(c.M))


def confinement_interval(c: FrameCandidate, labels=None) -> tuple[Fraction, Fraction]:
    _require_supported(c)
    R = c.sys.scalar
    if labels is None:
        labels = [c.L[i][0] for i in c.active]
    neg = [-l for l in labels]
    return Fraction(min(neg), R - 1), Fraction(max(neg), R - 1)


def _extreme_grid(c: FrameCandidate, labels=None) -> list[Fraction]:
    lo, hi = confinement_interval(c, labels)
    g = math.gcd(*[b[0] for b in c.sys.B])
    # t.b integral for every digit  <=>  t in (1/g) Z
    return [Fraction(k, g) for k in range(math.ceil(lo * g), math.floor(hi * g) + 1)]


def candidate_points(c: FrameCandidate) -> list[Fraction]:
    """Rationals in the confinement interval with ``t.b`` integral for all digits.

    Every point of a finite minimal invariant set lies in this finite set.
    """
    return _extreme_grid(c)


@dataclass
class TransitionGraph:
    """Possible transitions among a set of rational points."""

    nodes: list[Fraction]
    edges: list[Transition] = field(default_factory=list)

    def to_dot(self) -> str:
        lines = ["digraph transitions {"]
        for n in self.nodes:
            lines.append(f'  "{n}";')
        for e in self.edges:
            lines.append(f'  "{e.source}" -> "{e.target}" '
                         f'[label="l={e.label}, w={e.weight:.6g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"nodes": [str(n) for n in self.nodes],
                "edges": [{"source": str(e.source), "label": e.label,
                           "target": str(e.target), "weight": e.weight}
                          for e in self.edges]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


@dataclass(frozen=True)
class InvariantSetReport:
    minimal_sets: tuple[frozenset, ...]
    eliminated: dict
    graph: TransitionGraph
    transitions: tuple[Transition, ...]

    @property
    def trivial_only(self) -> bool:
        return all(s == frozenset({Fraction(0)}) for s in self.minimal_sets)

    @property
    def nontrivial_sets(self) -> list[frozenset]:
        return [s for s in self.minimal_sets if s != frozenset({Fraction(0)})]

    @property
    def witness(self) -> Fraction | None:
        sets = self.nontrivial_sets
        if not sets:
            return None
        return min(sets[0], key=lambda t: (abs(t), t))

    def transitions_within(self, s) -> list[Transition]:
        return [e for e in self.transitions if e.source in s]


def find_minimal_invariant_sets(c: FrameCandidate) -> InvariantSetReport:
    """All finite minimal invariant sets of the transition dynamics.

    Points with a possible transition leaving the candidate set are removed,
    then removal is propagated backwards until every survivor only reaches
    survivors.  Minimal invariant sets are the bottom strongly connected
    components of what remains.  ``eliminated`` records, for each removed
    point, the transition that disqualified it.
    """
    _require_supported(c)
    pts = candidate_points(c)
    out = {t: transition_targets(c, t) for t in pts}
    alive = set(pts)
    eliminated: dict[Fraction, Transition] = {}
    changed = True
    while changed:
        changed = False
        for t in sorted(alive):
            bad = next((e for e in out[t] if e.target not in alive), None)
            if bad is not None:
                alive.discard(t)
                eliminated[t] = bad
                changed = True
    edges = [e for t in sorted(alive) for e in out[t]]
    G = nx.DiGraph()
    G.add_nodes_from(alive)
    G.add_edges_from((e.source, e.target) for e in edges)
    cond = nx.condensation(G)
    minimal = [frozenset(cond.nodes[n]["members"]) for n in cond.nodes
               if cond.out_degree(n) == 0]
    minimal.sort(key=lambda s: (len(s), sorted(s, key=lambda t: (abs(t), t))))
    all_edges = [e for t in pts for e in out[t]]
    return InvariantSetReport(tuple(minimal), eliminated,
                              TransitionGraph(pts, all_edges), tuple(edges))


@dataclass(frozen=True)
class ParsevalVerdict:
    status: str  # "Parseval" or "Incomplete"
    witness: Fraction | None
    certificate: str
    report: InvariantSetReport

    @property
    def is_parseval(self) -> bool:
        return self.status == "Parseval"


def completeness_verdict(c: FrameCandidate, tol: float = DEFAULT_TOL) -> ParsevalVerdict:
    """Parseval iff ``{0}`` is the only finite minimal invariant set.

    Requires the isometry.  Otherwise the frame is incomplete and every point
    ``w`` of a nontrivial minimal set gives an exponential ``e_w`` orthogonal
    to all frame vectors.
    """
    _require_supported(c)
    iso = check_isometry(c, tol)
    if not iso.ok:
        raise IsometryError(
            f"isometry conditions not established (deviation {iso.max_deviation:.3g})")
    rep = find_minimal_invariant_sets(c)
    if rep.trivial_only:
        lines = [f"only minimal invariant set is {{0}}; "
                 f"{len(rep.eliminated)} candidate points eliminated"]
        for t, e in sorted(rep.eliminated.items()):
            lines.append(f"  {t} -[{e.label}]-> {e.target} leaves the surviving set")
        return ParsevalVerdict("Parseval", None, "\n".join(lines), rep)
    w = rep.witness
    sets = ", ".join("{" + ", ".join(str(t) for t in sorted(s)) + "}"
                     for s in rep.nontrivial_sets)
    cert = (f"nontrivial minimal invariant set(s) {sets}; "
            f"e_{w} is orthogonal to every frame vector")
    return ParsevalVerdict("Incomplete", w, cert, rep)


@dataclass(frozen=True)
class Cycle:
    points: tuple[Fraction, ...]
    digits: tuple[int, ...]


def extreme_cycles(c: FrameCandidate | tuple, L=None) -> list[Cycle]:
    """Cycles of the maps ``g_l`` (l in ``L``) whose points all have ``|m_B| = 1``.

    Accepts a candidate, or an ``IfsSystem`` and a label list.  Each cycle is
    rotated to start at its point of smallest modulus; ``digits[i]`` maps
    ``points[i]`` to ``points[i + 1]``.
    """
    from .candidate import new_candidate

    if L is not None:
        c = new_candidate(c, L, [1] * len(L))
    _require_supported(c)
    labels = c.labels_1d
    pts = set(_extreme_grid(c, labels))
    R = c.sys.scalar
    G = nx.MultiDiGraph()
    G.add_nodes_from(pts)
    for t in pts:
        for l in labels:
            y = _g(R, t, l)
            if y in pts:
                G.add_edge(t, y, digit=l)
    simple = nx.DiGraph()
    simple.add_nodes_from(pts)
    simple.add_edges_from((u, v) for u, v in G.edges())
    cycles = []
    for cyc in nx.simple_cycles(simple):
        k = min(range(len(cyc)), key=lambda i: (abs(cyc[i]), cyc[i]))
        cyc = cyc[k:] + cyc[:k]
        nxt = cyc[1:] + cyc[:1]
        # each (t, y) pair has a unique digit since g_l is injective in l
        digits = tuple(next(d["digit"] for d in G.get_edge_data(u, v).values())
                       for u, v in zip(cyc, nxt))
        cycles.append(Cycle(tuple(cyc), digits))
    cycles.sort(key=lambda z: (len(z.points), [abs(p) for p in z.points]))
    return cycles
