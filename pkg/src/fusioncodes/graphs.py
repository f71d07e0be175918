"""Graph states, local complementation, and the single-emitter graph class.

A :class:`GraphState` is a simple undirected graph with one marked vertex,
the emitter spin; all other vertices are photons.  The two primitive
growth operations a single emitter supports are leaf creation (attach a
new degree-1 photon to the emitter) and path-edge creation (attach and
hand the emitter role to the new vertex).  Every sequence of these
operations yields a branched chain (caterpillar) with the emitter at the
end of the spine.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from itertools import permutations

from .pauli import PauliOperator, ResourceCapExceeded, StabilizerGroup

PROGENITOR_CAP = 8  # photons; 2^cap generation sequences are scanned


class GenerationOp(Enum):
    LEAF = "L"
    PATH_EDGE = "P"


@dataclass(frozen=True)
class GraphState:
    """Simple undirected graph over ``n`` vertices with a marked emitter."""

    n: int
    edges: frozenset[tuple[int, int]]
    emitter: int = 0

    def __post_init__(self):
        if not 0 <= self.emitter < self.n:
            raise ValueError(f"emitter {self.emitter} out of range for n={self.n}")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}); store as sorted pairs")

    @staticmethod
    def from_edges(n: int, edges, emitter: int = 0) -> "GraphState":
        norm = frozenset((min(u, v), max(u, v)) for u, v in edges)
        return GraphState(n, norm, emitter)

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(u if w == v else w for u, w in self.edges if v in (u, w))

    def neighbor_mask(self, v: int) -> int:
        mask = 0
        for u, w in self.edges:
            if u == v:
                mask |= 1 << w
            elif w == v:
                mask |= 1 << u
        return mask

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "edges": sorted([u, v] for u, v in self.edges),
            "emitter": self.emitter,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "GraphState":
        return GraphState.from_edges(data["n"], data["edges"], data.get("emitter", 0))

    def to_dot(self, name: str = "g") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.n):
            style = ' [color=red, style=filled, fillcolor="#ffcccc"]' if v == self.emitter else ""
            lines.append(f"  {v}{style};")
        for u, v in sorted(self.edges):
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def graph_to_json(g: GraphState) -> str:
    return json.dumps(g.to_json_dict(), sort_keys=True)


def graph_from_json(text: str) -> GraphState:
    return GraphState.from_json_dict(json.loads(text))


# -- stabilizers and local complementation ---------------------------


def stabilizer_generators(g: GraphState) -> StabilizerGroup:
    """One generator per vertex: X there, Z on each neighbor, sign +1."""
    gens = []
    for v in range(g.n):
        gens.append(PauliOperator(g.n, 1 << v, g.neighbor_mask(v), 0))
    return StabilizerGroup(g.n, tuple(gens))


def local_complement(g: GraphState, q: int) -> GraphState:
    """Toggle every edge between two neighbors of ``q``; involutive."""
    if not 0 <= q < g.n:
        raise ValueError(f"vertex {q} out of range")
    nbrs = sorted(g.neighbors(q))
    edges = set(g.edges)
    for i, u in enumerate(nbrs):
        for v in nbrs[i + 1 :]:
            e = (u, v)
            if e in edges:
                edges.remove(e)
            else:
                edges.add(e)
    return GraphState(g.n, frozenset(edges), g.emitter)


# Letter images under conjugation by the local-complementation Clifford
# at q (an X-axis quarter rotation on q, Z-axis quarter rotations on its
# neighbors).  Entries are (letter, sign).
_LC_ON_VERTEX = {"X": ("X", 1), "Y": ("Z", 1), "Z": ("Y", -1), "I": ("I", 1)}
_LC_ON_NEIGHBOR = {"X": ("Y", -1), "Y": ("X", 1), "Z": ("Z", 1), "I": ("I", 1)}


def lc_pauli_transform(p: PauliOperator, q: int, g: GraphState) -> PauliOperator:
    """Image of ``p`` under the local complementation at ``q`` of ``g``.

    Per-qubit substitution with signs multiplied through; qubit support
    is preserved.  The convention is fixed so that the stabilizer group
    of ``g`` maps exactly onto that of ``local_complement(g, q)``.
    """
    if p.n != g.n:
        raise ValueError("operator size does not match graph")
    if not 0 <= q < g.n:
        raise ValueError(f"vertex {q} out of range")
    nbr = g.neighbors(q)
    x = z = 0
    phase = p.phase
    for v in range(g.n):
        letter = p.letter(v)
        if v == q:
            letter, sgn = _LC_ON_VERTEX[letter]
        elif v in nbr:
            letter, sgn = _LC_ON_NEIGHBOR[letter]
        else:
            sgn = 1
        if sgn < 0:
            phase += 2
        if letter in ("X", "Y"):
            x |= 1 << v
        if letter in ("Z", "Y"):
            z |= 1 << v
    return PauliOperator(p.n, x, z, phase)


# -- generation operations -------------------------------------------


def apply_generation_op(g: GraphState, op: GenerationOp) -> GraphState:
    """Grow the graph by one photon attached to the emitter.

    LEAF keeps the emitter mark in place; PATH_EDGE moves it to the new
    vertex, so the old emitter vertex becomes a photon.
    """
    new = g.n
    edges = g.edges | {(min(g.emitter, new), max(g.emitter, new))}
    if op is GenerationOp.LEAF:
        return GraphState(g.n + 1, edges, g.emitter)
    return GraphState(g.n + 1, edges, new)


def build_progenitor(ops: str | list[GenerationOp]) -> GraphState:
    """Apply a LEAF/PATH_EDGE sequence to a lone emitter vertex."""
    g = GraphState(1, frozenset(), 0)
    for op in _coerce_ops(ops):
        g = apply_generation_op(g, op)
    return g


def _coerce_ops(ops) -> list[GenerationOp]:
    if isinstance(ops, str):
        return [GenerationOp(ch) for ch in ops]
    return list(ops)


def ops_string(ops: list[GenerationOp]) -> str:
    return "".join(op.value for op in ops)


# -- isomorphism and enumeration -------------------------------------


def is_tree(g: GraphState) -> bool:
    if len(g.edges) != g.n - 1:
        return False
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == g.n


def _rooted_tree_key(g: GraphState, root: int) -> str:
    """AHU canonical encoding of a tree rooted at ``root``."""

    def encode(v: int, parent: int) -> str:
        children = sorted(encode(u, v) for u in g.neighbors(v) if u != parent)
        return "(" + "".join(children) + ")"

    return encode(root, -1)


def canonical_key(g: GraphState) -> str:
    """Canonical string identifying (graph, emitter) up to isomorphism.

    Trees use rooted canonical labeling with the emitter pinned as root;
    other graphs fall back to minimizing the edge signature over all
    relabelings that fix the emitter (fine at the sizes handled here).
    """
    if is_tree(g):
        return "T" + _rooted_tree_key(g, g.emitter)
    others = [v for v in range(g.n) if v != g.emitter]
    best = None
    for perm in permutations(range(1, g.n)):
        relabel = {g.emitter: 0}
        relabel.update({v: p for v, p in zip(others, perm)})
        sig = tuple(sorted((min(relabel[u], relabel[v]), max(relabel[u], relabel[v])) for u, v in g.edges))
        if best is None or sig < best:
            best = sig
    return f"G{g.n}:" + ";".join(f"{u}-{v}" for u, v in (best or ()))


def unmarked_tree_key(g: GraphState) -> str:
    """Canonical key of a tree ignoring the emitter mark (centroid rooted)."""
    if not is_tree(g):
        raise ValueError("unmarked canonical key implemented for trees only")
    # Peel leaves to find the 1-2 centroids.
    if g.n == 1:
        return "T()"
    degree = {v: g.degree(v) for v in range(g.n)}
    remaining = set(range(g.n))
    layer = [v for v in remaining if degree[v] <= 1]
    while len(remaining) > 2:
        nxt = []
        for v in layer:
            remaining.discard(v)
            for u in g.neighbors(v):
                if u in remaining:
                    degree[u] -= 1
                    if degree[u] == 1:
                        nxt.append(u)
        layer = nxt
    return "T*" + min(_rooted_tree_key(g, c) for c in remaining)


def is_caterpillar(g: GraphState) -> bool:
    """Tree whose non-leaf vertices form a path (chains and stars included)."""
    if not is_tree(g):
        return False
    if g.n <= 3:
        return True
    spine = [v for v in range(g.n) if g.degree(v) >= 2]
    if not spine:
        return g.n <= 2
    for v in spine:
        if sum(1 for u in g.neighbors(v) if u in spine) > 2:
            return False
    ends = [v for v in spine if sum(1 for u in g.neighbors(v) if u in spine) <= 1]
    if len(spine) == 1:
        return True
    if len(ends) != 2:
        return False
    # connected path check over the spine
    seen = {ends[0]}
    cur = ends[0]
    while True:
        nxt = [u for u in g.neighbors(cur) if u in spine and u not in seen]
        if not nxt:
            break
        cur = nxt[0]
        seen.add(cur)
    return len(seen) == len(spine)


@dataclass(frozen=True)
class ProgenitorRecord:
    """Enumerated progenitor: the graph plus the op sequence that built it.

    ``sequence`` doubles as a stable code identifier ('L' = leaf,
    'P' = path edge, one letter per photon in emission order).
    """

    sequence: str
    graph: GraphState


def enumerate_progenitor_records(n_photons: int, cap: int = PROGENITOR_CAP) -> list[ProgenitorRecord]:
    """Distinct marked graphs reachable with ``n_photons`` emissions.

    Scans every binary LEAF/PATH_EDGE sequence, deduplicates up to
    isomorphism of (graph, emitter), and keeps the first sequence that
    reaches each class, in binary-counter order.
    """
    if n_photons < 1:
        raise ValueError("need at least one photon")
    if n_photons > cap:
        raise ResourceCapExceeded(f"{n_photons} photons exceeds cap {cap}")
    found: dict[str, ProgenitorRecord] = {}
    for s in range(1 << n_photons):
        ops = "".join("P" if (s >> i) & 1 else "L" for i in range(n_photons))
        g = build_progenitor(ops)
        key = canonical_key(g)
        if key not in found:
            found[key] = ProgenitorRecord(ops, g)
    return list(found.values())


def enumerate_single_emitter_progenitors(n_photons: int, cap: int = PROGENITOR_CAP) -> list[GraphState]:
    return [rec.graph for rec in enumerate_progenitor_records(n_photons, cap)]
