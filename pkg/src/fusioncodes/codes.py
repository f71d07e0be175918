"""Single-logical-qubit graph codes derived from progenitor graph states.

Measuring the input vertex q of an (n+1)-vertex graph state in X with
outcome +1 leaves an n-qubit code word.  The logical operators are
X = product of Z over the neighbors of q, and Z = S_q0 Z_q for any
neighbor q0; the code stabilizers are the progenitor stabilizers (and
products) that act trivially on q.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

from .graphs import GraphState, local_complement
from .graphs import stabilizer_generators as graph_stabilizers
from .pauli import PauliOperator, StabilizerGroup, enumerate_group, multiply


class CodeConstructionError(ValueError):
    """The progenitor cannot be turned into a code (e.g. isolated input)."""


@dataclass(frozen=True)
class GraphCode:
    """Graph code with its logicals and stabilizers on the code qubits.

    Code qubit ``i`` is progenitor vertex ``code_qubits[i]`` (the
    progenitor vertices in increasing order with the input removed).
    """

    progenitor: GraphState
    input_qubit: int
    code_qubits: tuple[int, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    stabilizers: StabilizerGroup
    code_id: str = ""

    @property
    def n_code(self) -> int:
        return len(self.code_qubits)

    def code_index(self, vertex: int) -> int:
        return self.code_qubits.index(vertex)

    def to_json_dict(self) -> dict:
        return {
            "code_id": self.code_id,
            "progenitor": self.progenitor.to_json_dict(),
            "input_qubit": self.input_qubit,
            "n_code": self.n_code,
            "logical_x": [p.to_string() for p in logical_set(self, "X")],
            "logical_z": [p.to_string() for p in logical_set(self, "Z")],
            "stabilizer_generators": [g.to_string() for g in self.stabilizers.generators],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def _restrict(p: PauliOperator, drop: int) -> PauliOperator:
    """Remove qubit ``drop``, which must carry the identity."""
    if (p.x_bits >> drop) & 1 or (p.z_bits >> drop) & 1:
        raise ValueError(f"operator acts on dropped qubit {drop}: {p}")
    low = (1 << drop) - 1
    x = (p.x_bits & low) | ((p.x_bits >> (drop + 1)) << drop)
    z = (p.z_bits & low) | ((p.z_bits >> (drop + 1)) << drop)
    return PauliOperator(p.n - 1, x, z, p.phase)


def code_from_progenitor(g: GraphState, code_id: str = "") -> GraphCode:
    """Build the code obtained by measuring the emitter vertex in X(+1)."""
    if g.n < 2:
        raise CodeConstructionError("progenitor needs at least two vertices")
    q = g.emitter
    nbrs = sorted(g.neighbors(q))
    if not nbrs:
        raise CodeConstructionError("input qubit is isolated")
    q0 = nbrs[0]
    gens = graph_stabilizers(g).generators

    logical_x = PauliOperator(g.n, 0, g.neighbor_mask(q), 0)
    logical_z = multiply(gens[q0], PauliOperator(g.n, 0, 1 << q, 0))

    stab = [multiply(gens[q0], gens[i]) for i in nbrs[1:]]
    stab += [gens[j] for j in range(g.n) if j != q and j not in nbrs]

    code_qubits = tuple(v for v in range(g.n) if v != q)
    return GraphCode(
        progenitor=g,
        input_qubit=q,
        code_qubits=code_qubits,
        logical_x=_restrict(logical_x, q),
        logical_z=_restrict(logical_z, q),
        stabilizers=StabilizerGroup(g.n - 1, tuple(_restrict(s, q) for s in stab)),
        code_id=code_id,
    )


@lru_cache(maxsize=None)
def _logical_set_cached(code: GraphCode, basis: str) -> tuple[PauliOperator, ...]:
    anchor = code.logical_x if basis == "X" else code.logical_z
    return tuple(multiply(anchor, s) for s in enumerate_group(code.stabilizers))


def logical_set(code: GraphCode, basis: str) -> list[PauliOperator]:
    """All 2^(n-1) representatives of the X or Z logical, stable order.

    Element k is the anchor logical times stabilizer-group element k in
    the group's generator-subset order.
    """
    if basis not in ("X", "Z"):
        raise ValueError("basis must be 'X' or 'Z'")
    return list(_logical_set_cached(code, basis))


def dual_code_with_map(code: GraphCode) -> tuple[GraphCode, int]:
    """Dual code plus the code-qubit index whose failure basis flips.

    The dual progenitor is obtained by local complementation at the
    input qubit s, then at its lowest-index neighbor q*, then at s
    again.  On the input this swaps X and Z (so the logical roles swap);
    on every code qubit except q* the induced single-qubit Clifford is
    the identity permutation of {X, Y, Z}, while on q* it is the X<->Z
    transposition.  A fusion failure-basis vector therefore maps to the
    dual by flipping the single bit at q*.
    """
    g = code.progenitor
    s = code.input_qubit
    q_star = min(g.neighbors(s))
    g1 = local_complement(g, s)
    g2 = local_complement(g1, q_star)
    g3 = local_complement(g2, s)
    dual = code_from_progenitor(g3, code_id=code.code_id + "*" if code.code_id else "")
    return dual, code.code_index(q_star)


def dual_code(code: GraphCode) -> GraphCode:
    """Code with the two logical-fusion erasure rates swapped."""
    return dual_code_with_map(code)[0]
