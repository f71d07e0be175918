"""Two-emitter generation sequences for concatenated graph codes.

An outer branched chain of logical qubits, each encoded in a
single-emitter inner graph code, is produced by alternating the two
spins: one spin grows the next inner block photon by photon, a single
CZ fuses it to the outer structure, and one spin is measured in X and
reinitialized.  Which spin is measured decides between a logical leaf
and a logical path edge.  The emitter-plus-memory variant keeps all
measurements on the short-lived emitter spin by inserting a SWAP after
the CZ for path edges.

Verification replays a sequence with wire-level semantics (exact state
vectors for small targets, the graph measurement rule otherwise) and
compares against the concatenated target graph: the outer graph with an
inner block embedded at every node and the virtual node of each block
measured in X with outcome +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .codes import GraphCode
from .graphs import (
    GraphState,
    build_progenitor,
    canonical_key,
    enumerate_progenitor_records,
    is_caterpillar,
    is_tree,
    unmarked_tree_key,
)
from .pauli import PauliOperator, gf2_reduce
from . import statevec


class CompileError(ValueError):
    """The requested target cannot be compiled."""


class VerificationError(RuntimeError):
    """A compiled sequence failed verification."""


class Mode(Enum):
    TWO_EMITTER = "two-emitter"
    EMITTER_MEMORY = "emitter-memory"


class Op(Enum):
    INIT_EMITTER = "init"
    SPIN_ROTATION = "rot"
    EMIT_PHOTON = "emit"
    CZ = "cz"
    SWAP = "swap"
    MEASURE_X = "measure_x"
    REINIT = "reinit"


@dataclass(frozen=True)
class Instruction:
    op: Op
    targets: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {"op": self.op.value, "targets": list(self.targets)}

    def render(self) -> str:
        return f"{self.op.value}({', '.join(f'e{t}' for t in self.targets)})"


@dataclass(frozen=True)
class GenerationSequence:
    """Instruction list plus the metadata needed to verify it."""

    ops: tuple[Instruction, ...]
    mode: Mode
    outer_ops: str  # LEAF/PATH_EDGE letters for outer vertices 1..m-1
    inner_ops: str  # letters for the inner block photons
    emitter_count: int = 2

    @property
    def outer_size(self) -> int:
        return len(self.outer_ops) + 1

    @property
    def inner_size(self) -> int:
        return len(self.inner_ops)

    @property
    def photon_count(self) -> int:
        return sum(1 for ins in self.ops if ins.op is Op.EMIT_PHOTON)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "outer_ops": self.outer_ops,
            "inner_ops": self.inner_ops,
            "photons": self.photon_count,
            "instructions": [ins.to_json_dict() for ins in self.ops],
        }

    def render(self) -> str:
        lines = [f"# mode={self.mode.value} outer={self.outer_ops or '-'} inner={self.inner_ops}"]
        lines += [f"{i:4d}  {ins.render()}" for i, ins in enumerate(self.ops)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ResourceCount:
    spin_spin_gates: int
    max_emitter_depth: int
    photons: int


# -- decomposition of targets into generation sequences ----------------


@lru_cache(maxsize=None)
def _marked_sequence_index(n_photons: int) -> dict[str, str]:
    return {canonical_key(rec.graph): rec.sequence for rec in enumerate_progenitor_records(n_photons)}


def derive_marked_sequence(g: GraphState) -> str:
    """LEAF/PATH_EDGE sequence generating this marked graph, if any."""
    if g.n == 1:
        return ""
    seq = _marked_sequence_index(g.n - 1).get(canonical_key(g))
    if seq is None:
        raise CompileError("graph is not generatable by a single emitter with this marking")
    return seq


@lru_cache(maxsize=None)
def _unmarked_sequence_index(n_photons: int) -> dict[str, str]:
    index: dict[str, str] = {}
    for s in range(1 << n_photons):
        ops = "".join("P" if (s >> i) & 1 else "L" for i in range(n_photons))
        key = unmarked_tree_key(build_progenitor(ops))
        index.setdefault(key, ops)
    return index


def derive_outer_sequence(g: GraphState) -> str:
    """Generation sequence for an outer target, emitter mark ignored."""
    if g.n == 1:
        return ""
    if not is_tree(g) or not is_caterpillar(g):
        raise CompileError("outer graph must be a star, chain, or caterpillar")
    seq = _unmarked_sequence_index(g.n - 1).get(unmarked_tree_key(g))
    if seq is None:
        raise CompileError("outer graph is outside the generatable class")
    return seq


# -- compilation --------------------------------------------------------


def compile_generation(outer: GraphState, inner: GraphCode, mode: Mode) -> GenerationSequence:
    """Instruction sequence generating ``outer`` concatenated with ``inner``.

    Outer vertices are produced in generation order (the order of the
    derived LEAF/PATH_EDGE sequence), each as one inner block plus one
    spin-spin CZ and one X measurement.  In memory mode the first block
    is handed to the memory with a SWAP, and every path edge SWAPs
    before measuring so only the emitter spin is ever measured.
    """
    outer_ops = derive_outer_sequence(outer)
    inner_ops = derive_marked_sequence(inner.progenitor)
    ins: list[Instruction] = []
    inited = [False, False]

    def init_slot(e: int) -> None:
        if not inited[e]:
            ins.append(Instruction(Op.INIT_EMITTER, (e,)))
            inited[e] = True

    def emit_block(e: int) -> None:
        for op in inner_ops:
            if op == "P":
                ins.append(Instruction(Op.SPIN_ROTATION, (e,)))
            ins.append(Instruction(Op.EMIT_PHOTON, (e,)))

    m = len(outer_ops) + 1
    if mode is Mode.TWO_EMITTER:
        active = 0
        init_slot(active)
        emit_block(active)
        for op in outer_ops:
            other = 1 - active
            init_slot(other)
            emit_block(other)
            ins.append(Instruction(Op.CZ, (active, other)))
            if op == "L":
                ins.append(Instruction(Op.MEASURE_X, (other,)))
                ins.append(Instruction(Op.REINIT, (other,)))
            else:
                ins.append(Instruction(Op.MEASURE_X, (active,)))
                ins.append(Instruction(Op.REINIT, (active,)))
                active = other
        ins.append(Instruction(Op.MEASURE_X, (active,)))
        ins.append(Instruction(Op.REINIT, (active,)))
    else:
        memory, emitter = 0, 1
        init_slot(emitter)
        emit_block(emitter)
        if m > 1:
            init_slot(memory)
            ins.append(Instruction(Op.SWAP, (memory, emitter)))
            for op in outer_ops:
                emit_block(emitter)
                ins.append(Instruction(Op.CZ, (memory, emitter)))
                if op == "P":
                    ins.append(Instruction(Op.SWAP, (memory, emitter)))
                ins.append(Instruction(Op.MEASURE_X, (emitter,)))
                ins.append(Instruction(Op.REINIT, (emitter,)))
            ins.append(Instruction(Op.MEASURE_X, (memory,)))
        else:
            ins.append(Instruction(Op.MEASURE_X, (emitter,)))
            ins.append(Instruction(Op.REINIT, (emitter,)))
    return GenerationSequence(tuple(ins), mode, outer_ops, inner_ops)


def count_resources(seq: GenerationSequence) -> ResourceCount:
    """Spin-spin gate count, worst emitter depth, and photon count.

    Emitter depth counts the instructions touching a spin between its
    (re)initialization and the closing measurement.  In memory mode the
    long-lived memory is exempt; holding state is what it is for.
    """
    spin_spin = sum(1 for i in seq.ops if i.op in (Op.CZ, Op.SWAP))
    photons = seq.photon_count
    exempt = {0} if seq.mode is Mode.EMITTER_MEMORY else set()
    depth = {e: 0 for e in range(seq.emitter_count)}
    best = 0
    for ins in seq.ops:
        if ins.op in (Op.INIT_EMITTER, Op.REINIT):
            for e in ins.targets:
                depth[e] = 0
            continue
        for e in ins.targets:
            if e in exempt:
                continue
            depth[e] += 1
            best = max(best, depth[e])
    return ResourceCount(spin_spin_gates=spin_spin, max_emitter_depth=best, photons=photons)


# -- concatenated target -------------------------------------------------


def _inner_wire_roles(inner_ops: str) -> tuple[dict[int, int], int]:
    """Map emission index -> progenitor vertex, plus the input vertex.

    A leaf emission carries the freshly created vertex; a path-edge
    emission hands the new vertex to the spin and the photon flies off
    with the old one.
    """
    emitter_vertex = 0
    roles: dict[int, int] = {}
    for t, op in enumerate(inner_ops):
        new_vertex = t + 1
        if op == "L":
            roles[t] = new_vertex
        else:
            roles[t] = emitter_vertex
            emitter_vertex = new_vertex
    return roles, emitter_vertex


@dataclass(frozen=True)
class ConcatenatedTarget:
    """Wire-level concatenated graph: photons first, then virtual nodes."""

    n_photons: int
    n_virtual: int
    edges: frozenset[tuple[int, int]]
    outer_ops: str
    inner_ops: str

    @property
    def n_total(self) -> int:
        return self.n_photons + self.n_virtual

    def virtual_wires(self) -> list[int]:
        return list(range(self.n_photons, self.n_total))


def build_concatenated_target(outer_ops: str, inner_ops: str) -> ConcatenatedTarget:
    """Embed an inner block at every outer node (virtual input nodes last).

    Photon wires are numbered in emission order, block by block, which
    matches the wire order produced by ``compile_generation``.
    """
    m = len(outer_ops) + 1
    n = len(inner_ops)
    if n < 1:
        raise CompileError("inner code needs at least one photon")
    outer = build_progenitor(outer_ops) if outer_ops else GraphState(1, frozenset(), 0)
    block = build_progenitor(inner_ops)
    roles, input_vertex = _inner_wire_roles(inner_ops)
    wire_of_vertex = {v: t for t, v in roles.items()}

    edges = set()
    for b in range(m):
        base = b * n
        virt = m * n + b

        def wire(vertex: int, base=base, virt=virt) -> int:
            return virt if vertex == input_vertex else base + wire_of_vertex[vertex]

        for u, v in block.edges:
            a, c = wire(u), wire(v)
            edges.add((min(a, c), max(a, c)))
    for u, v in outer.edges:
        edges.add((m * n + u, m * n + v))
    return ConcatenatedTarget(
        n_photons=m * n,
        n_virtual=m,
        edges=frozenset(edges),
        outer_ops=outer_ops,
        inner_ops=inner_ops,
    )


# -- graph-rule simulation ----------------------------------------------


def _toggle_neighborhood(edges: set[tuple[int, int]], nbrs: list[int]) -> None:
    for i, u in enumerate(nbrs):
        for v in nbrs[i + 1 :]:
            e = (min(u, v), max(u, v))
            if e in edges:
                edges.remove(e)
            else:
                edges.add(e)


def _neighbors(edges: set[tuple[int, int]], v: int) -> list[int]:
    return sorted(u if w == v else w for u, w in edges if v in (u, w))


def measure_x_graph(edges: set[tuple[int, int]], a: int, prefer_below: int | None = None) -> None:
    """Remove vertex ``a`` by an X measurement (+1 outcome), in place.

    Uses the special-neighbor reduction: complement at the special
    neighbor, then at ``a``, delete ``a``, and complement at the special
    neighbor again.  Local corrections on the remaining qubits are
    dropped; with the special neighbor chosen among wires that never
    interact again (ids below ``prefer_below``) this only shifts the
    final state by local Cliffords.
    """
    nbrs = _neighbors(edges, a)
    if not nbrs:
        return
    below = [v for v in nbrs if prefer_below is None or v < prefer_below]
    b0 = below[0] if below else nbrs[0]
    _toggle_neighborhood(edges, _neighbors(edges, b0))
    _toggle_neighborhood(edges, _neighbors(edges, a))
    for u in _neighbors(edges, a):
        edges.discard((min(a, u), max(a, u)))
    _toggle_neighborhood(edges, _neighbors(edges, b0))


def _simulate_graph(seq: GenerationSequence) -> set[tuple[int, int]]:
    """Wire graph left on the photons after running the sequence."""
    n_photons = seq.photon_count
    edges: set[tuple[int, int]] = set()
    next_fresh = n_photons
    slot_vertex: dict[int, int] = {}
    pending_rot: dict[int, bool] = {}
    photon = 0

    def fresh() -> int:
        nonlocal next_fresh
        next_fresh += 1
        return next_fresh - 1

    for ins in seq.ops:
        if ins.op is Op.INIT_EMITTER or ins.op is Op.REINIT:
            slot_vertex[ins.targets[0]] = fresh()
            pending_rot[ins.targets[0]] = False
        elif ins.op is Op.SPIN_ROTATION:
            pending_rot[ins.targets[0]] = not pending_rot.get(ins.targets[0], False)
        elif ins.op is Op.EMIT_PHOTON:
            e = ins.targets[0]
            cur = slot_vertex[e]
            new = fresh()
            edges.add((min(cur, new), max(cur, new)))
            if pending_rot.get(e):
                # path edge: the photon carries the old role, the spin the new
                slot_vertex[e] = new
                _relabel(edges, {cur: photon})
                pending_rot[e] = False
            else:
                _relabel(edges, {new: photon})
            photon += 1
        elif ins.op is Op.CZ:
            a, b = slot_vertex[ins.targets[0]], slot_vertex[ins.targets[1]]
            e = (min(a, b), max(a, b))
            if e in edges:
                edges.remove(e)
            else:
                edges.add(e)
        elif ins.op is Op.SWAP:
            a, b = ins.targets
            slot_vertex[a], slot_vertex[b] = slot_vertex[b], slot_vertex[a]
        elif ins.op is Op.MEASURE_X:
            measure_x_graph(edges, slot_vertex[ins.targets[0]], prefer_below=n_photons)
    return edges


def _relabel(edges: set[tuple[int, int]], mapping: dict[int, int]) -> None:
    if not mapping:
        return
    swapped = {(min(mapping.get(u, u), mapping.get(v, v)), max(mapping.get(u, u), mapping.get(v, v))) for u, v in edges}
    edges.clear()
    edges.update(swapped)


def _reduce_target_graph(target: ConcatenatedTarget) -> set[tuple[int, int]]:
    edges = set(target.edges)
    for v in target.virtual_wires():
        measure_x_graph(edges, v, prefer_below=target.n_photons)
    return edges


# -- state-vector simulation ---------------------------------------------


def _simulate_statevector(seq: GenerationSequence, outcome_overrides: dict[int, int] | None = None):
    """Exact simulation; returns (photon state, applied measurement outcomes).

    Wires live on tensor axes; emitter slots keep their own axes and are
    reset to |+> by measurement, so reinitialization is free.  Photon
    axes are reordered to emission order at the end.
    """
    overrides = outcome_overrides or {}
    n_axes = seq.photon_count + 2
    if n_axes > 24:
        raise VerificationError("state-vector verification limited to 24 wires")
    state = statevec.plus_state(n_axes)
    slot_axis = {0: seq.photon_count, 1: seq.photon_count + 1}
    photon_axis: dict[int, int] = {}
    pending_rot = {0: False, 1: False}
    last_outcome = {0: +1, 1: +1}
    photon = 0
    next_axis = 0
    measure_index = 0
    outcomes = []

    def alloc_axis() -> int:
        nonlocal next_axis
        next_axis += 1
        return next_axis - 1

    for ins in seq.ops:
        if ins.op is Op.INIT_EMITTER:
            pass  # slots start in |+>
        elif ins.op is Op.REINIT:
            e = ins.targets[0]
            if last_outcome[e] == -1:
                # the measurement left |->; re-prepare |+>
                state = statevec.apply_pauli(state, PauliOperator.single(n_axes, slot_axis[e], "Z"))
                last_outcome[e] = +1
        elif ins.op is Op.SPIN_ROTATION:
            pending_rot[ins.targets[0]] = not pending_rot[ins.targets[0]]
        elif ins.op is Op.EMIT_PHOTON:
            e = ins.targets[0]
            new_axis = alloc_axis()
            state = statevec.apply_cz(state, slot_axis[e], new_axis)
            if pending_rot[e]:
                photon_axis[photon] = slot_axis[e]
                slot_axis[e] = new_axis
                pending_rot[e] = False
            else:
                photon_axis[photon] = new_axis
            photon += 1
        elif ins.op is Op.CZ:
            state = statevec.apply_cz(state, slot_axis[ins.targets[0]], slot_axis[ins.targets[1]])
        elif ins.op is Op.SWAP:
            a, b = ins.targets
            slot_axis[a], slot_axis[b] = slot_axis[b], slot_axis[a]
        elif ins.op is Op.MEASURE_X:
            outcome = overrides.get(measure_index, +1)
            measure_index += 1
            outcomes.append(outcome)
            state, prob = statevec.project_x_plus(state, slot_axis[ins.targets[0]], n_axes, outcome)
            if prob < 1e-12:
                raise VerificationError("measurement branch has zero probability")
            state = state / np.sqrt(prob)
            last_outcome[ins.targets[0]] = outcome
    # reorder axes to (photon 0 .. photon P-1, slot 0, slot 1), then drop
    # the slot wires, which every branch leaves in |+>
    perm = [photon_axis[k] for k in range(photon)] + [slot_axis[0], slot_axis[1]]
    tensor = state.reshape([2] * n_axes, order="F").transpose(perm)
    state = tensor.flatten(order="F")
    state = statevec.drop_plus_qubit(state, photon + 1, n_axes)
    state = statevec.drop_plus_qubit(state, photon, n_axes - 1)
    return state, outcomes


def _simulate_tableau(seq: GenerationSequence):
    """Sign-exact stabilizer run; returns the photon-wire generators."""
    from .tableau import StabilizerTableau

    n_wires = seq.photon_count + 2
    tab = StabilizerTableau(n_wires)
    slot_wire = {0: seq.photon_count, 1: seq.photon_count + 1}
    photon_wire: dict[int, int] = {}
    pending_rot = {0: False, 1: False}
    photon = 0
    next_wire = 0

    def alloc() -> int:
        nonlocal next_wire
        next_wire += 1
        return next_wire - 1

    for ins in seq.ops:
        if ins.op in (Op.INIT_EMITTER, Op.REINIT):
            pass  # slots start in |+> and measurements restore it
        elif ins.op is Op.SPIN_ROTATION:
            pending_rot[ins.targets[0]] = not pending_rot[ins.targets[0]]
        elif ins.op is Op.EMIT_PHOTON:
            e = ins.targets[0]
            new_wire = alloc()
            tab.cz(slot_wire[e], new_wire)
            if pending_rot[e]:
                photon_wire[photon] = slot_wire[e]
                slot_wire[e] = new_wire
                pending_rot[e] = False
            else:
                photon_wire[photon] = new_wire
            photon += 1
        elif ins.op is Op.CZ:
            tab.cz(slot_wire[ins.targets[0]], slot_wire[ins.targets[1]])
        elif ins.op is Op.SWAP:
            a, b = ins.targets
            slot_wire[a], slot_wire[b] = slot_wire[b], slot_wire[a]
        elif ins.op is Op.MEASURE_X:
            tab.measure_x_plus(slot_wire[ins.targets[0]])
    # relabel wires into emission order and restrict to the photons
    perm = {photon_wire[k]: k for k in range(photon)}
    perm[slot_wire[0]] = photon
    perm[slot_wire[1]] = photon + 1
    remap = []
    for row in tab.rows:
        x = z = 0
        for w, k in perm.items():
            x |= ((row.x_bits >> w) & 1) << k
            z |= ((row.z_bits >> w) & 1) << k
        remap.append(PauliOperator(row.n, x, z, row.phase))
    tab.rows = remap
    return tab.restricted_rows((1 << photon) - 1)


def _target_tableau(target: ConcatenatedTarget):
    from .tableau import StabilizerTableau

    tab = StabilizerTableau.graph_state(target.n_total, target.edges)
    for v in target.virtual_wires():
        tab.measure_x_plus(v)
    return tab.restricted_rows((1 << target.n_photons) - 1)


def _target_statevector(target: ConcatenatedTarget) -> np.ndarray:
    state = statevec.graph_state(target.n_total, target.edges)
    n = target.n_total
    for v in reversed(target.virtual_wires()):
        state, prob = statevec.project_x_plus(state, v, n, +1)
        if prob < 1e-12:
            raise VerificationError("target projection has zero probability")
        state = state / np.sqrt(prob)
        state = statevec.drop_plus_qubit(state, v, n)
        n -= 1
    return state


# -- local Clifford equivalence (binary symplectic test) ------------------


def _solve_gf2_nullspace(rows: list[int], width: int) -> list[int]:
    """Nullspace basis via full Gaussian elimination on bit rows."""
    mat = [r for r in rows if r]
    pivots: list[tuple[int, int]] = []  # (column, row value)
    reduced: list[int] = []
    for row in mat:
        cur = row
        for col, val in pivots:
            if (cur >> col) & 1:
                cur ^= val
        if cur:
            col = (cur & -cur).bit_length() - 1
            # reduce existing pivots by the new row
            pivots = [(c, v ^ cur if (v >> col) & 1 else v) for c, v in pivots]
            pivots.append((col, cur))
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for free in range(width):
        if free in pivot_cols:
            continue
        vec = 1 << free
        for col, val in pivots:
            if (val >> free) & 1:
                vec |= 1 << col
        basis.append(vec)
    return basis


def lc_equivalent(stab_a: list[int], stab_b: list[int], n: int, search_cap: int = 26) -> bool:
    """Are two n-qubit stabilizer groups related by single-qubit Cliffords?

    Rows are packed as x | (z << n).  A per-qubit invertible symplectic
    transform maps rowspace(A) onto rowspace(B) iff every transformed
    A-generator commutes symplectically with all of B (the stabilizer
    rowspace is maximally isotropic, so commutation is membership).
    That condition is linear in the 4n diagonal unknowns; the solution
    space is then searched for a transform invertible on every qubit.
    """
    if len(stab_a) != n or len(stab_b) != n:
        raise ValueError("need full stabilizer generator sets")
    mask = (1 << n) - 1
    ax = [r & mask for r in stab_a]
    az = [r >> n for r in stab_a]
    bx = [r & mask for r in stab_b]
    bz = [r >> n for r in stab_b]

    # unknowns u = (a | b<<n | c<<2n | d<<3n), the per-qubit 2x2 entries
    rows = []
    for i in range(n):
        for k in range(n):
            coeff_a = ax[i] & bz[k]
            coeff_c = az[i] & bz[k]
            coeff_b = ax[i] & bx[k]
            coeff_d = az[i] & bx[k]
            rows.append(coeff_a | (coeff_b << n) | (coeff_c << (2 * n)) | (coeff_d << (3 * n)))
    basis = _solve_gf2_nullspace(rows, 4 * n)
    if len(basis) > search_cap:
        raise VerificationError(
            f"local-equivalence solution space too large to search ({len(basis)} dimensions)"
        )

    reduced_b = gf2_reduce(list(stab_b))

    def in_b_span(target: int) -> bool:
        for row in reduced_b:
            h = row.bit_length() - 1
            if (target >> h) & 1:
                target ^= row
        return target == 0

    def valid(u: int) -> bool:
        a = u & mask
        b = (u >> n) & mask
        c = (u >> (2 * n)) & mask
        d = (u >> (3 * n)) & mask
        if (a & d) ^ (b & c) != mask:
            return False
        for i in range(n):
            tx = (ax[i] & a) ^ (az[i] & c)
            tz = (ax[i] & b) ^ (az[i] & d)
            if not in_b_span(tx | (tz << n)):
                return False
        return True

    # enumerate the solution space in chunks, screening on the per-qubit
    # determinant with vectorized 64-bit lanes (n <= 64 here)
    if n > 64:
        raise VerificationError("local-equivalence check limited to 64 qubits")
    dim = len(basis)
    ba = np.array([v & mask for v in basis], dtype=np.uint64)
    bb = np.array([(v >> n) & mask for v in basis], dtype=np.uint64)
    bc = np.array([(v >> (2 * n)) & mask for v in basis], dtype=np.uint64)
    bd = np.array([(v >> (3 * n)) & mask for v in basis], dtype=np.uint64)
    low = min(dim, 18)
    table = np.zeros((1 << low, 4), dtype=np.uint64)
    for j in range(low):
        half = 1 << j
        table[half : 2 * half] = table[:half]
        table[half : 2 * half, 0] ^= ba[j]
        table[half : 2 * half, 1] ^= bb[j]
        table[half : 2 * half, 2] ^= bc[j]
        table[half : 2 * half, 3] ^= bd[j]
    full = np.uint64(mask)
    for prefix in range(1 << (dim - low)):
        pa = pb = pc = pd = 0
        rem, j = prefix, low
        while rem:
            if rem & 1:
                pa ^= int(ba[j])
                pb ^= int(bb[j])
                pc ^= int(bc[j])
                pd ^= int(bd[j])
            rem >>= 1
            j += 1
        a = table[:, 0] ^ np.uint64(pa)
        b = table[:, 1] ^ np.uint64(pb)
        c = table[:, 2] ^ np.uint64(pc)
        d = table[:, 3] ^ np.uint64(pd)
        hits = np.nonzero(((a & d) ^ (b & c)) == full)[0]
        for h in hits:
            u = int(a[h]) | (int(b[h]) << n) | (int(c[h]) << (2 * n)) | (int(d[h]) << (3 * n))
            if valid(u):
                return True
    return False


def graphs_lc_equivalent(edges_a, n_a: int, edges_b, n_b: int) -> bool:
    if n_a != n_b:
        return False
    if set(edges_a) == set(edges_b):
        return True

    def stab_rows(edges, n):
        adj = [0] * n
        for u, v in edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return [(1 << i) | (adj[i] << n) for i in range(n)]

    return lc_equivalent(stab_rows(edges_a, n_a), stab_rows(edges_b, n_b), n_a)


# -- verification ---------------------------------------------------------


@dataclass
class VerificationResult:
    ok: bool
    method: str
    message: str = ""
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def verify_sequence(
    seq: GenerationSequence,
    expected: ConcatenatedTarget | None = None,
    method: str = "auto",
) -> VerificationResult:
    """Check a sequence against the concatenated target construction.

    ``method``: 'statevector' (exact amplitudes, up to 12 photons),
    'stabilizer' (sign-exact stabilizer update, any size; the default
    beyond 12 photons), or 'graph' (graph-rule simulation that drops
    measurement byproducts and accepts local-Clifford equivalence; can
    be slow on highly symmetric targets).
    """
    target = expected or build_concatenated_target(seq.outer_ops, seq.inner_ops)
    if target.n_photons != seq.photon_count:
        return VerificationResult(False, "none", "photon count differs from target")
    if method == "auto":
        method = "statevector" if seq.photon_count <= 12 else "stabilizer"
    if method == "statevector":
        got, _ = _simulate_statevector(seq)
        want = _target_statevector(target)
        if statevec.states_equal_up_to_phase(got, want):
            return VerificationResult(True, method)
        overlap = abs(np.vdot(got, want))
        return VerificationResult(
            False,
            method,
            f"compiled state deviates from target (overlap {overlap:.6f})",
            {"overlap": overlap},
        )
    if method == "stabilizer":
        from .tableau import BranchImpossible

        try:
            got_rows = _simulate_tableau(seq)
        except (BranchImpossible, ValueError) as exc:
            return VerificationResult(False, method, f"simulation diverged: {exc}")
        from .tableau import StabilizerTableau

        want_rows = _target_tableau(target)
        got_canon = StabilizerTableau.canonical(got_rows)
        want_canon = StabilizerTableau.canonical(want_rows)
        if got_canon == want_canon:
            return VerificationResult(True, method)
        diverging = sorted(set(got_canon) ^ set(want_canon))
        return VerificationResult(
            False,
            method,
            "compiled stabilizers differ from the target state",
            {"divergent_generators": diverging[:4]},
        )
    if method == "graph":
        got_edges = _simulate_graph(seq)
        stray = [e for e in got_edges if e[0] >= target.n_photons or e[1] >= target.n_photons]
        if stray:
            return VerificationResult(False, method, f"photons still entangled with spins: {stray}")
        want_edges = _reduce_target_graph(target)
        if graphs_lc_equivalent(got_edges, target.n_photons, want_edges, target.n_photons):
            return VerificationResult(True, method)
        diff = sorted(set(got_edges) ^ set(want_edges))
        return VerificationResult(
            False,
            method,
            "compiled graph is not locally equivalent to the target",
            {"edge_difference": diff, "got": sorted(got_edges), "want": sorted(want_edges)},
        )
    raise ValueError(f"unknown method {method!r}")
