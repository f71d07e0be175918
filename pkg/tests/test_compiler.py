import dataclasses

import numpy as np
import pytest

from fusioncodes import statevec
from fusioncodes.codes import code_from_progenitor
from fusioncodes.compiler import (
    CompileError,
    GenerationSequence,
    Mode,
    Op,
    build_concatenated_target,
    compile_generation,
    count_resources,
    derive_outer_sequence,
    graphs_lc_equivalent,
    lc_equivalent,
    measure_x_graph,
    verify_sequence,
    _inner_wire_roles,
    _simulate_statevector,
)
from fusioncodes.graphs import GraphState, build_progenitor, enumerate_progenitor_records
from fusioncodes.pauli import PauliOperator, gf2_reduce, multiply


def inner_code(seq):
    return code_from_progenitor(build_progenitor(seq), code_id=seq)


def op_count(seq, op):
    return sum(1 for i in seq.ops if i.op is op)


class TestCompile:
    def test_two_vertex_chain_with_bare_qubit(self):
        seq = compile_generation(build_progenitor("P"), inner_code("L"), Mode.TWO_EMITTER)
        assert op_count(seq, Op.CZ) == 1
        # every virtual node is measured out, including the last one
        assert op_count(seq, Op.MEASURE_X) == 2
        assert seq.photon_count == 2

    def test_photon_budget(self):
        seq = compile_generation(build_progenitor("PLP"), inner_code("LL"), Mode.TWO_EMITTER)
        assert seq.photon_count == 4 * 2 == seq.outer_size * seq.inner_size

    def test_spin_spin_gates_independent_of_inner_size(self):
        outer = build_progenitor("PLPPLPPLP")
        for mode in Mode:
            counts = set()
            for n in range(1, 9):
                rec = enumerate_progenitor_records(n)[0]
                seq = compile_generation(outer, inner_code(rec.sequence), mode)
                counts.add(count_resources(seq).spin_spin_gates)
            assert len(counts) == 1, (mode, counts)

    def test_memory_mode_swap_count(self):
        # one SWAP hands the first block to the memory, one more per path edge
        outer = build_progenitor("PLPPLPPLP")
        seq = compile_generation(outer, inner_code("LL"), Mode.EMITTER_MEMORY)
        assert op_count(seq, Op.SWAP) == 1 + seq.outer_ops.count("P")

    def test_two_emitter_mode_has_no_swaps(self):
        seq = compile_generation(build_progenitor("PLP"), inner_code("LL"), Mode.TWO_EMITTER)
        assert op_count(seq, Op.SWAP) == 0

    def test_measure_always_follows_reinit_discipline(self):
        for mode in Mode:
            seq = compile_generation(build_progenitor("PLPP"), inner_code("LPL"), mode)
            pending = {}
            for ins in seq.ops:
                if ins.op is Op.MEASURE_X:
                    pending[ins.targets[0]] = True
                elif ins.op is Op.REINIT:
                    pending[ins.targets[0]] = False
                elif ins.op in (Op.SPIN_ROTATION, Op.EMIT_PHOTON):
                    assert not pending.get(ins.targets[0], False)
                elif ins.op in (Op.CZ, Op.SWAP):
                    for e in ins.targets:
                        assert not pending.get(e, False)

    def test_rejects_non_caterpillar_outer(self):
        spider = GraphState.from_edges(7, [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)])
        with pytest.raises(CompileError):
            compile_generation(spider, inner_code("L"), Mode.TWO_EMITTER)
        cycle = GraphState.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        with pytest.raises(CompileError):
            derive_outer_sequence(cycle)

    def test_single_vertex_outer(self):
        seq = compile_generation(GraphState(1, frozenset(), 0), inner_code("LL"), Mode.TWO_EMITTER)
        assert op_count(seq, Op.CZ) == 0
        assert verify_sequence(seq, method="statevector").ok


class TestResources:
    def test_empty_sequence(self):
        seq = GenerationSequence((), Mode.TWO_EMITTER, "", "L")
        rc = count_resources(seq)
        assert (rc.spin_spin_gates, rc.max_emitter_depth, rc.photons) == (0, 0, 0)

    def test_depth_grows_linearly_with_inner_size(self):
        outer = build_progenitor("PPPPP")
        depths = []
        for n in range(1, 9):
            rec = enumerate_progenitor_records(n)[0]
            seq = compile_generation(outer, inner_code(rec.sequence), Mode.TWO_EMITTER)
            depths.append(count_resources(seq).max_emitter_depth)
        diffs = {b - a for a, b in zip(depths, depths[1:])}
        assert all(d >= 1 for d in diffs)
        assert max(depths) - min(depths) >= 7  # at least one op per extra photon

    def test_memory_is_exempt_from_depth(self):
        outer = build_progenitor("PPP")
        seq = compile_generation(outer, inner_code("LL"), Mode.EMITTER_MEMORY)
        rc = count_resources(seq)
        two = count_resources(compile_generation(outer, inner_code("LL"), Mode.TWO_EMITTER))
        assert rc.max_emitter_depth <= two.max_emitter_depth + 2


class TestMeasureXRule:
    def test_rule_matches_state_vector_up_to_local_cliffords(self):
        for npho in range(1, 5):
            for rec in enumerate_progenitor_records(npho):
                g = rec.graph
                for a in range(g.n):
                    if g.degree(a) == 0:
                        continue
                    st = statevec.graph_state(g.n, g.edges)
                    st, prob = statevec.project_x_plus(st, a, g.n, +1)
                    assert prob > 1e-12
                    st = statevec.drop_plus_qubit(st / np.linalg.norm(st), a, g.n)
                    m = g.n - 1
                    rows_state = []
                    for xz in range(4**m):
                        x, z = xz & ((1 << m) - 1), xz >> m
                        if x == 0 and z == 0:
                            continue
                        for ph in (0, 2):
                            p = PauliOperator(m, x, z, ph)
                            if np.allclose(statevec.apply_pauli(st, p), st, atol=1e-9):
                                rows_state.append(x | (z << m))
                                break
                    rows_state = gf2_reduce(rows_state)
                    assert len(rows_state) == m

                    edges = set(g.edges)
                    measure_x_graph(edges, a)

                    def rl(v):
                        return v if v < a else v - 1

                    edges2 = {(min(rl(u), rl(v)), max(rl(u), rl(v))) for u, v in edges}
                    adj = [0] * m
                    for u, v in edges2:
                        adj[u] |= 1 << v
                        adj[v] |= 1 << u
                    rows_graph = [(1 << i) | (adj[i] << m) for i in range(m)]
                    assert lc_equivalent(rows_state, rows_graph, m), (rec.sequence, a)

    def test_isolated_vertex_measurement_is_trivial(self):
        edges = {(0, 1)}
        measure_x_graph(edges, 2)
        assert edges == {(0, 1)}


class TestLcEquivalence:
    def test_triangle_and_path(self):
        assert graphs_lc_equivalent({(0, 1), (0, 2), (1, 2)}, 3, {(0, 1), (1, 2)}, 3)

    def test_star_and_chain_of_four_differ(self):
        assert not graphs_lc_equivalent({(0, 1), (0, 2), (0, 3)}, 4, {(0, 1), (1, 2), (2, 3)}, 4)

    def test_lc_orbit_members_are_equivalent(self):
        from fusioncodes.graphs import local_complement

        g = build_progenitor("LPLP")
        h = g
        for q in (0, 2, 1, 4):
            h = local_complement(h, q)
        assert graphs_lc_equivalent(g.edges, g.n, h.edges, h.n)

    def test_equal_graphs_fast_path(self):
        g = build_progenitor("LPL")
        assert graphs_lc_equivalent(g.edges, g.n, g.edges, g.n)


class TestVerification:
    @pytest.mark.parametrize("mode", list(Mode))
    def test_small_targets_all_methods_agree(self, mode):
        cases = [
            ("P", "L"),
            ("PP", "LL"),
            ("LL", "LP"),
            ("PLP", "LL"),
        ]
        for outer_ops, inner_ops in cases:
            seq = compile_generation(build_progenitor(outer_ops), inner_code(inner_ops), mode)
            for method in ("statevector", "stabilizer", "graph"):
                res = verify_sequence(seq, method=method)
                assert res.ok, (mode, outer_ops, inner_ops, method, res.message)

    def test_auto_picks_stabilizer_for_large_targets(self):
        seq = compile_generation(build_progenitor("PLPPLPPLP"), inner_code("LPL"), Mode.TWO_EMITTER)
        res = verify_sequence(seq)
        assert res.ok and res.method == "stabilizer"

    def test_graph_method_on_moderate_target(self):
        seq = compile_generation(build_progenitor("PLPPLPPLP"), inner_code("LPL"), Mode.TWO_EMITTER)
        res = verify_sequence(seq, method="graph")
        assert res.ok

    def test_fault_injection_reports_failure(self):
        seq = compile_generation(build_progenitor("PLP"), inner_code("LL"), Mode.TWO_EMITTER)
        ops = list(seq.ops)
        cz_at = [k for k, i in enumerate(ops) if i.op is Op.CZ]
        del ops[cz_at[1]]
        bad = dataclasses.replace(seq, ops=tuple(ops))
        for method in ("statevector", "stabilizer", "graph"):
            res = verify_sequence(bad, method=method)
            assert not res.ok
            assert res.message

    def test_photon_count_mismatch_detected(self):
        seq = compile_generation(build_progenitor("P"), inner_code("L"), Mode.TWO_EMITTER)
        target = build_concatenated_target("P", "LL")
        assert not verify_sequence(seq, expected=target).ok

    def test_minus_one_outcome_flips_one_logical_sign(self):
        # a -1 spin measurement shows up as a sign flip of exactly one
        # block's logical X stabilizer, trackable classically
        inner = inner_code("LL")
        seq = compile_generation(build_progenitor("PPP"), inner, Mode.TWO_EMITTER)
        n, m = inner.n_code, seq.outer_size
        P = m * n
        roles, _ = _inner_wire_roles(seq.inner_ops)
        wire_of_vertex = {v: t for t, v in roles.items()}

        def lift(op, block):
            x = z = 0
            for i in range(n):
                w = block * n + wire_of_vertex[inner.code_qubits[i]]
                if (op.x_bits >> i) & 1:
                    x |= 1 << w
                if (op.z_bits >> i) & 1:
                    z |= 1 << w
            return PauliOperator(P, x, z, op.phase)

        outer = build_progenitor(seq.outer_ops)

        def logical_stabilizer(v):
            op = lift(inner.logical_x, v)
            for u in outer.neighbors(v):
                op = multiply(op, lift(inner.logical_z, u))
            return op

        base, _ = _simulate_statevector(seq)
        assert all(
            statevec.expectation(base, logical_stabilizer(v)).real == pytest.approx(1.0)
            for v in range(m)
        )
        n_meas = sum(1 for i in seq.ops if i.op is Op.MEASURE_X)
        flipped = []
        for j in range(n_meas):
            st, _ = _simulate_statevector(seq, {j: -1})
            vals = [statevec.expectation(st, logical_stabilizer(v)).real for v in range(m)]
            neg = [v for v, val in enumerate(vals) if val == pytest.approx(-1.0)]
            assert len(neg) == 1, vals
            flipped += neg
        assert sorted(flipped) == list(range(m))

    def test_both_modes_verify_against_the_same_target(self):
        for outer_ops, inner_ops in [("PP", "LL"), ("PLP", "L")]:
            target = None
            for mode in Mode:
                seq = compile_generation(build_progenitor(outer_ops), inner_code(inner_ops), mode)
                if target is None:
                    target = build_concatenated_target(seq.outer_ops, seq.inner_ops)
                assert verify_sequence(seq, expected=target, method="statevector").ok


class TestSerialization:
    def test_json_and_text_round(self):
        seq = compile_generation(build_progenitor("PP"), inner_code("LL"), Mode.EMITTER_MEMORY)
        data = seq.to_json_dict()
        assert data["mode"] == "emitter-memory"
        assert len(data["instructions"]) == len(seq.ops)
        text = seq.render()
        assert "cz(" in text and "swap(" in text
