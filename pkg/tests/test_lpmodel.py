"""LP construction: variables, constraint families, dumps, induced points."""

import io
import itertools
import math

import numpy as np
import pytest

from motifcc import (
    DirectedGraph,
    FractionalSolution,
    Partition,
    SizeLimitError,
    VarId,
    build_lp1,
    build_lp2,
    build_lp3,
    build_table1_weights,
    count_upsilon,
    evaluate_objective,
    induced_point,
    pair_var,
    per_class_breakdown,
    tuple_var,
    verify_solution,
)
from motifcc.lpmodel import LpProblem

from conftest import all_partitions, brute_force_cost


def brute_force_upsilon(n: int, k: int) -> int:
    """Count ordered-up-to-swap triples (K1, K2, K3): K1, K2 distinct
    overlapping k-sets, K3 a k-subset of their union distinct from both."""
    verts = range(1, n + 1)
    ksets = [frozenset(c) for c in itertools.combinations(verts, k)]
    count = 0
    for K1, K2 in itertools.combinations(ksets, 2):
        if not (K1 & K2):
            continue
        union = K1 | K2
        for K3 in itertools.combinations(sorted(union), k):
            K3 = frozenset(K3)
            if K3 != K1 and K3 != K2:
                count += 1
    return count


class TestVarId:
    def test_names(self):
        assert tuple_var((3, 1, 2)).name == "x_1_2_3"
        assert pair_var(2, 1).name == "z_1_2"

    def test_from_name_round_trip(self):
        for vid in [tuple_var((1, 2, 3)), pair_var(4, 7)]:
            assert VarId.from_name(vid.name) == vid


class TestCountUpsilon:
    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8])
    def test_matches_brute_force_k3(self, n):
        assert count_upsilon(n, 3) == brute_force_upsilon(n, 3)

    @pytest.mark.parametrize("n,k", [(5, 2), (6, 2), (5, 4), (6, 4)])
    def test_matches_brute_force_other_k(self, n, k):
        assert count_upsilon(n, k) == brute_force_upsilon(n, k)

    def test_n4_k3_is_twelve(self):
        assert count_upsilon(4, 3) == 12

    def test_k2_reduces_to_triangle_count(self):
        for n in (3, 5, 8):
            assert count_upsilon(n, 2) == 3 * math.comb(n, 3)


@pytest.fixture
def mcc_weights(two_triangle_graph):
    return build_table1_weights("MCC", two_triangle_graph)


@pytest.fixture
def mmcc_weights(two_triangle_graph):
    return build_table1_weights("MMCC", two_triangle_graph)


class TestBuildLp1:
    def test_shape(self, mcc_weights):
        lp = build_lp1(mcc_weights.layers[0].weights, 6)
        assert lp.num_vars == math.comb(6, 3)
        assert lp.num_rows == count_upsilon(6, 3)
        assert lp.census == {"upsilon": count_upsilon(6, 3)}
        assert np.all(lp.senses == -1)
        assert np.all(lp.rhs == 0.0)

    def test_row_structure(self, mcc_weights):
        lp = build_lp1(mcc_weights.layers[0].weights, 6)
        for row in itertools.islice(lp.iter_constraints(), 50):
            coeffs = sorted(c for _, c in row.terms)
            assert coeffs == [-1.0, -1.0, 1.0]
            (k3,) = [vid for vid, c in row.terms if c == 1.0]
            k1, k2 = [vid for vid, c in row.terms if c == -1.0]
            s1, s2, s3 = set(k1.key), set(k2.key), set(k3.key)
            assert s1 & s2
            assert s3 <= (s1 | s2)
            assert s3 != s1 and s3 != s2

    def test_cap_enforced(self, mcc_weights):
        with pytest.raises(SizeLimitError):
            build_lp1(mcc_weights.layers[0].weights, 6, max_constraints=100)

    def test_objective_coefficients(self, mcc_weights):
        lp = build_lp1(mcc_weights.layers[0].weights, 6)
        w = mcc_weights.layers[0].weights
        offset = 0.0
        for j, vid in enumerate(lp.var_ids):
            wp, wm = w.resolve(vid.key)
            assert lp.obj[j] == pytest.approx(2.0 * wp - 1.0)
            offset += wm
        assert lp.offset == pytest.approx(offset)


class TestBuildLp2:
    def test_census_formula(self, mcc_weights):
        n, k = 6, 3
        lp = build_lp2(mcc_weights.layers[0].weights, n)
        assert lp.census["pair_floor"] == math.comb(n, k) * math.comb(k, 2)
        assert lp.census["pair_sum_cap"] == math.comb(n, k)
        assert lp.census["unit_cap"] == math.comb(n, k)
        assert lp.census["triangle"] == 3 * math.comb(n, 3)
        assert lp.structural_constraint_count == math.comb(n, k) * (
            math.comb(k, 2) + 2
        ) + 3 * math.comb(n, 3)
        # unit caps live in the variable bounds, not in rows
        assert lp.num_rows == lp.structural_constraint_count - lp.census["unit_cap"]

    def test_variable_layout(self, mcc_weights):
        lp = build_lp2(mcc_weights.layers[0].weights, 6)
        kinds = [vid.kind for vid in lp.var_ids]
        assert kinds == ["tuple"] * math.comb(6, 3) + ["pair"] * math.comb(6, 2)

    def test_pair_rows(self, mcc_weights):
        lp = build_lp2(mcc_weights.layers[0].weights, 6)
        rows = {row.name: row for row in lp.iter_constraints()}
        # z_uv - x_K <= 0 for each pair in each tuple
        r = rows["pf_1_2_3_1_2"]
        terms = {vid.name: c for vid, c in r.terms}
        assert terms == {"z_1_2": 1.0, "x_1_2_3": -1.0}
        assert r.sense == "<=" and r.rhs == 0.0
        # (k-1) x_K - sum z <= 0
        r = rows["ps_1_2_3"]
        terms = {vid.name: c for vid, c in r.terms}
        assert terms == {"x_1_2_3": 2.0, "z_1_2": -1.0, "z_1_3": -1.0, "z_2_3": -1.0}

    def test_triangle_rows(self, mcc_weights):
        lp = build_lp2(mcc_weights.layers[0].weights, 6)
        rows = {row.name: row for row in lp.iter_constraints()}
        # z_bc <= z_ab + z_ac with apex a
        r = rows["tri_1_2_3_a1"]
        terms = {vid.name: c for vid, c in r.terms}
        assert terms == {"z_2_3": 1.0, "z_1_2": -1.0, "z_1_3": -1.0}


class TestBuildLp3:
    def test_single_k3_layer_matches_lp2(self, mcc_weights):
        lp2 = build_lp2(mcc_weights.layers[0].weights, 6)
        lp3 = build_lp3(mcc_weights, 6)
        assert [v.name for v in lp2.var_ids] == [v.name for v in lp3.var_ids]
        assert np.allclose(lp2.obj, lp3.obj)
        assert lp2.offset == pytest.approx(lp3.offset)
        assert lp2.row_names == lp3.row_names
        assert (lp2.A != lp3.A).nnz == 0
        assert np.array_equal(lp2.senses, lp3.senses)

    def test_mixed_layers_objective(self, mmcc_weights, two_triangle_graph):
        lp = build_lp3(mmcc_weights, 6)
        # k=2 layer contributes to z coefficients with lambda weighting
        edge_layer, triple_layer = mmcc_weights.layers
        j = lp.index_of(pair_var(1, 2))
        wp, _ = edge_layer.weights.resolve((1, 2))
        assert lp.obj[j] == pytest.approx(edge_layer.lam * (2 * wp - 1))
        want_offset = sum(
            layer.lam * layer.weights.resolve(t)[1]
            for layer in mmcc_weights.layers
            for t in itertools.combinations(range(1, 7), layer.k)
        )
        assert lp.offset == pytest.approx(want_offset)

    def test_k2_only_has_just_triangles(self, two_triangle_graph):
        cc = build_table1_weights("CC", two_triangle_graph)
        lp = build_lp3(cc, 6)
        assert lp.census == {"triangle": 3 * math.comb(6, 3)}
        assert all(vid.kind == "pair" for vid in lp.var_ids)


class TestInducedPoint:
    @pytest.mark.parametrize("builder", ["lp1", "lp2", "lp3"])
    def test_feasible_for_all_partitions(self, builder, mcc_weights, mmcc_weights):
        n = 5
        g = DirectedGraph.from_arcs(
            5, [(u, v) for u, v in [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)]]
            + [(v, u) for u, v in [(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)]]
        )
        mcc = build_table1_weights("MCC", g)
        mmcc = build_table1_weights("MMCC", g)
        if builder == "lp1":
            lp = build_lp1(mcc.layers[0].weights, n)
            mixed = mcc
        elif builder == "lp2":
            lp = build_lp2(mcc.layers[0].weights, n)
            mixed = mcc
        else:
            lp = build_lp3(mmcc, n)
            mixed = mmcc
        for labels in all_partitions(n):
            part = Partition.from_assignment(labels, n=n)
            point = induced_point(part, lp)
            assert point.status == "feasible"
            report = verify_solution(lp, point, tol=1e-12)
            assert report.ok, report.summary()
            assert point.objective_value == pytest.approx(
                evaluate_objective(part, mixed), abs=1e-9
            )

    def test_values_are_indicators(self, mcc_weights):
        lp = build_lp2(mcc_weights.layers[0].weights, 6)
        part = Partition.from_cluster_list([[1, 2, 3], [4, 5, 6]])
        point = induced_point(part, lp)
        assert point[tuple_var((1, 2, 3))] == 0.0
        assert point[tuple_var((1, 2, 4))] == 1.0
        assert point[pair_var(1, 2)] == 0.0
        assert point[pair_var(3, 4)] == 1.0


class TestEvaluateObjective:
    def test_against_brute_force(self, mmcc_weights):
        for labels in itertools.islice(all_partitions(6), 0, None, 7):
            part = Partition.from_assignment(labels, n=6)
            rows = []
            for layer in mmcc_weights.layers:
                for t in itertools.combinations(range(1, 7), layer.k):
                    wp, wm = layer.weights.resolve(t)
                    rows.append((t, wp, wm, layer.lam))
            want = brute_force_cost(labels, rows)
            assert evaluate_objective(part, mmcc_weights) == pytest.approx(want)

    def test_breakdown_sums_to_cost(self, mmcc_weights):
        part = Partition.from_cluster_list([[1, 2, 4], [3, 5, 6]])
        breakdown = per_class_breakdown(part, mmcc_weights)
        total = sum(v for layer in breakdown.values() for v in layer.values())
        assert total == pytest.approx(evaluate_objective(part, mmcc_weights))


class TestDumpRoundTrip:
    def test_text_round_trip(self, mcc_weights):
        lp = build_lp2(mcc_weights.layers[0].weights, 6)
        buf = io.StringIO()
        lp.to_text(buf)
        back = LpProblem.from_text(io.StringIO(buf.getvalue()))
        assert [v.name for v in back.var_ids] == [v.name for v in lp.var_ids]
        assert np.allclose(back.obj, lp.obj)
        assert back.offset == pytest.approx(lp.offset)
        assert (back.A != lp.A).nnz == 0
        assert np.array_equal(back.senses, lp.senses)
        assert np.allclose(back.rhs, lp.rhs)
        assert np.allclose(back.lb, lp.lb)
        assert np.allclose(back.ub, lp.ub)

    def test_file_round_trip(self, tmp_path, mcc_weights):
        lp = build_lp1(mcc_weights.layers[0].weights, 6)
        path = tmp_path / "p.lp"
        lp.to_text(str(path))
        back = LpProblem.from_text(str(path))
        assert back.num_vars == lp.num_vars and back.num_rows == lp.num_rows


class TestFractionalSolution:
    def test_json_round_trip(self, mcc_weights):
        lp = build_lp2(mcc_weights.layers[0].weights, 6)
        rng = np.random.default_rng(3)
        sol = FractionalSolution(lp.var_ids, rng.random(lp.num_vars), 1.25, "optimal")
        back = FractionalSolution.from_json_dict(sol.to_json_dict())
        assert np.allclose(back.values, sol.values)
        assert back.objective_value == pytest.approx(1.25)
        assert back.status == "optimal"

    def test_tuple_and_pair_views(self, mcc_weights):
        lp = build_lp2(mcc_weights.layers[0].weights, 6)
        sol = FractionalSolution(lp.var_ids, np.arange(lp.num_vars, dtype=float), 0.0, "optimal")
        tv = sol.tuple_values(3)
        pv = sol.pair_values()
        assert len(tv) == math.comb(6, 3)
        assert len(pv) == math.comb(6, 2)
        assert tv[(1, 2, 3)] == 0.0
        assert pv[(5, 6)] == lp.num_vars - 1
