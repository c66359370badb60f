import pytest
from hypothesis import given, settings, strategies as st

from peblab import dag, pebbling
from peblab.errors import (
    BudgetExceeded, IllegalMove, TraceError, WhitePebbleInBlackOnly, WrongEndpoints,
)
from peblab.pebbling import (
    BlobConfiguration,
    BlobPebbling,
    BlobSubconf,
    BwConfiguration,
    BwPebbling,
    LabelledConfiguration,
    LabelledPebbling,
    Subconf,
)


def bw(host, *steps):
    confs = [BwConfiguration()]
    for b, w in steps:
        confs.append(BwConfiguration(black=frozenset(b.split()), white=frozenset(w.split())))
    return BwPebbling(host=host, steps=tuple(confs))


def black_seq(host, *blacks):
    confs = [BwConfiguration()] + [BwConfiguration(black=frozenset(b.split())) for b in blacks]
    return BwPebbling(host=host, steps=tuple(confs))


@pytest.fixture
def pyr2():
    return dag.build_pyramid(2)


class TestValidateBw:
    def test_single_vertex(self):
        g = dag.build_path(1)
        cost = pebbling.validate_bw(black_seq(g, "v1"))
        assert cost == pebbling.PebblingCost(time=1, space=1)

    def test_classic_pyramid_schedule(self, pyr2):
        p = black_seq(
            pyr2,
            "u", "u v", "u v x", "v x", "v w x", "v w x y", "w x y", "x y",
            "x y z", "y z", "z",
        )
        cost = pebbling.validate_bw(p, black_only=True)
        assert cost.space == 4
        assert cost.time == 11

    def test_rule1_requires_predecessors(self, pyr2):
        with pytest.raises(IllegalMove, match="rule 1"):
            pebbling.validate_bw(black_seq(pyr2, "u", "u x"))

    def test_white_rules(self, pyr2):
        # white placement anywhere; removal only with covered predecessors
        p = bw(pyr2, ("", "x"), ("", "x y"), ("z", "x y"), ("z", "y"))
        with pytest.raises(IllegalMove, match="rule 4"):
            pebbling.validate_bw(p)

    def test_white_removal_ok_when_covered(self, pyr2):
        p = bw(
            pyr2,
            ("", "x"), ("", "x y"), ("z", "x y"),
            ("z u", "x y"), ("z u v", "x y"), ("z u v", "y"),  # remove white x
        )
        with pytest.raises(WrongEndpoints):
            pebbling.validate_bw(p)  # legal moves but incomplete

    def test_black_only_flag(self, pyr2):
        p = bw(pyr2, ("", "z"))
        with pytest.raises(WhitePebbleInBlackOnly):
            pebbling.validate_bw(p, black_only=True)

    def test_endpoints(self, pyr2):
        with pytest.raises(WrongEndpoints):
            pebbling.validate_bw(BwPebbling(host=pyr2, steps=(BwConfiguration(black=frozenset({"u"})),)))
        with pytest.raises(WrongEndpoints):
            pebbling.validate_bw(black_seq(pyr2, "u"))

    def test_two_changes_rejected(self, pyr2):
        with pytest.raises(IllegalMove, match="exactly one"):
            pebbling.validate_bw(black_seq(pyr2, "u v"))

    def test_unknown_vertex(self, pyr2):
        with pytest.raises(IllegalMove, match="unknown"):
            pebbling.validate_bw(black_seq(pyr2, "nope"))


CORPUS = (
    [dag.build_path(n) for n in range(1, 9)]
    + [dag.build_binary_tree(h) for h in range(0, 4)]
    + [dag.build_pyramid(h) for h in range(0, 4)]
)


class TestGreedy:
    @pytest.mark.parametrize("g", CORPUS, ids=lambda g: f"{len(g.vertices)}v")
    def test_greedy_is_valid_black_pebbling(self, g):
        cost = pebbling.validate_bw(pebbling.greedy_black_strategy(g), black_only=True)
        assert cost.space <= len(g.vertices)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_greedy_path_costs(self, n):
        cost = pebbling.validate_bw(pebbling.greedy_black_strategy(dag.build_path(n)), black_only=True)
        assert cost.time == 2 * n - 1
        assert cost.space == min(n, 2)

    def test_greedy_handles_cross_edges(self):
        g = dag.Dag(["a", "b", "c"], [("a", "b"), ("a", "c"), ("b", "c")])
        pebbling.validate_bw(pebbling.greedy_black_strategy(g), black_only=True)


class TestPrices:
    def test_single_vertex(self):
        g = dag.build_path(1)
        assert pebbling.optimal_black_price(g) == 1
        assert pebbling.optimal_bw_price(g) == 1

    def test_path3(self):
        assert pebbling.optimal_black_price(dag.build_path(3)) == 2
        assert pebbling.optimal_bw_price(dag.build_path(3)) == 2

    def test_pyramid2(self, pyr2):
        assert pebbling.optimal_black_price(pyr2) == 4
        assert pebbling.optimal_bw_price(pyr2) <= 4

    def test_bw_never_worse(self):
        for g in CORPUS:
            if len(g.vertices) > 10:
                continue
            assert pebbling.optimal_bw_price(g) <= pebbling.optimal_black_price(g)

    def test_witnesses_validate_and_are_deterministic(self, pyr2):
        w1 = pebbling.optimal_black_pebbling(pyr2)
        w2 = pebbling.optimal_black_pebbling(pyr2)
        assert w1 == w2
        assert pebbling.validate_bw(w1, black_only=True).space == 4
        bw1 = pebbling.optimal_bw_pebbling(pyr2)
        assert pebbling.validate_bw(bw1).space == pebbling.optimal_bw_price(pyr2)

    def test_budget(self, pyr2):
        with pytest.raises(BudgetExceeded):
            pebbling.optimal_black_price(pyr2, budget=5)

    @staticmethod
    def _reference_price(g, black_only):
        """Independent oracle: depth-bounded DP over move sequences.

        f(state, depth) = minimal peak configuration size over all legal
        continuations of at most `depth` moves that end at ({sink}, {}).
        An optimal strategy never needs to revisit a configuration, so a
        depth of 3^n covers every optimal play.
        """
        import functools

        vertices = g.topological_order()
        sink = g.sink
        depth_cap = min(3 ** len(vertices) + 1, 200)

        @functools.lru_cache(maxsize=None)
        def f(black, white, depth):
            size = len(black) + len(white)
            best = size if (set(black) == {sink} and not white) else None
            if depth == 0:
                return best
            pebbled = set(black) | set(white)
            moves = []
            for v in vertices:
                if v in black:
                    moves.append((tuple(sorted(set(black) - {v})), white))
                elif v in white and all(u in pebbled for u in g.predecessors(v)):
                    moves.append((black, tuple(sorted(set(white) - {v}))))
                elif v not in pebbled:
                    if all(u in pebbled for u in g.predecessors(v)):
                        moves.append((tuple(sorted(set(black) | {v})), white))
                    if not black_only:
                        moves.append((black, tuple(sorted(set(white) | {v}))))
            for nb, nw in moves:
                sub = f(nb, nw, depth - 1)
                if sub is not None:
                    peak = max(size, sub)
                    if best is None or peak < best:
                        best = peak
            return best

        return f((), (), depth_cap)

    @pytest.mark.parametrize("g", [
        dag.build_path(2), dag.build_path(3), dag.build_pyramid(1),
        dag.parse_dag("v a\nv b\nv c\ne a c\ne b c\n"),
    ], ids=["path2", "path3", "pyr1", "cherry"])
    def test_prices_match_independent_reference(self, g):
        assert pebbling.optimal_black_price(g) == self._reference_price(g, True)
        assert pebbling.optimal_bw_price(g) == self._reference_price(g, False)


class TestLabelled:
    def test_two_vertex_example(self):
        g = dag.parse_dag("v a\nv z\ne a z\n")
        sc_za, sc_a, sc_z = Subconf("z", frozenset({"a"})), Subconf("a"), Subconf("z")
        seq = [
            frozenset(), {sc_za}, {sc_za, sc_a}, {sc_za, sc_a, sc_z},
            {sc_a, sc_z}, {sc_z},
        ]
        p = LabelledPebbling(host=g, steps=tuple(LabelledConfiguration(frozenset(s)) for s in seq))
        cost = pebbling.validate_labelled(p)
        assert cost.space == 2
        assert cost.time == 5

    def test_merger_requires_support_membership(self):
        g = dag.parse_dag("v a\nv b\nv z\ne a z\ne b z\n")
        sc_z = Subconf("z", frozenset({"a", "b"}))
        sc_a = Subconf("a")
        bogus = Subconf("z", frozenset({"b", "a"}) - {"b"})  # pretend merger on b without <b,W>
        seq = [frozenset(), {sc_z}, {sc_z, sc_a}, {sc_z, sc_a, bogus}]
        p = LabelledPebbling(host=g, steps=tuple(LabelledConfiguration(frozenset(s)) for s in seq))
        with pytest.raises(IllegalMove):
            pebbling.validate_labelled(p)

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_black_to_labelled_path_bound(self, n):
        bp = pebbling.greedy_black_strategy(dag.build_path(n))
        s = pebbling.validate_bw(bp, black_only=True).space
        cost = pebbling.validate_labelled(pebbling.black_to_labelled(bp))
        assert cost.bound == (s + 1, 1 if n > 1 else 0)

    def test_black_to_labelled_pyramid(self, pyr2):
        bp = pebbling.greedy_black_strategy(pyr2)
        s = pebbling.validate_bw(bp, black_only=True).space
        cost = pebbling.validate_labelled(pebbling.black_to_labelled(bp))
        assert cost.bound[0] <= s + 1
        assert cost.bound[1] == 2

    def test_bounded_space_consequence(self, pyr2):
        for g in (dag.build_path(3), pyr2):
            lp = pebbling.black_to_labelled(pebbling.greedy_black_strategy(g))
            report = pebbling.check_bounded_space_consequence(lp)
            assert report.bw_price <= report.cost.space <= report.bound_product

    def test_no_op_step_rejected(self):
        g = dag.build_path(1)
        sc = Subconf("v1")
        seq = [frozenset(), {sc}, {sc}]
        p = LabelledPebbling(host=g, steps=tuple(LabelledConfiguration(frozenset(s)) for s in seq))
        with pytest.raises(IllegalMove):
            pebbling.validate_labelled(p)


class TestBlob:
    def test_final_configuration_space_one(self, pyr2):
        conf = BlobConfiguration(frozenset({BlobSubconf(frozenset({"z"}))}))
        assert pebbling.blob_config_space(pyr2, conf) == 1

    def test_chargeable_whites(self, pyr2):
        conf = BlobConfiguration(frozenset({
            BlobSubconf(frozenset({"y", "z"}), frozenset({"v", "w"}))
        }))
        assert pebbling.blob_config_space(pyr2, conf) == 3

    def test_uncovered_white_not_charged(self, pyr2):
        # u reaches x and z but not y: not below every blob vertex
        conf = BlobConfiguration(frozenset({
            BlobSubconf(frozenset({"y", "z"}), frozenset({"u"}))
        }))
        assert pebbling.blob_config_space(pyr2, conf) == 1

    def test_expanding_black_cost(self, pyr2):
        conf = BlobConfiguration(frozenset({
            BlobSubconf(frozenset({"x"})), BlobSubconf(frozenset({"x", "y"})),
        }))
        assert pebbling.blob_config_space(pyr2, conf) == 2

    def test_order_invariance(self, pyr2):
        subconfs = [
            BlobSubconf(frozenset({"x"})),
            BlobSubconf(frozenset({"x", "y"}), frozenset({"u"})),
            BlobSubconf(frozenset({"z"}), frozenset({"x", "y"})),
        ]
        space = None
        for perm in ([0, 1, 2], [2, 0, 1], [1, 2, 0]):
            conf = BlobConfiguration(frozenset(subconfs[i] for i in perm))
            value = pebbling.blob_config_space(pyr2, conf)
            assert space is None or value == space
            space = value

    def test_full_blob_pebbling_two_vertices(self):
        g = dag.parse_dag("v a\nv z\ne a z\n")
        b_za = BlobSubconf(frozenset({"z"}), frozenset({"a"}))
        b_a = BlobSubconf(frozenset({"a"}))
        b_z = BlobSubconf(frozenset({"z"}))
        seq = [frozenset(), {b_za}, {b_za, b_a}, {b_za, b_a, b_z}, {b_a, b_z}, {b_z}]
        p = BlobPebbling(host=g, steps=tuple(BlobConfiguration(frozenset(s)) for s in seq))
        cost = pebbling.validate_blob(p)
        assert cost.time == 5

    def test_inflation(self):
        g = dag.parse_dag("v a\nv z\ne a z\n")
        b_a = BlobSubconf(frozenset({"a"}))
        b_az = BlobSubconf(frozenset({"a", "z"}))
        # intro on the source, then inflate the blob; moves legal, endpoints wrong
        seq = [frozenset(), {b_a}, {b_a, b_az}]
        p = BlobPebbling(host=g, steps=tuple(BlobConfiguration(frozenset(s)) for s in seq))
        with pytest.raises(WrongEndpoints):
            pebbling.validate_blob(p)

    def test_illegal_blob_move(self, pyr2):
        sc = BlobSubconf(frozenset({"z"}), frozenset({"u"}))  # not pred(z)
        p = BlobPebbling(host=pyr2, steps=(BlobConfiguration(), BlobConfiguration(frozenset({sc}))))
        with pytest.raises(IllegalMove):
            pebbling.validate_blob(p)


class TestTraces:
    def test_bw_roundtrip(self, pyr2):
        p = pebbling.greedy_black_strategy(pyr2)
        text = pebbling.serialize_pebbling(p)
        assert pebbling.parse_pebbling_trace(text, pyr2) == p

    def test_bw_trace_format(self):
        g = dag.build_path(2)
        text = "game bw\n# place source then slide\nB+ v1\nB+ v2\nB- v1\n"
        p = pebbling.parse_pebbling_trace(text, g)
        assert pebbling.validate_bw(p).space == 2

    def test_labelled_roundtrip(self):
        lp = pebbling.black_to_labelled(pebbling.greedy_black_strategy(dag.build_pyramid(2)))
        text = pebbling.serialize_pebbling(lp)
        assert pebbling.parse_pebbling_trace(text, dag.build_pyramid(2)) == lp

    def test_blob_roundtrip(self):
        g = dag.parse_dag("v a\nv z\ne a z\n")
        b_za = BlobSubconf(frozenset({"z"}), frozenset({"a"}))
        b_a = BlobSubconf(frozenset({"a"}))
        b_z = BlobSubconf(frozenset({"z"}))
        seq = [frozenset(), {b_za}, {b_za, b_a}, {b_za, b_a, b_z}, {b_a, b_z}, {b_z}]
        p = BlobPebbling(host=g, steps=tuple(BlobConfiguration(frozenset(s)) for s in seq))
        text = pebbling.serialize_pebbling(p)
        assert "M 1 2 a" in text
        assert pebbling.parse_pebbling_trace(text, g) == p

    def test_blob_inflation_roundtrip(self):
        g = dag.parse_dag("v a\nv z\ne a z\n")
        b_za = BlobSubconf(frozenset({"z"}), frozenset({"a"}))
        b_a = BlobSubconf(frozenset({"a"}))
        b_az = BlobSubconf(frozenset({"a", "z"}))
        b_z = BlobSubconf(frozenset({"z"}))
        seq = [
            frozenset(), {b_za}, {b_za, b_a}, {b_za, b_a, b_z},
            {b_za, b_a, b_z, b_az},  # inflate [a] to [a z]
            {b_za, b_a, b_z}, {b_a, b_z}, {b_z},
        ]
        p = BlobPebbling(host=g, steps=tuple(BlobConfiguration(frozenset(s)) for s in seq))
        cost = pebbling.validate_blob(p)
        assert cost.space >= 2  # [a] and [a z] expand
        text = pebbling.serialize_pebbling(p)
        assert "X 2 : a z /" in text
        assert pebbling.parse_pebbling_trace(text, g) == p

    def test_trace_errors(self):
        g = dag.build_path(2)
        with pytest.raises(TraceError, match="game"):
            pebbling.parse_pebbling_trace("B+ v1\n", g)
        with pytest.raises(TraceError, match="already pebbled"):
            pebbling.parse_pebbling_trace("game bw\nB+ v1\nB+ v1\n", g)
        with pytest.raises(TraceError, match="remove"):
            pebbling.parse_pebbling_trace("game bw\nB- v1\n", g)
        with pytest.raises(TraceError, match="unknown vertex"):
            pebbling.parse_pebbling_trace("game labelled\nI bogus\n", g)


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_dropping_any_step_invalidates(data):
    g = data.draw(st.sampled_from([dag.build_path(3), dag.build_path(5), dag.build_pyramid(2)]))
    p = pebbling.greedy_black_strategy(g)
    k = data.draw(st.integers(min_value=0, max_value=len(p.steps) - 1))
    mutated = BwPebbling(host=g, steps=p.steps[:k] + p.steps[k + 1:])
    with pytest.raises((IllegalMove, WrongEndpoints)):
        pebbling.validate_bw(mutated, black_only=True)
