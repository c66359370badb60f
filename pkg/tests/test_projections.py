import pytest

from peblab import boolfunc, dag, formulas, pebbling, projections, resolution
from peblab.cnf import EMPTY_CLAUSE, clause, formula
from peblab.errors import BudgetExceeded, PeblabError
from peblab.resolution import Download, ProofBuilder

OR2 = boolfunc.or_fn(2)
XOR2 = boolfunc.xor_fn(2)


def xor_block(name):
    return sorted(
        boolfunc.canonical_clauses(XOR2, formulas.block_vars(name, 2)),
        key=lambda c: c.sort_key(),
    )


class TestPreciseImplication:
    def test_block_implies_its_variable(self):
        assert projections.precisely_implies(xor_block("x"), clause("x"), XOR2)

    def test_minimality_fails_on_superclause(self):
        assert not projections.precisely_implies(xor_block("x"), clause("x y"), XOR2)

    def test_example_substituted_clause(self):
        d = formula([
            "x#1 x#2 y#1 -y#2", "x#1 x#2 -y#1 y#2",
            "-x#1 -x#2 y#1 -y#2", "-x#1 -x#2 -y#1 y#2",
        ]).sorted_clauses()
        assert projections.precisely_implies(d, clause("x -y"), XOR2)
        assert not projections.precisely_implies(d, clause("x"), XOR2)

    def test_budget_guard(self):
        d = [clause(" ".join(f"x{i}#1" for i in range(13)))]
        with pytest.raises(BudgetExceeded):
            projections.precisely_implies(d, clause("x0"), XOR2)


class TestProject:
    def test_empty_configuration(self):
        assert projections.project([], XOR2) == frozenset()
        assert projections.local_project([], XOR2) == frozenset()

    def test_single_block(self):
        assert projections.project(xor_block("x"), XOR2) == frozenset({clause("x")})

    def test_blackboard_figure_under_or(self):
        d = [clause("x#1 x#2")] + [
            clause(f"-v#{i} -w#{j} y#1 y#2") for i in (1, 2) for j in (1, 2)
        ]
        proj = projections.project(d, OR2)
        assert clause("x") in proj
        assert clause("-v -w y") in proj

    def test_projection_is_antichain(self):
        d = xor_block("x") + xor_block("y")
        proj = projections.project(d, XOR2)
        for a in proj:
            for b in proj:
                assert a == b or not a.subsumes(b)

    def test_local_contains_plain(self):
        samples = projections.sample_configurations(XOR2, 20, seed=11)
        for d in samples:
            plain = projections.project(d, XOR2)
            local = projections.local_project(d, XOR2)
            for c in plain:
                assert any(p.subsumes(c) for p in local)

    def test_local_separate_blocks(self):
        d = xor_block("x") + xor_block("y")
        local = projections.local_project(d, XOR2)
        assert clause("x") in local
        assert clause("y") in local

    def test_local_budget(self):
        # 13 distinct clauses exceed the 2^|D| subset cap
        import itertools

        config = set()
        lits = ["p#1", "p#2", "q#1", "q#2", "r#1", "r#2"]
        for combo in itertools.combinations(lits, 3):
            config.add(clause(" ".join(combo)))
            if len(config) == 13:
                break
        with pytest.raises(BudgetExceeded):
            projections.local_project(sorted(config, key=lambda c: c.sort_key()), XOR2)


class TestSuites:
    def test_axiom_suite_xor(self):
        samples = projections.sample_configurations(XOR2, 40, seed=3)
        report = projections.projection_axiom_suite(XOR2, samples, seed=3)
        assert report.sample_count == 40
        assert report.checks > 1000

    def test_axiom_suite_or(self):
        samples = projections.sample_configurations(OR2, 25, seed=5)
        report = projections.projection_axiom_suite(OR2, samples, seed=5)
        assert report.sample_count == 25

    def test_sampling_is_deterministic(self):
        a = projections.sample_configurations(XOR2, 10, seed=42)
        b = projections.sample_configurations(XOR2, 10, seed=42)
        assert a == b
        c = projections.sample_configurations(XOR2, 10, seed=43)
        assert a != c

    def test_space_respecting_xor_enforced(self):
        samples = projections.sample_configurations(XOR2, 60, seed=9)
        report = projections.space_respecting_check(XOR2, samples)
        assert report.enforced
        assert not report.violations
        assert all(row.within_bound for row in report.rows)

    def test_space_respecting_or_informational(self):
        samples = projections.sample_configurations(OR2, 30, seed=9)
        report = projections.space_respecting_check(OR2, samples)
        assert not report.enforced  # or2 is authoritarian: no assertion made

    def test_space_respecting_single_block(self):
        report = projections.space_respecting_check(XOR2, [xor_block("x")])
        (row,) = report.rows
        assert row.clause_count == 2
        assert row.projected_variables == 1

    def test_csv_lines(self):
        report = projections.space_respecting_check(XOR2, [xor_block("x")])
        lines = list(report.csv_lines())
        assert lines[0].startswith("config_id")
        assert lines[1] == "0,2,1,yes"


def lift_of_tiny():
    F = formula(["x", "-x"])
    b = ProofBuilder(F)
    b.download(clause("x"))
    b.download(clause("-x"))
    b.infer_resolve(clause("x"), clause("-x"), "x")
    return resolution.lift_refutation(b.build(), XOR2)


def downloads(r):
    return sum(1 for s in r.steps if isinstance(s, Download))


class TestExtraction:
    def test_tiny_roundtrip(self):
        lifted = lift_of_tiny()
        out = projections.extract_refutation(lifted, XOR2)
        m = resolution.check_refutation(out, semantic_check=True)
        assert out.target == formula(["x", "-x"])
        assert downloads(out) <= downloads(lifted)
        assert m.length >= 3

    def test_tiny_roundtrip_local(self):
        lifted = lift_of_tiny()
        out = projections.extract_refutation(lifted, XOR2, use_local=True)
        resolution.check_refutation(out, semantic_check=True)
        assert downloads(out) <= downloads(lifted)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_paths_roundtrip(self, n):
        g = dag.build_path(n)
        r = resolution.constant_space_refutation(g)
        lifted = resolution.lift_refutation(r, XOR2)
        out = projections.extract_refutation(lifted, XOR2)
        resolution.check_refutation(out, semantic_check=True)
        assert out.target == formulas.pebbling_contradiction(g)
        assert downloads(out) <= downloads(lifted)

    def test_pyramid_roundtrip(self):
        g = dag.build_pyramid(2)
        lifted = resolution.lift_refutation(resolution.constant_space_refutation(g), XOR2)
        out = projections.extract_refutation(lifted, XOR2)
        resolution.check_refutation(out, semantic_check=True)
        assert downloads(out) <= downloads(lifted)

    def test_compiled_pebbling_roundtrip(self):
        g = dag.build_pyramid(2)
        r_f = resolution.pebbling_to_refutation(g, pebbling.greedy_black_strategy(g), XOR2)
        out = projections.extract_refutation(r_f, XOR2)
        resolution.check_refutation(out, semantic_check=True)
        assert out.target == formulas.pebbling_contradiction(g)
        assert downloads(out) <= downloads(r_f)

    def test_variable_space_bound(self):
        g = dag.build_path(3)
        lifted = resolution.lift_refutation(resolution.constant_space_refutation(g), XOR2)
        seq = projections.projected_sequence(lifted, XOR2)
        out = projections.extract_refutation(lifted, XOR2)
        m = resolution.check_refutation(out)
        bound = 0
        for (prev, _), (cur, _) in zip(seq, seq[1:]):
            union = set()
            for c in prev | cur:
                union |= c.variables()
            bound = max(bound, len(union))
        assert m.variable_space <= bound

    def test_rejects_non_substitution_target(self):
        F = formula(["x", "-x"])
        b = ProofBuilder(F)
        b.download(clause("x"))
        b.download(clause("-x"))
        b.infer_resolve(clause("x"), clause("-x"), "x")
        with pytest.raises(PeblabError):
            projections.extract_refutation(b.build(), XOR2)


class TestArityThree:
    """The whole chain also works for a ternary function (majority of 3)."""

    MAJ3 = boolfunc.majority_fn(3)

    def test_substitute_counts(self):
        peb = formulas.pebbling_contradiction(dag.build_path(2))
        sub = formulas.substitute(peb, self.MAJ3)
        assert len(sub.variables()) == 6
        assert len(sub.clauses) == 3 + 9 + 3
        assert formulas.brute_force_sat(sub) is None

    def test_lift_extract_roundtrip(self):
        base = resolution.constant_space_refutation(dag.build_path(2))
        lifted = resolution.lift_refutation(base, self.MAJ3)
        m = resolution.check_refutation(lifted, semantic_check=True)
        assert m.width <= 3 * resolution.check_refutation(base).width
        out = projections.extract_refutation(lifted, self.MAJ3)
        resolution.check_refutation(out, semantic_check=True)
        assert downloads(out) <= downloads(lifted)

    def test_projection_block(self):
        block = sorted(
            boolfunc.canonical_clauses(self.MAJ3, formulas.block_vars("x", 3)),
            key=lambda c: c.sort_key(),
        )
        assert projections.project(block, self.MAJ3) == frozenset({clause("x")})
        assert projections.precisely_implies(block, clause("x"), self.MAJ3)
