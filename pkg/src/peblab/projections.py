"""Precise implication, resolution f-projections, and refutation extraction.

A configuration here is a set of clauses over substituted variables
x#1..x#d.  Projections map such configurations to clause sets over the
base variables: a clause is projected iff the configuration implies its
f-encoded disjunction but no strict subclause's.  Implications are
decided by exhaustive truth-table enumeration over the full blocks of
the mentioned base variables, computed as integer bitmasks.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .boolfunc import BooleanFunction, is_k_nonauthoritarian
from .cnf import Clause, CnfFormula, EMPTY_CLAUSE, Lit, neg
from .errors import BudgetExceeded, InternalContractViolation, PeblabError
from .formulas import base_of_substituted, block_vars, split_substituted, substitute_clause
from .resolution import (
    Download,
    Erase,
    Infer,
    ProofBuilder,
    Refutation,
    check_refutation,
    resolve,
)

_VAR_CAP = 24  # truth tables enumerate 2^(d * |base vars|) assignments
_LOCAL_CAP = 12  # local projection enumerates 2^|D| subsets


def _repeating_mask(position: int, total: int) -> int:
    """Bitmask over 2^total assignments where bit `position` of the index is 1."""
    period = 1 << (position + 1)
    block = ((1 << (1 << position)) - 1) << (1 << position)
    repetitions = 1 << (total - position - 1)
    repunit = ((1 << (period * repetitions)) - 1) // ((1 << period) - 1)
    return block * repunit


class ProjectionWorld:
    """Bitmask truth tables over the blocks of a fixed base-variable set."""

    def __init__(self, base_vars, f: BooleanFunction):
        self.f = f
        self.base_vars = tuple(sorted(set(base_vars)))
        self.sub_vars = tuple(
            sv for x in self.base_vars for sv in block_vars(x, f.arity)
        )
        n = len(self.sub_vars)
        if n > _VAR_CAP:
            raise BudgetExceeded(n, _VAR_CAP, "projection truth table")
        self.n = n
        self.full = (1 << (1 << n)) - 1 if n else 1
        self._position = {v: i for i, v in enumerate(self.sub_vars)}
        self._lit_masks: dict[Lit, int] = {}
        for v, p in self._position.items():
            mask = _repeating_mask(p, n)
            self._lit_masks[(v, True)] = mask
            self._lit_masks[(v, False)] = mask ^ self.full
        self._signed: dict[tuple[str, bool], int] = {}
        for x in self.base_vars:
            block = block_vars(x, f.arity)
            on = 0
            for index in range(1 << f.arity):
                sub = self.full
                for j, v in enumerate(block):
                    sub &= self._lit_masks[(v, bool((index >> j) & 1))]
                if f.value(index):
                    on |= sub
            self._signed[(x, True)] = on
            self._signed[(x, False)] = on ^ self.full
        self._tables: dict[tuple[str, ...], list] = {}

    def clause_mask(self, c: Clause) -> int:
        mask = 0
        for lit in c.literals:
            if lit not in self._lit_masks:
                raise PeblabError(f"variable {lit[0]!r} outside this projection world")
            mask |= self._lit_masks[lit]
        return mask

    def config_mask(self, clauses) -> int:
        mask = self.full
        for c in clauses:
            mask &= self.clause_mask(c)
        return mask

    def disjunction_mask(self, c: Clause) -> int:
        """Mask of assignments satisfying OR of f^nu over c's literals."""
        mask = 0
        for name, polarity in c.literals:
            mask |= self._signed[(name, polarity)]
        return mask

    def implies(self, config_mask: int, other_mask: int) -> bool:
        return config_mask & ~other_mask & self.full == 0

    def candidate_table(self, mentioned) -> list:
        """(clause, literal key, disjunction mask) for every candidate clause
        over the mentioned base variables; cached per variable set."""
        key = tuple(sorted(set(mentioned)))
        if key not in self._tables:
            if key == self.base_vars:
                table = [
                    (cand, cand.literals, self.disjunction_mask(cand))
                    for cand in _candidate_clauses(self.base_vars)
                ]
            else:
                allowed = set(key)
                table = [
                    entry for entry in self.candidate_table(self.base_vars)
                    if entry[0].variables() <= allowed
                ]
            self._tables[key] = table
        return self._tables[key]


def _mentioned_base_vars(clauses) -> tuple[str, ...]:
    out = set()
    for c in clauses:
        for name, _ in c.literals:
            base, _idx = split_substituted(name)
            out.add(base)
    return tuple(sorted(out))


def _candidate_clauses(base_vars) -> list[Clause]:
    cands = []
    for polarities in itertools.product((None, True, False), repeat=len(base_vars)):
        lits = frozenset(
            (v, p) for v, p in zip(base_vars, polarities) if p is not None
        )
        cands.append(Clause(lits))
    return cands


def precisely_implies(d, c: Clause, f: BooleanFunction) -> bool:
    """D implies the f-encoded disjunction of c, but no strict subclause's."""
    d = list(d)
    world = ProjectionWorld(_mentioned_base_vars(d) + tuple(c.variables()), f)
    dmask = world.config_mask(d)
    if not world.implies(dmask, world.disjunction_mask(c)):
        return False
    for lit in c.literals:
        if world.implies(dmask, world.disjunction_mask(c.without(lit))):
            return False
    return True


def _project_in_world(world: ProjectionWorld, dmask: int, base_vars) -> frozenset[Clause]:
    table = world.candidate_table(base_vars)
    implied = {
        key: world.implies(dmask, mask) for _cand, key, mask in table
    }
    out = []
    for cand, key, _mask in table:
        if not implied[key]:
            continue
        if any(implied[key - {lit}] for lit in key):
            continue
        out.append(cand)
    return frozenset(out)


def project(d, f: BooleanFunction) -> frozenset[Clause]:
    """Resolution f-projection: all clauses over the mentioned base
    variables that D precisely implies.  Always an antichain."""
    d = list(d)
    base_vars = _mentioned_base_vars(d)
    world = ProjectionWorld(base_vars, f)
    return _project_in_world(world, world.config_mask(d), base_vars)


def _minimized(clauses) -> frozenset[Clause]:
    out: set[Clause] = set()
    for c in sorted(clauses, key=Clause.sort_key):
        if not any(o.subsumes(c) for o in out):
            out -= {o for o in out if c.subsumes(o)}
            out.add(c)
    return frozenset(out)


def local_project(d, f: BooleanFunction, minimize: bool = True) -> frozenset[Clause]:
    """Union of project over all subsets of D, subsumption-minimized."""
    d = sorted(set(d), key=Clause.sort_key)
    if len(d) > _LOCAL_CAP:
        raise BudgetExceeded(len(d), _LOCAL_CAP, "local projection subset enumeration")
    world = ProjectionWorld(_mentioned_base_vars(d), f)
    clause_masks = [world.clause_mask(c) for c in d]
    out: set[Clause] = set()
    for bits in range(1 << len(d)):
        subset = [d[i] for i in range(len(d)) if (bits >> i) & 1]
        dmask = world.full
        for i in range(len(d)):
            if (bits >> i) & 1:
                dmask &= clause_masks[i]
        out |= _project_in_world(world, dmask, _mentioned_base_vars(subset))
    return _minimized(out) if minimize else frozenset(out)


def local_projection_variables(d, f: BooleanFunction) -> frozenset[str]:
    """Base variables mentioned by the full (unminimized) local projection."""
    raw = local_project(d, f, minimize=False)
    return frozenset(v for c in raw for v in c.variables())


# -- refutation extraction -------------------------------------------------


def projected_sequence(r_f: Refutation, f: BooleanFunction, use_local: bool = False):
    """Projected clause sets C_t for every configuration D_t of r_f,
    plus the per-step downloaded base axiom (None otherwise)."""
    if r_f.system != "res":
        raise PeblabError("projections are computed for resolution refutations only")
    _base, axiom_map = base_of_substituted(r_f.target, f)
    world = ProjectionWorld(
        _mentioned_base_vars(r_f.target.clauses), f
    )
    config: set[Clause] = set()
    lines_by_id: dict[int, Clause] = {}
    out = [(frozenset(), None)]

    def proj() -> frozenset[Clause]:
        members = sorted(config, key=Clause.sort_key)
        if use_local:
            if len(members) > _LOCAL_CAP:
                raise BudgetExceeded(len(members), _LOCAL_CAP, "local projection")
            acc: set[Clause] = set()
            masks = [world.clause_mask(c) for c in members]
            for bits in range(1 << len(members)):
                dmask = world.full
                subset = []
                for i in range(len(members)):
                    if (bits >> i) & 1:
                        dmask &= masks[i]
                        subset.append(members[i])
                acc |= _project_in_world(world, dmask, _mentioned_base_vars(subset))
            return _minimized(acc)
        return _project_in_world(
            world, world.config_mask(members), _mentioned_base_vars(members)
        )

    for idx, step in enumerate(r_f.steps, start=1):
        axiom = None
        if isinstance(step, Download):
            lines_by_id[idx] = step.line
            config.add(step.line)
            axiom = axiom_map[step.line]
        elif isinstance(step, Infer):
            lines_by_id[idx] = step.line
            config.add(step.line)
        elif isinstance(step, Erase):
            config.discard(lines_by_id[step.target])
        out.append((proj(), axiom))
    return out


def _weakening_source(candidates, target: Clause) -> Clause | None:
    options = [c for c in candidates if c.subsumes(target)]
    if not options:
        return None
    return min(options, key=Clause.sort_key)


def extract_refutation(r_f: Refutation, f: BooleanFunction, use_local: bool = False) -> Refutation:
    """Extract a resolution refutation of F from a refutation of F[f].

    Replays r_f, projecting every configuration; fills the transitions
    between consecutive projected sets with erasures and weakenings, and
    handles axiom downloads by deriving each genuinely new projected
    clause from the guaranteed ~a v C clauses by successive resolutions
    with the downloaded base axiom.  Downloads at most one base axiom
    per download of r_f.
    """
    check_refutation(r_f)
    base, _axiom_map = base_of_substituted(r_f.target, f)
    sequence = projected_sequence(r_f, f, use_local)
    b = ProofBuilder(base)
    prev: frozenset[Clause] = frozenset()

    for cur, axiom in sequence[1:]:
        new = sorted(cur - prev, key=Clause.sort_key)
        state = set(prev)
        if axiom is None:
            # erase-then-weaken-then-erase
            for c in sorted(prev - cur, key=Clause.sort_key):
                if not any(c.subsumes(o) for o in cur):
                    b.erase(c)
                    state.discard(c)
            for c in new:
                src = _weakening_source(state, c)
                if src is None:
                    raise InternalContractViolation(
                        f"monotonicity: no weakening source for ({c})"
                    )
                b.weaken(src, c)
            for c in sorted(prev - cur, key=Clause.sort_key):
                if c in state:
                    b.erase(c)
        else:
            downloaded = False
            transients: list[Clause] = []
            for c in new:
                if b.has(c):
                    continue
                src = _weakening_source(state, c)
                if src is not None:
                    b.weaken(src, c)
                    continue
                if not downloaded:
                    b.download(axiom)
                    downloaded = True
                if c == axiom:
                    continue
                if axiom.subsumes(c):
                    b.weaken(axiom, c)
                    continue
                current = axiom
                for lit in sorted(axiom.literals - c.literals):
                    helper = Clause(frozenset({neg(lit)}) | c.literals)
                    if not b.has(helper):
                        hsrc = _weakening_source(prev, helper)
                        if hsrc is None:
                            raise InternalContractViolation(
                                f"incremental soundness: no source for ({helper})"
                            )
                        b.weaken(hsrc, helper)
                        if helper not in cur:
                            transients.append(helper)
                    name, polarity = lit
                    if polarity:
                        nxt = resolve(current, helper, name)
                        if not b.has(nxt):
                            b.infer_resolve(current, helper, name)
                    else:
                        nxt = resolve(helper, current, name)
                        if not b.has(nxt):
                            b.infer_resolve(helper, current, name)
                    if nxt != c and nxt not in cur:
                        transients.append(nxt)
                    current = nxt
                if current != c:
                    raise InternalContractViolation(
                        f"axiom dance for ({c}) ended at ({current})"
                    )
            for c in sorted(prev - cur, key=Clause.sort_key):
                if b.has(c):
                    b.erase(c)
            for c in transients:
                if c not in cur and b.has(c):
                    b.erase(c)
            if downloaded and axiom not in cur and b.has(axiom):
                b.erase(axiom)
        prev = cur

    if EMPTY_CLAUSE not in prev:
        raise InternalContractViolation("final projection does not contain the empty clause")
    return b.build()


# -- property suites ---------------------------------------------------------


@dataclass(frozen=True)
class SuiteSample:
    index: int
    clause_count: int
    projected: int
    local_projected: int


@dataclass(frozen=True)
class SuiteReport:
    samples: tuple[SuiteSample, ...]
    checks: int

    @property
    def sample_count(self) -> int:
        return len(self.samples)


def sample_configurations(
    f: BooleanFunction,
    count: int,
    seed: int,
    max_clauses: int = 8,
    max_base_vars: int = 4,
    max_width: int = 4,
):
    """Seeded random configurations over substituted variables."""
    rng = random.Random(seed)
    names = [chr(ord("p") + i) for i in range(max_base_vars)]
    universe = [v for x in names for v in block_vars(x, f.arity)]
    out = []
    for _ in range(count):
        nclauses = rng.randint(1, max_clauses)
        config = set()
        for _ in range(nclauses):
            width = rng.randint(1, min(max_width, len(universe)))
            chosen = rng.sample(universe, width)
            config.add(Clause(frozenset((v, rng.random() < 0.5) for v in chosen)))
        out.append(sorted(config, key=Clause.sort_key))
    return out


def _check_complete(world, dmask, base_vars, projection) -> int:
    checks = 0
    for cand, _key, mask in world.candidate_table(base_vars):
        checks += 1
        if world.implies(dmask, mask):
            if not any(p.subsumes(cand) for p in projection):
                raise InternalContractViolation(
                    f"completeness failed: ({cand}) implied but not weakening-derivable"
                )
    return checks


def projection_axiom_suite(f: BooleanFunction, samples, seed: int = 0) -> SuiteReport:
    """Brute-force verification of the four projection properties
    (complete, nontrivial, monotone, incrementally sound) for both the
    plain and the local projection on every sample configuration.
    Raises InternalContractViolation on any failure."""
    rng = random.Random(seed)
    results = []
    checks = 0

    if project([], f) != frozenset() or local_project([], f) != frozenset():
        raise InternalContractViolation("nontriviality failed on the empty configuration")

    for index, d in enumerate(samples):
        d = sorted(set(d), key=Clause.sort_key)
        base_vars = _mentioned_base_vars(d)
        world = ProjectionWorld(base_vars, f)
        dmask = world.config_mask(d)
        proj = _project_in_world(world, dmask, base_vars)
        lproj = local_project(d, f, minimize=False)

        checks += _check_complete(world, dmask, base_vars, proj)
        checks += _check_complete(world, dmask, base_vars, _minimized(lproj))

        # monotone: strengthen D with an implied clause
        if d and base_vars:
            extra_lits = set(d[rng.randrange(len(d))].literals)
            pool = [v for v in world.sub_vars if v not in {n for n, _ in extra_lits}]
            if pool:
                v = rng.choice(pool)
                extra_lits.add((v, rng.random() < 0.5))
            implied = Clause(frozenset(extra_lits))
            stronger = d + [implied]
            smask = world.config_mask(stronger)
            sproj = _project_in_world(world, smask, _mentioned_base_vars(stronger))
            for c in proj:
                checks += 1
                if not any(p.subsumes(c) for p in sproj):
                    raise InternalContractViolation(
                        f"monotonicity failed for ({c}) after adding ({implied})"
                    )
            slproj = _minimized(local_project(stronger, f, minimize=False))
            for c in _minimized(lproj):
                checks += 1
                if not any(p.subsumes(c) for p in slproj):
                    raise InternalContractViolation(
                        f"local monotonicity failed for ({c})"
                    )

        # incrementally sound: add an encoding of a random base axiom
        if base_vars:
            width = rng.randint(1, len(base_vars))
            chosen = rng.sample(list(base_vars), width)
            axiom = Clause(frozenset((x, rng.random() < 0.5) for x in chosen))
            encodings = sorted(substitute_clause(axiom, f), key=Clause.sort_key)
            line = encodings[rng.randrange(len(encodings))]
            bigger = d + [line]
            bmask = world.config_mask(bigger)
            for projector in ("plain", "local"):
                if projector == "plain":
                    after = _project_in_world(world, bmask, _mentioned_base_vars(bigger))
                    before = proj
                else:
                    after = _minimized(local_project(bigger, f, minimize=False))
                    before = _minimized(lproj)
                for c in after:
                    for lit in axiom.literals - c.literals:
                        checks += 1
                        want = Clause(frozenset({neg(lit)}) | c.literals)
                        if not any(p.subsumes(want) for p in before):
                            raise InternalContractViolation(
                                f"incremental soundness failed: ({want}) not derivable "
                                f"({projector} projection)"
                            )

        results.append(SuiteSample(
            index=index,
            clause_count=len(d),
            projected=len(proj),
            local_projected=len(_minimized(lproj)),
        ))
    return SuiteReport(samples=tuple(results), checks=checks)


@dataclass(frozen=True)
class SpaceRespectRow:
    config_id: int
    clause_count: int
    projected_variables: int
    within_bound: bool


@dataclass(frozen=True)
class SpaceRespectReport:
    rows: tuple[SpaceRespectRow, ...]
    enforced: bool
    max_ratio: float
    violations: tuple[int, ...] = field(default_factory=tuple)

    def csv_lines(self):
        yield "config_id,clauses,projected_variables,within_bound"
        for row in self.rows:
            yield f"{row.config_id},{row.clause_count},{row.projected_variables},{'yes' if row.within_bound else 'no'}"


def space_respecting_check(f: BooleanFunction, samples) -> SpaceRespectReport:
    """Check |Vars(local projection)| <= |D| on every sample.

    For non-authoritarian f the bound is asserted (violations raise).
    For authoritarian f it is informational only: a single pinned input
    can fix such a function, so the bound has no reason to hold.
    """
    enforced = is_k_nonauthoritarian(f, 1)
    rows = []
    violations = []
    max_ratio = 0.0
    for config_id, d in enumerate(samples):
        d = sorted(set(d), key=Clause.sort_key)
        count = len(d)
        var_count = len(local_projection_variables(d, f))
        ok = var_count <= count
        if count:
            max_ratio = max(max_ratio, var_count / count)
        if not ok:
            violations.append(config_id)
        rows.append(SpaceRespectRow(config_id, count, var_count, ok))
    report = SpaceRespectReport(
        rows=tuple(rows),
        enforced=enforced,
        max_ratio=max_ratio,
        violations=tuple(violations),
    )
    if enforced and violations:
        raise PeblabError(
            f"space-respecting bound violated on configurations {violations} "
            "for a non-authoritarian function"
        )
    return report
