"""Configuration-style resolution and k-DNF resolution.

Proof objects are sequences of axiom download / inference / erasure
steps over clause (or k-DNF line) configurations.  The checker replays
a proof, verifies each step against the system's rules, and returns
exact length/width/space measures.  Builders compile pebblings into
refutations, emit the constant-space refutation, lift refutations
through substitution, and run the bounded width/space oracles.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .boolfunc import BooleanFunction, canonical_clauses
from .cnf import Clause, CnfFormula, EMPTY_CLAUSE, Lit, format_lit, neg, parse_lit
from .dag import Dag
from .errors import (
    BudgetExceeded,
    IllegalStep,
    IncompletePebbling,
    MissingBottom,
    PivotAbsent,
    SaturationFailure,
    TraceError,
    TrivialClause,
    TrivialResolvent,
    WrongEndpoints,
    search_budget,
)
from .formulas import (
    block_vars,
    pebbling_contradiction,
    substitute,
    substitute_clause,
    substitution_images,
)
from .pebbling import BwPebbling, validate_bw

Term = frozenset[Lit]


def term(spec: str) -> Term:
    return frozenset(parse_lit(tok) for tok in spec.replace("&", " ").split())


@dataclass(frozen=True)
class KDnfLine:
    """Disjunction of terms; each term a nontrivial conjunction of literals."""

    terms: frozenset[Term] = frozenset()

    def __post_init__(self):
        for t in self.terms:
            if not t:
                raise ValueError("empty term (constant true) not allowed in a line")
            names = [n for n, _ in t]
            if len(names) != len(set(names)):
                raise ValueError(f"trivial term {sorted(t)}")

    @classmethod
    def from_clause(cls, c: Clause) -> "KDnfLine":
        return cls(frozenset(frozenset({lit}) for lit in c.literals))

    def variables(self) -> frozenset[str]:
        return frozenset(n for t in self.terms for n, _ in t)

    def literal_count(self) -> int:
        return sum(len(t) for t in self.terms)

    def max_term_width(self) -> int:
        return max((len(t) for t in self.terms), default=0)

    def is_empty(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> tuple[Term, ...]:
        return tuple(sorted(self.terms, key=lambda t: sorted(format_lit(l) for l in t)))

    def sort_key(self):
        return tuple(tuple(sorted(format_lit(l) for l in t)) for t in self.sorted_terms())

    def __str__(self) -> str:
        if not self.terms:
            return "<empty>"
        parts = []
        for t in self.sorted_terms():
            lits = sorted((format_lit(l) for l in t))
            parts.append(lits[0] if len(lits) == 1 else "(" + "&".join(lits) + ")")
        return " ".join(parts)


EMPTY_LINE = KDnfLine()

# step kinds ---------------------------------------------------------------


@dataclass(frozen=True)
class Download:
    line: object  # Clause | KDnfLine


@dataclass(frozen=True)
class Infer:
    line: object
    premises: tuple[int, ...]
    rule: str  # pivot | weaken | cut | andi | ande
    pivot: str | None = None
    cut_term: Term | None = None


@dataclass(frozen=True)
class Erase:
    target: int


@dataclass(frozen=True)
class Refutation:
    target: CnfFormula
    steps: tuple = ()
    system: str = "res"  # res | kdnf
    k: int = 1


@dataclass(frozen=True)
class Measures:
    length: int
    width: int
    clause_space: int
    variable_space: int
    total_space: int
    formula_space: int

    def __str__(self) -> str:
        return (
            f"length={self.length} width={self.width} clause_space={self.clause_space} "
            f"variable_space={self.variable_space} total_space={self.total_space} "
            f"formula_space={self.formula_space}"
        )


# -- the resolution rule ----------------------------------------------------


def resolve(c1: Clause, c2: Clause, pivot: str) -> Clause:
    """Resolution on `pivot`: pivot positive in c1, negative in c2."""
    if (pivot, True) not in c1:
        raise PivotAbsent(f"{pivot} not positive in ({c1})")
    if (pivot, False) not in c2:
        raise PivotAbsent(f"{pivot} not negative in ({c2})")
    lits = (c1.literals - {(pivot, True)}) | (c2.literals - {(pivot, False)})
    try:
        return Clause(lits)
    except TrivialClause:
        raise TrivialResolvent(f"resolving ({c1}) and ({c2}) on {pivot}") from None


# -- semantic evaluation (truth-table cross-checks) ---------------------------

_SEMANTIC_VAR_CAP = 20


def _lines_imply(premises, conclusion) -> bool | None:
    """Truth-table implication check; None if too many variables."""
    names = sorted(set().union(*(p.variables() for p in premises), conclusion.variables()))
    if len(names) > _SEMANTIC_VAR_CAP:
        return None
    pos = {n: i for i, n in enumerate(names)}

    def holds(line, assignment) -> bool:
        if isinstance(line, Clause):
            return any(((assignment >> pos[n]) & 1) == int(p) for n, p in line.literals)
        return any(
            all(((assignment >> pos[n]) & 1) == int(p) for n, p in t) for t in line.terms
        )

    for assignment in range(1 << len(names)):
        if all(holds(p, assignment) for p in premises) and not holds(conclusion, assignment):
            return False
    return True


# -- the checker --------------------------------------------------------------


def _check_kdnf_rule(step: Infer, premises: list, k: int, idx: int) -> None:
    line = step.line
    if not isinstance(line, KDnfLine):
        raise IllegalStep(idx, "k-DNF step must infer a k-DNF line")
    if line.max_term_width() > k:
        raise IllegalStep(idx, f"term wider than k={k} in conclusion")
    if step.rule == "weaken":
        if len(premises) != 1:
            raise IllegalStep(idx, "weakening takes one premise")
        if not premises[0].terms <= line.terms:
            raise IllegalStep(idx, "weakening must extend the premise")
        return
    if step.rule == "cut":
        if len(premises) != 2 or step.cut_term is None:
            raise IllegalStep(idx, "cut takes two premises and a cut term")
        t = step.cut_term
        p1, p2 = premises
        if len(t) > k:
            raise IllegalStep(idx, f"cut term wider than k={k}")
        if t not in p1.terms:
            raise IllegalStep(idx, "cut term missing from first premise")
        negs = {frozenset({neg(l)}) for l in t}
        if not negs <= p2.terms:
            raise IllegalStep(idx, "negated cut literals missing from second premise")
        g = p1.terms - {t}
        rest = p2.terms - negs
        if not (g | rest) <= line.terms or not line.terms <= (g | p2.terms):
            raise IllegalStep(idx, "cut conclusion does not match premises")
        return
    if step.rule == "andi":
        if len(premises) != 2:
            raise IllegalStep(idx, "and-introduction takes two premises")
        p1, p2 = premises
        for t1 in p1.terms:
            for t2 in p2.terms:
                if p1.terms - {t1} != p2.terms - {t2}:
                    continue
                union = t1 | t2
                if len(union) > k:
                    continue
                names = [n for n, _ in union]
                if len(names) != len(set(names)):
                    continue
                if line.terms == (p1.terms - {t1}) | {union}:
                    return
        raise IllegalStep(idx, "no valid and-introduction matches the conclusion")
    if step.rule == "ande":
        if len(premises) != 1:
            raise IllegalStep(idx, "and-elimination takes one premise")
        (p,) = premises
        for t in p.terms:
            for sub in line.terms:
                if sub < t and line.terms == (p.terms - {t}) | {sub}:
                    return
        raise IllegalStep(idx, "no valid and-elimination matches the conclusion")
    raise IllegalStep(idx, f"unknown k-DNF rule {step.rule!r}")


def check_refutation(r: Refutation, semantic_check: bool | None = None) -> Measures:
    """Replay a refutation; accept iff every step is legal and the final
    configuration contains the empty clause.  Returns exact measures.

    For k-DNF systems each syntactic inference is additionally
    cross-checked semantically by truth table when the premises span at
    most 20 variables (pass semantic_check=False to disable, or True to
    force the same cross-check for resolution).
    """
    if r.system not in ("res", "kdnf"):
        raise ValueError(f"unknown proof system {r.system!r}")
    kdnf = r.system == "kdnf"
    if semantic_check is None:
        semantic_check = kdnf
    if kdnf:
        axioms = {KDnfLine.from_clause(c) for c in r.target.clauses}
        bottom = EMPTY_LINE
    else:
        axioms = set(r.target.clauses)
        bottom = EMPTY_CLAUSE

    lines_by_id: dict[int, object] = {}
    config: set = set()
    length = 0
    width = 0
    clause_space = 0
    variable_space = 0
    total_space = 0

    def line_width(line) -> int:
        return line.literal_count() if isinstance(line, KDnfLine) else line.width

    def update_measures():
        nonlocal width, clause_space, variable_space, total_space
        clause_space = max(clause_space, len(config))
        if config:
            width = max(width, max(line_width(l) for l in config))
            variable_space = max(
                variable_space, len(set().union(*(l.variables() for l in config)))
            )
            total_space = max(total_space, sum(line_width(l) for l in config))

    for idx, step in enumerate(r.steps, start=1):
        if isinstance(step, Download):
            if step.line not in axioms:
                raise IllegalStep(idx, f"({step.line}) is not an axiom of the target formula")
            config.add(step.line)
            lines_by_id[idx] = step.line
            length += 1
        elif isinstance(step, Infer):
            premises = []
            for pid in step.premises:
                if pid not in lines_by_id:
                    raise IllegalStep(idx, f"premise {pid} does not name an earlier line")
                value = lines_by_id[pid]
                if value not in config:
                    raise IllegalStep(idx, f"premise ({value}) not in the current configuration")
                premises.append(value)
            if kdnf:
                _check_kdnf_rule(step, premises, r.k, idx)
            else:
                if step.rule == "pivot":
                    if len(premises) != 2 or step.pivot is None:
                        raise IllegalStep(idx, "resolution takes two premises and a pivot")
                    try:
                        expected = resolve(premises[0], premises[1], step.pivot)
                    except (PivotAbsent, TrivialResolvent) as e:
                        raise IllegalStep(idx, str(e)) from None
                    if expected != step.line:
                        raise IllegalStep(idx, f"resolvent is ({expected}), not ({step.line})")
                elif step.rule == "weaken":
                    if len(premises) != 1:
                        raise IllegalStep(idx, "weakening takes one premise")
                    if not premises[0].subsumes(step.line):
                        raise IllegalStep(idx, "weakening must extend the premise")
                else:
                    raise IllegalStep(idx, f"unknown resolution rule {step.rule!r}")
            if semantic_check:
                sound = _lines_imply(premises, step.line)
                if sound is False:
                    raise IllegalStep(idx, "inference is not semantically sound")
            config.add(step.line)
            lines_by_id[idx] = step.line
            length += 1
        elif isinstance(step, Erase):
            if step.target not in lines_by_id:
                raise IllegalStep(idx, f"erase target {step.target} does not name a line")
            value = lines_by_id[step.target]
            if value not in config:
                raise IllegalStep(idx, f"erasing ({value}) which is not present")
            config.discard(value)
        else:
            raise IllegalStep(idx, f"unknown step {step!r}")
        update_measures()

    if bottom not in config:
        raise MissingBottom("final configuration does not contain the empty clause")
    return Measures(
        length=length,
        width=width,
        clause_space=clause_space,
        variable_space=variable_space,
        total_space=total_space,
        formula_space=clause_space,
    )


# -- proof builder ------------------------------------------------------------


class ProofBuilder:
    """Accumulates steps; tracks which line ids are currently present."""

    def __init__(self, target: CnfFormula, system: str = "res", k: int = 1):
        self.target = target
        self.system = system
        self.k = k
        self.steps: list = []
        self._ids: dict[object, int] = {}  # present line value -> latest step id

    def _added(self, line) -> int:
        step_id = len(self.steps)
        self._ids[line] = step_id
        return step_id

    def present(self) -> frozenset:
        return frozenset(self._ids)

    def has(self, line) -> bool:
        return line in self._ids

    def id_of(self, line) -> int:
        return self._ids[line]

    def download(self, line) -> int:
        self.steps.append(Download(line))
        return self._added(line)

    def infer_resolve(self, c1: Clause, c2: Clause, pivot: str) -> int:
        result = resolve(c1, c2, pivot)
        self.steps.append(Infer(result, (self._ids[c1], self._ids[c2]), "pivot", pivot=pivot))
        return self._added(result)

    def weaken(self, source: Clause, result: Clause) -> int:
        self.steps.append(Infer(result, (self._ids[source],), "weaken"))
        return self._added(result)

    def cut(self, p1: KDnfLine, p2: KDnfLine, cut_term: Term, result: KDnfLine) -> int:
        self.steps.append(Infer(result, (self._ids[p1], self._ids[p2]), "cut", cut_term=cut_term))
        return self._added(result)

    def andi(self, p1: KDnfLine, p2: KDnfLine, result: KDnfLine) -> int:
        self.steps.append(Infer(result, (self._ids[p1], self._ids[p2]), "andi"))
        return self._added(result)

    def ande(self, p: KDnfLine, result: KDnfLine) -> int:
        self.steps.append(Infer(result, (self._ids[p],), "ande"))
        return self._added(result)

    def erase(self, line) -> None:
        self.steps.append(Erase(self._ids[line]))
        del self._ids[line]

    def build(self) -> Refutation:
        return Refutation(target=self.target, steps=tuple(self.steps),
                          system=self.system, k=self.k)


# -- saturation ----------------------------------------------------------------


class Saturation:
    """Resolution closure with derivation traces.

    `clauses` is the subsumption-minimized closure; `plan` extracts a
    spliceable derivation for any clause the closure implies.
    """

    def __init__(self, clauses, parents):
        self.clauses = clauses
        self._parents = parents

    def plan(self, target: Clause) -> tuple[list[tuple[Clause, Clause, Clause, str]], Clause]:
        """Derivation steps for `target` (or its strongest derived subsumer).

        Returns (steps, base): steps are (result, left, right, pivot) in
        dependency order deriving `base`; base == target whenever the
        exact clause was ever generated, else base is a proper subclause
        and the caller must weaken.
        """
        if target in self._parents:
            base = target
        else:
            candidates = [c for c in self.clauses if c.subsumes(target)]
            if not candidates:
                raise SaturationFailure(f"({target}) is not implied by the premises")
            base = min(candidates, key=Clause.sort_key)
        steps: list[tuple[Clause, Clause, Clause, str]] = []
        emitted: set[Clause] = set()

        def walk(c: Clause) -> None:
            if c in emitted:
                return
            emitted.add(c)
            parent = self._parents[c]
            if parent is None:
                return
            left, right, pivot = parent
            walk(left)
            walk(right)
            steps.append((c, left, right, pivot))

        walk(base)
        return steps, base


def saturate(premises, variable_cap: int = 16, budget=None) -> Saturation:
    """Close a clause set under resolution with subsumption minimization,
    recording a derivation trace for every clause ever generated."""
    prems = sorted(set(premises), key=Clause.sort_key)
    names = set()
    for c in prems:
        names |= c.variables()
    if len(names) > variable_cap:
        raise BudgetExceeded(len(names), variable_cap, "saturation variable count")
    limit = search_budget(budget)

    parents: dict[Clause, tuple[Clause, Clause, str] | None] = {}
    alive: dict[Clause, bool] = {}
    for c in prems:
        parents.setdefault(c, None)
        if not any(o.subsumes(c) for o in alive if o != c):
            for o in [o for o in alive if c.subsumes(o) and o != c]:
                alive.pop(o)
            alive[c] = True

    queue = deque(sorted(alive, key=Clause.sort_key))
    processed: list[Clause] = []
    work = 0
    while queue:
        given = queue.popleft()
        if given not in alive:
            continue
        for other in list(processed):
            if other not in alive:
                continue
            for first, second in ((given, other), (other, given)):
                pivots = sorted(
                    n for n, p in first.literals if p and (n, False) in second.literals
                )
                for pivot in pivots:
                    work += 1
                    if work > limit:
                        raise BudgetExceeded(work, limit, "saturation")
                    try:
                        r = resolve(first, second, pivot)
                    except TrivialResolvent:
                        continue
                    if r in parents:
                        continue
                    parents[r] = (first, second, pivot)
                    if any(o.subsumes(r) for o in alive):
                        continue
                    for o in [o for o in alive if r.subsumes(o)]:
                        alive.pop(o)
                    alive[r] = True
                    queue.append(r)
        processed.append(given)
    return Saturation(tuple(sorted(alive, key=Clause.sort_key)), parents)


def _splice(builder: ProofBuilder, sat: Saturation, target: Clause) -> list[Clause]:
    """Emit the derivation of `target`; returns newly added clauses in order."""
    steps, base = sat.plan(target)
    added = []
    for result, left, right, pivot in steps:
        if builder.has(result):
            continue
        builder.infer_resolve(left, right, pivot)
        added.append(result)
    if base != target:
        if not builder.has(target):
            builder.weaken(base, target)
            added.append(target)
    return added


# -- constructive refutations ---------------------------------------------------


def constant_space_refutation(g: Dag) -> Refutation:
    """Refute Peb_G in clause space <= 3 and length O(|V| + |E|).

    Starting from the sink axiom, repeatedly resolve the all-negative
    clause with the pebbling axiom of its topologically-latest vertex;
    each vertex is expanded at most once.
    """
    target = pebbling_contradiction(g)
    b = ProofBuilder(target)
    cur = Clause(frozenset({(g.sink, False)}))
    b.download(cur)
    while not cur.is_empty():
        v = max(cur.variables(), key=g.topo_position)
        preds = g.predecessors(v)
        axiom = Clause(frozenset({(u, False) for u in preds} | {(v, True)}))
        b.download(axiom)
        nxt_id = b.infer_resolve(axiom, cur, v)
        b.erase(cur)
        b.erase(axiom)
        cur = b.steps[nxt_id - 1].line
    return b.build()


def _vertex_images(g: Dag, f: BooleanFunction | None):
    """Clause machinery for simulating pebblings, with or without substitution."""
    base = pebbling_contradiction(g)
    if f is None:
        target = base
        truth = {v: frozenset({Clause(frozenset({(v, True)}))}) for v in g.vertices}
        images = {c: frozenset({c}) for c in base.clauses}
    else:
        target = substitute(base, f)
        images = substitution_images(base, f)
        truth = {
            v: canonical_clauses(f, block_vars(v, f.arity), "positive") for v in g.vertices
        }
    axiom_of = {}
    for v in g.vertices:
        preds = g.predecessors(v)
        if preds:
            c = Clause(frozenset({(u, False) for u in preds} | {(v, True)}))
        else:
            c = Clause(frozenset({(v, True)}))
        axiom_of[v] = images[c]
    sink_axiom = images[Clause(frozenset({(g.sink, False)}))]
    return target, truth, axiom_of, sink_axiom


def pebbling_to_refutation(
    g: Dag,
    p: BwPebbling,
    f: BooleanFunction | None = None,
    variable_cap: int = 16,
    budget=None,
) -> Refutation:
    """Compile a complete black pebbling into a refutation of Peb_G[f].

    Each placement on v derives the clause set expressing that f is true
    on v's block (from the predecessors' sets plus v's substituted
    pebbling axioms, via saturation); each removal erases v's set.
    """
    try:
        validate_bw(p, black_only=True)
    except WrongEndpoints as e:
        raise IncompletePebbling(str(e)) from None
    target, truth, axiom_of, sink_axiom = _vertex_images(g, f)
    b = ProofBuilder(target)

    for t in range(1, len(p.steps)):
        prev, cur = p.steps[t - 1], p.steps[t]
        placed = cur.black - prev.black
        removed = prev.black - cur.black
        if placed:
            (v,) = placed
            targets = truth[v]
            block = sorted(axiom_of[v], key=Clause.sort_key)
            for d in block:
                if not b.has(d):
                    b.download(d)
            if any(not b.has(c) for c in targets):
                premises = set(block)
                for u in g.predecessors(v):
                    premises |= truth[u]
                sat = saturate(premises, variable_cap, budget)
                transient: list[Clause] = []
                for c in sorted(targets, key=Clause.sort_key):
                    if not b.has(c):
                        transient.extend(_splice(b, sat, c))
                for c in transient:
                    if c not in targets and b.has(c):
                        b.erase(c)
            for d in block:
                if d not in targets and b.has(d):
                    b.erase(d)
        else:
            (v,) = removed
            for c in sorted(truth[v], key=Clause.sort_key):
                if b.has(c):
                    b.erase(c)

    sink_block = sorted(sink_axiom, key=Clause.sort_key)
    for d in sink_block:
        if not b.has(d):
            b.download(d)
    sat = saturate(truth[g.sink] | frozenset(sink_block), variable_cap, budget)
    _splice(b, sat, EMPTY_CLAUSE)
    return b.build()


@dataclass(frozen=True)
class SimulationConstants:
    length_factor: int
    space_factor: int


_PINNED_CONSTANTS = {
    # function literal -> factors for fan-in <= 2; regression-pinned from
    # measured corpus runs (paths <= 8, binary trees h <= 3, pyramids h <= 3):
    # worst observed ratios 3.0/3.0 (identity), 5.0/5.0 (or:2), 8.0/11.4 (xor:2).
    "none": SimulationConstants(4, 4),
    "or:2": SimulationConstants(6, 6),
    "xor:2": SimulationConstants(9, 12),
}


def pinned_simulation_constants(fn_literal: str, max_indegree: int) -> SimulationConstants:
    """Per-function constants K_f with
    length(refutation) <= K_f * time(pebbling) and
    clause_space(refutation) <= K_f * space(pebbling) on the corpus."""
    if max_indegree > 2 or fn_literal not in _PINNED_CONSTANTS:
        raise KeyError(f"no pinned constants for {fn_literal!r} at fan-in {max_indegree}")
    return _PINNED_CONSTANTS[fn_literal]


def lift_refutation(
    r: Refutation,
    f: BooleanFunction,
    variable_cap: int = 16,
    budget=None,
) -> Refutation:
    """Lift a resolution refutation of F to one of F[f], step by step.

    Downloads map to downloads of the whole substituted clause block;
    a resolution inference maps to derivations of every clause of the
    substituted resolvent via saturation over the involved variable
    blocks; erasures erase the block.  Width grows by at most a factor
    of the arity of f.
    """
    if r.system != "res":
        raise ValueError("only resolution refutations can be lifted")
    check_refutation(r)
    images = substitution_images(r.target, f)

    def image(c: Clause) -> frozenset[Clause]:
        if c not in images:
            images[c] = substitute_clause(c, f)
        return images[c]

    target_f = substitute(r.target, f)
    b = ProofBuilder(target_f)
    lines_by_id: dict[int, Clause] = {}
    config: set[Clause] = set()

    for idx, step in enumerate(r.steps, start=1):
        if isinstance(step, Download):
            c = step.line
            lines_by_id[idx] = c
            if c in config:
                continue
            for d in sorted(image(c), key=Clause.sort_key):
                b.download(d)
            config.add(c)
        elif isinstance(step, Infer):
            c = step.line
            lines_by_id[idx] = c
            if c in config:
                continue
            targets = image(c)
            if step.rule == "weaken":
                src = lines_by_id[step.premises[0]]
                for t in sorted(targets, key=Clause.sort_key):
                    if b.has(t):
                        continue
                    parts: dict[str, set[Lit]] = {}
                    for name, pol in t.literals:
                        parts.setdefault(name.split("#")[0], set()).add((name, pol))
                    t0 = Clause(frozenset(
                        lit for bname, _pol in src.literals for lit in parts[bname]
                    ))
                    if t0 == t:
                        continue
                    b.weaken(t0, t)
            else:
                p1 = lines_by_id[step.premises[0]]
                p2 = lines_by_id[step.premises[1]]
                sat = saturate(image(p1) | image(p2), variable_cap, budget)
                transient: list[Clause] = []
                for t in sorted(targets, key=Clause.sort_key):
                    if not b.has(t):
                        transient.extend(_splice(b, sat, t))
                for t in transient:
                    if t not in targets and b.has(t):
                        b.erase(t)
            config.add(c)
        elif isinstance(step, Erase):
            c = lines_by_id[step.target]
            config.discard(c)
            for d in sorted(image(c), key=Clause.sort_key):
                if b.has(d):
                    b.erase(d)
    return b.build()


# -- bounded oracles -----------------------------------------------------------


def min_width(f_formula: CnfFormula, cap: int) -> int | None:
    """Smallest w <= cap such that width-w resolution refutes the formula,
    else None (reported as >cap)."""
    for w in range(cap + 1):
        clauses = {c for c in f_formula.clauses if c.width <= w}
        if EMPTY_CLAUSE in clauses:
            return w
        alive: set[Clause] = set()
        for c in sorted(clauses, key=Clause.sort_key):
            if not any(o.subsumes(c) for o in alive):
                alive -= {o for o in alive if c.subsumes(o)}
                alive.add(c)
        queue = deque(sorted(alive, key=Clause.sort_key))
        processed: list[Clause] = []
        found = False
        while queue and not found:
            given = queue.popleft()
            if given not in alive:
                continue
            for other in list(processed):
                if other not in alive:
                    continue
                for first, second in ((given, other), (other, given)):
                    for pivot in sorted(
                        n for n, p in first.literals if p and (n, False) in second.literals
                    ):
                        try:
                            r = resolve(first, second, pivot)
                        except TrivialResolvent:
                            continue
                        if r.width > w:
                            continue
                        if r.is_empty():
                            found = True
                            break
                        if any(o.subsumes(r) for o in alive):
                            continue
                        alive -= {o for o in alive if r.subsumes(o)}
                        alive.add(r)
                        queue.append(r)
                    if found:
                        break
                if found:
                    break
            processed.append(given)
        if found:
            return w
    return None


def _full_closure(f_formula: CnfFormula, budget) -> list[Clause]:
    """Every clause derivable by resolution from the formula (no subsumption)."""
    limit = search_budget(budget)
    closure: set[Clause] = set(f_formula.clauses)
    queue = deque(sorted(closure, key=Clause.sort_key))
    processed: list[Clause] = []
    work = 0
    while queue:
        given = queue.popleft()
        for other in list(processed) + [given]:
            for first, second in ((given, other), (other, given)):
                for pivot in sorted(
                    n for n, p in first.literals if p and (n, False) in second.literals
                ):
                    work += 1
                    if work > limit:
                        raise BudgetExceeded(work, limit, "resolution closure")
                    try:
                        r = resolve(first, second, pivot)
                    except TrivialResolvent:
                        continue
                    if r not in closure:
                        closure.add(r)
                        queue.append(r)
        processed.append(given)
    return sorted(closure, key=Clause.sort_key)


def min_clause_space(f_formula: CnfFormula, cap: int, budget=None) -> int | None:
    """Exact minimal clause space over all refutations of <= cap clauses
    per configuration, by BFS over reachable clause-set states; None if
    no refutation fits within the cap."""
    limit = search_budget(budget)
    if EMPTY_CLAUSE in f_formula.clauses:
        return 1
    try:
        universe = _full_closure(f_formula, budget)
    except BudgetExceeded:
        raise
    if EMPTY_CLAUSE not in universe:
        return None  # satisfiable: no refutation at any cap
    axioms = f_formula.sorted_clauses()
    visited_total = 0

    for s in range(1, cap + 1):
        start: frozenset[Clause] = frozenset()
        seen = {start}
        queue = deque([start])
        while queue:
            state = queue.popleft()
            visited_total += 1
            if visited_total > limit:
                raise BudgetExceeded(visited_total, limit, "clause space search")
            nxt: list[frozenset[Clause]] = []
            if len(state) < s:
                for a in axioms:
                    if a not in state:
                        nxt.append(state | {a})
            members = sorted(state, key=Clause.sort_key)
            for first in members:
                for second in members:
                    for pivot in sorted(
                        n for n, p in first.literals if p and (n, False) in second.literals
                    ):
                        try:
                            r = resolve(first, second, pivot)
                        except TrivialResolvent:
                            continue
                        if r in state or len(state) >= s:
                            continue
                        nxt.append(state | {r})
            for c in members:
                nxt.append(state - {c})
            for new in nxt:
                if EMPTY_CLAUSE in new:
                    return s
                if new not in seen:
                    seen.add(new)
                    queue.append(new)
    return None


# -- proof trace format ---------------------------------------------------------
#
# Header `system res` or `system kdnf <k>`; then one step per line:
#   d <line>                        axiom download
#   r <line> <- i j pivot <var>     resolution
#   r <line> <- i j cut <term>      k-cut
#   r <line> <- i j andi            and-introduction
#   r <line> <- i ande              and-elimination
#   w <line> <- i                   weakening
#   e <i>                           erase the line created at step i
# Clauses are space-separated signed names; k-DNF terms use (a&b).


def _format_line(line) -> str:
    if isinstance(line, Clause):
        return " ".join(format_lit(l) for l in line.sorted_literals())
    parts = []
    for t in line.sorted_terms():
        lits = sorted(format_lit(l) for l in t)
        parts.append(lits[0] if len(lits) == 1 else "(" + "&".join(lits) + ")")
    return " ".join(parts)


def _format_term(t: Term) -> str:
    return "(" + "&".join(sorted(format_lit(l) for l in t)) + ")"


def serialize_refutation(r: Refutation) -> str:
    lines = [f"system {r.system}" if r.system == "res" else f"system kdnf {r.k}"]
    for step in r.steps:
        if isinstance(step, Download):
            lines.append(f"d {_format_line(step.line)}".rstrip())
        elif isinstance(step, Erase):
            lines.append(f"e {step.target}")
        elif step.rule == "pivot":
            i, j = step.premises
            lines.append(f"r {_format_line(step.line)} <- {i} {j} pivot {step.pivot}".replace("  ", " "))
        elif step.rule == "cut":
            i, j = step.premises
            lines.append(f"r {_format_line(step.line)} <- {i} {j} cut {_format_term(step.cut_term)}".replace("  ", " "))
        elif step.rule == "andi":
            i, j = step.premises
            lines.append(f"r {_format_line(step.line)} <- {i} {j} andi".replace("  ", " "))
        elif step.rule == "ande":
            (i,) = step.premises
            lines.append(f"r {_format_line(step.line)} <- {i} ande".replace("  ", " "))
        elif step.rule == "weaken":
            (i,) = step.premises
            lines.append(f"w {_format_line(step.line)} <- {i}".replace("  ", " "))
        else:
            raise ValueError(f"cannot serialize step {step!r}")
    return "\n".join(lines) + "\n"


def _parse_line_tokens(tokens: list[str], kdnf: bool, lineno: int):
    if not kdnf:
        try:
            return Clause(frozenset(parse_lit(t) for t in tokens))
        except TrivialClause as e:
            raise TraceError(str(e), line=lineno) from None
    terms = []
    for tok in tokens:
        if tok.startswith("(") and tok.endswith(")"):
            terms.append(term(tok[1:-1]))
        else:
            terms.append(frozenset({parse_lit(tok)}))
    try:
        return KDnfLine(frozenset(terms))
    except ValueError as e:
        raise TraceError(str(e), line=lineno) from None


def parse_refutation_trace(text: str, target: CnfFormula) -> Refutation:
    system = None
    k = 1
    steps: list = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        # whole-line comments only: substituted variable names contain '#'
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if system is None:
            if fields[0] != "system":
                raise TraceError("first directive must be 'system res' or 'system kdnf <k>'", line=lineno)
            if fields[1:] == ["res"]:
                system = "res"
            elif len(fields) == 3 and fields[1] == "kdnf":
                system = "kdnf"
                k = int(fields[2])
            else:
                raise TraceError(f"bad system line {raw!r}", line=lineno)
            continue
        kdnf = system == "kdnf"
        op = fields[0]

        def ref(tok):
            if not tok.isdigit() or int(tok) < 1:
                raise TraceError(f"bad step reference {tok!r}", line=lineno)
            return int(tok)

        if op == "d":
            steps.append(Download(_parse_line_tokens(fields[1:], kdnf, lineno)))
        elif op == "e":
            if len(fields) != 2:
                raise TraceError(f"bad erase {raw!r}", line=lineno)
            steps.append(Erase(ref(fields[1])))
        elif op in ("r", "w"):
            if "<-" not in fields:
                raise TraceError(f"missing '<-' in {raw!r}", line=lineno)
            arrow = fields.index("<-")
            line_val = _parse_line_tokens(fields[1:arrow], kdnf, lineno)
            rest = fields[arrow + 1:]
            if op == "w":
                if len(rest) != 1:
                    raise TraceError(f"weakening takes one premise id: {raw!r}", line=lineno)
                steps.append(Infer(line_val, (ref(rest[0]),), "weaken"))
            elif len(rest) == 4 and rest[2] == "pivot":
                steps.append(Infer(line_val, (ref(rest[0]), ref(rest[1])), "pivot", pivot=rest[3]))
            elif len(rest) == 4 and rest[2] == "cut":
                tok = rest[3]
                if not (tok.startswith("(") and tok.endswith(")")):
                    raise TraceError(f"cut term must be parenthesised: {raw!r}", line=lineno)
                steps.append(Infer(line_val, (ref(rest[0]), ref(rest[1])), "cut",
                                   cut_term=term(tok[1:-1])))
            elif len(rest) == 3 and rest[2] == "andi":
                steps.append(Infer(line_val, (ref(rest[0]), ref(rest[1])), "andi"))
            elif len(rest) == 2 and rest[1] == "ande":
                steps.append(Infer(line_val, (ref(rest[0]),), "ande"))
            else:
                raise TraceError(f"bad inference {raw!r}", line=lineno)
        else:
            raise TraceError(f"unknown step {op!r}", line=lineno)
    if system is None:
        raise TraceError("empty trace: missing 'system' header")
    return Refutation(target=target, steps=tuple(steps), system=system, k=k)
