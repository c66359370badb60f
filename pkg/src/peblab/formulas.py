"""Pebbling contradictions, substitution formulas, 3-CNF conversion,
the brute-force SAT oracle, and DIMACS I/O.

Substituted variables are named x#1..x#d so the mapping back to base
variables is collision-free and reversible.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque

from .boolfunc import BooleanFunction, canonical_clauses
from .cnf import Clause, CnfFormula, EMPTY_CLAUSE, Lit, neg  # noqa: F401  (re-exported)
from .dag import Dag
from .errors import BudgetExceeded, DimacsError, PeblabError, TrivialClause, search_budget

SUBST_SEP = "#"


def pebbling_contradiction(g: Dag) -> CnfFormula:
    """Sources true, truth propagates along edges, sink false.

    One variable per vertex, n+1 clauses over n variables.
    """
    clauses = []
    for v in g.topological_order():
        preds = g.predecessors(v)
        if not preds:
            clauses.append(Clause(frozenset({(v, True)})))
        else:
            clauses.append(Clause(frozenset({(u, False) for u in preds} | {(v, True)})))
    clauses.append(Clause(frozenset({(g.sink, False)})))
    return CnfFormula(frozenset(clauses))


# -- substitution --------------------------------------------------------


def block_vars(name: str, arity: int) -> tuple[str, ...]:
    return tuple(f"{name}{SUBST_SEP}{i}" for i in range(1, arity + 1))


def split_substituted(name: str) -> tuple[str, int]:
    base, sep, idx = name.rpartition(SUBST_SEP)
    if not sep or not idx.isdigit():
        raise PeblabError(f"{name!r} is not a substituted variable name")
    return base, int(idx)


@functools.lru_cache(maxsize=None)
def _generic_canonical(f: BooleanFunction, positive: bool) -> frozenset[Clause]:
    names = tuple(str(i) for i in range(1, f.arity + 1))
    return canonical_clauses(f, names, "positive" if positive else "negative")


def _literal_image(literal: Lit, f: BooleanFunction) -> tuple[Clause, ...]:
    name, positive = literal
    generic = _generic_canonical(f, positive)
    renamed = [
        Clause(frozenset((f"{name}{SUBST_SEP}{gname}", pol) for gname, pol in c.literals))
        for c in generic
    ]
    return tuple(sorted(renamed, key=Clause.sort_key))


def substitute_clause(c: Clause, f: BooleanFunction) -> frozenset[Clause]:
    """All cross-disjunctions of the per-literal canonical clause sets."""
    parts = [_literal_image(lit, f) for lit in c.sorted_literals()]
    out = set()
    for combo in itertools.product(*parts):
        lits = frozenset().union(*(part.literals for part in combo)) if combo else frozenset()
        out.add(Clause(lits))
    return frozenset(out)


def substitute(f_formula: CnfFormula, f: BooleanFunction) -> CnfFormula:
    for v in f_formula.variables():
        if SUBST_SEP in v:
            raise PeblabError(f"variable {v!r} already carries a substitution index")
    clauses = set()
    for c in f_formula.clauses:
        clauses |= substitute_clause(c, f)
    return CnfFormula(frozenset(clauses))


def substitution_images(f_formula: CnfFormula, f: BooleanFunction) -> dict[Clause, frozenset[Clause]]:
    """Per-clause image map; images of distinct clauses are disjoint."""
    return {c: substitute_clause(c, f) for c in f_formula.clauses}


def base_of_substituted(sub_formula: CnfFormula, f: BooleanFunction) -> tuple[CnfFormula, dict[Clause, Clause]]:
    """Invert substitution: recover the base formula and the axiom map.

    Raises if the formula is not exactly the image of some base formula
    under f-substitution.
    """
    pos = {frozenset(c.literals): True for c in _generic_canonical(f, True)}
    negs = {frozenset(c.literals): False for c in _generic_canonical(f, False)}
    table = pos | negs

    mapping: dict[Clause, Clause] = {}
    for d in sub_formula.clauses:
        by_base: dict[str, set[Lit]] = {}
        for name, polarity in d.literals:
            base, idx = split_substituted(name)
            by_base.setdefault(base, set()).add((str(idx), polarity))
        lits = set()
        for base, component in by_base.items():
            key = frozenset(component)
            if key not in table:
                raise PeblabError(
                    f"clause ({d}) is not an f-substitution image: block {base!r} "
                    "matches no canonical clause"
                )
            lits.add((base, table[key]))
        mapping[d] = Clause(frozenset(lits))

    base_formula = CnfFormula(frozenset(mapping.values()))
    if substitute(base_formula, f) != sub_formula:
        raise PeblabError("formula is not a full substitution image (incomplete clause blocks)")
    return base_formula, mapping


# -- 3-CNF conversion ----------------------------------------------------


def extended_3cnf(f_formula: CnfFormula) -> CnfFormula:
    """Replace every clause of width > 3 by its chain encoding.

    A clause a_1 v ... v a_m becomes  ~y_0, (y_{i-1} v a_i v ~y_i) for
    i in 1..m, and y_m, with auxiliary variables fresh and unique to the
    clause.  Equisatisfiable with the input; output width <= 3.

    Auxiliary names extend the lexicographically largest existing name
    so they sort after every original variable; the SAT oracle then
    decides original variables first and chain variables propagate.
    """
    existing = set(f_formula.variables())
    prefix = (max(existing) + "_aux") if existing else "aux"
    while any(v.startswith(prefix) for v in existing):
        prefix += "a"
    out = set()
    for k, c in enumerate(f_formula.sorted_clauses()):
        if c.width <= 3:
            out.add(c)
            continue
        names = [f"{prefix}{k}_{i}" for i in range(c.width + 1)]
        out.add(Clause(frozenset({(names[0], False)})))
        for i, lit in enumerate(c.sorted_literals(), start=1):
            out.add(Clause(frozenset({(names[i - 1], True), lit, (names[i], False)})))
        out.add(Clause(frozenset({(names[c.width], True)})))
    return CnfFormula(frozenset(out))


def is_weight_constrained(f_formula: CnfFormula) -> bool:
    """Every clause of width >= 4 is accompanied by all its ~a_i v ~a_j pairs."""
    for c in f_formula.clauses:
        if c.width < 4:
            continue
        lits = c.sorted_literals()
        for a, b in itertools.combinations(lits, 2):
            if Clause(frozenset({neg(a), neg(b)})) not in f_formula.clauses:
                return False
    return True


# -- SAT oracle ----------------------------------------------------------


def brute_force_sat(f_formula: CnfFormula, budget=None) -> dict[str, bool] | None:
    """First satisfying assignment in canonical variable order, or None.

    Deterministic backtracking enumeration: decision variables in
    canonical (lexicographic) order, value False tried before True,
    with unit propagation.  Propagation only skips branches containing
    no satisfying assignment, so the result is exactly the one plain
    exhaustive enumeration would return.  The budget counts variable
    assignments.
    """
    names = f_formula.variables()
    n = len(names)
    index = {v: i for i, v in enumerate(names)}
    clause_lits = [
        [(index[name], polarity) for name, polarity in c.sorted_literals()]
        for c in f_formula.sorted_clauses()
    ]
    if any(not lits for lits in clause_lits):
        return None
    if n == 0:
        return {}

    occur: list[list[tuple[int, bool]]] = [[] for _ in range(n)]
    for ci, lits in enumerate(clause_lits):
        for vi, polarity in lits:
            occur[vi].append((ci, polarity))
    sat_count = [0] * len(clause_lits)
    open_lits = [len(lits) for lits in clause_lits]
    value = [False] * n
    assigned = [False] * n
    trail: list[int] = []
    limit = search_budget(budget)
    nodes = 0

    def do_assign(vi: int, val: bool):
        nonlocal nodes
        nodes += 1
        if nodes > limit:
            raise BudgetExceeded(nodes, limit, "SAT oracle")
        assigned[vi] = True
        value[vi] = val
        trail.append(vi)
        conflict = False
        units = []
        for ci, polarity in occur[vi]:
            open_lits[ci] -= 1
            if polarity == val:
                sat_count[ci] += 1
            elif sat_count[ci] == 0:
                if open_lits[ci] == 0:
                    conflict = True
                elif open_lits[ci] == 1:
                    units.append(ci)
        return conflict, units

    def undo_to(length: int) -> None:
        while len(trail) > length:
            vi = trail.pop()
            val = value[vi]
            assigned[vi] = False
            for ci, polarity in occur[vi]:
                open_lits[ci] += 1
                if polarity == val:
                    sat_count[ci] -= 1

    def propagate(units) -> bool:
        queue = deque(units)
        while queue:
            ci = queue.popleft()
            if sat_count[ci] > 0 or open_lits[ci] != 1:
                continue
            for vj, polarity in clause_lits[ci]:
                if not assigned[vj]:
                    conflict, more = do_assign(vj, polarity)
                    if conflict:
                        return False
                    queue.extend(more)
                    break
        return True

    if not propagate([ci for ci, lits in enumerate(clause_lits) if len(lits) == 1]):
        return None

    # decision stack: (variable, trying_true, trail length before the decision)
    levels: list[tuple[int, bool, int]] = []
    while True:
        cursor = 0
        while cursor < n and assigned[cursor]:
            cursor += 1
        if cursor == n:
            return {names[i]: value[i] for i in range(n)}
        levels.append((cursor, False, len(trail)))
        conflict, units = do_assign(cursor, False)
        ok = not conflict and propagate(units)
        while not ok:
            while levels and levels[-1][1]:
                _, _, mark = levels.pop()
                undo_to(mark)
            if not levels:
                return None
            vi, _, mark = levels.pop()
            undo_to(mark)
            levels.append((vi, True, mark))
            conflict, units = do_assign(vi, True)
            ok = not conflict and propagate(units)


def is_minimally_unsat(f_formula: CnfFormula, budget=None) -> bool:
    """UNSAT, and deleting any single clause makes it satisfiable."""
    if brute_force_sat(f_formula, budget) is not None:
        return False
    for c in f_formula.clauses:
        if brute_force_sat(f_formula.without_clause(c), budget) is None:
            return False
    return True


# -- DIMACS --------------------------------------------------------------


def to_dimacs(f_formula: CnfFormula) -> str:
    """Standard DIMACS with the variable-name map in comment lines."""
    names = f_formula.variables()
    index = {v: i + 1 for i, v in enumerate(names)}
    lines = [f"c var {i + 1} {v}" for i, v in enumerate(names)]
    lines.append(f"p cnf {len(names)} {len(f_formula.clauses)}")
    for c in f_formula.sorted_clauses():
        nums = sorted((index[n] if p else -index[n]) for n, p in c.literals)
        nums.sort(key=abs)
        lines.append(" ".join(str(x) for x in nums + [0]))
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> CnfFormula:
    names: dict[int, str] = {}
    nvars = nclauses = None
    clause_tokens: list[tuple[int, int]] = []  # (value, line)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            fields = line.split()
            if len(fields) == 4 and fields[1] == "var" and fields[2].isdigit():
                names[int(fields[2])] = fields[3]
            continue
        if line.startswith("p"):
            fields = line.split()
            if len(fields) != 4 or fields[1] != "cnf":
                raise DimacsError(f"bad problem line {raw!r}", line=lineno)
            if nvars is not None:
                raise DimacsError("duplicate problem line", line=lineno)
            try:
                nvars, nclauses = int(fields[2]), int(fields[3])
            except ValueError:
                raise DimacsError(f"bad problem line {raw!r}", line=lineno) from None
            continue
        if nvars is None:
            raise DimacsError("clause before problem line", line=lineno)
        for tok in line.split():
            try:
                clause_tokens.append((int(tok), lineno))
            except ValueError:
                raise DimacsError(f"bad literal {tok!r}", line=lineno) from None

    if nvars is None:
        raise DimacsError("missing problem line")

    def name_of(i: int) -> str:
        return names.get(i, f"x{i}")

    clauses = []
    current: list[int] = []
    last_line = None
    for value, lineno in clause_tokens:
        last_line = lineno
        if value == 0:
            try:
                clauses.append(Clause(frozenset(
                    (name_of(abs(v)), v > 0) for v in current
                )))
            except TrivialClause as e:
                raise DimacsError(str(e), line=lineno) from None
            current = []
            continue
        if abs(value) > nvars:
            raise DimacsError(f"literal {value} out of range (header says {nvars} vars)", line=lineno)
        current.append(value)
    if current:
        raise DimacsError("unterminated clause at end of file", line=last_line)
    if nclauses is not None and len(clauses) != nclauses:
        raise DimacsError(f"header promises {nclauses} clauses, found {len(clauses)}")
    return CnfFormula(frozenset(clauses))
