"""Clauses and CNF formulas as immutable sets.

A literal is a (variable name, polarity) pair; a clause is a frozenset
of literals and is nontrivial by construction (no variable occurs with
both polarities).  Formulas are frozensets of clauses, so duplicate
clauses collapse and clause identity is purely structural.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import TrivialClause

Lit = tuple[str, bool]


def neg(literal: Lit) -> Lit:
    name, positive = literal
    return (name, not positive)


def _lit_key(literal: Lit):
    name, positive = literal
    return (name, not positive)  # positive sorts before negative per variable


def format_lit(literal: Lit) -> str:
    name, positive = literal
    return name if positive else "-" + name


def parse_lit(token: str) -> Lit:
    if token.startswith("-"):
        return (token[1:], False)
    if token.startswith("~"):
        return (token[1:], False)
    return (token, True)


@dataclass(frozen=True)
class Clause:
    literals: frozenset[Lit] = field(default_factory=frozenset)

    def __post_init__(self):
        names = [name for name, _ in self.literals]
        if len(names) != len(set(names)):
            raise TrivialClause(f"variable occurs with both polarities in {sorted(self.literals)}")

    @property
    def width(self) -> int:
        return len(self.literals)

    def variables(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.literals)

    def is_empty(self) -> bool:
        return not self.literals

    def sorted_literals(self) -> tuple[Lit, ...]:
        return tuple(sorted(self.literals, key=_lit_key))

    def subsumes(self, other: "Clause") -> bool:
        return self.literals <= other.literals

    def union(self, other: "Clause") -> "Clause":
        return Clause(self.literals | other.literals)

    def without(self, literal: Lit) -> "Clause":
        return Clause(self.literals - {literal})

    def with_literal(self, literal: Lit) -> "Clause":
        return Clause(self.literals | {literal})

    def __contains__(self, literal: Lit) -> bool:
        return literal in self.literals

    def __iter__(self) -> Iterator[Lit]:
        return iter(self.sorted_literals())

    def __len__(self) -> int:
        return len(self.literals)

    def sort_key(self):
        return (len(self.literals), tuple(_lit_key(l) for l in self.sorted_literals()))

    def __str__(self) -> str:
        if not self.literals:
            return "<empty>"
        return " ".join(format_lit(l) for l in self.sorted_literals())

    __repr__ = __str__


EMPTY_CLAUSE = Clause()


def clause(spec: str | Iterable[Lit]) -> Clause:
    """Build a clause from 'x -y z' shorthand or an iterable of literals."""
    if isinstance(spec, str):
        return Clause(frozenset(parse_lit(tok) for tok in spec.split()))
    return Clause(frozenset(spec))


@dataclass(frozen=True)
class CnfFormula:
    clauses: frozenset[Clause] = field(default_factory=frozenset)

    @property
    def width(self) -> int:
        return max((c.width for c in self.clauses), default=0)

    def variables(self) -> tuple[str, ...]:
        """Canonical variable order: lexicographic by name."""
        return tuple(sorted({name for c in self.clauses for name, _ in c.literals}))

    def sorted_clauses(self) -> tuple[Clause, ...]:
        return tuple(sorted(self.clauses, key=Clause.sort_key))

    def __len__(self) -> int:
        return len(self.clauses)

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.sorted_clauses())

    def __contains__(self, c: Clause) -> bool:
        return c in self.clauses

    def without_clause(self, c: Clause) -> "CnfFormula":
        return CnfFormula(self.clauses - {c})

    def __str__(self) -> str:
        return " & ".join(f"({c})" for c in self.sorted_clauses())


def formula(specs: Iterable[str | Clause]) -> CnfFormula:
    out = []
    for s in specs:
        out.append(s if isinstance(s, Clause) else clause(s))
    return CnfFormula(frozenset(out))
