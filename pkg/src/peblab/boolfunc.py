"""Boolean functions by truth table, canonical clause sets, authoritarianness.

Truth tables are stored as integer bitmasks: bit i holds f(assignment i),
where bit j of the assignment index is the value of the (j+1)-th input.
The canonical CNF for f is the set of all prime implicates of f, which
reproduces the standard clause sets for or, xor and threshold functions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cnf import Clause
from .errors import ConstantFunction

MAX_ARITY = 16
_CLAUSE_ARITY_LIMIT = 12  # 3^d subcube enumeration


@dataclass(frozen=True)
class BooleanFunction:
    arity: int
    table: int

    def __post_init__(self):
        if not 1 <= self.arity <= MAX_ARITY:
            raise ValueError(f"arity must be in 1..{MAX_ARITY}, got {self.arity}")
        full = (1 << (1 << self.arity)) - 1
        if not 0 <= self.table <= full:
            raise ValueError("truth table has more bits than 2^arity")
        if self.table == 0 or self.table == full:
            raise ConstantFunction(f"function of arity {self.arity} is constant")

    def value(self, index: int) -> bool:
        """f at the assignment with index bits (bit j = input j+1)."""
        return bool((self.table >> index) & 1)

    def evaluate(self, inputs) -> bool:
        index = 0
        for j, bit in enumerate(inputs):
            if bit:
                index |= 1 << j
        return self.value(index)

    def negated(self) -> "BooleanFunction":
        full = (1 << (1 << self.arity)) - 1
        return BooleanFunction(self.arity, self.table ^ full)

    def to_hex(self) -> str:
        digits = max(1, (1 << self.arity) // 4)
        return format(self.table, f"0{digits}x")

    def __str__(self) -> str:
        return f"f_{self.arity}[0x{self.to_hex()}]"


# -- named families -----------------------------------------------------


def _table_from_predicate(arity, pred) -> int:
    table = 0
    for index in range(1 << arity):
        ones = bin(index).count("1")
        if pred(index, ones):
            table |= 1 << index
    return table


def or_fn(arity: int) -> BooleanFunction:
    return BooleanFunction(arity, _table_from_predicate(arity, lambda i, ones: i != 0))


def xor_fn(arity: int) -> BooleanFunction:
    return BooleanFunction(arity, _table_from_predicate(arity, lambda i, ones: ones % 2 == 1))


def threshold_fn(arity: int, k: int) -> BooleanFunction:
    """At least k of the arity inputs are true."""
    if not 1 <= k <= arity:
        raise ValueError(f"threshold k must be in 1..{arity}, got {k}")
    return BooleanFunction(arity, _table_from_predicate(arity, lambda i, ones: ones >= k))


def majority_fn(arity: int) -> BooleanFunction:
    if arity % 2 == 0:
        raise ValueError("majority needs odd arity")
    return threshold_fn(arity, arity // 2 + 1)


def from_hex(arity: int, hex_digits: str) -> BooleanFunction:
    return BooleanFunction(arity, int(hex_digits, 16))


def parse_function_literal(spec: str) -> BooleanFunction | None:
    """CLI function literals: or:2, xor:2, thr:4:2, maj:3, tt:<arity>:<hex>, none."""
    if spec == "none":
        return None
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "or" and len(parts) == 2:
            return or_fn(int(parts[1]))
        if kind == "xor" and len(parts) == 2:
            return xor_fn(int(parts[1]))
        if kind == "thr" and len(parts) == 3:
            return threshold_fn(int(parts[1]), int(parts[2]))
        if kind == "maj" and len(parts) == 2:
            return majority_fn(int(parts[1]))
        if kind == "tt" and len(parts) == 3:
            return from_hex(int(parts[1]), parts[2])
    except ValueError as e:
        raise ValueError(f"bad function literal {spec!r}: {e}") from None
    raise ValueError(f"unknown function literal {spec!r}")


# -- canonical clause sets ----------------------------------------------


def _subcube_inside(f_on: int, fixed: dict[int, int], arity: int) -> bool:
    """Is the subcube (inputs in `fixed` pinned) disjoint from f's on-set?"""
    for index in range(1 << arity):
        ok = True
        for j, val in fixed.items():
            if (index >> j) & 1 != val:
                ok = False
                break
        if ok and (f_on >> index) & 1:
            return False
    return True


def canonical_clauses(f: BooleanFunction, vars: tuple[str, ...], polarity: str = "positive") -> frozenset[Clause]:
    """All prime implicates of f (or of its negation), instantiated on vars.

    A clause C is an implicate iff the subcube where every literal of C
    is false avoids the on-set; prime iff dropping any single literal
    breaks that.  Enumerates the 3^d subcubes, so arity is capped.
    """
    if len(vars) != f.arity:
        raise ValueError(f"need {f.arity} variable names, got {len(vars)}")
    if len(set(vars)) != len(vars):
        raise ValueError("variable names must be distinct")
    if f.arity > _CLAUSE_ARITY_LIMIT:
        raise ValueError(f"canonical clause extraction capped at arity {_CLAUSE_ARITY_LIMIT}")
    if polarity not in ("positive", "negative"):
        raise ValueError(f"polarity must be positive or negative, got {polarity!r}")
    g = f if polarity == "positive" else f.negated()

    clauses = []
    indices = range(g.arity)
    for support_size in range(g.arity + 1):
        for support in itertools.combinations(indices, support_size):
            for values in itertools.product((0, 1), repeat=support_size):
                fixed = dict(zip(support, values))
                if not _subcube_inside(g.table, fixed, g.arity):
                    continue
                prime = True
                for j in support:
                    smaller = {i: v for i, v in fixed.items() if i != j}
                    if _subcube_inside(g.table, smaller, g.arity):
                        prime = False
                        break
                if prime:
                    # falsifying subcube with input j pinned to v rules out
                    # the literal vars[j]^(1-v)
                    clauses.append(Clause(frozenset(
                        (vars[j], v == 0) for j, v in fixed.items()
                    )))
    return frozenset(clauses)


def is_k_nonauthoritarian(f: BooleanFunction, k: int) -> bool:
    """True iff no restriction of size <= k fixes the value of f."""
    if k < 0:
        raise ValueError("k must be >= 0")
    for size in range(min(k, f.arity) + 1):
        for support in itertools.combinations(range(f.arity), size):
            for values in itertools.product((0, 1), repeat=size):
                fixed = dict(zip(support, values))
                seen0 = seen1 = False
                for index in range(1 << f.arity):
                    if all((index >> j) & 1 == v for j, v in fixed.items()):
                        if f.value(index):
                            seen1 = True
                        else:
                            seen0 = True
                        if seen0 and seen1:
                            break
                if not (seen0 and seen1):
                    return False
    return True
