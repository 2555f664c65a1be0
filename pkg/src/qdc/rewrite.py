"""Relation compiler and normal-form engine.

Relations of degree <= 2 (with lower-degree tails) are turned into oriented
rules by Gaussian elimination over Q(p, x), pivoting on the largest word in
the degree-lexicographic order.  Normal forms are computed by memoized
leftmost rewriting; a randomized, independently memoized strategy is kept
alongside as a cross-check.
"""

from __future__ import annotations

import random
import sys
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .budget import check_budget
from .ncalg import Polynomial, Word, gen_name, word_key, word_string
from .scalars import Scalar, field

__all__ = [
    "MonomialOrder",
    "Rule",
    "RuleSet",
    "CriticalPair",
    "UnorientableError",
    "NonTerminationError",
    "orient_relations",
    "reduce",
    "overlap_check",
    "complete_bounded",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

DEFAULT_STEP_CAP = 10**6


class UnorientableError(ValueError):
    """A relation cannot be turned into a decreasing rule (or the relations are inconsistent)."""

    def __init__(self, msg: str, witness: "Polynomial" = None):
        super().__init__(msg)
        self.witness = witness


class NonTerminationError(RuntimeError):
    """The step cap was hit while reducing."""


def diagonal_rank(g: int) -> int:
    """Generator rank: kind first, then (row - col, row).

    Sorting indices by diagonal offset makes the quadratic relations of
    every shipped block a Groebner basis; plain (row, col) order does not
    for the reflection-equation and form/derivation blocks.
    """
    row, col = (g >> 8) & 0xFF, g & 0xFF
    return (g & ~0xFFFF) | ((row - col + 128) << 8) | row


class _RankCache(dict):
    def __init__(self, fn):
        super().__init__()
        self.fn = fn

    def __missing__(self, g):
        v = self[g] = self.fn(g)
        return v


class MonomialOrder:
    """Degree-lexicographic order on words, comparing generators by ``rank``.

    ``rank`` is a function from packed generator codes to integers; the
    default is :func:`diagonal_rank`.  ``MonomialOrder.plain()`` compares the
    codes themselves, i.e. kind then (row, col).
    """

    def __init__(self, rank=diagonal_rank, name="deglex-diagonal"):
        self.name = name
        if rank is None:
            self.key = _plain_key
        else:
            r = _RankCache(rank if callable(rank) else rank.__getitem__)
            self.key = lambda w: (len(w), tuple([r[g] for g in w]))

    @classmethod
    def plain(cls) -> "MonomialOrder":
        return cls(None, "deglex-rowcol")

    def max(self, words: Iterable[Word]) -> Word:
        return max(words, key=self.key)

    def less(self, u: Word, v: Word) -> bool:
        return self.key(u) < self.key(v)


def _plain_key(w: Word):
    return (len(w), w)


DEGLEX = MonomialOrder()


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: Dict[Word, Scalar]
    source: str = ""

    def as_relation(self, N: int) -> Polynomial:
        """lhs - rhs, an element of the ideal."""
        terms = {w: -c for w, c in self.rhs.items()}
        terms[self.lhs] = field(N).one
        return Polynomial(terms, N)


@dataclass
class CriticalPair:
    word: Word
    left: Word
    right: Word
    difference: Polynomial

    def __str__(self):
        return f"{word_string(self.word)}: {self.difference}"


class RuleSet:
    """Oriented rules, indexed by lhs, with normal-form caches.

    Treat as immutable after construction; the caches only memoize pure results.
    """

    def __init__(
        self,
        rules: Sequence[Rule],
        N: int,
        generators: Sequence[int] = (),
        order: MonomialOrder = DEGLEX,
        step_cap: int = DEFAULT_STEP_CAP,
        truncated: bool = False,
    ):
        self.N = N
        self.order = order
        self.rules: Tuple[Rule, ...] = tuple(sorted(rules, key=lambda r: order.key(r.lhs)))
        self.by_lhs: Dict[Word, Rule] = {}
        for r in self.rules:
            if r.lhs in self.by_lhs:
                raise ValueError(f"two rules share the lhs {word_string(r.lhs)}")
            self.by_lhs[r.lhs] = r
        self.max_len = max((len(r.lhs) for r in self.rules), default=0)
        self.generators = tuple(sorted(generators))
        self.step_cap = step_cap
        self.truncated = truncated
        self._one = field(N).one
        self._nf_cache: Dict[Word, Dict[Word, Scalar]] = {(): {(): self._one}}
        self._ins_cache: Dict[Word, Dict[Word, Scalar]] = {}
        self._steps = 0

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    # -- structure ------------------------------------------------------------

    def good_words(self, degree: int = 2) -> List[Word]:
        """Irreducible words of the given degree over the generators."""
        out = [()]
        gens = [g for g in self.generators if (g,) not in self.by_lhs]
        for _ in range(degree):
            out = [w + (g,) for w in out for g in gens]
            out = [w for w in out if self.is_normal(w)]
        return out

    def is_normal(self, w: Word) -> bool:
        L = self.max_len
        for i in range(len(w)):
            for k in range(1, min(L, len(w) - i) + 1):
                if w[i : i + k] in self.by_lhs:
                    return False
        return True

    # -- leftmost memoized normal form -------------------------------------

    def _tick(self):
        self._steps += 1
        if self._steps > self.step_cap:
            raise NonTerminationError(f"more than {self.step_cap} rule applications")
        if not self._steps & 2047:
            check_budget()

    def _nf(self, w: Word) -> Dict[Word, Scalar]:
        hit = self._nf_cache.get(w)
        if hit is not None:
            return hit
        tail = self._nf(w[1:])
        g = w[0]
        if len(tail) == 1 and w[1:] in tail and tail[w[1:]].is_one():
            out = self._insert(g, w[1:])
        else:
            out = {}
            for v, c in tail.items():
                for u, d in self._insert(g, v).items():
                    e = c * d
                    old = out.get(u)
                    if old is None:
                        out[u] = e
                    else:
                        e = old + e
                        if e:
                            out[u] = e
                        else:
                            del out[u]
        self._nf_cache[w] = out
        return out

    def _insert(self, g: int, v: Word) -> Dict[Word, Scalar]:
        """Normal form of g*v for a normal word v."""
        key = (g,) + v
        hit = self._ins_cache.get(key)
        if hit is not None:
            return hit
        by_lhs = self.by_lhs
        out = None
        for k in range(1, min(self.max_len, len(key)) + 1):
            rule = by_lhs.get(key[:k])
            if rule is not None:
                self._tick()
                rest = key[k:]
                out = {}
                for r, d in rule.rhs.items():
                    for u, e in self._nf(r + rest).items():
                        e = d * e
                        old = out.get(u)
                        if old is None:
                            out[u] = e
                        else:
                            e = old + e
                            if e:
                                out[u] = e
                            else:
                                del out[u]
                break
        if out is None:
            out = {key: self._one}
        self._ins_cache[key] = out
        return out

    # -- randomized strategy --------------------------------------------------

    def _nf_random(self, w: Word, rng: random.Random, cache: dict) -> Dict[Word, Scalar]:
        hit = cache.get(w)
        if hit is not None:
            return hit
        redexes = []
        L = self.max_len
        for i in range(len(w)):
            for k in range(1, min(L, len(w) - i) + 1):
                if w[i : i + k] in self.by_lhs:
                    redexes.append((i, k))
        if not redexes:
            out = {w: self._one}
        else:
            self._tick()
            i, k = rng.choice(redexes)
            rule = self.by_lhs[w[i : i + k]]
            pre, post = w[:i], w[i + k :]
            out = {}
            for r, d in rule.rhs.items():
                for u, e in self._nf_random(pre + r + post, rng, cache).items():
                    e = d * e
                    old = out.get(u)
                    if old is None:
                        out[u] = e
                    else:
                        e = old + e
                        if e:
                            out[u] = e
                        else:
                            del out[u]
        cache[w] = out
        return out

    # -- public -----------------------------------------------------------------

    def reduce(self, p: Polynomial, strategy: str = "leftmost", seed: int = 0) -> Polynomial:
        if p.N != self.N:
            raise ValueError(f"polynomial has N={p.N}, rules have N={self.N}")
        self._steps = 0
        if strategy == "leftmost":
            nf = self._nf
        elif strategy == "random":
            rng = random.Random(seed)
            cache: dict = {}
            nf = lambda w: self._nf_random(w, rng, cache)  # noqa: E731
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        out: Dict[Word, Scalar] = {}
        for w, c in p.terms.items():
            for u, d in nf(w).items():
                e = c * d
                old = out.get(u)
                if old is None:
                    out[u] = e
                else:
                    e = old + e
                    if e:
                        out[u] = e
                    else:
                        del out[u]
        return Polynomial(out, self.N)

    def clear_cache(self):
        self._nf_cache = {(): {(): self._one}}
        self._ins_cache = {}

    def with_rule(self, lhs: Word, rhs: Dict[Word, Scalar]) -> "RuleSet":
        """Copy with one rule's rhs replaced (used to build negative controls)."""
        rules = [Rule(r.lhs, rhs if r.lhs == lhs else r.rhs, r.source) for r in self.rules]
        return RuleSet(rules, self.N, self.generators, self.order, self.step_cap)

    def to_json(self) -> list:
        from .expr import format_poly

        return [
            {
                "lhs": word_string(r.lhs),
                "rhs": format_poly(Polynomial(dict(r.rhs), self.N)),
                "source": r.source,
            }
            for r in self.rules
        ]


def reduce(p: Polynomial, rules: RuleSet, strategy: str = "leftmost", seed: int = 0) -> Polynomial:
    return rules.reduce(p, strategy=strategy, seed=seed)


# -- relation compiler ------------------------------------------------------------


def _axpy(row: Dict[Word, Scalar], f: Scalar, other: Dict[Word, Scalar]):
    """row -= f * other, in place."""
    for w, c in other.items():
        v = row.get(w)
        e = f * c
        if v is None:
            row[w] = -e
        else:
            v = v - e
            if v:
                row[w] = v
            else:
                del row[w]


class _Echelon:
    """Incremental sparse row echelon form, pivoting on the order-largest word."""

    def __init__(self, order: MonomialOrder):
        self.order = order
        self.pivots: Dict[Word, Tuple[Dict[Word, Scalar], str]] = {}

    def add(self, row: Dict[Word, Scalar], source: str) -> Optional[Word]:
        row = dict(row)
        key = self.order.key
        while row:
            lead = max(row, key=key)
            piv = self.pivots.get(lead)
            if piv is None:
                inv = row[lead].inv()
                self.pivots[lead] = ({w: c * inv for w, c in row.items()}, source)
                return lead
            _axpy(row, row[lead], piv[0])
            check_budget()
        return None

    def reduced(self) -> Dict[Word, Tuple[Dict[Word, Scalar], str]]:
        """Back-substitute so that no pivot row mentions another pivot word."""
        key = self.order.key
        done: Dict[Word, Tuple[Dict[Word, Scalar], str]] = {}
        for lead in sorted(self.pivots, key=key):
            row, src = self.pivots[lead]
            row = dict(row)
            changed = True
            while changed:
                changed = False
                for w in sorted((w for w in row if w != lead and w in done), key=key, reverse=True):
                    if w in row:
                        _axpy(row, row[w], done[w][0])
                        changed = True
            done[lead] = (row, src)
        return done


def _substitute_linear(row: Dict[Word, Scalar], lin: Dict[int, Dict[Word, Scalar]], one: Scalar) -> Dict[Word, Scalar]:
    if not any(g in lin for w in row for g in w):
        return row
    out: Dict[Word, Scalar] = {}
    for w, c in row.items():
        acc = {(): c}
        for g in w:
            img = lin.get(g, {(g,): one})
            nxt: Dict[Word, Scalar] = {}
            for u, a in acc.items():
                for v, b in img.items():
                    k = u + v
                    e = a * b
                    old = nxt.get(k)
                    nxt[k] = e if old is None else old + e
            acc = nxt
        for k, e in acc.items():
            old = out.get(k)
            out[k] = e if old is None else old + e
    return {k: v for k, v in out.items() if v}


def orient_relations(
    relations: Sequence,
    N: int,
    order: MonomialOrder = DEGLEX,
    generators: Sequence[int] = (),
    step_cap: int = DEFAULT_STEP_CAP,
) -> RuleSet:
    """Compile relations into a reduced, order-decreasing RuleSet.

    ``relations`` holds Polynomials or ``(Polynomial, source_tag)`` pairs.
    Degree <= 1 relations become generator-eliminating rules, which are
    substituted into the rest before the quadratic elimination; any linear
    relation that falls out of the quadratic elimination is fed back.
    """
    one = field(N).one
    rows: List[Tuple[Dict[Word, Scalar], str]] = []
    for item in relations:
        poly, src = item if isinstance(item, tuple) else (item, "")
        if poly.N != N:
            raise ValueError("relation built for a different N")
        if poly.degree() > 2:
            raise UnorientableError(f"relation of degree {poly.degree()} from {src or 'input'}")
        if poly.terms:
            rows.append((dict(poly.terms), src))

    linear: Dict[int, Dict[Word, Scalar]] = {}
    linear_src: Dict[int, str] = {}
    while True:
        lin_ech = _Echelon(order)
        for g, img in linear.items():
            r = {w: -c for w, c in img.items()}
            r[(g,)] = one
            lin_ech.add(r, linear_src[g])
        quad_rows = []
        for row, src in rows:
            row = _substitute_linear(row, linear, one)
            if not row:
                continue
            if max(len(w) for w in row) <= 1:
                lin_ech.add(row, src)
            else:
                quad_rows.append((row, src))
        new_linear = {}
        new_src = {}
        for lead, (row, src) in lin_ech.reduced().items():
            if lead == ():
                raise UnorientableError(
                    f"inconsistent relations: nonzero constant from {src or 'input'}", Polynomial(row, N)
                )
            new_linear[lead[0]] = {w: -c for w, c in row.items() if w != lead}
            new_src[lead[0]] = src
        if new_linear != linear:
            linear, linear_src = new_linear, new_src
            # substitute again with the enlarged linear system
            continue
        ech = _Echelon(order)
        for row, src in quad_rows:
            ech.add(_substitute_linear(row, linear, one), src)
        low = [(lead, row, src) for lead, (row, src) in ech.pivots.items() if len(lead) <= 1]
        if low:
            # a combination of quadratic relations is linear: restart with it included
            for lead, row, src in low:
                if lead == ():
                    raise UnorientableError(
                        f"inconsistent relations: nonzero constant from {src or 'input'}", Polynomial(row, N)
                    )
            rows = rows + [(dict(row), src) for _, row, src in low]
            continue
        rules = [Rule((g,), img, linear_src[g]) for g, img in linear.items()]
        for lead, (row, src) in ech.reduced().items():
            rhs = {w: -c for w, c in row.items() if w != lead}
            rules.append(Rule(lead, rhs, src))
        gens = [g for g in generators]
        return RuleSet(rules, N, gens, order, step_cap)


# -- confluence diagnostics ---------------------------------------------------------


def _ambiguities(rules: RuleSet, max_degree: int):
    lhss = [r.lhs for r in rules.rules]
    by_prefix: Dict[Word, List[Word]] = {}
    for v in lhss:
        for k in range(1, len(v)):
            by_prefix.setdefault(v[:k], []).append(v)
    for u in lhss:
        # overlaps: proper suffix of u == proper prefix of v
        for k in range(1, len(u)):
            suf = u[len(u) - k :]
            for v in by_prefix.get(suf, ()):
                w = u + v[k:]
                if len(w) <= max_degree:
                    yield w, u, (len(u) - k), v
        # inclusions: v a proper subword of u
        for v in lhss:
            if len(v) < len(u):
                for i in range(len(u) - len(v) + 1):
                    if u[i : i + len(v)] == v and len(u) <= max_degree:
                        yield u, u, i, v


def overlap_check(rules: RuleSet, max_degree: int = 3) -> List[CriticalPair]:
    """Critical pairs (up to max_degree) whose two resolutions differ."""
    if max_degree < 3:
        raise ValueError("max_degree must be >= 3")
    N = rules.N
    bad = []
    for w, u, pos, v in _ambiguities(rules, max_degree):
        check_budget()
        ru = rules.by_lhs[u].rhs
        rv = rules.by_lhs[v].rhs
        # rewrite u at 0, then v at pos
        left = Polynomial({r + w[len(u) :]: c for r, c in ru.items()}, N)
        pre, post = w[:pos], w[pos + len(v) :]
        right = Polynomial({pre + r + post: c for r, c in rv.items()}, N)
        diff = rules.reduce(left) - rules.reduce(right)
        if diff:
            bad.append(CriticalPair(w, u, v, diff))
    return bad


def complete_bounded(rules: RuleSet, max_degree: int = 3, max_rules: int = 50, max_rounds: int = 10) -> RuleSet:
    """Bounded Knuth-Bendix style completion.

    Unresolved critical pairs are oriented into new rules and the system is
    inter-reduced, until everything resolves or ``max_rules`` new rules
    have been added.  The result's ``truncated`` flag records the latter.
    """
    N = rules.N
    one = field(N).one
    relations: List[Tuple[Polynomial, str]] = [(r.as_relation(N), r.source) for r in rules.rules]
    current = rules
    added = 0
    for _ in range(max_rounds):
        pairs = overlap_check(current, max_degree)
        if not pairs:
            return current
        if added >= max_rules:
            break
        for cp in pairs:
            if added >= max_rules:
                break
            d = current.reduce(cp.difference)
            if d:
                relations.append((d, "completion"))
                added += 1
                current = _interreduce(relations, N, current)
                relations = [(r.as_relation(N), r.source) for r in current.rules]
    truncated = bool(overlap_check(current, max_degree))
    return RuleSet(current.rules, N, current.generators, current.order, current.step_cap, truncated=truncated)


def _orient_one(p: Polynomial, order: MonomialOrder) -> Tuple[Word, Dict[Word, Scalar]]:
    lead = order.max(p.terms)
    inv = p.terms[lead].inv()
    return lead, {w: -c * inv for w, c in p.terms.items() if w != lead}


def _interreduce(relations, N, template: RuleSet) -> RuleSet:
    order = template.order
    pending = list(relations)
    for _ in range(100):
        rules: Dict[Word, Rule] = {}
        for poly, src in sorted(pending, key=lambda t: order.key(order.max(t[0].terms)) if t[0].terms else (0, ())):
            if not poly.terms:
                continue
            rs = RuleSet(list(rules.values()), N, template.generators, order, template.step_cap)
            red = rs.reduce(poly)
            if not red.terms:
                continue
            lhs, rhs = _orient_one(red, order)
            if lhs == ():
                raise UnorientableError("completion derived a nonzero constant")
            rules[lhs] = Rule(lhs, rhs, src)
        rs = RuleSet(list(rules.values()), N, template.generators, order, template.step_cap)
        # a later rule may make an earlier lhs reducible: redo until stable
        stale = [
            r
            for r in rs.rules
            if not RuleSet([o for o in rs.rules if o is not r], N, (), order).is_normal(r.lhs)
            or any(not rs.is_normal(w) for w in r.rhs)
        ]
        if not stale:
            return rs
        pending = [(r.as_relation(N), r.source) for r in rs.rules]
    raise NonTerminationError("inter-reduction did not stabilise")
