"""Free graded associative algebra over Q(p, x) on indexed generators.

A generator is packed into an int ``(kind << 16) | (row << 8) | col`` so that
integer comparison is the generator order: kind precedence first
(T < L < Om-kinds < Im-kinds), then (row, col) lexicographically.  A word is
a tuple of such ints; the empty tuple is the unit.
"""

from __future__ import annotations

from itertools import permutations
from typing import Callable, Dict, Iterable, List, Mapping, Tuple

from .budget import check_budget
from .rmatrix import ScalarMatrix, qtrace_weights
from .scalars import Field, Scalar, field

__all__ = [
    "KINDS",
    "gen_code",
    "gen_kind",
    "gen_index",
    "gen_name",
    "parity_of",
    "form_degree_of",
    "Polynomial",
    "PolyMatrix",
    "graded_commutator",
    "substitute",
    "qdet",
    "span_rank",
    "ParityError",
]

KINDS = ("T", "L", "Om", "OmL", "OmT", "Im", "ImL")
KIND_ID = {k: i for i, k in enumerate(KINDS)}
ODD_KINDS = frozenset(("Om", "OmL", "OmT", "Im", "ImL"))
_FORM = (0, 0, 1, 1, 1, -1, -1)

Word = Tuple[int, ...]


class ParityError(ValueError):
    """Raised for parity-inhomogeneous operands or parity-violating substitutions."""


def gen_code(kind: str, row: int, col: int) -> int:
    return (KIND_ID[kind] << 16) | (row << 8) | col


def gen_kind(g: int) -> str:
    return KINDS[g >> 16]


def gen_index(g: int) -> Tuple[int, int]:
    return (g >> 8) & 0xFF, g & 0xFF


def gen_name(g: int) -> str:
    r, c = gen_index(g)
    return f"{KINDS[g >> 16]}[{r},{c}]"


def parity_of(g: int) -> int:
    return 1 if (g >> 16) >= 2 else 0


def form_degree_of(g: int) -> int:
    return _FORM[g >> 16]


def word_parity(w: Word) -> int:
    return sum(1 for g in w if (g >> 16) >= 2) & 1


def word_form_degree(w: Word) -> int:
    return sum(_FORM[g >> 16] for g in w)


def word_key(w: Word):
    """Degree-lexicographic sort key."""
    return (len(w), w)


def word_string(w: Word) -> str:
    return "*".join(gen_name(g) for g in w) if w else "1"


class Polynomial:
    """Finite Q(p, x)-linear combination of words; zero coefficients never stored."""

    __slots__ = ("terms", "N")

    def __init__(self, terms: Dict[Word, Scalar] = None, N: int = 1):
        self.terms = terms if terms is not None else {}
        self.N = N

    # -- constructors -------------------------------------------------------

    @classmethod
    def gen(cls, kind: str, row: int, col: int, N: int) -> "Polynomial":
        if not (1 <= row <= N and 1 <= col <= N):
            raise IndexError(f"index ({row},{col}) outside 1..{N}")
        return cls({(gen_code(kind, row, col),): field(N).one}, N)

    @classmethod
    def const(cls, c, N: int) -> "Polynomial":
        c = field(N)(c)
        return cls({(): c} if c else {}, N)

    @classmethod
    def word(cls, w: Iterable[int], N: int, coeff=1) -> "Polynomial":
        c = field(N)(coeff)
        return cls({tuple(w): c} if c else {}, N)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if other.N != self.N:
            raise ValueError(f"mixed-N operands ({self.N} vs {other.N})")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Scalar)):
            return Polynomial.const(other, self.N)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for w, c in other.terms.items():
            v = out.get(w)
            if v is None:
                out[w] = c
            else:
                v = v + c
                if v:
                    out[w] = v
                else:
                    del out[w]
        return Polynomial(out, self.N)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({w: -c for w, c in self.terms.items()}, self.N)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "Polynomial":
        c = field(self.N)(c)
        if not c:
            return Polynomial({}, self.N)
        if c.is_one():
            return self
        return Polynomial({w: v * c for w, v in self.terms.items()}, self.N)

    def __mul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        out: Dict[Word, Scalar] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                c = c1 * c2
                v = out.get(w)
                out[w] = c if v is None else v + c
        return Polynomial({w: c for w, c in out.items() if c}, self.N)

    def __rmul__(self, other):
        if isinstance(other, (int, Scalar)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomials only take non-negative integer powers")
        out = Polynomial.const(1, self.N)
        for _ in range(k):
            out = out * self
        return out

    # -- predicates and gradings --------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Scalar)):
            other = Polynomial.const(other, self.N)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.N == other.N and self.terms == other.terms

    __hash__ = None

    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def parity(self) -> int:
        """Parity of a homogeneous element (0 for the zero polynomial)."""
        ps = {word_parity(w) for w in self.terms}
        if len(ps) > 1:
            raise ParityError("polynomial is not parity-homogeneous")
        return ps.pop() if ps else 0

    def form_degrees(self) -> set:
        return {word_form_degree(w) for w in self.terms}

    def sorted_terms(self) -> List[Tuple[Word, Scalar]]:
        """Terms in descending degree-lexicographic word order."""
        return sorted(self.terms.items(), key=lambda t: word_key(t[0]), reverse=True)

    def leading_word(self) -> Word:
        return max(self.terms, key=word_key)

    def generators(self) -> set:
        return {g for w in self.terms for g in w}

    def __str__(self):
        from .expr import format_poly

        return format_poly(self)

    def __repr__(self):
        return f"Polynomial({str(self)!r}, N={self.N})"


def graded_commutator(a: Polynomial, b: Polynomial) -> Polynomial:
    """ab - (-1)^(|a||b|) ba for parity-homogeneous a, b."""
    sign = -1 if a.parity() * b.parity() else 1
    return a * b - (b * a).scale(sign)


def substitute(p: Polynomial, table: Mapping[int, Polynomial]) -> Polynomial:
    """Apply the algebra homomorphism generator -> table[generator] (others fixed)."""
    for g, img in table.items():
        if img.terms and img.parity() != parity_of(g):
            raise ParityError(f"substitution for {gen_name(g)} changes parity")
    N = p.N
    cache: Dict[int, Polynomial] = {}

    def image(g):
        if g not in cache:
            cache[g] = table[g] if g in table else Polynomial({(g,): field(N).one}, N)
        return cache[g]

    total = Polynomial({}, N)
    for w, c in p.terms.items():
        acc = Polynomial.const(c, N)
        for g in w:
            acc = acc * image(g)
        total = total + acc
    return total


# -- matrices with noncommuting entries ------------------------------------


class PolyMatrix:
    """Dense matrix of Polynomials; N is the rank of the coefficient field."""

    __slots__ = ("rows", "cols", "N", "entries")

    def __init__(self, entries: List[List[Polynomial]], N: int):
        self.entries = entries
        self.rows = len(entries)
        self.cols = len(entries[0]) if entries else 0
        self.N = N

    @classmethod
    def generators(cls, kind: str, N: int) -> "PolyMatrix":
        return cls([[Polynomial.gen(kind, i, j, N) for j in range(1, N + 1)] for i in range(1, N + 1)], N)

    @classmethod
    def identity(cls, n: int, N: int, c=1) -> "PolyMatrix":
        return cls([[Polynomial.const(c if i == j else 0, N) for j in range(n)] for i in range(n)], N)

    @classmethod
    def zeros(cls, n: int, N: int) -> "PolyMatrix":
        return cls([[Polynomial({}, N) for _ in range(n)] for _ in range(n)], N)

    @classmethod
    def lift(cls, M: ScalarMatrix) -> "PolyMatrix":
        out = cls.zeros(M.dim, M.N)
        for (r, c), v in M.entries.items():
            out.entries[r][c] = Polynomial.const(v, M.N)
        return out

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def map(self, f: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        return PolyMatrix([[f(e) for e in row] for row in self.entries], self.N)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        return PolyMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.N)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        return PolyMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.N)

    def __neg__(self):
        return self.map(lambda e: -e)

    def scale(self, c) -> "PolyMatrix":
        return self.map(lambda e: e.scale(c))

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")

    def __matmul__(self, other) -> "PolyMatrix":
        return mat_mul(self, other)

    def embed1(self) -> "PolyMatrix":
        """A (x) Id: entry ((i,a),(j,b)) = delta_ab A_ij."""
        n = self.rows
        out = PolyMatrix.zeros(n * n, self.N)
        for i in range(n):
            for j in range(n):
                for a in range(n):
                    out.entries[i * n + a][j * n + a] = self.entries[i][j]
        return out

    def embed2(self) -> "PolyMatrix":
        """Id (x) A: entry ((a,i),(b,j)) = delta_ab A_ij."""
        n = self.rows
        out = PolyMatrix.zeros(n * n, self.N)
        for a in range(n):
            for i in range(n):
                for j in range(n):
                    out.entries[a * n + i][a * n + j] = self.entries[i][j]
        return out

    def qtrace(self, weights=None) -> Polynomial:
        if self.rows != self.cols:
            raise ValueError("q-trace needs a square matrix")
        if weights is None:
            weights = qtrace_weights(self.rows)
        total = Polynomial({}, self.N)
        for i in range(self.rows):
            total = total + self.entries[i][i].scale(weights[i])
        return total

    def components(self) -> List[Polynomial]:
        return [e for row in self.entries for e in row]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)


def _as_poly_matrix(M):
    return PolyMatrix.lift(M) if isinstance(M, ScalarMatrix) else M


def mat_mul(*mats) -> PolyMatrix:
    """Product of PolyMatrix / ScalarMatrix factors, left to right."""
    mats = [_as_poly_matrix(m) for m in mats]
    out = mats[0]
    for B in mats[1:]:
        if out.cols != B.rows:
            raise ValueError("dimension mismatch")
        N = out.N
        res = []
        for i in range(out.rows):
            check_budget()
            row_a = [(k, a) for k, a in enumerate(out.entries[i]) if a.terms]
            row = []
            for j in range(B.cols):
                acc = Polynomial({}, N)
                for k, a in row_a:
                    b = B.entries[k][j]
                    if b.terms:
                        acc = acc + a * b
                row.append(acc)
            res.append(row)
        out = PolyMatrix(res, N)
    return out


def qdet(M: PolyMatrix, q: Scalar = None, column: bool = False) -> Polynomial:
    """Quantum determinant sum_s (-q)^l(s) M_1s(1) ... M_Ns(N).

    ``column=True`` uses the column-ordered expansion M_s(1)1 ... M_s(N)N.
    ``q`` overrides the deformation parameter (e.g. q^-1 for the opposite
    convention).
    """
    n = M.rows
    if n != M.cols:
        raise ValueError("qdet needs a square matrix")
    F = field(M.N)
    if q is None:
        q = F.q
    total = Polynomial({}, M.N)
    for perm in permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = Polynomial.const((-q) ** inv, M.N)
        for r in range(n):
            term = term * (M.entries[perm[r]][r] if column else M.entries[r][perm[r]])
        total = total + term
    return total


def span_rank(polys: Iterable[Polynomial]) -> int:
    """Rank over Q(p, x) of the linear span of the given polynomials."""
    pivots: Dict[Word, Dict[Word, Scalar]] = {}
    rank = 0
    for p in polys:
        row = dict(p.terms)
        while row:
            lead = max(row, key=word_key)
            if lead in pivots:
                prow = pivots[lead]
                f = row[lead]
                for w, c in prow.items():
                    v = row.get(w)
                    v = -f * c if v is None else v - f * c
                    if v:
                        row[w] = v
                    else:
                        row.pop(w, None)
            else:
                inv = row[lead].inv()
                pivots[lead] = {w: c * inv for w, c in row.items()}
                rank += 1
                break
    return rank
