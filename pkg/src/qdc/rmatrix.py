"""The GL_q(N) braid R-matrix, its inverse, and the q-trace.

Matrices acting on V (x) V are indexed by flattened tensor pairs: the basis
vector e_i (x) e_k (0-based) sits at position ``i*N + k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, Tuple

from .scalars import Field, Scalar, field

__all__ = [
    "ScalarMatrix",
    "build_rhat",
    "rhat_inverse",
    "gauss_inverse",
    "check_ybe",
    "check_hecke",
    "qtrace_weights",
    "qtrace",
    "CONVENTIONS",
    "InverseCheckError",
]

CONVENTIONS = ("standard", "inverse")


class InverseCheckError(ArithmeticError):
    """The Hecke shortcut did not produce an inverse."""


@dataclass(frozen=True)
class ScalarMatrix:
    """Sparse square matrix over Q(p, x); missing entries are zero."""

    dim: int
    N: int
    entries: Dict[Tuple[int, int], Scalar] = dc_field(default_factory=dict)

    @classmethod
    def identity(cls, dim: int, N: int) -> "ScalarMatrix":
        one = field(N).one
        return cls(dim, N, {(i, i): one for i in range(dim)})

    @classmethod
    def from_rows(cls, rows, N: int) -> "ScalarMatrix":
        F = field(N)
        ent = {}
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                v = F(v)
                if v:
                    ent[(i, j)] = v
        return cls(len(rows), N, ent)

    def __getitem__(self, rc):
        v = self.entries.get(rc)
        return v if v is not None else field(self.N).zero

    def __add__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        out = dict(self.entries)
        for k, v in other.entries.items():
            s = out[k] + v if k in out else v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return ScalarMatrix(self.dim, self.N, out)

    def scale(self, c) -> "ScalarMatrix":
        c = field(self.N)(c)
        if not c:
            return ScalarMatrix(self.dim, self.N, {})
        return ScalarMatrix(self.dim, self.N, {k: v * c for k, v in self.entries.items()})

    def __sub__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        return self + other.scale(-1)

    def __matmul__(self, other: "ScalarMatrix") -> "ScalarMatrix":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        by_row: Dict[int, list] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        out: Dict[Tuple[int, int], Scalar] = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                out[key] = out[key] + a * b if key in out else a * b
        return ScalarMatrix(self.dim, self.N, {k: v for k, v in out.items() if v})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, ScalarMatrix):
            return NotImplemented
        return self.dim == other.dim and (self - other).is_zero()

    def kron_identity(self, n: int, left: bool) -> "ScalarMatrix":
        """``Id_n (x) self`` if ``left`` else ``self (x) Id_n``."""
        out = {}
        d = self.dim
        for (r, c), v in self.entries.items():
            for a in range(n):
                if left:
                    out[(a * d + r, a * d + c)] = v
                else:
                    out[(r * n + a, c * n + a)] = v
        return ScalarMatrix(d * n, self.N, out)

    def to_dense(self):
        zero = field(self.N).zero
        return [[self.entries.get((i, j), zero) for j in range(self.dim)] for i in range(self.dim)]

    def with_entry(self, rc, value) -> "ScalarMatrix":
        out = dict(self.entries)
        value = field(self.N)(value)
        if value:
            out[rc] = value
        else:
            out.pop(rc, None)
        return ScalarMatrix(self.dim, self.N, out)


def _standard_rhat(N: int) -> ScalarMatrix:
    F = field(N)
    ent = {}
    for i in range(N):
        ent[(i * N + i, i * N + i)] = F.q
        for j in range(N):
            if i != j:
                # e_ij (x) e_ji : e_j (x) e_i -> e_i (x) e_j
                ent[(i * N + j, j * N + i)] = F.one
            if i < j:
                # lam e_ii (x) e_jj
                ent[(i * N + j, i * N + j)] = F.lam
    return ScalarMatrix(N * N, N, ent)


def build_rhat(N: int, convention: str = "standard") -> ScalarMatrix:
    """R-hat = sum_i q e_ii(x)e_ii + sum_{i!=j} e_ij(x)e_ji + lam sum_{i<j} e_ii(x)e_jj.

    ``convention="inverse"`` returns the inverse of that matrix.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    R = _standard_rhat(N)
    if convention == "inverse":
        return rhat_inverse(R, sign=1)
    return R


def _hecke_sign(convention: str) -> int:
    return 1 if convention == "standard" else -1


def rhat_inverse(R: ScalarMatrix, sign: int = 1) -> ScalarMatrix:
    """Invert a Hecke matrix via R^-1 = R - sign*lam*Id and verify the product.

    ``sign`` is +1 when R - R^-1 = lam (standard R-hat) and -1 for its inverse.
    """
    F = field(R.N)
    inv = R - ScalarMatrix.identity(R.dim, R.N).scale(F.lam * sign)
    if R @ inv != ScalarMatrix.identity(R.dim, R.N):
        raise InverseCheckError("matrix does not satisfy the Hecke relation")
    return inv


def gauss_inverse(M: ScalarMatrix) -> ScalarMatrix:
    """Gauss-Jordan inverse over Q(p, x) (independent of the Hecke shortcut)."""
    F = field(M.N)
    n = M.dim
    A = [row[:] + [F.one if i == j else F.zero for j in range(n)] for i, row in enumerate(M.to_dense())]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inv()
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return ScalarMatrix.from_rows([row[n:] for row in A], M.N)


def _braid_residual(R: ScalarMatrix) -> ScalarMatrix:
    N = R.N
    R12 = R.kron_identity(N, left=False)
    R23 = R.kron_identity(N, left=True)
    return R12 @ R23 @ R12 - R23 @ R12 @ R23


def check_ybe(N: int = None, convention: str = "standard", R: ScalarMatrix = None) -> bool:
    """Exact test of R12 R23 R12 = R23 R12 R23 on V^(x)3."""
    if R is None:
        R = build_rhat(N, convention)
    return _braid_residual(R).is_zero()


def check_hecke(N: int = None, convention: str = "standard", R: ScalarMatrix = None) -> bool:
    """Exact test of R - R^-1 = +-lam Id, with R^-1 from Gauss-Jordan elimination."""
    if R is None:
        R = build_rhat(N, convention)
    F = field(R.N)
    try:
        Rinv = gauss_inverse(R)
    except ZeroDivisionError:
        return False
    lam_id = ScalarMatrix.identity(R.dim, R.N).scale(F.lam * _hecke_sign(convention))
    return (R - Rinv - lam_id).is_zero()


def qtrace_weights(N: int) -> list:
    """Weights q^(-N-1+2i), i = 1..N."""
    F = field(N)
    return [F.qpow(-N - 1 + 2 * i) for i in range(1, N + 1)]


def qtrace(M, weights=None, zero=None):
    """sum_i w_i M[i][i] for a square N x N matrix over any ring accepting scalar products."""
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("qtrace needs a square matrix")
    if weights is None:
        weights = qtrace_weights(n)
    if len(weights) != n:
        raise ValueError(f"expected {n} weights, got {len(weights)}")
    total = zero
    for i in range(n):
        term = M[i][i] * weights[i]
        total = term if total is None else total + term
    return total
