"""The algebras as generator/relation systems.

``frt_T``   quantum group functions T only
``swz``     the GL_q(N) differential algebra: T, L, Om, Im
``lbasis``  the same algebra after Om -> L Om, Im -> Im L^-1 and the
            det-rescaling of T: T, L, OmL, ImL (relations taken as defining)
``fp``      the SL_q(N) subalgebra: T, L, OmT (traceless forms), ImL

Relations are generated componentwise from matrix identities in
End(V (x) V); every family carries a stable source tag.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field as dc_field, replace
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

from .budget import check_budget
from .ncalg import PolyMatrix, Polynomial, gen_code, gen_name, qdet
from .rewrite import RuleSet, UnorientableError, orient_relations
from .rmatrix import ScalarMatrix, build_rhat, qtrace_weights, rhat_inverse
from .scalars import Scalar, field

__all__ = [
    "NAMES",
    "Params",
    "params",
    "default_convention",
    "Presentation",
    "presentation",
    "build_presentation",
    "defined_symbols",
    "relation_families",
]

NAMES = ("frt_T", "swz", "lbasis", "fp")
DEFAULT_CONVENTION = "standard"


def default_convention() -> str:
    conv = os.environ.get("QDC_CONVENTION", DEFAULT_CONVENTION)
    if conv not in ("standard", "inverse"):
        raise ValueError(f"QDC_CONVENTION must be 'standard' or 'inverse', not {conv!r}")
    return conv


@dataclass(frozen=True)
class Params:
    """Every constant the relations and checks are built from.

    Mutation controls replace one field at a time.
    """

    N: int
    convention: str
    R: ScalarMatrix
    Rinv: ScalarMatrix
    weights: Tuple[Scalar, ...]
    nq: Scalar
    kq: Scalar
    lam: Scalar
    # coefficient c in OmT = OmL - (c / N_q) Tr_q(OmL) 1
    projector: Scalar
    # constant term kq / (lam (1 - kq)) of the ImL-OmT relation
    ss4_const: Scalar
    # q^(2/N) in the T-L relation of the rescaled basis
    tl_factor: Scalar
    # q used by the q-determinant expansion (-q)^l(sigma)
    qdet_q: Scalar

    @property
    def F(self):
        return field(self.N)


@lru_cache(maxsize=None)
def params(N: int, convention: Optional[str] = None) -> Params:
    if convention is None:
        convention = default_convention()
    F = field(N)
    R = build_rhat(N, convention)
    Rinv = rhat_inverse(R, sign=1 if convention == "standard" else -1)
    kq = F.kq
    return Params(
        N=N,
        convention=convention,
        R=R,
        Rinv=Rinv,
        weights=tuple(qtrace_weights(N)),
        nq=F.nq,
        kq=kq,
        lam=F.lam,
        projector=F.one,
        ss4_const=kq / (F.lam * (1 - kq)),
        tl_factor=F.p**2,
        qdet_q=F.q,
    )


# -- matrices of generators and defined symbols --------------------------------


def gens_matrix(kind: str, N: int) -> PolyMatrix:
    return PolyMatrix.generators(kind, N)


def qtrace_of(M: PolyMatrix, P: Params) -> Polynomial:
    return M.qtrace(list(P.weights))


def traceless(OmL: PolyMatrix, P: Params) -> PolyMatrix:
    """OmL - (c/N_q) Tr_q(OmL) * 1."""
    N = P.N
    tr = qtrace_of(OmL, P).scale(P.projector / P.nq)
    return PolyMatrix(
        [[OmL.entries[i][j] - tr if i == j else OmL.entries[i][j] for j in range(N)] for i in range(N)], N
    )


def square(M: PolyMatrix) -> PolyMatrix:
    return M @ M


def wl_matrix(P: Params) -> PolyMatrix:
    """W L = L (1 - lam Om Im), which needs no inverse of L."""
    N = P.N
    L, Om, Im = gens_matrix("L", N), gens_matrix("Om", N), gens_matrix("Im", N)
    return L - (L @ Om @ Im).scale(P.lam)


def omega_x(P: Params) -> PolyMatrix:
    """Om (1 + x W L)."""
    Om = gens_matrix("Om", P.N)
    return Om + (Om @ wl_matrix(P)).scale(P.F.x)


def xi_x(P: Params) -> Polynomial:
    """(q^N / lam) Tr_q(Om (1 + x W L))."""
    return qtrace_of(omega_x(P), P).scale(P.F.qpow(P.N) / P.lam)


def w_matrices(P: Params) -> Tuple[PolyMatrix, PolyMatrix]:
    """(W, Wbar) = (1 - lam OmL ImL, 1 - lam ImL OmL)."""
    N = P.N
    OmL, ImL = gens_matrix("OmL", N), gens_matrix("ImL", N)
    one = PolyMatrix.identity(N, N)
    return one - (OmL @ ImL).scale(P.lam), one - (ImL @ OmL).scale(P.lam)


def defined_symbols(name: str, N: int, P: Optional[Params] = None) -> Dict[str, Union[Polynomial, PolyMatrix]]:
    """Named composite elements available in the given presentation."""
    P = P or params(N)
    T = gens_matrix("T", N)
    out: Dict[str, Union[Polynomial, PolyMatrix]] = {"DetT": qdet(T, P.qdet_q)}
    if name == "swz":
        out["XiX"] = xi_x(P)
        out["OmX"] = omega_x(P)
        out["WL"] = wl_matrix(P)
        out["TrOm"] = qtrace_of(gens_matrix("Om", N), P)
        L, Om = gens_matrix("L", N), gens_matrix("Om", N)
        out["OmLfromOm"] = L @ Om
    elif name == "lbasis":
        OmL = gens_matrix("OmL", N)
        out["TrOmL"] = qtrace_of(OmL, P)
        out["OmTilde"] = traceless(OmL, P)
        W, Wbar = w_matrices(P)
        out["W"], out["Wbar"] = W, Wbar
    elif name == "fp":
        out["TrOmT"] = qtrace_of(gens_matrix("OmT", N), P)
    return out


# -- relation families ------------------------------------------------------------


def _components(M: PolyMatrix) -> List[Polynomial]:
    check_budget()
    return [e for e in M.components() if e.terms]


def _frt(T, R):
    return R @ T.embed1() @ T.embed2() - T.embed1() @ T.embed2() @ R


def _reflection(L, R):
    L1 = L.embed1()
    return R @ L1 @ R @ L1 - L1 @ R @ L1 @ R


def _braided(L, X, R):
    """R L1 R X1 - X1 R L1 R."""
    L1, X1 = L.embed1(), X.embed1()
    return R @ L1 @ R @ X1 - X1 @ R @ L1 @ R


def relation_families(name: str, P: Params) -> List[Tuple[str, List[Polynomial]]]:
    """Component polynomials of every relation family, tagged by source."""
    N = P.N
    R, Ri = PolyMatrix.lift(P.R), PolyMatrix.lift(P.Rinv)
    Id = PolyMatrix.identity(N * N, N)
    T = gens_matrix("T", N)
    T1, T2 = T.embed1(), T.embed2()
    fam: List[Tuple[str, List[Polynomial]]] = []

    if name == "frt_T":
        fam.append(("eq-zum-TT", _components(_frt(T, R))))
        return fam

    L = gens_matrix("L", N)
    L1 = L.embed1()

    if name == "swz":
        Om, Im = gens_matrix("Om", N), gens_matrix("Im", N)
        O1, I1 = Om.embed1(), Im.embed1()
        fam += [
            ("eq-zum-TT", _components(_frt(T, R))),
            ("eq-zum-TL", _components(T1 @ L.embed2() - R @ L1 @ R @ T1)),
            ("eq-zum-TOm", _components(T1 @ Om.embed2() - Ri @ O1 @ Ri @ T1)),
            ("eq-zum-OmOm", _components(Ri @ O1 @ Ri @ O1 + O1 @ Ri @ O1 @ R)),
            ("eq-zum-LL", _components(_reflection(L, R))),
            ("eq-zum-LOm", _components(_braided(L, Om, R))),
            ("eq-861-TIm", _components(T1 @ Im.embed2() - R @ I1 @ R @ T1)),
            ("eq-861-ImOm", _components(I1 @ Ri @ O1 @ Ri + Ri @ O1 @ Ri @ I1 + Ri)),
            ("eq-861-LIm", _components(_braided(L, Im, R))),
            ("eq-861-ImIm", _components(R @ I1 @ R @ I1 + I1 @ R @ I1 @ Ri)),
        ]
        return fam

    if name == "lbasis":
        Om, Im = gens_matrix("OmL", N), gens_matrix("ImL", N)
    elif name == "fp":
        Om, Im = gens_matrix("OmT", N), gens_matrix("ImL", N)
    else:
        raise ValueError(f"unknown presentation {name!r}")
    O1, I1 = Om.embed1(), Im.embed1()
    tag = "s2" if name == "lbasis" else "s2p"
    fam += [
        (f"eq-{tag}-TT", _components(_frt(T, R))),
        (f"eq-{tag}-TL", _components(T1 @ L.embed2().scale(P.tl_factor) - R @ L1 @ R @ T1)),
        (f"eq-{tag}-TOm", _components(T1 @ Om.embed2() - R @ O1 @ Ri @ T1)),
        (f"eq-{tag}-LL", _components(_reflection(L, R))),
        (f"eq-{tag}-LOm", _components(_braided(L, Om, R))),
    ]
    if name == "lbasis":
        fam.append(("eq-s2-OmOm", _components(R @ O1 @ R @ O1 + O1 @ R @ O1 @ Ri)))
    else:
        sq1 = square(Om).embed1()
        fam.append(
            ("eq-s2pp", _components(R @ O1 @ R @ O1 + O1 @ R @ O1 @ Ri - (sq1 + R @ sq1 @ R).scale(P.kq)))
        )
    fam += [
        ("eq-s3-TIm", _components(T1 @ Im.embed2() - R @ I1 @ Ri @ T1)),
        ("eq-s3-ImIm", _components(R @ I1 @ Ri @ I1 + I1 @ Ri @ I1 @ Ri)),
        ("eq-s3-LIm", _components(_braided(L, Im, R))),
    ]
    if name == "lbasis":
        fam.append(("eq-ss3", _components(I1 @ Ri @ O1 @ R + R @ O1 @ Ri @ I1 + R)))
    else:
        fam.append(("eq-ss4", _components(I1 @ Ri @ O1 @ R + R @ O1 @ Ri @ I1 - Id.scale(P.ss4_const) + R)))
        fam.append(("eq-isa1-trace", [qtrace_of(Om, P)]))
    return fam


_KINDS_OF = {
    "frt_T": ("T",),
    "swz": ("T", "L", "Om", "Im"),
    "lbasis": ("T", "L", "OmL", "ImL"),
    "fp": ("T", "L", "OmT", "ImL"),
}


@dataclass
class Presentation:
    name: str
    N: int
    convention: str
    generators: List[int]
    families: List[Tuple[str, List[Polynomial]]]
    symbols: Dict[str, Union[Polynomial, PolyMatrix]]
    rules: RuleSet
    notes: List[str] = dc_field(default_factory=list)

    def reduce(self, p: Polynomial, **kw) -> Polynomial:
        return self.rules.reduce(p, **kw)

    def relations(self) -> List[Tuple[str, Polynomial]]:
        return [(tag, c) for tag, comps in self.families for c in comps]

    def independent_generators(self) -> List[int]:
        return [g for g in self.generators if (g,) not in self.rules.by_lhs]


def build_presentation(name: str, N: int, P: Params) -> Presentation:
    if name not in NAMES:
        raise ValueError(f"unknown presentation {name!r}; choose from {', '.join(NAMES)}")
    if N < 1 or (N < 2 and name != "frt_T"):
        raise ValueError(f"presentation {name} needs N >= 2")
    gens = [
        gen_code(k, i, j) for k in _KINDS_OF[name] for i in range(1, N + 1) for j in range(1, N + 1)
    ]
    fams = relation_families(name, P)
    rels = [(c, tag) for tag, comps in fams for c in comps]
    try:
        rules = orient_relations(rels, N, generators=gens)
    except UnorientableError as exc:
        raise UnorientableError(f"{name}(N={N}): {exc}", exc.witness) from exc
    notes = []
    for r in rules.rules:
        if len(r.lhs) == 1:
            notes.append(f"{gen_name(r.lhs[0])} eliminated by {r.source}")
    return Presentation(name, N, P.convention, gens, fams, defined_symbols(name, N, P), rules, notes)


_CACHE: Dict[Tuple[str, int, str], Presentation] = {}


def presentation(name: str, N: int, convention: Optional[str] = None) -> Presentation:
    """Cached presentation for the unmutated constants."""
    P = params(N, convention)
    key = (name, N, P.convention)
    if key not in _CACHE:
        _CACHE[key] = build_presentation(name, N, P)
    return _CACHE[key]
