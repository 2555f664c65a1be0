"""Named verification checks, one per asserted identity, and suite runner.

Every check builds its identity from a :class:`~qdc.presentations.Params`
bundle and reduces the components in a reference presentation built from
the unmutated constants.  Mutation controls swap one constant in the bundle
and expect at least one check to fail.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .budget import BudgetExceeded, check_budget, time_budget
from .expr import format_poly
from .ncalg import PolyMatrix, Polynomial, gen_code, graded_commutator, qdet, substitute
from .presentations import (
    NAMES,
    Params,
    Presentation,
    build_presentation,
    gens_matrix,
    omega_x,
    params,
    presentation,
    qtrace_of,
    relation_families,
    square,
    traceless,
    w_matrices,
)
from .rewrite import NonTerminationError, UnorientableError, overlap_check
from .rmatrix import ScalarMatrix, _braid_residual, gauss_inverse

__all__ = [
    "CheckResult",
    "CHECKS",
    "SUITES",
    "MUTATIONS",
    "run_check",
    "run_suite",
    "report",
    "mutate",
    "aggregate_status",
]


@dataclass
class CheckResult:
    name: str
    N: int
    status: str  # pass | fail | skip
    witness: Optional[Polynomial] = None
    millis: int = 0
    code: str = ""
    reason: str = ""
    # the failing component, or the scope of a passing check
    detail: str = ""

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "id": self.code,
            "name": self.name,
            "status": self.status,
            "witness": None if self.witness is None else format_poly(self.witness),
        }
        if self.reason:
            out["reason"] = self.reason
        if self.detail:
            out["detail"] = self.detail
        if timings:
            out["millis"] = self.millis
        return out


class _Fail(Exception):
    def __init__(self, witness: Polynomial, detail: str = "", reason: str = ""):
        super().__init__(detail or reason)
        self.witness, self.detail, self.reason = witness, detail, reason


class _Skip(Exception):
    pass


@dataclass
class _Ctx:
    P: Params
    N: int
    verify: bool
    seed: int
    max_degree: int
    heavy: bool
    scope: Tuple[str, ...]
    mutated: bool

    def ref(self, name: str) -> Presentation:
        """Reference presentation from the unmutated constants."""
        try:
            return presentation(name, self.N, self.P.convention)
        except (UnorientableError, NonTerminationError, ValueError) as exc:
            raise _Skip(f"presentation {name} unavailable: {exc}") from exc


def _first_nonzero(M: ScalarMatrix) -> Polynomial:
    rc = min(M.entries)
    return Polynomial.const(M.entries[rc], M.N)


def _obligations(ctx: _Ctx, pres: Presentation, items: Iterable[Tuple[str, Polynomial]]) -> int:
    """Reduce every (label, polynomial); raise _Fail on the first nonzero normal form."""
    count = 0
    for label, poly in items:
        check_budget()
        nf = pres.reduce(poly)
        if ctx.verify:
            alt = pres.reduce(poly, strategy="random", seed=ctx.seed + count)
            if alt != nf:
                raise _Fail(alt - nf, label, "normal form depends on the rewriting strategy")
            if nf.terms and pres.reduce(nf) != nf:
                raise _Fail(nf, label, "witness is not a fixed point of reduction")
        if nf.terms:
            raise _Fail(nf, label)
        count += 1
    return count


def _matrix_items(tag: str, M: PolyMatrix) -> Iterator[Tuple[str, Polynomial]]:
    n = M.rows
    for r in range(n):
        for c in range(M.cols):
            yield f"{tag}[{r + 1},{c + 1}]", M.entries[r][c]


def _reduced_product(pres: Presentation, *mats) -> PolyMatrix:
    """Matrix product with every intermediate entry reduced to normal form."""
    out = mats[0]
    for B in mats[1:]:
        out = (out @ B).map(pres.reduce)
    return out


# -- the checks --------------------------------------------------------------------


def _heavy_guard(ctx: _Ctx):
    if ctx.N > 2 and not ctx.heavy:
        raise _Skip("N > 2 needs the heavy opt-in")


def _c1(ctx: _Ctx) -> str:
    P = ctx.P
    F = P.F
    res = _braid_residual(P.R)
    if not res.is_zero():
        raise _Fail(_first_nonzero(res), "braid relation")
    try:
        inv = gauss_inverse(P.R)
    except ZeroDivisionError:
        raise _Fail(Polynomial.const(1, ctx.N), "", "R-matrix is singular")
    sign = 1 if P.convention == "standard" else -1
    hecke = P.R - inv - ScalarMatrix.identity(P.R.dim, ctx.N).scale(F.lam * sign)
    if not hecke.is_zero():
        raise _Fail(_first_nonzero(hecke), "Hecke relation")
    shortcut = P.Rinv - inv
    if not shortcut.is_zero():
        raise _Fail(_first_nonzero(shortcut), "Hecke-shortcut inverse")
    return f"N={ctx.N}"


def _c2(ctx: _Ctx) -> str:
    P = ctx.P
    tr = qtrace_of(traceless(gens_matrix("OmL", ctx.N), P), P)
    if tr.terms:
        raise _Fail(tr, "Tr_q of the traceless projection")
    return ""


def _c3(ctx: _Ctx) -> str:
    pres = ctx.ref("frt_T")
    det = qdet(gens_matrix("T", ctx.N), ctx.P.qdet_q)
    items = (
        (f"[DetT,T[{i},{j}]]", det * Polynomial.gen("T", i, j, ctx.N) - Polynomial.gen("T", i, j, ctx.N) * det)
        for i in range(1, ctx.N + 1)
        for j in range(1, ctx.N + 1)
    )
    n = _obligations(ctx, pres, items)
    return f"{n} commutators"


def _c4(ctx: _Ctx) -> str:
    done = []
    for name in ctx.scope:
        if name != "frt_T" and ctx.N < 2:
            continue
        check_budget()
        try:
            if ctx.mutated:
                pres = build_presentation(name, ctx.N, ctx.P)
            else:
                pres = presentation(name, ctx.N, ctx.P.convention)
        except UnorientableError as exc:
            w = exc.witness if exc.witness is not None else Polynomial.const(1, ctx.N)
            raise _Fail(w, name, str(exc))
        pairs = overlap_check(pres.rules, ctx.max_degree)
        if pairs:
            cp = pairs[0]
            raise _Fail(cp.difference, f"{name}: {cp}", f"{len(pairs)} unresolved critical pairs")
        done.append(name)
    if not done:
        raise _Skip("no presentation in scope for this N")
    return ",".join(done)


def _c5(ctx: _Ctx) -> str:
    P = ctx.P
    pres = ctx.ref("lbasis")
    OmL = gens_matrix("OmL", ctx.N)
    tr = qtrace_of(OmL, P)
    Ot = traceless(OmL, P)
    sq = square(Ot)
    c = P.lam * P.F.qpow(ctx.N) * (P.kq - 1)

    def items():
        yield "(TrOmL)^2", tr * tr
        for i in range(ctx.N):
            for j in range(ctx.N):
                e = Ot.entries[i][j]
                yield f"anticommutator[{i + 1},{j + 1}]", tr * e + e * tr - sq.entries[i][j].scale(c)

    n = _obligations(ctx, pres, items())
    return f"{n} components"


def _c6(ctx: _Ctx) -> str:
    P = ctx.P
    N = ctx.N
    pres = ctx.ref("lbasis")
    Ot = traceless(gens_matrix("OmL", N), P)
    table = {gen_code("OmT", i + 1, j + 1): Ot.entries[i][j] for i in range(N) for j in range(N)}
    n = 0
    for tag, comps in relation_families("fp", P):
        items = ((f"{tag}#{k}", substitute(c, table)) for k, c in enumerate(comps))
        n += _obligations(ctx, pres, items)
    return f"{n} components"


def _c7(ctx: _Ctx) -> str:
    _heavy_guard(ctx)
    P = ctx.P
    pres = ctx.ref("swz")
    R, Ri = PolyMatrix.lift(P.R), PolyMatrix.lift(P.Rinv)
    O1 = omega_x(P).map(pres.reduce).embed1()
    lhs = _reduced_product(pres, R, O1, Ri, O1) + _reduced_product(pres, O1, Ri, O1, Ri)
    n = _obligations(ctx, pres, _matrix_items("OmX relation", lhs))
    return f"{n} components"


def _xi(ctx: _Ctx, pres: Presentation) -> Polynomial:
    P = ctx.P
    return pres.reduce(qtrace_of(omega_x(P), P).scale(P.F.qpow(ctx.N) / P.lam))


def _c8(ctx: _Ctx) -> str:
    _heavy_guard(ctx)
    pres = ctx.ref("swz")
    xi = _xi(ctx, pres)
    _obligations(ctx, pres, [("XiX*XiX", xi * xi)])
    return ""


def _c9(ctx: _Ctx) -> str:
    _heavy_guard(ctx)
    pres = ctx.ref("swz")
    xi = _xi(ctx, pres)
    items = []
    for i in range(1, ctx.N + 1):
        for j in range(1, ctx.N + 1):
            check_budget()
            d = pres.reduce(graded_commutator(xi, Polynomial.gen("T", i, j, ctx.N)))
            if not d.terms or d.form_degrees() != {1}:
                raise _Fail(d if d.terms else Polynomial.const(1, ctx.N), f"d_x T[{i},{j}]",
                            "d_x T is not of uniform form-degree 1")
            items.append((f"d_x d_x T[{i},{j}]", graded_commutator(xi, d)))
    n = _obligations(ctx, pres, items)
    return f"{n} components"


def _c10(ctx: _Ctx) -> str:
    _heavy_guard(ctx)
    P = ctx.P
    pres = ctx.ref("lbasis")
    R, Ri = PolyMatrix.lift(P.R), PolyMatrix.lift(P.Rinv)
    W, Wb = w_matrices(P)
    W1, Wb1 = W.embed1(), Wb.embed1()
    n = 0
    for tag, a, b in (
        ("Wbar-W", _reduced_product(pres, Ri, Wb1, R, W1), _reduced_product(pres, W1, Ri, Wb1, R)),
        ("Wbar-Wbar", _reduced_product(pres, Ri, Wb1, Ri, Wb1), _reduced_product(pres, Wb1, Ri, Wb1, Ri)),
        ("W-W", _reduced_product(pres, Ri, W1, Ri, W1), _reduced_product(pres, W1, Ri, W1, Ri)),
    ):
        n += _obligations(ctx, pres, _matrix_items(tag, a - b))
    return f"{n} components"


def _c11(ctx: _Ctx) -> str:
    _heavy_guard(ctx)
    P = ctx.P
    pres = ctx.ref("lbasis")
    R, Ri = PolyMatrix.lift(P.R), PolyMatrix.lift(P.Rinv)
    W, Wb = w_matrices(P)
    X = _reduced_product(pres, Wb, W).embed1()
    d = _reduced_product(pres, Ri, X, Ri, X) - _reduced_product(pres, X, Ri, X, Ri)
    n = _obligations(ctx, pres, _matrix_items("WbarW", d))
    return f"{n} components"


def _c12(ctx: _Ctx) -> str:
    _heavy_guard(ctx)
    P = ctx.P
    N = ctx.N
    pres = ctx.ref("lbasis")
    W, Wb = w_matrices(P)
    ImL = gens_matrix("ImL", N)
    Ot = traceless(gens_matrix("OmL", N), P)
    rhs = (
        PolyMatrix.identity(N, N, (1 - P.kq).inv())
        - (Ot @ ImL + ImL @ Ot).scale(P.lam)
        + (ImL @ square(Ot) @ ImL).scale(P.lam**2 * (1 - P.kq))
    )
    n = _obligations(ctx, pres, _matrix_items("WbarW expansion", Wb @ W - rhs))
    return f"{n} components"


def _c13(ctx: _Ctx) -> str:
    P = ctx.P
    N = ctx.N
    pres = ctx.ref("swz")
    R, Ri = PolyMatrix.lift(P.R), PolyMatrix.lift(P.Rinv)
    T = gens_matrix("T", N)
    OL = gens_matrix("L", N) @ gens_matrix("Om", N)
    T1, O1 = T.embed1(), OL.embed1()
    n = _obligations(ctx, pres, _matrix_items("T-OmL", T1 @ OL.embed2() - R @ O1 @ Ri @ T1))
    n += _obligations(ctx, pres, _matrix_items("OmL-OmL", R @ O1 @ R @ O1 + O1 @ R @ O1 @ Ri))
    return f"{n} components"


# (code, name, function, needs N >= 2)
CHECKS: Tuple[Tuple[str, str, Callable[[_Ctx], str], bool], ...] = (
    ("C1", "ybe_hecke", _c1, False),
    ("C2", "qtrace_traceless", _c2, False),
    ("C3", "detq_central", _c3, False),
    ("C4", "pbw_overlaps", _c4, False),
    ("C5", "helper_identities", _c5, True),
    ("C6", "fp_embedding", _c6, True),
    ("C7", "omega_x_relation", _c7, True),
    ("C8", "xi_nilpotent", _c8, True),
    ("C9", "leibniz_closure", _c9, True),
    ("C10", "w_relations", _c10, True),
    ("C11", "ww_relation", _c11, True),
    ("C12", "wwbar_identity", _c12, True),
    ("C13", "omegaL_basis_change", _c13, True),
)
_BY_NAME = {key: entry for entry in CHECKS for key in entry[:2]}

SUITES: Dict[str, Tuple[str, ...]] = {
    "all": tuple(c[0] for c in CHECKS),
    "matrix": ("C1", "C2", "C3"),
    "swz": ("C4", "C7", "C8", "C9", "C13"),
    "lbasis": ("C4", "C5", "C10", "C11", "C12"),
    "fp-embed": ("C5", "C6", "C13"),
}

# presentations whose overlaps C4 inspects, per suite
_C4_SCOPE = {
    "all": NAMES,
    "swz": ("frt_T", "swz"),
    "lbasis": ("lbasis",),
}


# -- mutation controls ----------------------------------------------------------


def _mut_kappa(P: Params) -> Params:
    return replace(P, kq=P.kq * P.F.q)


def _mut_rhat(P: Params) -> Params:
    # scale the first lambda entry by q; the inverse keeps the Hecke shortcut form
    N = P.N
    rc = (1, 1) if P.convention == "standard" else min(P.R.entries)
    R = P.R.with_entry(rc, P.R[rc] * P.F.q)
    sign = 1 if P.convention == "standard" else -1
    Rinv = R - ScalarMatrix.identity(R.dim, N).scale(P.lam * sign)
    return replace(P, R=R, Rinv=Rinv)


def _mut_projector(P: Params) -> Params:
    return replace(P, projector=P.projector * P.F.q)


def _mut_ss4(P: Params) -> Params:
    return replace(P, ss4_const=P.ss4_const * P.F.q)


def _mut_weights(P: Params) -> Params:
    w = list(P.weights)
    w[0] = w[0] * P.F.q
    return replace(P, weights=tuple(w))


MUTATIONS: Dict[str, Callable[[Params], Params]] = {
    "kappa": _mut_kappa,
    "rhat": _mut_rhat,
    "projector": _mut_projector,
    "ss4": _mut_ss4,
    "weights": _mut_weights,
}


def mutate(P: Params, name: str) -> Params:
    try:
        return MUTATIONS[name](P)
    except KeyError:
        raise ValueError(f"unknown mutation {name!r}; choose from {', '.join(MUTATIONS)}") from None


# -- runners ------------------------------------------------------------------------


def _run(entry, ctx: _Ctx) -> CheckResult:
    code, name, fn, need2 = entry
    t0 = time.perf_counter()
    res = CheckResult(name, ctx.N, "pass", code=code)
    try:
        if need2 and ctx.N < 2:
            raise _Skip("needs N >= 2")
        check_budget()
        res.detail = fn(ctx)
    except _Fail as f:
        res.status, res.witness, res.detail, res.reason = "fail", f.witness, f.detail, f.reason
    except _Skip as s:
        res.status, res.reason = "skip", str(s)
    except BudgetExceeded as exc:
        res.status, res.reason = "skip", str(exc)
    except NonTerminationError as exc:
        res.status, res.reason = "fail", f"nontermination: {exc}"
        res.witness = Polynomial.const(1, ctx.N)
    except MemoryError:
        _drop_caches()
        res.status, res.reason = "skip", "out of memory"
    res.millis = int((time.perf_counter() - t0) * 1000)
    return res


def _drop_caches():
    from . import presentations

    for pres in presentations._CACHE.values():
        pres.rules.clear_cache()


def _context(N, convention, P, verify, seed, max_degree, heavy, scope) -> _Ctx:
    mutated = P is not None
    if P is None:
        P = params(N, convention)
    elif P.N != N:
        raise ValueError("parameter bundle built for a different N")
    return _Ctx(P, N, verify, seed, max_degree, heavy, tuple(scope), mutated)


def run_check(
    name: str,
    N: int,
    convention: Optional[str] = None,
    *,
    P: Optional[Params] = None,
    verify: bool = True,
    seed: int = 0,
    max_degree: int = 3,
    heavy: bool = False,
    scope: Sequence[str] = NAMES,
    budget: Optional[float] = None,
) -> CheckResult:
    """Run one check by name (``xi_nilpotent``) or code (``C8``)."""
    if name not in _BY_NAME:
        raise ValueError(f"unknown check {name!r}")
    ctx = _context(N, convention, P, verify, seed, max_degree, heavy, scope)
    with time_budget(budget):
        return _run(_BY_NAME[name], ctx)


def run_suite(
    suite: str,
    N: int,
    convention: Optional[str] = None,
    *,
    P: Optional[Params] = None,
    verify: bool = True,
    seed: int = 0,
    max_degree: int = 3,
    heavy: bool = False,
    budget: Optional[float] = None,
) -> List[CheckResult]:
    """Run a suite; results come back in catalog order.

    ``budget`` (seconds) bounds the whole suite; checks that run out of
    time are reported as skipped.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    ctx = _context(N, convention, P, verify, seed, max_degree, heavy, _C4_SCOPE.get(suite, NAMES))
    out = []
    with time_budget(budget):
        for code in SUITES[suite]:
            out.append(_run(_BY_NAME[code], ctx))
    return out


def aggregate_status(results: Sequence[CheckResult]) -> str:
    if any(r.status == "fail" for r in results):
        return "fail"
    if any(r.status == "skip" for r in results):
        return "skip"
    return "pass"


def report(results: Sequence[CheckResult], suite: str, N: int, convention: str, timings: bool = False) -> dict:
    return {
        "schema": "qdc-report/1",
        "suite": suite,
        "N": N,
        "convention": convention,
        "status": aggregate_status(results),
        "checks": [r.to_json(timings) for r in results],
    }
