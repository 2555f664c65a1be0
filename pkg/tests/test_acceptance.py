"""Acceptance criteria A1-A11.

Each test is named ``test_aN_*``; the conftest hook prints one
``AN PASS|FAIL`` line per criterion at the end of the run.
"""

import json
import random
import subprocess
import sys
import time

import pytest

from qdc.battery import MUTATIONS, aggregate_status, mutate, report, run_check, run_suite
from qdc.presentations import params, presentation
from qdc.rewrite import overlap_check
from qdc.scalars import PoleError, eval_at, field, random_point


def passes(code, N, **kw):
    r = run_check(code, N, **kw)
    assert r.status == "pass", (code, N, r.status, r.reason, r.detail)
    return r


def test_a1_ybe_hecke_n1_to_4():
    t0 = time.perf_counter()
    for N in (1, 2, 3, 4):
        passes("C1", N)
    assert time.perf_counter() - t0 < 5


def test_a2_no_degree3_critical_pairs():
    t0 = time.perf_counter()
    for name, N in [("frt_T", 2), ("frt_T", 3), ("swz", 2), ("lbasis", 2), ("fp", 2)]:
        assert overlap_check(presentation(name, N).rules, 3) == [], (name, N)
    passes("C4", 2)
    assert time.perf_counter() - t0 < 300


def test_a3_fp_embedding_n2_and_n3():
    r2 = passes("C6", 2)
    t0 = time.perf_counter()
    r3 = passes("C6", 3)
    assert time.perf_counter() - t0 < 900
    # every component of every family is an obligation
    assert int(r2.detail.split()[0]) > 0 and int(r3.detail.split()[0]) > int(r2.detail.split()[0])


def test_a4_omega_x_and_xi_square_symbolic_x():
    xi = presentation("swz", 2).symbols["XiX"]
    assert any(c.degree_in_x() > 0 for c in xi.terms.values())
    t0 = time.perf_counter()
    passes("C7", 2)
    passes("C8", 2)
    assert time.perf_counter() - t0 < 120


@pytest.mark.parametrize("N", [2, 3])
def test_a5_helper_identities(N):
    passes("C5", N)


def test_a6_inner_identities_n2():
    for code in ("C10", "C11", "C12"):
        passes(code, 2)


def test_a7_detq_central_and_trace_killing():
    for N in (2, 3):
        passes("C3", N)
    for N in (2, 3, 4):
        passes("C2", N)


def test_a8_basis_change_derivation():
    passes("C13", 2)


@pytest.mark.parametrize("mutation", sorted(MUTATIONS))
def test_a9_mutation_sensitivity(mutation):
    res = run_suite("all", 2, P=mutate(params(2), mutation))
    failed = [r for r in res if r.status == "fail"]
    assert failed, mutation
    assert all(r.witness is not None and not r.witness.is_zero() for r in failed)


def test_a10_determinism():
    argv = [sys.executable, "-m", "qdc", "check", "--suite", "all", "--n", "2", "--format", "json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["status"] == "pass"
    # verification re-reduces every obligation under a randomized strategy
    reps = []
    for seed in (0, 1):
        res = run_suite("all", 2, seed=seed, verify=True)
        assert aggregate_status(res) == "pass"
        reps.append(json.dumps(report(res, "all", 2, "standard"), sort_keys=True))
    assert reps[0] == reps[1]


def test_a11_runtime():
    t0 = time.perf_counter()
    assert aggregate_status(run_suite("all", 2)) == "pass"
    assert time.perf_counter() - t0 < 120

    t0 = time.perf_counter()
    rng = random.Random(11)
    F = field(2)
    for _ in range(1000):
        a, b, c = (F.random(rng, max_deg=2, coeff=4) for _ in range(3))
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a + (-a) == F.zero
        if a:
            assert a * a.inv() == F.one
        p0, x0 = random_point(rng)
        try:
            ea, eb = eval_at(a, p0, x0), eval_at(b, p0, x0)
            assert eval_at(a * b, p0, x0) == ea * eb
            assert eval_at(a + b, p0, x0) == ea + eb
        except PoleError:
            pass
    assert time.perf_counter() - t0 < 30
