import random

import pytest

from qdc.ncalg import Polynomial, gen_code
from qdc.scalars import field


def random_poly(rng: random.Random, N: int, kinds=("T", "L", "Om", "Im"), max_len=3, n_terms=3, scalars=True):
    F = field(N)
    terms = {}
    for _ in range(n_terms):
        w = tuple(
            gen_code(rng.choice(kinds), rng.randint(1, N), rng.randint(1, N)) for _ in range(rng.randint(0, max_len))
        )
        c = F.random(rng, max_deg=1, coeff=3) if scalars else F(rng.randint(-3, 3))
        if c:
            terms[w] = terms.get(w, F.zero) + c
    return Polynomial({w: c for w, c in terms.items() if c}, N)


def random_homogeneous(rng: random.Random, N: int, parity: int, max_len=3, n_terms=3):
    """Random polynomial whose words all have the given parity."""
    while True:
        p = random_poly(rng, N, max_len=max_len, n_terms=n_terms)
        keep = {w: c for w, c in p.terms.items() if Polynomial({w: c}, N).parity() == parity}
        if keep:
            return Polynomial(keep, N)


@pytest.fixture
def rng():
    return random.Random(20240601)


# -- acceptance summary -------------------------------------------------------

_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_a"):
        return
    if report.when != "call" and not report.failed:
        return
    key = "A" + name[len("test_a") :].split("_", 1)[0]
    ok, secs = _CRITERIA.get(key, (True, 0.0))
    _CRITERIA[key] = (ok and report.passed, secs + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k[1:])):
        ok, secs = _CRITERIA[key]
        terminalreporter.write_line(f"{key} {'PASS' if ok else 'FAIL'} ({secs:.1f}s)")
