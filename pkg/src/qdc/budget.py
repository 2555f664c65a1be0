"""Cooperative wall-clock budgets for long reductions."""

from __future__ import annotations

import contextlib
import contextvars
import time

_DEADLINE: contextvars.ContextVar = contextvars.ContextVar("qdc_deadline", default=None)


class BudgetExceeded(RuntimeError):
    pass


@contextlib.contextmanager
def time_budget(seconds):
    """Run the body under a deadline; ``None`` means unlimited. Nested budgets keep the tighter one."""
    if seconds is None:
        yield
        return
    new = time.monotonic() + seconds
    old = _DEADLINE.get()
    token = _DEADLINE.set(new if old is None else min(old, new))
    try:
        yield
    finally:
        _DEADLINE.reset(token)


def check_budget():
    d = _DEADLINE.get()
    if d is not None and time.monotonic() > d:
        raise BudgetExceeded("time budget exceeded")
