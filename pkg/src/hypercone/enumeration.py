"""Depth-first enumeration of word products with an explicit node budget.

Products over long words blow up exponentially, so the enumerators carry the
product in normalized form: a unit-Frobenius 2x2 matrix plus the accumulated
log of the scaling.  The projective action and all derivative/norm statistics
are recoverable from that pair.  Sums over disjoint prefix subtrees combine by
plain addition/min/max, so any partition of the tree may be processed
independently.
"""

from __future__ import annotations

import math
import os

from .errors import BudgetError, ProductOverflowError
from .projective import IfsSystem, op_norm22

DEFAULT_BUDGET = 1 << 22
BUDGET_ENV_VAR = "HYPERCONE_BUDGET"


def enumeration_budget(budget: int | None = None) -> int:
    """Effective leaf budget: explicit argument, then env var, then default."""
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_BUDGET


def check_budget(n_labels: int, depth: int, budget: int | None = None) -> int:
    """Validate that ``n_labels ** depth`` leaves fit in the budget."""
    cap = enumeration_budget(budget)
    leaves = n_labels ** depth
    if leaves > cap:
        raise BudgetError(
            f"{n_labels}^{depth} = {leaves} words exceed the enumeration cap {cap}"
        )
    return leaves


def iter_products(system: IfsSystem, length: int, budget: int | None = None):
    """Yield ``(word, a, b, c, d, log_scale)`` for every word of ``length``.

    Words are visited in lexicographic label order.  The true product is
    ``exp(log_scale)`` times the yielded unit-Frobenius matrix.
    """
    check_budget(system.size(), length, budget)
    labeled = [(lab,) + system.matrices[lab].entries() for lab in system.labels]
    word: list[str] = []

    def rec(a, b, c, d, logs):
        if len(word) == length:
            yield tuple(word), a, b, c, d, logs
            return
        for lab, ma, mb, mc, md in labeled:
            na = a * ma + b * mc
            nb = a * mb + b * md
            nc = c * ma + d * mc
            nd = c * mb + d * md
            f = math.sqrt(na * na + nb * nb + nc * nc + nd * nd)
            word.append(lab)
            yield from rec(na / f, nb / f, nc / f, nd / f, logs + math.log(f))
            word.pop()

    yield from rec(1.0, 0.0, 0.0, 1.0, 0.0)


def iter_products_all_lengths(system: IfsSystem, max_length: int, budget: int | None = None):
    """Yield normalized products at every tree node with 1 <= |word| <= max_length."""
    check_budget(system.size(), max_length, budget)
    labeled = [(lab,) + system.matrices[lab].entries() for lab in system.labels]
    word: list[str] = []

    def rec(a, b, c, d, logs):
        if len(word) == max_length:
            return
        for lab, ma, mb, mc, md in labeled:
            na = a * ma + b * mc
            nb = a * mb + b * md
            nc = c * ma + d * mc
            nd = c * mb + d * md
            f = math.sqrt(na * na + nb * nb + nc * nc + nd * nd)
            na, nb, nc, nd = na / f, nb / f, nc / f, nd / f
            nlogs = logs + math.log(f)
            word.append(lab)
            yield tuple(word), na, nb, nc, nd, nlogs
            yield from rec(na, nb, nc, nd, nlogs)
            word.pop()

    yield from rec(1.0, 0.0, 0.0, 1.0, 0.0)


def iter_raw_products(
    system: IfsSystem,
    length: int,
    budget: int | None = None,
    overflow_cap: float = 1e300,
):
    """Yield ``(word, a, b, c, d)`` with un-normalized products.

    Only safe for modest lengths; raises ProductOverflowError past the cap.
    """
    check_budget(system.size(), length, budget)
    labeled = [(lab,) + system.matrices[lab].entries() for lab in system.labels]
    word: list[str] = []

    def rec(a, b, c, d):
        if len(word) == length:
            yield tuple(word), a, b, c, d
            return
        for lab, ma, mb, mc, md in labeled:
            na = a * ma + b * mc
            nb = a * mb + b * md
            nc = c * ma + d * mc
            nd = c * mb + d * md
            if max(abs(na), abs(nb), abs(nc), abs(nd)) > overflow_cap:
                raise ProductOverflowError("raw product exceeds the entry cap")
            word.append(lab)
            yield from rec(na, nb, nc, nd)
            word.pop()

    yield from rec(1.0, 0.0, 0.0, 1.0)


def log_operator_norm(a: float, b: float, c: float, d: float, logs: float) -> float:
    """log of the operator norm of the true product behind a normalized node."""
    return logs + math.log(op_norm22(a, b, c, d))
