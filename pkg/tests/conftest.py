"""Shared brute-force oracles, kept deliberately independent of the library
internals they check."""

import itertools
import math

import numpy as np
import pytest


def grid_enumerate(basis, R):
    """Exhaustive coefficient-grid oracle for ball enumeration.

    The grid bound comes from the rows of the inverse basis: for any point
    x = B c with ||x|| <= R, |c_i| = |(B^-1 x)_i| <= R * ||row_i(B^-1)||.
    """
    B = np.asarray(basis, dtype=float)
    d = B.shape[0]
    Binv = np.linalg.inv(B)
    bounds = [int(math.floor(R * np.linalg.norm(Binv[i]) + 1e-9)) + 1
              for i in range(d)]
    out = []
    for c in itertools.product(*[range(-b, b + 1) for b in bounds]):
        x = B @ np.array(c, dtype=float)
        if x @ x <= R * R * (1 + 1e-9):
            out.append(tuple(c))
    return sorted(out)


def rank_threshold_minima(basis, fvals_of, R):
    """Independent successive-minima oracle.

    Enumerates the coefficient grid for the ball of radius R, sorts the
    distinct f-values, and reports lambda_i as the smallest value v such
    that the point set {f <= v} has matrix rank >= i (numpy SVD rank, no
    greedy scan involved).
    """
    B = np.asarray(basis, dtype=float)
    d = B.shape[0]
    pts = [c for c in grid_enumerate(B, R) if any(c)]
    coords = np.array([B @ np.array(c, dtype=float) for c in pts])
    fv = np.array([fvals_of(x) for x in coords])
    order = np.argsort(fv)
    values = []
    for v in fv[order]:
        sub = coords[fv <= v * (1 + 1e-12)]
        r = np.linalg.matrix_rank(sub, tol=1e-9 * max(1.0, np.abs(sub).max()))
        while len(values) < r:
            values.append(float(v))
        if len(values) == d:
            break
    return values


def tuple_minima(basis, fvals_of, R):
    """Literal definition oracle: minimize max f over all linearly
    independent i-tuples drawn from the ball enumeration."""
    B = np.asarray(basis, dtype=float)
    d = B.shape[0]
    pts = [c for c in grid_enumerate(B, R) if any(c)]
    coords = {c: B @ np.array(c, dtype=float) for c in pts}
    fv = {c: fvals_of(coords[c]) for c in pts}
    values = []
    for i in range(1, d + 1):
        best = math.inf
        for combo in itertools.combinations(pts, i):
            M = np.array([coords[c] for c in combo])
            if np.linalg.matrix_rank(M, tol=1e-9) < i:
                continue
            best = min(best, max(fv[c] for c in combo))
        values.append(best)
    return values


@pytest.fixture
def rng():
    return np.random.default_rng(20240824)


# one human-readable verdict line per acceptance criterion, echoed after the
# test summary so they are visible without -s
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
