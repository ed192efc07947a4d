"""Dense two-phase revised simplex for ``min c·x  s.t.  A x = b, x >= 0``.

Sized for desk-scale envelope problems (a few thousand columns, tens of
rows): the basis is re-solved from scratch every iteration, which keeps the
code short and avoids drift in an updated factorisation.  Pricing is
Dantzig's rule; after a run of degenerate pivots it switches to Bland's
rule, which cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class SimplexError(RuntimeError):
    pass


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray
    value: float
    duals: np.ndarray
    basis: np.ndarray
    iterations: int
    history: list[float] = field(default_factory=list)
    dropped_rows: list[int] = field(default_factory=list)


def _iterate(A, b, c, basis, tol, max_iter, history, degenerate_limit=50):
    m, n = A.shape
    it = 0
    stalled = 0
    last = np.inf
    while True:
        B = A[:, basis]
        xb = np.linalg.solve(B, b)
        y = np.linalg.solve(B.T, c[basis])
        obj = float(c[basis] @ xb)
        history.append(obj)
        red = c - A.T @ y
        red[basis] = 0.0
        scale = 1.0 + np.abs(c).max()
        candidates = np.nonzero(red < -tol * scale)[0]
        if candidates.size == 0:
            return "optimal", basis, xb, y, it
        if it >= max_iter:
            return "iteration_limit", basis, xb, y, it
        bland = stalled >= degenerate_limit
        q = int(candidates[0]) if bland else int(candidates[np.argmin(red[candidates])])
        d = np.linalg.solve(B, A[:, q])
        pos = d > tol
        if not pos.any():
            return "unbounded", basis, xb, y, it
        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(xb[pos], 0.0) / d[pos]
        tmin = ratios.min()
        ties = np.nonzero(ratios <= tmin + tol)[0]
        r = int(ties[np.argmin(basis[ties])]) if bland else int(ties[np.argmax(d[ties])])
        basis = basis.copy()
        basis[r] = q
        it += 1
        if obj < last - tol * scale:
            stalled = 0
            last = obj
        else:
            stalled += 1


def solve_standard_form(A, b, c, tol: float = 1e-10, max_iter: int = 20_000) -> SimplexResult:
    """Two-phase simplex.  ``history`` holds the phase-two objective at each iterate."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.array(c, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase one: artificial identity block
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = np.arange(n, n + m)
    status, basis, xb, _, it1 = _iterate(A1, b, c1, basis, tol, max_iter, [])
    if status != "optimal":
        raise SimplexError(f"phase one stopped with status {status}")
    if float(xb @ c1[basis]) > 1e-8 * (1 + np.abs(b).max()):
        return SimplexResult("infeasible", np.zeros(n), np.inf, np.zeros(m), basis, it1)

    # drive artificials out of the basis; rows where that is impossible are redundant
    keep = np.ones(m, dtype=bool)
    for r in range(m):
        if basis[r] < n:
            continue
        B = A1[:, basis]
        row = np.linalg.solve(B.T, np.eye(m)[r]) @ A
        row[basis[basis < n]] = 0.0
        j = int(np.argmax(np.abs(row)))
        if abs(row[j]) > 1e-9:
            basis[r] = j
        else:
            keep[r] = False
    dropped = [int(i) for i in np.nonzero(~keep)[0]]
    A2, b2, basis2 = A[keep], b[keep], basis[keep]

    history: list[float] = []
    status, basis2, xb, y, it2 = _iterate(A2, b2, c, basis2, tol, max_iter, history)
    if status == "unbounded":
        return SimplexResult("unbounded", np.zeros(n), -np.inf, np.zeros(m), basis2, it1 + it2, history, [])
    if status != "optimal":
        raise SimplexError(f"phase two stopped with status {status}")
    x = np.zeros(n)
    x[basis2] = np.maximum(xb, 0.0)
    duals = np.zeros(m)
    duals[np.nonzero(keep)[0]] = y
    duals[neg] *= -1
    return SimplexResult("optimal", x, float(c @ x), duals, basis2, it1 + it2, history, dropped)
