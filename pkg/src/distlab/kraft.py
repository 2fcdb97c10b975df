"""Minimal total variation between convex hulls of two finite families.

The minimal TV over mixtures, ``min_{p, q} 1/2 |F0 p - F1 q|_1``, is a linear
program.  Its saddle form

    min_{p, q in simplex}  max_{|y|_inf <= 1/2}  y . (F0 p - F1 q)

gives a lower bound for every ``y``:
``min_i (F0^T y)_i - max_j (F1^T y)_j``.  Every result carries the gap between
the value at the returned weights and the best such lower bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import optimize, sparse

from . import partition
from .errors import DimensionError, NoSeparation, SolverNotConverged
from .measures import DensityFamily

LP_SIZE_LIMIT = 2_000_000


@dataclass
class HullDistanceResult:
    value: float
    weights0: np.ndarray
    weights1: np.ndarray
    iterations: int
    gap_bound: float
    method: str = "lp"

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "weights0": [float(x) for x in self.weights0],
            "weights1": [float(x) for x in self.weights1],
            "iterations": self.iterations,
            "gap_bound": self.gap_bound,
            "method": self.method,
        }


class VerdictKind(str, Enum):
    INDISTINGUISHABLE = "IndistinguishableCertificate"
    SEPARATION = "SeparationCertificate"
    UNKNOWN = "Unknown"


@dataclass
class Verdict:
    kind: VerdictKind
    hull: HullDistanceResult | None
    threshold: float
    separation: partition.SeparationResult | None = None
    test: partition.PartitionTestSpec | None = None
    notes: list = field(default_factory=list)

    @property
    def evidence(self):
        return self.test if self.kind is VerdictKind.SEPARATION else self.hull

    @property
    def distinguishable(self) -> bool:
        return self.kind is VerdictKind.SEPARATION

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "threshold": self.threshold}
        if self.hull is not None:
            out.update(value=self.hull.value,
                       weights0=[float(x) for x in self.hull.weights0],
                       weights1=[float(x) for x in self.hull.weights1],
                       gap_bound=self.hull.gap_bound)
        if self.test is not None:
            out["separation_gap"] = self.separation.gap
            out["test"] = self.test.to_json()
        if self.notes:
            out["notes"] = list(self.notes)
        return out


@dataclass
class CertifyConfig:
    indist_threshold: float = 0.05
    tol: float = 1e-9
    max_k: int = 4
    max_resolution: int | None = None
    max_iter: int = 2000


def _tv(m0, m1, p, q) -> float:
    return 0.5 * math.fsum(np.abs(m0 @ p - m1 @ q))


def dual_lower_bound(m0: np.ndarray, m1: np.ndarray, y: np.ndarray) -> float:
    """Lower bound on the hull distance from a dual vector (clipped to the box)."""
    y = np.clip(y, -0.5, 0.5)
    return float((m0.T @ y).min() - (m1.T @ y).max())


def _simplex_projection(v: np.ndarray) -> np.ndarray:
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    return np.maximum(v - css[rho] / (rho + 1.0), 0.0)


def _normalize(w):
    w = np.maximum(np.asarray(w, dtype=np.float64), 0.0)
    return w / w.sum()


def _solve_lp(m0, m1):
    n, a = m0.shape
    b = m1.shape[1]
    eye = sparse.identity(n, format="csr")
    k = sparse.hstack([sparse.csr_matrix(m0), sparse.csr_matrix(-m1)])
    a_ub = sparse.vstack([sparse.hstack([k, -eye]), sparse.hstack([-k, -eye])]).tocsr()
    a_eq = sparse.csr_matrix(np.vstack([
        np.r_[np.ones(a), np.zeros(b + n)],
        np.r_[np.zeros(a), np.ones(b), np.zeros(n)],
    ]))
    c = np.r_[np.zeros(a + b), np.full(n, 0.5)]
    res = optimize.linprog(
        c, A_ub=a_ub, b_ub=np.zeros(2 * n), A_eq=a_eq, b_eq=[1.0, 1.0],
        bounds=(0, None), method="highs",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    p, q = _normalize(res.x[:a]), _normalize(res.x[a:a + b])
    marg = -res.ineqlin.marginals
    y = marg[:n] - marg[n:]
    return p, q, y, int(getattr(res, "nit", 0) or 0)


def _solve_first_order(m0, m1, tol, max_iter, decide_at=None):
    """Primal-dual hybrid gradient on the saddle form, tracking the best bounds.

    With ``decide_at`` set, iteration also stops as soon as the certified
    interval [lower, upper] lies on one side of that value.
    """
    n, a = m0.shape
    b = m1.shape[1]
    # power iteration for the spectral norm of K = [F0, -F1]
    v0, v1 = np.ones(a) / math.sqrt(a + b), np.ones(b) / math.sqrt(a + b)
    norm = 1.0
    for _ in range(50):
        u = m0 @ v0 - m1 @ v1
        w0, w1 = m0.T @ u, -(m1.T @ u)
        wn = math.sqrt(float(w0 @ w0 + w1 @ w1))
        norm = math.sqrt(wn)
        v0, v1 = w0 / wn, w1 / wn
    step = 0.99 / max(norm, 1e-12)
    p, q = np.full(a, 1.0 / a), np.full(b, 1.0 / b)
    y = np.zeros(n)
    p_bar, q_bar = p.copy(), q.copy()
    best_val, best_p, best_q = _tv(m0, m1, p, q), p.copy(), q.copy()
    best_lb = dual_lower_bound(m0, m1, y)
    it = 0
    for it in range(1, max_iter + 1):
        if best_val - best_lb <= tol:
            break
        if decide_at is not None and (best_val <= decide_at or best_lb > decide_at):
            break
        y = np.clip(y + step * (m0 @ p_bar - m1 @ q_bar), -0.5, 0.5)
        p_new = _simplex_projection(p - step * (m0.T @ y))
        q_new = _simplex_projection(q + step * (m1.T @ y))
        p_bar, q_bar = 2 * p_new - p, 2 * q_new - q
        p, q = p_new, q_new
        val = _tv(m0, m1, p, q)
        if val < best_val:
            best_val, best_p, best_q = val, p.copy(), q.copy()
        best_lb = max(best_lb, dual_lower_bound(m0, m1, y))
    return best_p, best_q, best_val, max(best_val - best_lb, 0.0), it


def hull_min_tv(f0: DensityFamily, f1: DensityFamily, tol: float = 1e-9,
                method: str = "auto", max_iter: int = 2000,
                decide_at: float | None = None) -> HullDistanceResult:
    """Minimal total variation between the convex hulls of two families.

    Parameters
    ----------
    f0, f1 : DensityFamily
        Families on a common grid.
    tol : float
        Required certified optimality gap.
    method : {"auto", "lp", "first-order"}
        ``"lp"`` solves the exact linear program (one auxiliary variable per
        cell); ``"first-order"`` runs a primal-dual method suited to large
        families.  ``"auto"`` picks the LP unless the constraint matrix is large.
    max_iter : int
        Iteration cap for the first-order method.
    decide_at : float, optional
        Lets the first-order method stop once the certified interval lies on
        one side of this value; ``gap_bound`` then reports the remaining gap.

    Raises
    ------
    SolverNotConverged
        When the certified gap is still above ``tol``.  The exception carries
        the best weights found and their value.
    """
    if f0.n_cells != f1.n_cells:
        raise DimensionError("families live on different grids")
    if not tol > 0:
        raise ValueError("tol must be positive")
    m0, m1 = f0.matrix.T, f1.matrix.T
    if method == "auto":
        method = "lp" if m0.shape[0] * (m0.shape[1] + m1.shape[1]) <= LP_SIZE_LIMIT else "first-order"
    if method == "lp":
        p, q, y, iters = _solve_lp(m0, m1)
        value = _tv(m0, m1, p, q)
        gap = max(value - dual_lower_bound(m0, m1, y), 0.0)
    elif method == "first-order":
        p, q, value, gap, iters = _solve_first_order(m0, m1, tol, max_iter, decide_at)
    else:
        raise ValueError(f"unknown method {method!r}")
    decided = decide_at is not None and (value <= decide_at or value - gap > decide_at)
    if gap > tol and not decided:
        raise SolverNotConverged(
            f"hull solver stopped with certified gap {gap:.3g} > tol {tol:.3g}",
            value=value, gap=gap, weights0=p, weights1=q, iterations=iters)
    return HullDistanceResult(value, p, q, iters, gap, method)


def kraft_lower_bound(f0: DensityFamily, f1: DensityFamily, tol: float = 1e-9) -> float:
    """Lower bound on alpha + beta for any test based on a single observation.

    The TV of any feasible mixture pair upper-bounds the hull distance, so an
    unconverged solve still yields a valid (if looser) bound.
    """
    try:
        value = hull_min_tv(f0, f1, tol).value
    except SolverNotConverged as exc:
        value = exc.value
    return max(0.0, 1.0 - value)


def certify(f0: DensityFamily, f1: DensityFamily, config: CertifyConfig | None = None) -> Verdict:
    """Indistinguishability certificate, separation certificate, or Unknown."""
    config = config or CertifyConfig()
    notes = []
    try:
        hull = hull_min_tv(f0, f1, config.tol, max_iter=config.max_iter,
                           decide_at=config.indist_threshold)
    except SolverNotConverged as exc:
        # the best feasible value still upper-bounds the hull distance
        hull = HullDistanceResult(exc.value, exc.weights0, exc.weights1,
                                  exc.iterations, exc.gap, "first-order")
        notes.append(f"hull solver not converged (gap {exc.gap:.3g}); value is an upper bound")
    if hull.value <= config.indist_threshold:
        return Verdict(VerdictKind.INDISTINGUISHABLE, hull, config.indist_threshold, notes=notes)
    try:
        sep = partition.find_separating_sets(f0, f1, config.max_k, config.max_resolution)
        test = partition.build_test_from_families(f0, f1, sep.sets)
    except NoSeparation as exc:
        notes.append(str(exc))
        return Verdict(VerdictKind.UNKNOWN, hull, config.indist_threshold, notes=notes)
    return Verdict(VerdictKind.SEPARATION, hull, config.indist_threshold, sep, test, notes)
