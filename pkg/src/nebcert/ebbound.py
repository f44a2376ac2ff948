"""Witness assembly and the payoff bound over entanglement-breaking channels.

The bound is d^2 * max over separable two-qubit states of tr[W omega] with
W built from the transposed question states. The objective is linear in
omega, so the maximum sits at a pure product state; since transposition is
a bijection on pure qubit states (a Bloch y-flip), optimizing over plain
product states a x b gives the same value as over transposed ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .game import PayoffTable
from .qubit import I2, PAULIS, from_bloch, to_bloch

DEFAULT_RESTARTS = 64
DEFAULT_TOL = 1e-10
MAX_ITERATIONS = 500


def build_witness(table: PayoffTable) -> np.ndarray:
    """W = sum_xy payoff(x, y) xi_x^T kron psi_y^T; Hermitian 4x4."""
    w = np.zeros((4, 4), dtype=complex)
    for ix, iy, _, _, v in table.nonzero_items():
        w += v * np.kron(table.xi_states[ix].T, table.psi_states[iy].T)
    return w


@dataclass(frozen=True)
class EBBoundResult:
    """Separable-payoff bound with the optimizing product state."""

    value: float
    argmax_a: tuple
    argmax_b: tuple
    restarts: int
    converged: bool
    method: str = "multistart"

    def to_record(self) -> dict:
        return {
            "value": self.value,
            "argmax_a": list(self.argmax_a),
            "argmax_b": list(self.argmax_b),
            "restarts": self.restarts,
            "converged": self.converged,
        }


class ConvergenceError(RuntimeError):
    """No restart converged within the iteration cap; carries the best result."""

    def __init__(self, best: EBBoundResult):
        super().__init__(
            f"separable-bound ascent did not converge within {MAX_ITERATIONS} iterations")
        self.best = best


def _bilinear_coefficients(w: np.ndarray):
    """Real Bloch-form coefficients of tr[W (a x b)].

    With a = (I + r.sigma)/2 and b = (I + s.sigma)/2,
    4 tr[W (a x b)] = c0 + u.r + v.s + r^T T s.
    """
    c0 = np.trace(w).real
    u = np.array([np.trace(w @ np.kron(p, I2)).real for p in PAULIS])
    v = np.array([np.trace(w @ np.kron(I2, p)).real for p in PAULIS])
    t = np.array([[np.trace(w @ np.kron(pi, pj)).real for pj in PAULIS] for pi in PAULIS])
    return c0, u, v, t


def _top_eigstate(op: np.ndarray):
    vals, vecs = np.linalg.eigh(op)
    vec = vecs[:, -1]
    return float(vals[-1]), np.outer(vec, vec.conj())


def _random_bloch(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def eb_bound(table: PayoffTable, restarts: int = DEFAULT_RESTARTS,
             tol: float = DEFAULT_TOL, seed: int = 0) -> EBBoundResult:
    """Alternating eigenvector ascent for 4 * max_{a,b pure} tr[W (a x b)].

    For fixed a the objective is linear in b, so the optimal b is the top
    eigenvector of the conditioned single-qubit operator, and vice versa;
    each sweep is monotone non-decreasing. Restarts draw independent initial
    Bloch vectors from a seeded generator, so results are reproducible.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    w4 = build_witness(table).reshape(2, 2, 2, 2)
    rng = np.random.default_rng(seed)
    starts = [_random_bloch(rng) for _ in range(restarts)]

    best_val = -np.inf
    best_a = best_b = None
    any_converged = False
    all_converged = True
    for r0 in starts:
        a = from_bloch(r0)
        b = a
        val = float(np.einsum("ikjl,ji,lk->", w4, a, b).real)
        converged = False
        for _ in range(MAX_ITERATIONS):
            # conditioned operator on the second qubit for fixed a, then vice versa
            m_b = np.einsum("ikjl,ji->kl", w4, a)
            _, b = _top_eigstate(m_b)
            m_a = np.einsum("ikjl,lk->ij", w4, b)
            new_val, a = _top_eigstate(m_a)
            if new_val - val < tol:
                val = new_val
                converged = True
                break
            val = new_val
        any_converged = any_converged or converged
        all_converged = all_converged and converged
        if val > best_val:
            best_val = val
            best_a, best_b = a, b

    result = EBBoundResult(
        value=4.0 * best_val,
        argmax_a=tuple(to_bloch(best_a)),
        argmax_b=tuple(to_bloch(best_b)),
        restarts=restarts,
        converged=all_converged,
    )
    if not any_converged:
        raise ConvergenceError(result)
    return result


def eb_bound_oracle(table: PayoffTable, grid_n: int = 60) -> float:
    """Brute-force check: exhaustive scan over a product Bloch-sphere grid.

    Returns 4 * max over a (theta, phi) x (theta, phi) grid; undershoots the
    true bound by at most the discretization slack, O(1/grid_n) near a smooth
    maximum.
    """
    if grid_n < 20:
        raise ValueError("grid_n must be >= 20")
    c0, u, v, t = _bilinear_coefficients(build_witness(table))
    theta = np.linspace(0.0, np.pi, grid_n)
    phi = np.linspace(0.0, 2.0 * np.pi, grid_n, endpoint=False)
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    pts = np.stack([np.sin(tt) * np.cos(pp),
                    np.sin(tt) * np.sin(pp),
                    np.cos(tt)], axis=-1).reshape(-1, 3)

    lin_b = pts @ v                       # (N,)
    cross = pts @ t                        # (N, 3), rows indexed by a-grid
    best = -np.inf
    chunk = 2048
    for i in range(0, pts.shape[0], chunk):
        block = c0 + (pts[i:i + chunk] @ u)[:, None] + lin_b[None, :] \
            + cross[i:i + chunk] @ pts.T
        best = max(best, float(block.max()))
    return best
