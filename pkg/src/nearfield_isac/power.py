"""Minimum transmit power under per-user SINR targets and a target illumination floor.

Beam directions are fixed (ZF for users, a sensing beam for the target); only
the stream powers are optimised, which makes the problem a small LP.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .beamforming import NFBF, FFBF, sensing_beam, zf_precoder
from .channel import UserChannel
from .geometry import ArrayGeometry, PolarPoint, nearfield_matrix

FEAS_TOL = 1e-9


@dataclass
class PowerProblem:
    """``gain_matrix[k, j] = |h_k^H w_j|^2`` for users ``k``; the last row is the target.

    Columns are the user streams followed by the sensing stream.
    """

    gain_matrix: np.ndarray
    sinr_threshold: float
    target_power_floor: float
    noise_power: float

    def __post_init__(self):
        G = np.asarray(self.gain_matrix, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("gain_matrix must be square (K+1 x K+1)")
        if np.any(G < 0):
            raise ValueError("gains must be non-negative")
        if np.any(np.diag(G)[:-1] <= 0):
            raise ValueError("direct user gains must be positive")
        if self.sinr_threshold < 0 or self.target_power_floor < 0 or not self.noise_power > 0:
            raise ValueError("need sinr_threshold >= 0, target_power_floor >= 0 and noise_power > 0")
        self.gain_matrix = G

    @property
    def num_users(self) -> int:
        return self.gain_matrix.shape[0] - 1

    def constraint_system(self):
        """``A p >= b`` rows: one per user SINR, then the target floor."""
        G, g = self.gain_matrix, self.sinr_threshold
        K = self.num_users
        A = np.empty_like(G)
        b = np.empty(K + 1)
        for k in range(K):
            A[k] = -g * G[k]
            A[k, k] = G[k, k]
            b[k] = g * self.noise_power
        A[K] = G[K]
        b[K] = self.target_power_floor
        return A, b

    def sinr(self, powers) -> np.ndarray:
        p = np.asarray(powers, dtype=float)
        G = self.gain_matrix[:-1]
        sig = np.diag(G[:, :-1]) * p[:-1]
        return sig / (G @ p - sig + self.noise_power)

    def target_power(self, powers) -> float:
        return float(self.gain_matrix[-1] @ np.asarray(powers, dtype=float))


@dataclass
class PowerSolution:
    powers: np.ndarray
    total: float
    feasible: bool
    binding: list = field(default_factory=list)
    certificate: dict | None = None


def build_power_problem(channels, geom: ArrayGeometry, target: PolarPoint, model: str,
                        gamma: float, floor: float, sigma2: float, true_channels=None) -> PowerProblem:
    """Gain matrix for fixed ZF user beams and a sensing beam.

    ``channels`` are the design channels (far-field ones for FFBF). Gains
    are always measured on ``true_channels`` (defaulting to ``channels``) and
    on the exact near-field response of the target.
    """
    true_channels = channels if true_channels is None else true_channels
    W = zf_precoder(channels, model).columns
    s = sensing_beam(geom, target, model)
    beams = np.column_stack([W, s])
    H = np.column_stack([c.vector if isinstance(c, UserChannel) else np.asarray(c) for c in true_channels])
    rows = np.column_stack([H, nearfield_matrix(geom, target.angle, target.range)])
    G = np.abs(rows.conj().T @ beams) ** 2
    return PowerProblem(G, gamma, floor, sigma2)


def _infeasibility_certificate(prob: PowerProblem) -> dict:
    K = prob.num_users
    G = prob.gain_matrix
    D = np.diag(G)[:K]
    F = G[:K, :K] - np.diag(D)
    rho = float(np.max(np.abs(np.linalg.eigvals(prob.sinr_threshold * F / D[:, None])))) if K else 0.0
    row = int(np.argmax(prob.sinr_threshold * F.sum(axis=1) / D)) if K else 0
    return {"spectral_radius": rho, "row": row}


def min_power(prob: PowerProblem) -> PowerSolution:
    """Exact LP solve by enumerating vertices of ``{p >= 0, A p >= b}``.

    The objective ``sum(p)`` is bounded below on the non-negative orthant, so
    a feasible problem attains its optimum at a vertex: a point where ``n``
    linearly independent constraints hold with equality.
    """
    A, b = prob.constraint_system()
    n = A.shape[1]
    rows = np.vstack([A, np.eye(n)])
    rhs = np.concatenate([b, np.zeros(n)])
    norms = np.linalg.norm(rows, axis=1)
    usable = np.flatnonzero(norms > 0)
    best = None
    for active in itertools.combinations(usable, n):
        idx = list(active)
        sub = rows[idx] / norms[idx, None]
        if np.linalg.cond(sub) > 1e12:
            continue
        p = np.linalg.solve(sub, rhs[idx] / norms[idx])
        slack = rows @ p - rhs
        if np.all(slack >= -FEAS_TOL * (np.abs(rows) @ np.abs(p) + np.abs(rhs))):
            total = float(p.sum())
            if best is None or total < best[0]:
                best = (total, np.clip(p, 0.0, None))
    if best is None:
        return PowerSolution(np.full(n, np.nan), math.inf, False, [], _infeasibility_certificate(prob))
    total, p = best
    resid = A @ p - b
    tol = 1e-9 * np.maximum(1.0, np.abs(b))
    labels = [f"sinr[{k}]" for k in range(n - 1)] + ["target"]
    binding = [lab for lab, r, t in zip(labels, resid, tol) if abs(r) <= t]
    return PowerSolution(p, float(p.sum()), True, binding)


def power_sweep(channels, geom: ArrayGeometry, target: PolarPoint, gamma_db_list, model: str,
                floor: float, sigma2: float, true_channels=None):
    """``[(gamma_db, total_power, feasible)]`` with one LP per threshold."""
    out = []
    for g_db in gamma_db_list:
        prob = build_power_problem(channels, geom, target, model, 10 ** (g_db / 10), floor, sigma2, true_channels)
        sol = min_power(prob)
        out.append((float(g_db), sol.total, sol.feasible))
    return out
