"""ZF precoding, sensing beams, ISAC transmit covariance, beampatterns and rates.

The signal received by user ``k`` from transmit vector ``x`` is ``h_k^H x``;
the field at a point ``p`` is ``a(p)^H x``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import UserChannel, channel_correlation
from .geometry import ArrayGeometry, PolarPoint, farfield_matrix, nearfield_matrix, check_outside_aperture

NFBF = "NFBF"
FFBF = "FFBF"

MAX_CONDITION = 1e10


class ZFSingularityError(np.linalg.LinAlgError):
    """Stacked user channels are (numerically) rank deficient."""

    def __init__(self, message, correlation, pair):
        super().__init__(message)
        self.correlation = correlation
        self.pair = pair


@dataclass
class Precoder:
    columns: np.ndarray  # (N_t, K), unit-norm columns
    power_allocation: np.ndarray
    model_tag: str = NFBF

    @property
    def num_streams(self) -> int:
        return self.columns.shape[1]


@dataclass
class TransmitCovariance:
    matrix: np.ndarray
    total_power: float


@dataclass
class BeampatternGrid:
    angles: np.ndarray
    ranges: np.ndarray
    power: np.ndarray  # (len(angles), len(ranges)), peak normalised to 1

    def peak(self):
        i, j = np.unravel_index(np.argmax(self.power), self.power.shape)
        return int(i), int(j)


def _stack(channels) -> np.ndarray:
    return np.column_stack([c.vector if isinstance(c, UserChannel) else np.asarray(c) for c in channels])


def zf_precoder(channels, model_tag: str = NFBF, total_power: float = 1.0) -> Precoder:
    """Zero-forcing precoder with unit-norm columns and equal power split.

    Column ``k`` is the normalised ``k``-th column of ``H^H (H H^H)^-1`` where
    the rows of ``H`` are ``h_k^H``.
    """
    Hc = _stack(channels)  # (N_t, K)
    n_t, k = Hc.shape
    if k > n_t:
        raise ValueError(f"{k} users exceed {n_t} transmit elements")
    H = Hc.conj().T
    cond = np.linalg.cond(H)
    if not np.isfinite(cond) or cond >= MAX_CONDITION:
        worst, pair = 0.0, (0, 0)
        for i in range(k):
            for j in range(i + 1, k):
                c = channel_correlation(Hc[:, i], Hc[:, j])
                if c >= worst:
                    worst, pair = c, (i, j)
        raise ZFSingularityError(
            f"ZF undefined: stacked channel condition number {cond:.3g}; "
            f"users {pair[0]} and {pair[1]} have squared correlation {worst:.12f}",
            worst, pair,
        )
    W = H.conj().T @ np.linalg.inv(H @ H.conj().T)
    W = W / np.linalg.norm(W, axis=0)
    return Precoder(W, np.full(k, total_power / k), model_tag)


def sensing_beam(geom: ArrayGeometry, target: PolarPoint, model: str = NFBF) -> np.ndarray:
    """Unit-norm beam towards ``target``: focused (NFBF) or angle-only steering (FFBF)."""
    if model == NFBF:
        check_outside_aperture(geom, target)
        return nearfield_matrix(geom, target.angle, target.range)
    if model == FFBF:
        return farfield_matrix(geom, target.angle)
    raise ValueError(f"unknown beamforming model {model!r}")


def isac_covariance(prec: Precoder, sense, rho: float, total_power: float) -> TransmitCovariance:
    """``(1 - rho) R_comm + rho P s s^H`` with ``R_comm`` the equal-power ZF covariance."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    W = prec.columns
    k = W.shape[1]
    r_comm = (total_power / k) * (W @ W.conj().T)
    s = np.asarray(sense).reshape(-1, 1)
    R = (1 - rho) * r_comm + rho * total_power * (s @ s.conj().T)
    R = 0.5 * (R + R.conj().T)
    return TransmitCovariance(R, float(total_power))


def beampattern(R, geom: ArrayGeometry, angles, ranges) -> BeampatternGrid:
    """Peak-normalised ``a(theta, r)^H R a(theta, r)`` over an angle x range lattice.

    The exact spherical-wave response is used at every lattice point.
    """
    mat = R.matrix if isinstance(R, TransmitCovariance) else np.asarray(R)
    angles = np.asarray(angles, dtype=float)
    ranges = np.asarray(ranges, dtype=float)
    A = nearfield_matrix(geom, angles[:, None], ranges[None, :])  # (Na, Nr, N)
    power = np.sum((A.conj() @ mat) * A, axis=-1).real
    power = np.clip(power, 0.0, None)
    peak = power.max()
    if peak > 0:
        power = power / peak
    return BeampatternGrid(angles, ranges, power)


def default_beampattern_lattice(num_angles: int = 181, num_ranges: int = 60, r_min: float = 1.0,
                                r_max: float = 100.0):
    """Angles (rad) evenly spaced over [-90, 90] deg and log-spaced ranges."""
    return np.radians(np.linspace(-90.0, 90.0, num_angles)), np.logspace(np.log10(r_min), np.log10(r_max), num_ranges)


def sinr_and_rate(channels, prec: Precoder, sense, rho: float, total_power: float, noise_power: float):
    """Per-user SINR and sum-rate (bit/s/Hz) with the sensing stream as interference."""
    if not noise_power > 0:
        raise ValueError(f"noise_power must be > 0, got {noise_power}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    Hc = _stack(channels)
    k = Hc.shape[1]
    p_user = (1 - rho) * total_power / k
    G = np.abs(Hc.conj().T @ prec.columns) ** 2  # G[k, j] = |h_k^H w_j|^2
    s = np.asarray(sense).reshape(-1)
    sense_gain = np.abs(Hc.conj().T @ s) ** 2
    signal = p_user * np.diag(G)
    interference = p_user * (G.sum(axis=1) - np.diag(G)) + rho * total_power * sense_gain
    sinr = signal / (interference + noise_power)
    return sinr, float(np.sum(np.log2(1 + sinr)))
