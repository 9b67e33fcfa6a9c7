"""Angle-range Cramer-Rao bounds for a point target and 2D-MUSIC localisation."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import maximum_filter

from .beamforming import TransmitCovariance
from .geometry import (ArrayGeometry, PolarPoint, check_outside_aperture, element_distances,
                       nearfield_matrix, rayleigh_distance)

UNIFORM_RANGE = "uniform_range"
INVERSE_RANGE = "inverse_range"
MUSIC_EPS = 1e-12
FIM_MAX_CONDITION = 1e13


class UnidentifiableWarning(RuntimeWarning):
    pass


def focusing_derivatives(geom: ArrayGeometry, p: PolarPoint):
    """Analytic ``(da/dtheta, da/dr)`` of the phase-only focusing vector."""
    check_outside_aperture(geom, p)
    delta = geom.positions
    rn = element_distances(geom, p.angle, p.range)
    a = nearfield_matrix(geom, p.angle, p.range)
    k = 2 * np.pi / geom.wavelength
    drn_dtheta = -p.range * delta * math.cos(p.angle) / rn
    # (r - delta sin) / r_n - 1, rewritten to avoid cancellation at large r
    along = p.range - delta * math.sin(p.angle)
    drn_dr = -((delta * math.cos(p.angle)) ** 2) / (rn * (along + rn))
    return -1j * k * drn_dtheta * a, -1j * k * drn_dr * a


@dataclass
class EchoModel:
    """Monostatic echo ``Y = beta * b(p) a(p)^H X + noise`` over ``snapshots`` samples.

    ``a`` is the transmit response, ``b`` the receive response and the sample
    covariance of ``X`` equals ``tx_covariance``.
    """

    target: PolarPoint
    reflection_gain: complex
    snapshots: int
    noise_power: float
    tx_covariance: TransmitCovariance
    tx_geom: ArrayGeometry
    rx_geom: ArrayGeometry

    def __post_init__(self):
        if self.snapshots < 1:
            raise ValueError("snapshots must be >= 1")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be > 0")


@dataclass
class FimResult:
    fim: np.ndarray  # over (theta, r, Re beta, Im beta)
    rcrb_angle: float  # rad
    rcrb_range: float  # m
    identifiable: bool = True

    @property
    def rcrb_angle_deg(self) -> float:
        return math.degrees(self.rcrb_angle)


def _response_partials(model: EchoModel):
    """Each parameter derivative of ``G = beta b a^H`` as a list of ``(u, v)`` with ``dG = sum u v^H``."""
    beta = complex(model.reflection_gain)
    p = model.target
    a = nearfield_matrix(model.tx_geom, p.angle, p.range)
    b = nearfield_matrix(model.rx_geom, p.angle, p.range)
    a_t, a_r = focusing_derivatives(model.tx_geom, p)
    b_t, b_r = focusing_derivatives(model.rx_geom, p)
    return [
        [(beta * b_t, a), (beta * b, a_t)],
        [(beta * b_r, a), (beta * b, a_r)],
        [(b, a)],
        [(1j * b, a)],
    ]


def fim(model: EchoModel) -> FimResult:
    """Fisher information over ``(theta, r, Re beta, Im beta)`` for a known waveform.

    ``FIM_ij = (2 L / sigma^2) Re tr(dG_i^H dG_j R)``.
    """
    R = model.tx_covariance.matrix if isinstance(model.tx_covariance, TransmitCovariance) else np.asarray(model.tx_covariance)
    parts = _response_partials(model)
    F = np.zeros((4, 4))
    for i in range(4):
        for j in range(i, 4):
            acc = 0j
            for u_s, v_s in parts[i]:
                Rv = R @ v_s
                for u_t, v_t in parts[j]:
                    acc += np.vdot(u_s, u_t) * np.vdot(v_t, Rv)
            F[i, j] = F[j, i] = acc.real
    F *= 2 * model.snapshots / model.noise_power
    eig = np.linalg.eigvalsh(F)
    if eig[0] <= 0 or eig[-1] / eig[0] > FIM_MAX_CONDITION:
        warnings.warn("FIM is singular: angle/range unidentifiable", UnidentifiableWarning, stacklevel=2)
        return FimResult(F, math.inf, math.inf, identifiable=False)
    crb = np.linalg.inv(F)
    return FimResult(F, math.sqrt(crb[0, 0]), math.sqrt(crb[1, 1]))


@dataclass
class PolarGrid:
    angles: np.ndarray
    ranges: np.ndarray
    sampling: str

    @property
    def shape(self):
        return len(self.angles), len(self.ranges)

    def point(self, i: int, j: int) -> PolarPoint:
        return PolarPoint(float(self.angles[i]), float(self.ranges[j]))

    def nearest(self, p: PolarPoint):
        """Lattice indices nearest to ``p`` (angle in sine space, range in 1/r)."""
        i = int(np.argmin(np.abs(np.sin(self.angles) - math.sin(p.angle))))
        j = int(np.argmin(np.abs(1 / self.ranges - 1 / p.range)))
        return i, j


def polar_grid(geom: ArrayGeometry, angle_count: int, range_count: int, r_min: float,
               sampling: str = INVERSE_RANGE, r_max: float | None = None,
               far_field: bool = True) -> PolarGrid:
    """Angle-range search lattice.

    Angles are uniform in ``sin(theta)`` over bin centres of ``(-1, 1)``.
    ``inverse_range`` spaces ``1/r`` uniformly between ``1/r_min`` and
    ``1/r_max`` (the Rayleigh distance by default) and appends ``r = inf``
    when ``far_field``; ``uniform_range`` spaces ``r`` linearly.
    """
    if angle_count < 2 or range_count < 2:
        raise ValueError("angle_count and range_count must be >= 2")
    if r_min <= geom.aperture / 2:
        raise ValueError(f"r_min must exceed the half-aperture {geom.aperture / 2:g} m")
    r_max = rayleigh_distance(geom) if r_max is None else r_max
    if r_max <= r_min:
        raise ValueError("r_max must exceed r_min")
    sines = -1 + (2 * np.arange(angle_count) + 1) / angle_count
    angles = np.arcsin(sines)
    if sampling == INVERSE_RANGE:
        ranges = 1 / np.linspace(1 / r_min, 1 / r_max, range_count)
        ranges[0] = r_min
        if far_field:
            ranges = np.append(ranges, np.inf)
    elif sampling == UNIFORM_RANGE:
        ranges = np.linspace(r_min, r_max, range_count)
    else:
        raise ValueError(f"unknown sampling {sampling!r}")
    return PolarGrid(angles, ranges, sampling)


def simulate_snapshots(geom: ArrayGeometry, sources, snr_db: float, num_snapshots: int,
                       rng: np.random.Generator) -> np.ndarray:
    """Receive snapshots ``sum_k sqrt(N) b(p_k) s_k(t) + n(t)``.

    Source symbols and noise are circular complex Gaussian; ``snr_db`` is the
    per-element, per-source SNR.
    """
    n = geom.num_elements
    B = np.column_stack([nearfield_matrix(geom, p.angle, p.range) for p in sources]) * math.sqrt(n)
    k = B.shape[1]
    sym = (rng.standard_normal((k, num_snapshots)) + 1j * rng.standard_normal((k, num_snapshots))) / math.sqrt(2)
    sigma = math.sqrt(10 ** (-snr_db / 10) / 2)
    noise = sigma * (rng.standard_normal((n, num_snapshots)) + 1j * rng.standard_normal((n, num_snapshots)))
    return B @ sym + noise


def music_spectrum(snapshots, num_sources: int, grid: PolarGrid, geom: ArrayGeometry) -> np.ndarray:
    """Pseudo-spectrum ``1 / (a^H E_n E_n^H a + eps)`` over ``grid``."""
    X = np.asarray(snapshots)
    n_rx, L = X.shape
    if n_rx != geom.num_elements:
        raise ValueError(f"snapshot rows ({n_rx}) differ from array size ({geom.num_elements})")
    if not 0 < num_sources < n_rx:
        raise ValueError(f"num_sources must lie in [1, {n_rx - 1}], got {num_sources}")
    if L < n_rx:
        warnings.warn(f"{L} snapshots for {n_rx} elements: sample covariance is rank deficient",
                      RuntimeWarning, stacklevel=2)
    R = X @ X.conj().T / L
    if not np.any(R):
        raise ValueError("sample covariance is zero")
    _, vecs = np.linalg.eigh(R)
    noise = vecs[:, : n_rx - num_sources]
    A = nearfield_matrix(geom, grid.angles[:, None], grid.ranges[None, :])
    proj = np.abs(A.conj() @ noise) ** 2
    return 1.0 / (proj.sum(axis=-1) + MUSIC_EPS)


def pick_peaks(spectrum: np.ndarray, count: int):
    """Indices of the ``count`` largest 3x3 local maxima, strongest first.

    Ties go to the lower flat index; a candidate inside the 3x3 neighbourhood
    of an already selected peak is skipped.
    """
    S = np.asarray(spectrum)
    local = S >= maximum_filter(S, size=3, mode="constant", cval=-np.inf)
    cand = np.flatnonzero(local)
    order = sorted(cand, key=lambda f: (-S.flat[f], f))
    picked = []
    for f in order:
        i, j = np.unravel_index(f, S.shape)
        if any(abs(i - pi) <= 1 and abs(j - pj) <= 1 for pi, pj in picked):
            continue
        picked.append((int(i), int(j)))
        if len(picked) == count:
            break
    return picked


def music_2d(snapshots, num_sources: int, grid: PolarGrid, geom: ArrayGeometry):
    """2D-MUSIC over an angle-range grid; returns ``(estimates, spectrum)``."""
    spec = music_spectrum(snapshots, num_sources, grid, geom)
    peaks = pick_peaks(spec, num_sources)
    return [grid.point(i, j) for i, j in peaks], spec
