"""Near-field MIMO and multi-user multipath channels, DoF and correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import ArrayGeometry, PolarPoint, farfield_matrix, nearfield_matrix, check_outside_aperture

LINE_OF_SIGHT = "line_of_sight"
SCATTERER = "scatterer"

# minimum angular separation between paths of one user channel
MIN_PATH_SEPARATION = math.radians(0.5)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based (Philox) generator; streams are identical across platforms."""
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True)
class PathComponent:
    location: PolarPoint
    gain: complex
    kind: str = SCATTERER


@dataclass
class UserChannel:
    vector: np.ndarray
    paths: list[PathComponent]
    user_location: PolarPoint
    model: str = "near_field"

    def __len__(self):
        return len(self.vector)


@dataclass
class MimoChannel:
    matrix: np.ndarray
    tx_geom: ArrayGeometry
    rx_geom: ArrayGeometry
    separation: float


def p2p_los_channel(tx: ArrayGeometry, rx: ArrayGeometry, separation: float,
                    amplitude_aware: bool = False) -> MimoChannel:
    """LoS channel between two parallel, broadside-facing ULAs.

    Entry ``(m, n)`` is the propagation phase over the distance from transmit
    element ``n`` to receive element ``m``; both arrays use the transmit
    wavelength.
    """
    if not separation > 0:
        raise ValueError(f"separation must be > 0, got {separation}")
    lam = tx.wavelength
    offsets = rx.positions[:, None] - tx.positions[None, :]
    dist = np.sqrt(separation**2 + offsets**2)
    H = np.exp(-2j * np.pi * dist / lam)
    if amplitude_aware:
        H = H * (separation / dist)
    return MimoChannel(H, tx, rx, float(separation))


def effective_dof(H, threshold_db: float = -20.0) -> int:
    """Number of singular values within ``threshold_db`` (power) of the largest."""
    if threshold_db >= 0:
        raise ValueError("threshold_db must be negative")
    mat = H.matrix if isinstance(H, MimoChannel) else np.asarray(H)
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[0] == 0:
        return 1
    count = int(np.sum(sv**2 >= 10 ** (threshold_db / 10) * sv[0] ** 2))
    return max(1, min(count, min(mat.shape)))


def path_response(geom: ArrayGeometry, location: PolarPoint, model: str,
                  amplitude_aware: bool = False) -> np.ndarray:
    if model == "far_field":
        return farfield_matrix(geom, location.angle)
    if model == "near_field":
        check_outside_aperture(geom, location)
        return nearfield_matrix(geom, location.angle, location.range, amplitude_aware)
    raise ValueError(f"unknown channel model {model!r}")


def assemble(geom: ArrayGeometry, paths, model: str, amplitude_aware: bool = False) -> np.ndarray:
    """``sqrt(N) * sum_l gain_l * a(location_l)``."""
    vec = np.zeros(geom.num_elements, dtype=complex)
    for path in paths:
        vec += path.gain * path_response(geom, path.location, model, amplitude_aware)
    return math.sqrt(geom.num_elements) * vec


def _check_separation(user_loc: PolarPoint, scatterers) -> None:
    angles = [user_loc.angle] + [s.angle for s in scatterers]
    for i in range(len(angles)):
        for j in range(i + 1, len(angles)):
            if abs(angles[i] - angles[j]) < MIN_PATH_SEPARATION:
                raise ValueError(
                    f"paths at {math.degrees(angles[i]):.3f} deg and {math.degrees(angles[j]):.3f} deg "
                    "are closer than 0.5 deg"
                )


def user_channel(geom: ArrayGeometry, user_loc: PolarPoint, scatterers=(), model: str = "near_field",
                 rng_seed: int = 0, scatterer_power_db: float = -10.0,
                 amplitude_aware: bool = False) -> UserChannel:
    """Multipath channel of one single-antenna user.

    The LoS path has unit gain. ``scatterers`` are scatterer locations
    (:class:`PolarPoint`); their gains are drawn complex Gaussian with average
    power ``scatterer_power_db`` relative to LoS from a generator seeded by
    ``rng_seed``.
    """
    scatterers = [s.location if isinstance(s, PathComponent) else s for s in scatterers]
    _check_separation(user_loc, scatterers)
    rng = make_rng(rng_seed)
    scale = math.sqrt(10 ** (scatterer_power_db / 10) / 2)
    draws = rng.standard_normal((len(scatterers), 2)) * scale
    paths = [PathComponent(user_loc, 1.0 + 0j, LINE_OF_SIGHT)]
    paths += [PathComponent(loc, complex(re, im), SCATTERER) for loc, (re, im) in zip(scatterers, draws)]
    return UserChannel(assemble(geom, paths, model, amplitude_aware), paths, user_loc, model)


def rebuild(geom: ArrayGeometry, channel: UserChannel, model: str, amplitude_aware: bool = False) -> UserChannel:
    """Same paths and gains, responses recomputed under ``model``."""
    return replace(channel, vector=assemble(geom, channel.paths, model, amplitude_aware), model=model)


def channel_correlation(h1, h2) -> float:
    """Squared correlation coefficient ``|h1^H h2|^2 / (|h1|^2 |h2|^2)``."""
    a = np.asarray(h1.vector if isinstance(h1, UserChannel) else h1)
    b = np.asarray(h2.vector if isinstance(h2, UserChannel) else h2)
    if a.shape != b.shape:
        raise ValueError(f"channel lengths differ: {a.shape} vs {b.shape}")
    na, nb = np.vdot(a, a).real, np.vdot(b, b).real
    if na == 0 or nb == 0:
        raise ValueError("zero-norm channel")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2 / (na * nb)))


def draw_scatterers(user_locs, per_user: int, rng: np.random.Generator,
                    angle_span_deg=(10.0, 60.0), range_span=(5.0, 50.0),
                    guard_deg: float = 5.0, max_tries: int = 10_000):
    """Scatterer locations for each user with no angular overlap between any paths.

    Angles have magnitude uniform in ``angle_span_deg`` and a random sign;
    every new angle keeps ``guard_deg`` from all paths placed so far,
    including all users' LoS angles.
    """
    taken = [math.degrees(u.angle) for u in user_locs]
    out = []
    for _ in user_locs:
        mine = []
        while len(mine) < per_user:
            for _attempt in range(max_tries):
                mag = rng.uniform(*angle_span_deg)
                ang = mag if rng.random() < 0.5 else -mag
                if all(abs(ang - t) >= guard_deg for t in taken):
                    break
            else:
                raise RuntimeError("could not place scatterers with the requested angular guard")
            rng_m = rng.uniform(*range_span)
            taken.append(ang)
            mine.append(PolarPoint.from_degrees(ang, rng_m))
        out.append(mine)
    return out


def write_channels_csv(path, channels) -> None:
    """One row per (user, element): ``user,element,re,im``."""
    with open(path, "w", newline="") as fh:
        fh.write("user,element,re,im\n")
        for k, ch in enumerate(channels):
            vec = ch.vector if isinstance(ch, UserChannel) else np.asarray(ch)
            for n, z in enumerate(vec):
                fh.write(f"{k},{n},{z.real:.9g},{z.imag:.9g}\n")
