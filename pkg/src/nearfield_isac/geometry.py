"""Uniform linear array geometry and array response vectors.

Conventions shared by the whole package:

* element ``n`` sits at ``delta_n = (n - (N - 1) / 2) * spacing`` on the array
  axis, so the array is centred at the origin;
* angles are measured from broadside, in radians;
* propagation over a distance ``d`` contributes the phase ``exp(-2j*pi*d/lam)``;
* near-field phases are referenced to the distance from the array centre, and
  the plane-wave steering vector is their limit for ``r -> inf``, where
  ``r_n - r -> -delta_n * sin(theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0

FAR_FIELD = "far_field"
NEAR_FIELD_PHASE_ONLY = "near_field_phase_only"
NEAR_FIELD_AMPLITUDE_AWARE = "near_field_amplitude_aware"


class GeometryError(ValueError):
    """Raised when a point or array violates the response-model assumptions."""


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array.

    Parameters
    ----------
    num_elements : int
        Number of antenna elements.
    carrier_freq : float
        Carrier frequency in Hz.
    spacing : float, optional
        Element spacing in metres. Half a wavelength when omitted.
    """

    num_elements: int
    carrier_freq: float
    spacing: float | None = None
    wavelength: float = field(init=False)

    def __post_init__(self):
        if int(self.num_elements) != self.num_elements or self.num_elements < 1:
            raise GeometryError(f"num_elements must be a positive integer, got {self.num_elements}")
        if not self.carrier_freq > 0:
            raise GeometryError(f"carrier_freq must be > 0, got {self.carrier_freq}")
        lam = SPEED_OF_LIGHT / self.carrier_freq
        object.__setattr__(self, "num_elements", int(self.num_elements))
        object.__setattr__(self, "wavelength", lam)
        if self.spacing is None:
            object.__setattr__(self, "spacing", lam / 2)
        elif not self.spacing > 0:
            raise GeometryError(f"spacing must be > 0, got {self.spacing}")

    @property
    def positions(self) -> np.ndarray:
        """Element coordinates along the array axis (metres)."""
        n = np.arange(self.num_elements)
        return (n - (self.num_elements - 1) / 2) * self.spacing

    @property
    def aperture(self) -> float:
        return (self.num_elements - 1) * self.spacing

    def with_elements(self, num_elements: int) -> "ArrayGeometry":
        return ArrayGeometry(num_elements, self.carrier_freq, self.spacing)


@dataclass(frozen=True)
class PolarPoint:
    """Location in the array's polar frame: angle from broadside (rad) and range (m)."""

    angle: float
    range: float

    def __post_init__(self):
        if not (-math.pi / 2 < self.angle <= math.pi / 2):
            raise GeometryError(f"angle must lie in (-pi/2, pi/2], got {self.angle}")
        if not self.range > 0:
            raise GeometryError(f"range must be > 0, got {self.range}")

    @classmethod
    def from_degrees(cls, angle_deg: float, range_m: float) -> "PolarPoint":
        return cls(math.radians(angle_deg), range_m)

    @property
    def angle_deg(self) -> float:
        return math.degrees(self.angle)


@dataclass(frozen=True)
class ResponseVector:
    entries: np.ndarray
    model_tag: str

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __len__(self):
        return len(self.entries)


def rayleigh_distance(geom: ArrayGeometry) -> float:
    """Near/far-field boundary ``2 D^2 / lambda``."""
    return 2 * geom.aperture**2 / geom.wavelength


def exact_distance(geom: ArrayGeometry, element_index: int, p: PolarPoint) -> float:
    if not 0 <= element_index < geom.num_elements:
        raise IndexError(f"element_index {element_index} out of range for {geom.num_elements} elements")
    delta = geom.positions[element_index]
    return math.sqrt(p.range**2 + delta**2 - 2 * p.range * delta * math.sin(p.angle))


def element_distances(geom: ArrayGeometry, angle, range_) -> np.ndarray:
    """Distances from every element to the point(s) ``(angle, range_)``.

    ``angle`` and ``range_`` broadcast against each other; the element axis is
    appended last.
    """
    angle = np.asarray(angle, dtype=float)[..., None]
    range_ = np.asarray(range_, dtype=float)[..., None]
    delta = geom.positions
    return np.sqrt(range_**2 + delta**2 - 2 * range_ * delta * np.sin(angle))


def path_difference(geom: ArrayGeometry, angle, range_, dist=None) -> np.ndarray:
    """``r_n - r`` without the cancellation of subtracting two nearly equal ranges."""
    if dist is None:
        dist = element_distances(geom, angle, range_)
    angle = np.asarray(angle, dtype=float)[..., None]
    range_ = np.asarray(range_, dtype=float)[..., None]
    delta = geom.positions
    return delta * (delta - 2 * range_ * np.sin(angle)) / (dist + range_)


def farfield_matrix(geom: ArrayGeometry, angles) -> np.ndarray:
    """Plane-wave steering vectors, one per angle along the last axis."""
    angles = np.asarray(angles, dtype=float)[..., None]
    phase = 2 * np.pi * geom.positions * np.sin(angles) / geom.wavelength
    return np.exp(1j * phase) / np.sqrt(geom.num_elements)


def nearfield_matrix(geom: ArrayGeometry, angles, ranges, amplitude_aware: bool = False) -> np.ndarray:
    """Unit-norm spherical-wave focusing vectors for broadcast ``(angles, ranges)``.

    Infinite ranges fall back to the plane-wave steering vector. No validity
    check against the aperture is made here; see :func:`nearfield_focusing`.
    """
    angles, ranges = np.broadcast_arrays(np.asarray(angles, float), np.asarray(ranges, float))
    out = np.empty(angles.shape + (geom.num_elements,), dtype=complex)
    inf = np.isinf(ranges)
    if inf.any():
        out[inf] = farfield_matrix(geom, angles[inf])
    fin = ~inf
    if fin.any():
        r = ranges[fin][..., None]
        dist = element_distances(geom, angles[fin], ranges[fin])
        vec = np.exp(-2j * np.pi * path_difference(geom, angles[fin], ranges[fin], dist) / geom.wavelength)
        if amplitude_aware:
            vec = vec * (r / dist)
        out[fin] = vec / np.linalg.norm(vec, axis=-1, keepdims=True)
    return out


def farfield_steering(geom: ArrayGeometry, angle: float) -> ResponseVector:
    return ResponseVector(farfield_matrix(geom, angle), FAR_FIELD)


def check_outside_aperture(geom: ArrayGeometry, p: PolarPoint) -> None:
    if p.range <= geom.aperture / 2:
        raise GeometryError(
            f"range {p.range:g} m lies within the array half-aperture {geom.aperture / 2:g} m; "
            "spherical-wave model is invalid there"
        )


def nearfield_focusing(geom: ArrayGeometry, p: PolarPoint, amplitude_aware: bool = False) -> ResponseVector:
    """Spherical-wave focusing vector towards ``p``.

    Phases are referenced to the range from the array centre. With
    ``amplitude_aware`` each element is additionally weighted by ``r / r_n``
    before normalisation.
    """
    check_outside_aperture(geom, p)
    tag = NEAR_FIELD_AMPLITUDE_AWARE if amplitude_aware else NEAR_FIELD_PHASE_ONLY
    return ResponseVector(nearfield_matrix(geom, p.angle, p.range, amplitude_aware), tag)


def response(geom: ArrayGeometry, p: PolarPoint, model: str, amplitude_aware: bool = False) -> np.ndarray:
    """Response vector of ``p`` under ``model`` ('far_field' or 'near_field')."""
    if model == "far_field":
        return farfield_steering(geom, p.angle).entries
    if model == "near_field":
        return nearfield_focusing(geom, p, amplitude_aware).entries
    raise ValueError(f"unknown response model {model!r}")
