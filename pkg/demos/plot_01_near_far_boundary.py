"""
Where does the near field end?
==============================

The Rayleigh distance ``2 D^2 / lambda`` marks the range at which the
spherical wavefront differs from a plane wave by at most 22.5 degrees across
the aperture. Large arrays at high carrier frequencies push it out to
hundreds of metres.
"""

import math

import numpy as np

from nearfield_isac import ArrayGeometry, PolarPoint, farfield_steering, nearfield_focusing, rayleigh_distance

###############################################################################
# A 7.4 m array at 2.6 GHz, and the 256-element half-wavelength ULA at 30 GHz
# used throughout the other demos.
big = ArrayGeometry(2, 2.6e9, spacing=7.4)
ula = ArrayGeometry(256, 30e9)
print(f"7.4 m @ 2.6 GHz : {rayleigh_distance(big):7.1f} m")
print(f"256 ULA @ 30 GHz: {rayleigh_distance(ula):7.1f} m (aperture {ula.aperture:.3f} m)")

###############################################################################
# Worst-case phase error of the plane-wave model at broadside, as a function
# of range. It is pi/8 exactly at the Rayleigh distance.
for factor in (0.01, 0.1, 1.0, 10.0):
    r = factor * rayleigh_distance(ula)
    near = nearfield_focusing(ula, PolarPoint(0.0, r)).entries
    plane = farfield_steering(ula, 0.0).entries
    err = np.max(np.abs(np.angle(near * plane.conj())))
    print(f"r = {factor:5.2f} x Rayleigh ({r:8.2f} m): max wrapped phase error {math.degrees(err):8.2f} deg")
