"""
Beam focusing versus beam steering
==================================

Transmit power over the angle-range plane for the communication-only,
balanced and radar-only designs. The near-field design puts one focal spot on
each user; the far-field design cannot separate same-angle users with their
LoS paths and leans on the scattering paths instead.
"""

import numpy as np

from nearfield_isac import experiments as ex
from nearfield_isac import paper_default
from nearfield_isac.sensing import pick_peaks

scenario = paper_default()
grids = ex.beampattern_grids(scenario, rho_list=(0.0, 0.5, 1.0))

for (model, rho), grid in grids.items():
    peaks = pick_peaks(grid.power, 3)
    where = ", ".join(f"({np.degrees(grid.angles[i]):+.0f} deg, {grid.ranges[j]:.1f} m, "
                      f"{10 * np.log10(grid.power[i, j]):.1f} dB)" for i, j in peaks)
    print(f"{model} rho={rho:.1f}: {where}")

###############################################################################
# ``nearfield-isac beampattern --out out/`` writes the same grids as CSV and as
# gnuplot ``matrix nonuniform`` files, e.g.::
#
#   gnuplot> plot 'out/beampattern_nfbf_rho0.00.dat' matrix nonuniform with image
