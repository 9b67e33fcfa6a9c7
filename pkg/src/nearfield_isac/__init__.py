"""Near- and far-field models for integrated sensing and communication."""

from .geometry import (ArrayGeometry, PolarPoint, ResponseVector, GeometryError, rayleigh_distance,
                       exact_distance, farfield_steering, nearfield_focusing)
from .channel import (PathComponent, UserChannel, MimoChannel, p2p_los_channel, effective_dof,
                      user_channel, channel_correlation)
from .beamforming import (NFBF, FFBF, Precoder, TransmitCovariance, BeampatternGrid, ZFSingularityError,
                          zf_precoder, sensing_beam, isac_covariance, beampattern, sinr_and_rate)
from .sensing import (EchoModel, FimResult, PolarGrid, focusing_derivatives, fim, polar_grid, music_2d)
from .power import PowerProblem, PowerSolution, build_power_problem, min_power, power_sweep
from .scenario import Scenario, ScenarioError, load_scenario, paper_default, build_channels

__version__ = "0.1.0"
