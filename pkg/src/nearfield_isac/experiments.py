"""Reproducible experiment runners for the DoF, correlation, beampattern,
trade-off, power and MUSIC studies.

Each runner is a pure function of ``(scenario, grids)`` and returns a list of
:class:`Table` objects; :func:`render` turns a table into CSV text.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import beamforming as bf
from .channel import channel_correlation, effective_dof, make_rng, p2p_los_channel, user_channel
from .geometry import PolarPoint, rayleigh_distance
from .power import power_sweep
from .scenario import Scenario, build_channels
from .sensing import EchoModel, fim, music_2d, polar_grid, simulate_snapshots

DB_FLOOR = -200.0


@dataclass
class Table:
    name: str
    columns: tuple
    rows: list
    kind: str = "csv"  # or "gnuplot"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.9g}"


def render(table: Table, scenario: Scenario) -> str:
    """CSV text with a provenance comment line (seed, scenario digest) and a header."""
    lines = [f"# seed={scenario.rng_seed} scenario={scenario.digest()}"]
    if table.kind == "gnuplot":
        lines += ["# " + " ".join(table.columns)]
        lines += [" ".join(_fmt(v) for v in row) for row in table.rows]
    else:
        lines.append(",".join(table.columns))
        lines += [",".join(_fmt(v) for v in row) for row in table.rows]
    return "\n".join(lines) + "\n"


def _db(x):
    return 10 * math.log10(x) if x > 0 else DB_FLOOR


def _max_db(x):
    return max(_db(x), DB_FLOOR)


# -- figure 1 ---------------------------------------------------------------

def default_distance_grid(s: Scenario, count: int = 30) -> np.ndarray:
    return np.logspace(0, math.log10(10 * rayleigh_distance(s.tx_geom)), count)


def run_fig1_dof(s: Scenario, distance_grid=None):
    tx, rx = s.tx_geom, s.rx_geom
    grid = default_distance_grid(s) if distance_grid is None else np.asarray(distance_grid, float)
    rd = rayleigh_distance(tx)
    rows = []
    for d in grid:
        H = p2p_los_channel(tx, rx, float(d), s.amplitude_aware)
        rows.append((float(d), effective_dof(H, s.dof_threshold_db), rd, d >= rd))
    return [Table("dof", ("distance_m", "dof", "rayleigh_distance_m", "beyond_rayleigh"), rows)]


# -- figure 2 ---------------------------------------------------------------

def run_fig2_correlation(s: Scenario, antenna_grid=(16, 32, 64, 128, 256, 512)):
    """Squared correlation of the first two users' LoS-only channels versus array size."""
    if len(s.users) < 2:
        raise ValueError("correlation needs at least two users")
    u1, u2 = s.users[0].location, s.users[1].location
    rows = []
    for n in antenna_grid:
        geom = s.tx_geom.with_elements(int(n))
        plane = channel_correlation(user_channel(geom, u1, (), "far_field"), user_channel(geom, u2, (), "far_field"))
        sph = channel_correlation(user_channel(geom, u1, (), "near_field", amplitude_aware=s.amplitude_aware),
                                  user_channel(geom, u2, (), "near_field", amplitude_aware=s.amplitude_aware))
        rows.append((int(n), plane, sph))
    return [Table("correlation", ("num_antennas", "corr_plane", "corr_spherical"), rows)]


# -- shared ISAC design -----------------------------------------------------

def design(s: Scenario, model: str, target: PolarPoint | None = None):
    """ZF precoder (designed on the model's channels) and sensing beam."""
    target = s.target.location if target is None else target
    chan_model = "near_field" if model == bf.NFBF else "far_field"
    prec = bf.zf_precoder(build_channels(s, chan_model), model, s.total_power)
    sense = bf.sensing_beam(s.tx_geom, target, model)
    return prec, sense


# -- figure 3 ---------------------------------------------------------------

def beampattern_grids(s: Scenario, rho_list=(0.0, 0.5, 1.0), model_list=(bf.NFBF, bf.FFBF), lattice=None):
    angles, ranges = bf.default_beampattern_lattice() if lattice is None else lattice
    out = {}
    for model in model_list:
        prec, sense = design(s, model)
        for rho in rho_list:
            R = bf.isac_covariance(prec, sense, rho, s.total_power)
            out[(model, float(rho))] = bf.beampattern(R, s.tx_geom, angles, ranges)
    return out


def run_fig3_beampattern(s: Scenario, rho_list=(0.0, 0.5, 1.0), model_list=(bf.NFBF, bf.FFBF), lattice=None):
    tables = []
    for (model, rho), grid in beampattern_grids(s, rho_list, model_list, lattice).items():
        stem = f"beampattern_{model.lower()}_rho{rho:.2f}"
        deg = np.degrees(grid.angles)
        rows = [(deg[i], grid.ranges[j], _max_db(grid.power[i, j]))
                for i in range(len(deg)) for j in range(len(grid.ranges))]
        tables.append(Table(stem, ("angle_deg", "range_m", "power_db"), rows))
        # gnuplot "matrix nonuniform": first row = count + x values, then y + z values
        mat = [(len(deg), *deg)]
        mat += [(grid.ranges[j], *[_max_db(grid.power[i, j]) for i in range(len(deg))])
                for j in range(len(grid.ranges))]
        tables.append(Table(stem, ("matrix nonuniform: x=angle_deg y=range_m z=power_db",), mat, "gnuplot"))
    return tables


# -- figure 4 ---------------------------------------------------------------

def tradeoff_points(s: Scenario, model: str, rho_grid, target_range: float):
    target = PolarPoint(s.target.location.angle, float(target_range))
    true_channels = build_channels(s, "near_field")
    prec, sense = design(s, model, target)
    pts = []
    for rho in rho_grid:
        R = bf.isac_covariance(prec, sense, float(rho), s.total_power)
        sinr, rate = bf.sinr_and_rate(true_channels, prec, sense, float(rho), s.total_power, s.noise_power)
        res = fim(EchoModel(target, s.reflection_gain, s.sensing_snapshots, s.echo_noise_power, R,
                            s.tx_geom, s.rx_geom))
        pts.append((float(rho), rate, res.rcrb_angle, res.rcrb_range, sinr))
    return pts


def run_fig4_tradeoff(s: Scenario, rho_grid=None, target_ranges=(5.0, 10.0, 20.0)):
    rho_grid = np.round(np.linspace(0, 1, 11), 10) if rho_grid is None else rho_grid
    rows, sinr_rows = [], []
    for model in (bf.NFBF, bf.FFBF):
        for r in target_ranges:
            for rho, rate, ang, rng, sinr in tradeoff_points(s, model, rho_grid, r):
                rows.append((rho, rate, math.degrees(ang), rng, model, float(r)))
                sinr_rows += [(rho, model, float(r), k, _max_db(x)) for k, x in enumerate(sinr)]
    cols = ("rho", "rate_bps_hz", "rcrb_angle_deg", "rcrb_range_m", "model_tag", "target_range_m")
    return [Table("tradeoff", cols, rows),
            Table("sinr", ("rho", "model_tag", "target_range_m", "user", "sinr_db"), sinr_rows)]


# -- figure 5 ---------------------------------------------------------------

def power_tables(s: Scenario, gamma_db_list=None):
    gammas = s.gamma_db_list if gamma_db_list is None else gamma_db_list
    nf = build_channels(s, "near_field")
    ff = build_channels(s, "far_field")
    target = s.target.location
    a = power_sweep(nf, s.tx_geom, target, gammas, bf.NFBF, s.gamma_floor, s.noise_power)
    b = power_sweep(ff, s.tx_geom, target, gammas, bf.FFBF, s.gamma_floor, s.noise_power, nf)
    return a, b


def run_fig5_power(s: Scenario, gamma_db_list=None):
    a, b = power_tables(s, gamma_db_list)
    rows = [(g, pa, pb, fa, fb) for (g, pa, fa), (_, pb, fb) in zip(a, b)]
    cols = ("gamma_db", "total_power_w_nfbf", "total_power_w_ffbf", "feasible_nfbf", "feasible_ffbf")
    return [Table("power", cols, rows)]


# -- MUSIC -----------------------------------------------------------------

def run_music(s: Scenario, snr_db: float = 20.0, snapshots: int = 200, sources=None,
              angle_count: int = 181, range_count: int = 64, r_min: float = 2.0):
    """Localise ``sources`` (default: the scenario target) with 2D-MUSIC on the receive array."""
    sources = [s.target.location] if sources is None else list(sources)
    geom = s.rx_geom
    X = simulate_snapshots(geom, sources, snr_db, snapshots, make_rng(s.rng_seed))
    grid = polar_grid(geom, angle_count, range_count, r_min)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        est, spec = music_2d(X, len(sources), grid, geom)
    peak = spec.max()
    deg = np.degrees(grid.angles)
    rows = [(deg[i], grid.ranges[j], _max_db(spec[i, j] / peak))
            for i in range(len(deg)) for j in range(len(grid.ranges))]
    est_rows = [(k, p.angle_deg, p.range) for k, p in enumerate(est)]
    return [Table("music_spectrum", ("angle_deg", "range_m", "spectrum_db"), rows),
            Table("music_estimates", ("source", "angle_deg", "range_m"), est_rows)]


# -- calibration -----------------------------------------------------------

def calibrate_noise_power(s: Scenario, target_rate: float = 24.0) -> float:
    """Noise power placing the NFBF comm-only sum-rate at ``target_rate``."""
    channels = build_channels(s, "near_field")
    prec, sense = design(s, bf.NFBF)

    def gap(log_sigma2):
        return bf.sinr_and_rate(channels, prec, sense, 0.0, s.total_power, 10**log_sigma2)[1] - target_rate

    return float(10 ** brentq(gap, -12, 6, xtol=1e-14))
