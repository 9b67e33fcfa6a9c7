import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nearfield_isac.channel import (LINE_OF_SIGHT, assemble, channel_correlation, effective_dof,
                                    p2p_los_channel, rebuild, user_channel, write_channels_csv)
from nearfield_isac.geometry import ArrayGeometry, PolarPoint, farfield_steering, rayleigh_distance

# independent double-loop distance evaluation + SVD, -20 dB, 256x256 @ 30 GHz, 5 m
GOLDEN_DOF_5M = 35


def oracle_p2p(n_t, n_r, f, sep):
    lam = 299_792_458.0 / f
    d = lam / 2
    tx = [(n - (n_t - 1) / 2) * d for n in range(n_t)]
    rx = [(m - (n_r - 1) / 2) * d for m in range(n_r)]
    H = np.empty((n_r, n_t), complex)
    for m in range(n_r):
        for n in range(n_t):
            dist = math.sqrt(sep * sep + (rx[m] - tx[n]) ** 2)
            H[m, n] = complex(math.cos(2 * math.pi * dist / lam), -math.sin(2 * math.pi * dist / lam))
    return H


def test_single_element_link():
    g = ArrayGeometry(1, 30e9)
    H = p2p_los_channel(g, g, 3.0).matrix
    assert H.shape == (1, 1)
    assert H[0, 0] == pytest.approx(np.exp(-2j * math.pi * 3.0 / g.wavelength))


def test_p2p_matches_double_loop_oracle(geom256):
    H = p2p_los_channel(geom256, geom256, 5.0).matrix
    ref = oracle_p2p(256, 256, 30e9, 5.0)
    assert np.allclose(H, ref, atol=1e-9)
    assert np.allclose(np.linalg.svd(H, compute_uv=False), np.linalg.svd(ref, compute_uv=False), rtol=1e-8)
    assert np.allclose(np.abs(H), 1.0)
    assert np.linalg.norm(H) == pytest.approx(256.0, rel=1e-12)


def test_p2p_rejects_bad_separation(geom256):
    with pytest.raises(ValueError):
        p2p_los_channel(geom256, geom256, 0.0)


def test_p2p_amplitude_aware(geom256):
    H = p2p_los_channel(geom256, geom256, 2.0, amplitude_aware=True).matrix
    assert np.abs(H).max() <= 1.0 + 1e-12
    assert np.abs(H[128, 128]) == pytest.approx(1.0)
    assert np.abs(H[0, 255]) == pytest.approx(2.0 / math.hypot(2.0, geom256.aperture))


def test_dof_examples(geom256):
    assert effective_dof(np.eye(6)) == 6
    rd = rayleigh_distance(geom256)
    assert effective_dof(p2p_los_channel(geom256, geom256, 10 * rd)) == 1
    assert effective_dof(p2p_los_channel(geom256, geom256, 5.0), -20.0) == GOLDEN_DOF_5M
    assert effective_dof(oracle_p2p(256, 256, 30e9, 5.0), -20.0) == GOLDEN_DOF_5M
    with pytest.raises(ValueError):
        effective_dof(np.eye(3), 0.0)


def test_dof_bounded_and_monotone():
    g = ArrayGeometry(64, 30e9)
    grid = np.logspace(0, math.log10(10 * rayleigh_distance(g)), 30)
    dofs = [effective_dof(p2p_los_channel(g, g, d)) for d in grid]
    assert all(1 <= x <= 64 for x in dofs)
    assert all(b <= a for a, b in zip(dofs, dofs[1:]))


def test_user_channel_los_only(geom256):
    loc = PolarPoint(0.0, 5.0)
    ch = user_channel(geom256, loc)
    assert len(ch.paths) == 1 and ch.paths[0].kind == LINE_OF_SIGHT and ch.paths[0].gain == 1
    assert np.linalg.norm(ch.vector) ** 2 == pytest.approx(256.0)
    ff = user_channel(geom256, loc, model="far_field")
    assert np.allclose(ff.vector, 16 * farfield_steering(geom256, 0.0).entries)


def test_user_channel_determinism(geom256):
    scat = [PolarPoint.from_degrees(20, 10.0), PolarPoint.from_degrees(-35, 30.0)]
    a = user_channel(geom256, PolarPoint(0.0, 5.0), scat, rng_seed=7)
    b = user_channel(geom256, PolarPoint(0.0, 5.0), scat, rng_seed=7)
    c = user_channel(geom256, PolarPoint(0.0, 5.0), scat, rng_seed=8)
    assert np.array_equal(a.vector, b.vector)
    assert [p.gain for p in a.paths] != [p.gain for p in c.paths]
    # vector reconstructable from the paths
    assert np.allclose(assemble(geom256, a.paths, "near_field"), a.vector, atol=1e-12)


def test_user_channel_rejects_overlapping_paths(geom256):
    with pytest.raises(ValueError):
        user_channel(geom256, PolarPoint(0.0, 5.0), [PolarPoint.from_degrees(0.3, 10.0)])
    with pytest.raises(ValueError):
        user_channel(geom256, PolarPoint(0.0, 5.0),
                     [PolarPoint.from_degrees(20, 10.0), PolarPoint.from_degrees(20.2, 30.0)])


def test_paper_user_norm_against_summation_oracle(nf_channels, geom256):
    n = geom256.num_elements
    for ch in nf_channels:
        ref = np.zeros(n, complex)
        for path in ch.paths:
            for i, d in enumerate(geom256.positions):
                rn = math.sqrt(path.location.range**2 + d**2 - 2 * path.location.range * d * math.sin(path.location.angle))
                ref[i] += path.gain * np.exp(-2j * math.pi * (rn - path.location.range) / geom256.wavelength)
        assert np.linalg.norm(ch.vector) ** 2 == pytest.approx(np.linalg.norm(ref) ** 2, rel=1e-10)
        scat_power = sum(abs(p.gain) ** 2 for p in ch.paths[1:])
        cross = 2 * sum(abs(p.gain) for p in ch.paths[1:]) + 2 * np.prod([abs(p.gain) for p in ch.paths[1:]])
        assert n * (1 - cross) <= np.linalg.norm(ch.vector) ** 2 <= n * (1 + scat_power + cross)


def test_rebuild_far_field_keeps_gains(nf_channels, ff_channels, geom256):
    for nf, ff in zip(nf_channels, ff_channels):
        assert [p.gain for p in nf.paths] == [p.gain for p in ff.paths]
        assert np.allclose(rebuild(geom256, nf, "far_field").vector, ff.vector)


def test_correlation_examples(geom256):
    h = np.arange(1, 9) + 1j
    assert channel_correlation(h, (2 - 3j) * h) == pytest.approx(1.0)
    a = user_channel(geom256, PolarPoint(0.0, 5.0), model="far_field")
    b = user_channel(geom256, PolarPoint(0.0, 15.0), model="far_field")
    assert abs(channel_correlation(a, b) - 1.0) < 1e-12
    with pytest.raises(ValueError):
        channel_correlation(np.zeros(3), np.ones(3))


def test_near_field_decorrelation(geom256):
    def corr(n):
        g = geom256.with_elements(n)
        return channel_correlation(user_channel(g, PolarPoint(0.0, 5.0)), user_channel(g, PolarPoint(0.0, 15.0)))

    # direct phase-sum oracle (tests/conftest.brute_phase), frozen
    assert corr(256) == pytest.approx(0.0403671859430823, rel=1e-9)
    assert corr(16) == pytest.approx(0.9996091266167542, rel=1e-9)
    assert corr(256) < 0.1 < corr(16)


vectors = st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=4, max_size=4)


@settings(max_examples=200, deadline=None)
@given(vectors, vectors, st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_correlation_symmetric_scale_invariant(a, b, c):
    a, b = np.array(a), np.array(b)
    if np.linalg.norm(a) < 1e-3 or np.linalg.norm(b) < 1e-3:
        return
    r = channel_correlation(a, b)
    assert 0 <= r <= 1
    assert r == pytest.approx(channel_correlation(b, a), abs=1e-12)
    assert r == pytest.approx(channel_correlation(c * a, b), abs=1e-9)


def test_channels_csv(tmp_path, nf_channels):
    path = tmp_path / "h.csv"
    write_channels_csv(path, nf_channels)
    lines = path.read_text().splitlines()
    assert lines[0] == "user,element,re,im"
    assert len(lines) == 1 + 2 * 256
    k, n, re, im = lines[5].split(",")
    assert complex(float(re), float(im)) == pytest.approx(nf_channels[0].vector[4], rel=1e-8)
