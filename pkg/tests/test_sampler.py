import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holosphere.algebra import Angle, IntegerPair
from holosphere.generate import random_chart_spec
from holosphere.sampler import (ChartError, ChartSpec, Profile, bump, chart_from_json,
                                chart_point, chart_to_json, check_spec, collar_sigma, cutoff,
                                export_chart, fit_end_decay, kappa, pullback_error,
                                sample_cylinder, verify_chart, winding, zeta)

BASIC = ChartSpec((0, 1), 1.2, 1.9, eps=0.1)
TWISTED = ChartSpec((0, 1), 1.2, 1.9,
                    a0=[[1.2, 0.0], [1.9, 0.4]],
                    w0=[[1.2, 0.0], [1.6, 0.5], [1.9, -0.3]],
                    v0=[[1.2, 0.0], [1.9, 1.0]],
                    eps=[[1.2, 0.05], [1.5, 0.2], [1.9, 0.1]])


def test_node_examples():
    p = chart_point(BASIC, math.pi / 2, 0.0)
    assert (p.s, p.t, p.theta, p.phi) == pytest.approx((0.1, 0.0, math.pi / 2, 0.0), abs=1e-15)
    spec = ChartSpec((1, 0), 1.2, 1.9, w0=1.0, eps=0.0)
    p = chart_point(spec, math.pi / 2, math.pi / 2)
    assert (p.s, p.t, p.theta) == pytest.approx((0.0, math.pi / 2 + 1, math.pi / 2))
    assert p.phi == pytest.approx(0.0, abs=1e-12) or p.phi == pytest.approx(2 * math.pi)


def test_kappa_and_zeta():
    assert kappa((-1, 2)) == pytest.approx(-2 + math.sqrt(1.5))
    assert kappa((-1, 2)) == pytest.approx(-0.77526, abs=1e-5)
    assert zeta(math.pi / 2) == pytest.approx(math.sqrt(6))
    assert zeta(math.acos(1 / math.sqrt(3))) == pytest.approx(math.sqrt(6))
    with pytest.raises(ChartError):
        kappa((0, 1))


def test_theta0_end_is_concave_for_negative_kappa():
    # kappa < 0: a = (1/kappa) ln sigma grows without bound as sigma -> 0
    spec = ChartSpec((-1, 2), 0.0, 0.5, eps=0.01, end_lo="theta0_end", rho0=0.5)
    assert kappa(spec.q) < 0
    # positivity of alpha_Q fails on this arc, so only the end model itself is probed
    from holosphere.sampler import profile_aw
    a1, _ = profile_aw(spec, 1e-3, 0.0)
    a2, _ = profile_aw(spec, 1e-6, 0.0)
    assert a2 > a1 > 0


def test_bump():
    assert bump(np.array([0.0, 0.5, 1.0]))[0] == 1.0
    assert np.all(bump(np.array([0.5, 1.0])) == 1.0)
    assert np.all(bump(np.array([2.0, 3.0])) == 0.0)
    x = np.linspace(1.001, 1.999, 200)
    assert np.all(np.diff(bump(x)) <= 0)
    assert np.all(np.diff(bump(np.linspace(1.2, 1.8, 50))) < 0)
    assert cutoff(0.5 * 0.3 ** 4, 0.3) == 1.0


def test_eps_violation_flagged_before_sampling():
    spec = ChartSpec((0, 1), 1.2, 1.9, eps=0.6)
    assert any("eps*alpha_Q = 0.6" in p for p in check_spec(spec))
    with pytest.raises(ChartError, match="eps"):
        sample_cylinder(spec, 8, 8)


def test_spec_errors():
    assert check_spec(ChartSpec((0, 1), 0.5, 1.9))  # alpha_(0,1) < 0 below theta_(0,1)
    assert check_spec(ChartSpec((0, 1), 1.2, 1.9, end_lo="theta0_end"))
    assert check_spec(ChartSpec((0, 1), 1.2, 1.9, end_hi="bogus"))
    bad = ChartSpec((0, 1), 1.2, 1.9, lo_angle=Angle.of(IntegerPair(1, 2)),
                    hi_angle=Angle.of(IntegerPair(0, -1)))
    assert any("exact" in p for p in check_spec(bad))
    with pytest.raises(ChartError):
        Profile((1.0, 0.5), (0.0, 1.0))


def test_theta_column_and_winding():
    ch = sample_cylinder(TWISTED, 64, 48)
    assert np.array_equal(ch.theta, np.broadcast_to(ch.sigma[:, None], ch.s.shape))
    assert np.abs(winding(ch) - [0, 1]).max() < 1e-10
    assert ch.resolution == (64, 48) and len(ch.spec_hash) == 16


def test_pullback_matches_and_converges():
    errs = [pullback_error(sample_cylinder(TWISTED, n, n)) for n in (128, 256, 512)]
    assert errs[-1] < 1e-4
    for e1, e2 in zip(errs, errs[1:]):
        assert 3.2 <= e1 / e2 <= 4.8


def test_verify_example_chart():
    rep = verify_chart(sample_cylinder(BASIC, 512, 512), deck=(0, 1))
    assert rep.ok
    assert rep.pullback_rel_error < 1e-4
    assert rep.pullback_min == pytest.approx(rep.pullback_min_exact, rel=1e-4)
    # N = Q: the shift is one full period
    assert rep.deck_max_cells < 1e-9


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.integers(-3, 3), st.integers(-3, 3))
def test_deck_invariance(seed, n, nn):
    spec = random_chart_spec(random.Random(seed))
    ch = sample_cylinder(spec, 128, 128)
    rep = verify_chart(ch, deck=(n, nn))
    assert rep.deck_max_cells < 2
    assert rep.collisions == 0


@pytest.mark.parametrize("Q", [(1, 0), (0, 1), (1, 1)])
def test_end_decay_fit(Q):
    a = Angle.of(IntegerPair(*Q))
    lo = a.base_value()
    spec = ChartSpec(Q, lo, lo + 0.6, eps=1e-3, end_lo="interior_convex", lo_angle=a, rho0=0.5)
    ch = sample_cylinder(spec, 0, 32, sigma=collar_sigma(spec, "lo", 96))
    fit = fit_end_decay(ch)
    assert fit.target == pytest.approx(zeta(lo))
    assert fit.rel_error < 0.01
    assert verify_chart(ch).end_monotone


def test_end_fit_needs_a_long_tail():
    a = Angle.of(IntegerPair(1, 0))
    spec = ChartSpec((1, 0), a.base_value(), 2.2, eps=1e-3, end_lo="interior_convex", rho0=0.5)
    with pytest.raises(ChartError, match="tail too short"):
        fit_end_decay(sample_cylinder(spec, 64, 16))
    with pytest.raises(ChartError):
        fit_end_decay(sample_cylinder(BASIC, 64, 16))


def test_pole_end_charts():
    spec = ChartSpec((-1, 0), 0.0, 1.3, eps=0.1, end_lo="theta0_end", rho0=0.6)
    ch = sample_cylinder(spec, 128, 64)
    assert ch.sigma[0] > 0
    assert verify_chart(ch).ok
    fit = fit_end_decay(sample_cylinder(spec, 0, 32, sigma=collar_sigma(spec, "lo", 80)))
    assert fit.rel_error < 0.01
    for kind in ("pole_point", "thetaPi_end"):
        spec = ChartSpec((1, 0), 1.7, math.pi, eps=0.1, end_hi=kind, rho1=0.6)
        assert verify_chart(sample_cylinder(spec, 128, 64)).ok


def test_exports(tmp_path):
    ch = sample_cylinder(BASIC, 8, 8)
    out = export_chart([ch], "csv", tmp_path / "c.csv")
    lines = out.read_text().splitlines()
    assert lines[0] == "sigma,v,s,t,theta,phi" and len(lines) == 65
    row = [float(x) for x in lines[1].split(",")]
    assert row[0] == ch.sigma[0] and row[2] == ch.s[0, 0]
    out = export_chart([ch, sample_cylinder(TWISTED, 6, 5)], "obj", tmp_path / "m.obj")
    text = out.read_text().splitlines()
    assert [l for l in text if l.startswith("g ")] == ["g chart_0", "g chart_1"]
    assert sum(l.startswith("v ") for l in text) == 64 + 30
    assert sum(l.startswith("vt ") for l in text) == 64 + 30
    faces = [l for l in text if l.startswith("f ")]
    assert len(faces) == 7 * 8 + 5 * 5
    # faces of the second group only use its own vertices
    idx = [int(x.split("/")[0]) for f in faces[56:] for x in f.split()[1:]]
    assert min(idx) > 64
    with pytest.raises(ValueError, match="nothing to export"):
        export_chart([], "csv", tmp_path / "x.csv")


def test_chart_json_round_trip():
    ch = sample_cylinder(TWISTED, 16, 12)
    doc = json.loads(json.dumps(chart_to_json(ch)))
    ch2 = chart_from_json(doc)
    assert np.array_equal(ch2.s, ch.s) and ch2.spec_hash == ch.spec_hash
    assert ChartSpec.from_json(TWISTED.to_json()) == TWISTED
    with pytest.raises(ChartError):
        ChartSpec.from_json({"q": [0, 1], "sigma_lo": 1.2, "sigma_hi": 1.9, "color": 1})


def test_random_specs_embed():
    rng = random.Random(5)
    for _ in range(5):
        spec = random_chart_spec(rng)
        assert not check_spec(spec)
        assert verify_chart(sample_cylinder(spec, 96, 96)).collisions == 0
