import math

import numpy as np
import pytest

from bubblelab import DomainGrid, Sphere
from bubblelab.bubbles import (AnalysisConfig, UnderResolvedBubbleError, annulus_profile,
                               circle_split, concentration_exponent, concentration_function,
                               detect_bubble, detect_bubbles, energy_ledger, eps_ratio,
                               hopf_balance_alpha, hopf_balance_biharmonic, mapping_degree,
                               rescale, stress_energy_1, stress_energy_2, superlevel_ratio)
from bubblelab.fields import (bubble_values, constant_map, fourier_map, great_circle_wrap,
                              planted_bubble, random_smooth_field, smoothstep_quintic)
from bubblelab.grid import MapField, ball_energy, face_density, integrate

S2 = Sphere(2)

BIG_BUBBLE_SCALE = 0.12  # resolved concentration radius on a 256^2 grid


@pytest.fixture(scope="module")
def big_bubble():
    return planted_bubble(DomainGrid(256, 256), S2, BIG_BUBBLE_SCALE)


@pytest.fixture(scope="module")
def detected(big_bubble):
    cfg = AnalysisConfig(eps0=1.0, outer_radius=0.25)
    rec = detect_bubble(big_bubble, cfg, alpha=1.05)
    assert rec is not None
    return cfg, rec


def two_bubble_field(n=256, s1=0.04, s2=0.07, c1=(0.3, 0.3), c2=(0.8, 0.8)):
    # small scales keep the fade rings energetically negligible against the
    # cores; detection below uses eps0 = 8 so both radii stay grid-resolved
    g = DomainGrid(n, n)
    south = np.array([0.0, 0.0, -1.0])
    vals = np.broadcast_to(south, (n, n, 3)).copy()
    for scale, center in ((s1, c1), (s2, c2)):
        dx, dy = g.periodic_delta(center)
        pts = np.stack(np.broadcast_arrays(dx[:, None], dy[None, :]), axis=-1)
        rr = np.hypot(pts[..., 0], pts[..., 1])
        fade = 1.0 - smoothstep_quintic((rr - 0.2) / 0.1)
        vals = vals + fade[..., None] * (bubble_values(pts, scale) - south)
    return MapField(g, S2, S2.project_point(vals))


# ---------------------------------------------------------------------------
# concentration function and detection


def test_concentration_constant_map():
    u = constant_map(DomainGrid(32, 32), S2)
    val, center = concentration_function(u, 0.2)
    assert val == 0.0
    assert center == (0.0, 0.0)


def test_concentration_monotone_in_radius():
    u = random_smooth_field(DomainGrid(32, 32), S2, seed=5)
    vals = [concentration_function(u, r)[0] for r in (0.05, 0.1, 0.2, 0.4)]
    for a, b in zip(vals, vals[1:]):
        assert a <= b + 1e-12


def test_concentration_locates_bubble(big_bubble):
    h = big_bubble.grid.h
    for r in (BIG_BUBBLE_SCALE, 0.25):
        _, center = concentration_function(big_bubble, r)
        assert math.hypot(center[0] - 0.5, center[1] - 0.5) <= 2 * h


def test_detect_bubble_none_on_flat_fields():
    assert detect_bubble(constant_map(DomainGrid(32, 32), S2), AnalysisConfig()) is None
    # great circle wrap spreads energy evenly: ball energies stay below eps0/2
    wrap = great_circle_wrap(DomainGrid(64, 64), S2)
    cfg = AnalysisConfig(eps0=16.0, outer_radius=0.25)
    assert detect_bubble(wrap, cfg) is None


def test_detect_bubble_bisection_brackets_threshold(detected, big_bubble):
    cfg, rec = detected
    half = 0.5 * cfg.eps0
    dens = face_density(big_bubble)
    at = ball_energy(big_bubble, rec.center, rec.radius, density=dens)
    below = ball_energy(big_bubble, rec.center, rec.radius - 2 * cfg.radius_tol, density=dens)
    assert at >= half
    assert below < half
    # the window honors the configured blow-up factor
    assert rec.window_radius == pytest.approx(min(cfg.inner_factor * rec.radius,
                                                  cfg.outer_radius))


def test_detect_bubble_matches_radial_scan_oracle(detected, big_bubble):
    # independent oracle: sort node distances from the detected center and
    # accumulate the density until it crosses eps0 / 2
    cfg, rec = detected
    g = big_bubble.grid
    dens = face_density(big_bubble)
    d2 = g.distance2(rec.center).ravel()
    order = np.argsort(d2, kind="stable")
    csum = np.cumsum(dens.ravel()[order]) * g.cell_area
    k = int(np.searchsorted(csum, 0.5 * cfg.eps0))
    scan_radius = math.sqrt(d2[order[k]])  # smallest radius whose ball crosses
    assert abs(ball_energy(big_bubble, rec.center, rec.radius, density=dens)
               - ball_energy(big_bubble, rec.center, scan_radius * (1 + 1e-12), density=dens)) \
        <= 1e-6 * cfg.eps0
    assert rec.radius == pytest.approx(scan_radius, abs=2 * cfg.radius_tol + 1e-9)


def test_detect_bubble_under_resolved():
    u = planted_bubble(DomainGrid(256, 256), S2, 0.01)
    with pytest.raises(UnderResolvedBubbleError):
        detect_bubble(u, AnalysisConfig(eps0=1.0))


def test_detect_two_bubbles_greedy():
    u = two_bubble_field()
    cfg = AnalysisConfig(eps0=8.0, outer_radius=0.2)
    recs = detect_bubbles(u, cfg, alpha=1.05, max_count=3)
    assert len(recs) >= 2
    # sharper bubble concentrates harder and is found first
    assert math.hypot(recs[0].center[0] - 0.3, recs[0].center[1] - 0.3) < 0.05
    assert math.hypot(recs[1].center[0] - 0.8, recs[1].center[1] - 0.8) < 0.05
    assert recs[0].radius < recs[1].radius


def test_exponent_and_eps_ratio_values():
    assert concentration_exponent(0.37, 1.0) == 1.0
    assert concentration_exponent(0.01, 1.01) == pytest.approx(math.exp(0.01 * math.log(100.0)), rel=1e-12)
    assert concentration_exponent(0.01, 1.01) == pytest.approx(1.04713, abs=2e-5)
    assert eps_ratio(1e-4, 0.05) == pytest.approx(0.04, rel=1e-12)
    with pytest.raises(ValueError):
        concentration_exponent(-0.1, 1.1)
    with pytest.raises(ValueError):
        eps_ratio(1e-4, 0.0)


def test_exponent_at_least_one_for_small_radii():
    for r in (0.9, 0.3, 0.01):
        for a in (1.0, 1.05, 1.5):
            assert concentration_exponent(r, a) >= 1.0 - 1e-9


# ---------------------------------------------------------------------------
# rescaling


def test_rescale_constant_map():
    u = constant_map(DomainGrid(32, 32), S2)
    v = rescale(u, (0.5, 0.5), 0.05, 4.0, nodes=32)
    assert np.allclose(v.values, u.values[0, 0], atol=1e-14)


def test_rescale_recovers_unit_bubble(bubble256):
    scale = 0.02
    v = rescale(bubble256, (0.5, 0.5), scale, 4.0, nodes=128)
    half = 4.0
    xi = -half + np.arange(128) * (2 * half / 128)
    pts = np.stack(np.broadcast_arrays(xi[:, None], xi[None, :]), axis=-1)
    exact = bubble_values(pts, 1.0)
    sup = np.abs(v.values - exact).max()
    assert sup < 0.03


def test_rescale_energy_covariance(bubble256):
    # Dirichlet energy is conformally invariant: the window ball energy of
    # the blow-up equals the source ball energy at the matching radius
    # (radius kept inside the wrap seam of the periodic window container)
    scale, factor = 0.02, 4.0
    v = rescale(bubble256, (0.5, 0.5), scale, factor, nodes=128)
    for frac in (0.5, 0.95):
        lhs = ball_energy(v, (factor, factor), factor * frac)
        rhs = ball_energy(bubble256, (0.5, 0.5), factor * scale * frac)
        assert lhs == pytest.approx(rhs, rel=0.01)


def test_rescale_window_limit(bubble256):
    with pytest.raises(ValueError):
        rescale(bubble256, (0.5, 0.5), 0.05, 8.0, outer_radius=0.25)


# ---------------------------------------------------------------------------
# superlevel sets


def test_superlevel_constant_zero():
    u = constant_map(DomainGrid(32, 32), S2)
    assert superlevel_ratio(u, (0.5, 0.5), 0.2, 1.0) == 0.0


def test_superlevel_threshold_equality_gives_pi():
    # wrap map has constant |grad u|; choosing eps0 to sit exactly at the
    # threshold includes the whole ball (boundary convention >=)
    u = great_circle_wrap(DomainGrid(128, 128), S2)
    from bubblelab.grid import gradient_squared
    g = math.sqrt(gradient_squared(u).mean())
    r = 0.25
    # shave the threshold by one ulp-scale factor so the >= comparison is
    # robust against the rounding of the reconstructed threshold
    eps0 = (2.0 * math.sqrt(math.pi) * r * g) ** 2 * (1.0 - 1e-12)
    ratio = superlevel_ratio(u, (0.5, 0.5), r, eps0)
    assert ratio == pytest.approx(math.pi, rel=0.05)


def test_superlevel_positive_on_detected_bubble(detected, big_bubble):
    cfg, rec = detected
    ratio = superlevel_ratio(big_bubble, rec.center, rec.radius, cfg.eps0)
    assert ratio >= 0.05


# ---------------------------------------------------------------------------
# annulus profiles and Hopf balances


def test_annulus_profile_constant_zero():
    u = constant_map(DomainGrid(64, 64), S2)
    prof = annulus_profile(u, (0.5, 0.5), 0.1, 0.4)
    assert prof.total == 0.0
    assert all(b.total == 0.0 for b in prof.bands)


def test_annulus_total_matches_ball_difference(bubble256):
    prof = annulus_profile(bubble256, (0.5, 0.5), 0.05, 0.2)
    for band in prof.bands:
        cart = ball_energy(bubble256, (0.5, 0.5), band.r_out) \
            - ball_energy(bubble256, (0.5, 0.5), band.r_in)
        assert band.total == pytest.approx(cart, rel=0.02)


def test_annulus_bands_disjoint_ordered(bubble256):
    prof = annulus_profile(bubble256, (0.5, 0.5), 0.03, 0.2)
    for a, b in zip(prof.bands, prof.bands[1:]):
        assert a.r_out == pytest.approx(b.r_in)
    assert prof.total == pytest.approx(sum(b.total for b in prof.bands), rel=1e-12)


def test_bubble_conformality_per_circle():
    # analytic bubble: radial and tangential circle energies agree within 2%
    # on 2 rho <= r <= 10 rho (criterion radii), 512^2 grid for interpolation
    scale = 0.02
    u = planted_bubble(DomainGrid(512, 512), S2, scale)
    for r in (2 * scale, 4 * scale, 10 * scale):
        rad, tan = circle_split(u, (0.5, 0.5), r)
        assert rad == pytest.approx(tan, rel=0.02)


def test_bubble_tail_decay(bubble256):
    # closed form: conformality gives |u_r|^2 = 4 s^2 / (s^2 + r^2)^2, so the
    # circle integral is 8 pi s^2 r / (s^2 + r^2)^2, decaying like r^-3
    s = 0.02
    for r in (0.1, 0.2):
        rad, tan = circle_split(bubble256, (0.5, 0.5), r)
        exact = 8 * math.pi * s * s * r / (s * s + r * r) ** 2
        assert rad == pytest.approx(exact, rel=0.05)
        assert tan == pytest.approx(exact, rel=0.05)


def test_hopf_balance_alpha_constant_map():
    u = constant_map(DomainGrid(64, 64), S2)
    bal = hopf_balance_alpha(u, (0.5, 0.5), 0.2, 1.3)
    assert bal.lhs == 0.0
    assert bal.circle_term == pytest.approx(2 * math.pi * 0.2, rel=1e-12)
    assert bal.ball_term > 0.0  # (alpha-1)/r times the ball alpha-energy


def test_hopf_balance_alpha_conformal(bubble256):
    bal = hopf_balance_alpha(bubble256, (0.5, 0.5), 0.08, 1.0)
    # alpha = 1 weight is 1: lhs is the radial circle energy, bounded by the
    # tangential part of the circle term within quadrature error
    rad, tan = circle_split(bubble256, (0.5, 0.5), 0.08)
    assert bal.lhs == pytest.approx(rad, rel=1e-12)
    assert bal.ball_term == 0.0


def test_hopf_balance_biharmonic_cases(bubble256):
    bal0 = hopf_balance_biharmonic(bubble256, (0.5, 0.5), 0.08, 0.0)
    rad, tan = circle_split(bubble256, (0.5, 0.5), 0.08)
    assert bal0.lhs == pytest.approx(rad, rel=1e-12)
    assert bal0.tangential_term == pytest.approx(tan, rel=1e-12)
    assert bal0.ball_term == 0.0 and bal0.circle_term == 0.0
    # conformality: equality within 2%
    assert bal0.lhs == pytest.approx(bal0.tangential_term, rel=0.02)
    bal = hopf_balance_biharmonic(bubble256, (0.5, 0.5), 0.08, 1e-4)
    assert bal.ball_term > 0.0 and bal.circle_term > 0.0


def test_hopf_balance_constant_biharmonic():
    u = constant_map(DomainGrid(64, 64), S2)
    bal = hopf_balance_biharmonic(u, (0.5, 0.5), 0.2, 1e-3)
    assert bal.lhs == 0.0 and bal.tangential_term == 0.0
    assert bal.ball_term == 0.0 and bal.circle_term == 0.0


# ---------------------------------------------------------------------------
# stress-energy tensors


def test_stress_constant_map_zero():
    u = constant_map(DomainGrid(32, 32), S2)
    t1 = stress_energy_1(u)
    assert np.abs(t1.components).max() == 0.0
    assert np.abs(t1.divergence).max() == 0.0
    assert np.abs(t1.reference).max() == 0.0
    t2 = stress_energy_2(u, 1e-2)
    assert np.abs(t2.divergence).max() == 0.0
    assert np.abs(t2.reference).max() == 0.0


def test_stress_trace_zero_exact(smooth64):
    t1 = stress_energy_1(smooth64)
    assert np.abs(t1.trace).max() < 1e-14 * np.abs(t1.components).max()
    assert np.array_equal(t1.components[..., 0, 1], t1.components[..., 1, 0])


def test_stress_conformal_vanishes(bubble256):
    t1 = stress_energy_1(bubble256)
    from bubblelab.grid import gradient_squared, ball_mask
    norm = np.sqrt(np.einsum("ijab,ijab->ij", t1.components, t1.components))
    gsq = gradient_squared(bubble256)
    inside = ball_mask(bubble256.grid, (0.5, 0.5), 0.2)
    # pointwise conformality: |S1| is a small fraction of |grad u|^2 in the bubble
    assert norm[inside].sum() < 0.05 * gsq[inside].sum()


def test_stress_divergence_identity_refinement():
    # gentle single-mode field so the h^2 regime is reached from 64^2
    f = fourier_map(seed=13, max_mode=1, amplitude=0.3)
    defects1, defects2 = [], []
    for n in (64, 128, 256):
        g = DomainGrid(n, n)
        x, y = g.coords()
        u = MapField(g, S2, S2.project_point(f(x[:, None], y[None, :])))
        t1 = stress_energy_1(u)
        defects1.append(np.abs(t1.divergence - t1.reference).max())
        t2 = stress_energy_2(u, 1e-3)
        defects2.append(np.abs(t2.divergence - t2.reference).max())
    assert defects1[0] / defects1[1] >= 3.5
    assert defects1[1] / defects1[2] >= 3.5
    assert defects2[0] / defects2[1] >= 3.5
    assert defects2[1] / defects2[2] >= 3.5


def test_stress_eps_zero_reduces_bit_exactly(smooth64):
    t1 = stress_energy_1(smooth64)
    t2 = stress_energy_2(smooth64, 0.0)
    assert np.array_equal(t1.components, t2.components)
    assert np.array_equal(t1.divergence, t2.divergence)


# ---------------------------------------------------------------------------
# degree and ledger


def test_mapping_degree(bubble256, wrap64):
    assert mapping_degree(bubble256) == pytest.approx(1.0, abs=0.05)
    assert abs(mapping_degree(wrap64)) < 1e-10


def test_ledger_constant_map():
    u = constant_map(DomainGrid(64, 64), S2)
    cfg = AnalysisConfig()
    led = energy_ledger(u, "alpha", 1.1, [], cfg)
    assert led.total == pytest.approx(u.grid.volume, rel=1e-12)
    assert led.body == 0.0 and led.neck == 0.0 and led.bubble_total == 0.0
    assert led.discrepancy == pytest.approx(0.0, abs=1e-12)


def test_ledger_partition_identity(big_bubble, detected):
    cfg, rec = detected
    for kind, param in (("alpha", 1.05), ("biharmonic", 1e-3)):
        led = energy_ledger(big_bubble, kind, param, [rec], cfg)
        assert abs(led.discrepancy) <= 1e-10 * led.total
        parts = led.body + led.neck + led.bubble_total
        if kind == "alpha":
            assert led.total == pytest.approx(led.volume + parts, rel=1e-10)
        else:
            assert led.total == pytest.approx(parts, rel=1e-10)
        assert led.body >= 0 and led.neck >= 0 and led.bubble_total >= 0
        assert led.dirichlet_total == pytest.approx(
            led.body_dirichlet + led.neck_dirichlet + led.bubble_dirichlet, rel=1e-10)


def test_ledger_neck_monitor(big_bubble, detected):
    cfg, rec = detected
    led = energy_ledger(big_bubble, "alpha", 1.05, [rec], cfg)
    assert led.neck_monitor
    assert led.neck_dyadic_max == pytest.approx(max(e for _, e in led.neck_monitor))
    d = led.to_dict()
    assert d["kind"] == "alpha"
    assert isinstance(d["bubbles"], list) and d["bubbles"]


def test_ledger_merges_overlapping_windows():
    u = two_bubble_field(c1=(0.42, 0.5), c2=(0.58, 0.5))
    cfg = AnalysisConfig(eps0=8.0, outer_radius=0.2)
    recs = detect_bubbles(u, cfg, alpha=1.05, max_count=2)
    led = energy_ledger(u, "alpha", 1.05, recs, cfg)
    if len(recs) >= 2:
        assert any("merged" in w or "overlap" in w for w in led.warnings) or \
            abs(led.discrepancy) <= 1e-10 * led.total
    assert abs(led.discrepancy) <= 1e-10 * led.total
