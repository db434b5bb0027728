import math

import numpy as np
import pytest

from bubblelab import DomainGrid, Sphere
from bubblelab.energies import AlphaFunctional
from bubblelab.fields import constant_map, latitude_circle
from bubblelab.sweepout import (DeformConfig, PathFamily, beta_estimate,
                                entropy_derivative_check, latitude_family,
                                perturbed_latitude_family, pseudo_gradient_deform,
                                sup_energy, winding_number)

S2 = Sphere(2)


def circle_grid(nx=256):
    return DomainGrid(nx, 1, lx=2.0 * math.pi, ly=1.0)


def discrete_latitude_energy(nx: int, polar: float, alpha: float) -> float:
    # face chords of the latitude circle: |D|^2 = sin^2(polar) * kappa
    h = 2.0 * math.pi / nx
    kappa = (2.0 * math.sin(h / 2.0) / h) ** 2
    return 2.0 * math.pi * (1.0 + math.sin(polar) ** 2 * kappa) ** alpha


def test_constant_family_sup():
    g = circle_grid(64)
    fam = PathFamily([constant_map(g, S2) for _ in range(5)])
    val, idx = sup_energy(fam, 1.3)
    assert val == pytest.approx(g.volume, rel=1e-12)
    assert idx == 0  # ties break to the lowest index


def test_sup_energy_monotone_in_alpha():
    fam = latitude_family(nx=128, count=17)
    vals = [sup_energy(fam, a)[0] for a in (1.0, 1.1, 1.3, 1.6)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_latitude_family_sup_closed_form():
    nx, count, alpha = 256, 65, 1.2
    fam = latitude_family(nx=nx, count=count)
    val, idx = sup_energy(fam, alpha)
    # odd count puts one member exactly on the equator
    assert idx == count // 2
    assert val == pytest.approx(discrete_latitude_energy(nx, math.pi / 2, alpha), rel=1e-12)
    assert val == pytest.approx(2.0 * math.pi * 2.0 ** alpha, rel=5e-3)


def test_critical_family_unchanged_by_deformation():
    # rotated equator circles are exact discrete critical points
    g = circle_grid(128)
    members = []
    for phase in (0.0, 0.5, 1.0):
        m = latitude_circle(g, S2, math.pi / 2)
        vals = m.values.copy()
        c, s = math.cos(phase), math.sin(phase)
        vals[..., 0], vals[..., 1] = c * vals[..., 0] - s * vals[..., 1], \
            s * vals[..., 0] + c * vals[..., 1]
        members.append(type(m)(g, S2, vals))
    fam = PathFamily(members)
    before, _ = sup_energy(fam, 1.2)
    deformed, info = pseudo_gradient_deform(fam, 1.2, DeformConfig(sweep_budget=50))
    after, _ = sup_energy(deformed, 1.2)
    assert after == pytest.approx(before, rel=1e-12)
    for m0, m1 in zip(fam.members, deformed.members):
        assert np.abs(m0.values - m1.values).max() < 1e-9


def test_deformation_never_raises_sup():
    fam = latitude_family(nx=128, count=33)
    deformed, info = pseudo_gradient_deform(fam, 1.1, DeformConfig(sweep_budget=200))
    hist = np.array(info["sup_history"])
    assert np.all(np.diff(hist) <= 0.0)
    assert len(deformed.members) == fam.size


def test_latitude_flow_approaches_geodesic_level():
    nx, alpha = 256, 1.05
    fam = latitude_family(nx=nx, count=64)
    deformed, _ = pseudo_gradient_deform(fam, alpha, DeformConfig(sweep_budget=400))
    val, idx = sup_energy(deformed, alpha)
    target = 2.0 * math.pi * 2.0 ** alpha
    assert val == pytest.approx(target, rel=0.05)
    # winding of the top member survives the flow
    assert winding_number(deformed.members[idx]) == 1


def test_winding_number_cases():
    g = circle_grid(128)
    eq = latitude_circle(g, S2, math.pi / 2)
    assert winding_number(eq) == 1
    two = latitude_circle(g, S2, math.pi / 2, turns=2)
    assert winding_number(two) == 2
    pole = constant_map(g, S2)
    assert winding_number(pole) is None


def test_beta_estimate_constant_generator():
    g = circle_grid(64)
    gen = lambda rs: PathFamily([constant_map(g, S2) for _ in range(4)])
    res = beta_estimate(gen, alphas=(1.01, 1.1, 1.2, 1.4), restarts=1,
                        cfg=DeformConfig(sweep_budget=10))
    assert np.allclose(res.betas, g.volume, rtol=1e-12)
    assert np.all(np.diff(res.betas) >= -1e-12)


@pytest.fixture(scope="module")
def toy_minmax():
    gen = lambda rs: perturbed_latitude_family(256, 64, seed=rs, amplitude=0.0 if rs == 0 else 0.02)
    return beta_estimate(gen, alphas=(1.01, 1.02, 1.05, 1.1, 1.2, 1.3),
                         restarts=2, cfg=DeformConfig(sweep_budget=300))


def test_beta_table_monotone_and_near_closed_form(toy_minmax):
    res = toy_minmax
    assert np.all(np.diff(res.betas) >= -1e-9)
    vol = 2.0 * math.pi
    for a, b in zip(res.alphas, res.betas):
        assert b - vol == pytest.approx(vol * (2.0 ** a - 1.0), rel=0.06)
    # at alpha = 1.01 the excess sits within 5% of the geodesic level 2 pi
    assert res.betas[0] - vol == pytest.approx(vol, rel=0.05)


def test_entropy_derivative_report(toy_minmax):
    rep = entropy_derivative_check(toy_minmax)
    inner = rep.interior
    # variational upper bound for the energy derivative at sup members
    assert np.all(rep.energy_derivative[inner] <= rep.dbeta[inner] + 3.0)
    # entropy product decreasing toward zero as alpha approaches 1
    prod = rep.entropy_product[inner]
    assert np.all(np.diff(prod) >= -1e-9)  # increasing with alpha = decreasing toward 1
    assert prod[0] < prod[-1]
    assert np.all(prod > 0.0)


def test_entropy_check_needs_four_points():
    g = circle_grid(64)
    gen = lambda rs: PathFamily([constant_map(g, S2) for _ in range(3)])
    res = beta_estimate(gen, alphas=(1.1, 1.2, 1.3), restarts=1,
                        cfg=DeformConfig(sweep_budget=5))
    with pytest.raises(ValueError):
        entropy_derivative_check(res)


def test_family_validation():
    g = circle_grid(64)
    with pytest.raises(ValueError):
        PathFamily([])
    a = constant_map(g, S2)
    b = constant_map(DomainGrid(64, 1, lx=1.0, ly=1.0), S2)
    with pytest.raises(ValueError):
        PathFamily([a, b])
