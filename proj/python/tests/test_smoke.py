import math

import pytest

import hydroscale as hs


def test_rates_and_equilibrium():
    ex = hs.RateModel.exclusion()
    assert ex.m0 == 1
    assert ex.validate(8)[0]
    table = hs.EquilibriumTable(ex)
    assert table.rho_c == 1.0
    assert abs(table.psi(0.25) - 0.75) < 1e-12
    assert abs(table.flux(0.5) - 0.25) < 1e-12
    zr = hs.EquilibriumTable(hs.RateModel.zero_range())
    assert abs(zr.density_of_lambda(2.0) - 2.0) < 1e-10
    assert abs(sum(zr.pmf(1.5)) - 1.0) < 1e-12


def test_kernel_constants():
    k = hs.JumpKernel(1, 2.0, 4096)
    assert abs(k.gamma_alpha() - math.pi**2 / 6) < 1e-8
    assert k.jump_rate([2]) == pytest.approx(1 / 8)
    assert hs.gamma_n(0.5, 100) == pytest.approx(10.0)


def test_riemann_rarefaction():
    u = [-0.5, 0.0, 0.5]
    rho = hs.riemann_exclusion(1.0, 0.0, 1.0, u)
    assert rho == pytest.approx([0.75, 0.5, 0.25], abs=1e-3)


def test_config_errors():
    with pytest.raises(hs.ConfigError):
        hs.compare("colour = blue\n")
    csv = hs.equilibrium_csv("model = exclusion\nrho_points = 3\n")
    assert csv.splitlines()[0] == "rho,lambda,phi,psi,flux"


def test_small_runs_are_deterministic():
    cfg = "model = exclusion\nalpha = 2\nN_list = 16, 32\nreplicas = 3\nt_snapshots = 0, 0.2\nseed = 5\n"
    a = hs.compare(cfg)
    assert a == hs.compare(cfg)
    assert len(a) == 4
    snaps = hs.solve("model = zero_range_capped(2)\nalpha = 0.5\nN = 16\nt_snapshots = 0, 0.1\n")
    assert [s[0] for s in snaps] == [0.0, 0.1]
    rows = hs.coupling("alpha = 2\nN_list = 16\nreplicas = 2\nt_end = 0.1\n")
    assert rows[0][0] == 16 and rows[0][2] >= 0.0
