import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf

from conftest import c4_problem
from qrefl.errors import ConfigurationError, DomainError
from qrefl.potentials import (
    C3C4,
    PRESET_ELL,
    PureC4,
    ScatteringProblem,
    Tabulated,
    badlands,
    de_broglie,
    eval_F,
)
from qrefl.units import Particle

log_u = st.floats(min_value=-math.log(100), max_value=math.log(100))


def test_presets():
    assert PRESET_ELL == {0: 321.3, 30: 282.1, 50: 244.7, 70: 192.8, 90: 111.8}


def test_free_particle(free_problem):
    k = free_problem.kappa
    assert eval_F(free_problem, 3.7) == pytest.approx(k * k)
    assert de_broglie(free_problem, 3.7) == pytest.approx(1 / k)
    assert badlands(free_problem, 3.7) == 0.0


def test_F_at_z0():
    p = c4_problem(0.3)
    assert eval_F(p, p.z_scale) == pytest.approx(2 * p.kappa**2, rel=1e-14)
    assert de_broglie(p, p.z_scale) == pytest.approx(1 / (p.kappa * math.sqrt(2)), rel=1e-14)


def test_F_c3c4_against_mpmath():
    m = C3C4.from_ell(321.3, lambda3=100.0, particle=Particle(1.0))
    p = ScatteringProblem(m, Particle(1.0), 1e-10)
    # mpmath, 40 digits, same formula: 2 (E + C4/(z^3 (z + lambda3)))
    assert eval_F(p, 50.0) == pytest.approx(0.005505797, rel=1e-14)


def test_de_broglie_cliff_limit():
    p = c4_problem(0.1)
    z = 1e-3 * p.z_scale
    assert de_broglie(p, z) == pytest.approx(z * z / p.ell, rel=1e-4)


@pytest.mark.parametrize("fn", [eval_F, de_broglie, badlands])
@pytest.mark.parametrize("z", [0.0, -1.0])
def test_domain(fn, z):
    with pytest.raises(DomainError):
        fn(c4_problem(1.0), z)


def test_badlands_peak_and_u1():
    p = c4_problem(0.37)
    kl = p.kappa_ell
    assert badlands(p, p.z_scale) == pytest.approx(-5 / (8 * kl), rel=1e-13)
    q1 = badlands(p, p.z_scale * math.e) * kl
    assert q1 == pytest.approx(-5 / (8 * math.cosh(2) ** 3), rel=1e-13)
    assert q1 == pytest.approx(-0.011737, abs=1e-6)


@settings(max_examples=60)
@given(log_u, st.floats(min_value=1e-4, max_value=10))
def test_badlands_closed_form_c4(u, kl):
    p = c4_problem(kl)
    got = -kl * badlands(p, p.z_scale * math.exp(u))
    assert got == pytest.approx(5 / (8 * math.cosh(2 * u) ** 3), rel=1e-10)


# Nested finite differences of sqrt(lambda) need extended precision: at the
# ends of the grid Q is ~1e-11 of the natural scale and a double-precision
# second difference with h = 1e-4 z would be dominated by roundoff.
def _q_fd_mp(v_mp, mass, energy, z):
    mp.dps = 50
    z = mpf(z)
    h = z * mpf("1e-4")

    def sl(x):
        return (2 * mass * (energy - v_mp(x))) ** mpf(-0.25)

    second = (sl(z + h) - 2 * sl(z) + sl(z - h)) / h**2
    lam = (2 * mass * (energy - v_mp(z))) ** mpf(-0.5)
    return float(lam**1.5 * second)


@pytest.mark.parametrize("kl", [1e-3, 0.1, 3.0])
def test_badlands_vs_nested_differences(kl, c4_model, silica_model):
    for model, v_mp in (
        (c4_model, lambda x: -mpf(c4_model.c4) / x**4),
        (silica_model, lambda x: -mpf(silica_model.c4) / (x**3 * (x + mpf(silica_model.lambda3)))),
    ):
        p = ScatteringProblem.from_kappa_ell(model, kl)
        for z in p.z_scale * np.logspace(-2, 2, 9):
            ref = _q_fd_mp(v_mp, mpf(p.particle.mass), mpf(p.energy), z)
            assert badlands(p, z) == pytest.approx(ref, rel=1e-5)


@pytest.mark.parametrize("model", ["c4", "c3c4"])
def test_derivatives_match_differences(model, c4_model, silica_model):
    m = c4_model if model == "c4" else silica_model
    for z in np.logspace(0, 4, 13):
        h = z * 1e-5
        d1 = (m.v(z + h) - m.v(z - h)) / (2 * h)
        d2 = (m.v1(z + h) - m.v1(z - h)) / (2 * h)
        assert m.v1(z) == pytest.approx(d1, rel=1e-6)
        assert m.v2(z) == pytest.approx(d2, rel=1e-6)


def test_asymptotes(silica_model):
    m = silica_model
    assert m.v(1e-6 * m.lambda3) * (1e-6 * m.lambda3) ** 3 == pytest.approx(-m.c3, rel=1e-5)
    zc = 1e-8 * m.lambda3
    assert m.v(zc) * zc**3 == pytest.approx(-m.c3, rel=1e-6)
    zf = 1e7 * m.lambda3
    assert m.v(zf) * zf**4 == pytest.approx(-m.c4, rel=1e-6)


@given(st.floats(min_value=-6, max_value=8))
def test_attractive(logz):
    z = 10.0**logz
    for m in (PureC4.from_ell(111.8), C3C4.from_ell(111.8, lambda3=50.0)):
        assert m.v(z) < 0


def test_c3c4_converges_to_c4():
    ell = 321.3
    c4 = PureC4.from_ell(ell)
    near = C3C4.from_ell(ell, lambda3=ell * 1e-6)
    z0 = c4_problem(0.1).z_scale
    for z in z0 * np.logspace(-1, 2, 10):
        assert near.v(z) == pytest.approx(c4.v(z), rel=1e-5)


def test_model_validation():
    with pytest.raises(DomainError):
        PureC4(-1.0)
    with pytest.raises(DomainError):
        C3C4(0.0, 1.0)
    with pytest.raises(ConfigurationError):
        C3C4.from_ell(100.0)
    with pytest.raises(ConfigurationError):
        C3C4.from_ell(100.0, lambda3=1.0, c3=1.0)
    with pytest.raises(DomainError):
        ScatteringProblem(PureC4(1.0), energy=0.0)


def test_problem_derived_quantities():
    p = c4_problem(0.25, ell=192.8)
    assert p.ell == pytest.approx(192.8, rel=1e-14)
    assert p.kappa_ell == pytest.approx(0.25, rel=1e-14)
    assert p.with_kappa(2 * p.kappa).kappa_ell == pytest.approx(0.5, rel=1e-14)
    z = np.logspace(-2, 6, 50)
    assert np.all(eval_F(p, z) > 0)


# --- tabulated model -----------------------------------------------------------

def _write_table(path, z, v, header="z_a0,V_hartree"):
    rows = [header] + [f"{float(a)!r},{float(b)!r}" for a, b in zip(z, v)]
    path.write_text("\n".join(rows) + "\n")


@pytest.fixture
def table_source():
    return C3C4.from_ell(321.3, lambda3=300.0)


@pytest.fixture
def table(tmp_path, table_source):
    z = np.logspace(-1, 5, 400)
    path = tmp_path / "cp.csv"
    _write_table(path, z, table_source.v(z))
    return Tabulated.from_csv(path, table_source.c3, table_source.c4)


def test_table_reproduces_source(table, table_source):
    z = np.logspace(-0.5, 4.5, 97)
    assert np.allclose(table.v(z), table_source.v(z), rtol=1e-6, atol=0)
    assert np.allclose(table.v1(z), table_source.v1(z), rtol=1e-4, atol=0)
    assert np.allclose(table.v2(z), table_source.v2(z), rtol=1e-3, atol=0)


def test_table_tails_continuous(table):
    for edge in (table.z_min, table.z_max):
        below, above = table.v(edge * (1 - 1e-12)), table.v(edge * (1 + 1e-12))
        assert below == pytest.approx(above, rel=1e-9)
    assert table.v(1e-4) * 1e-12 == pytest.approx(-table.c3, rel=1e-2)
    assert table.v(1e8) * 1e32 == pytest.approx(-table.c4, rel=1e-2)


def test_table_badlands_close_to_source(table, table_source):
    p_t = ScatteringProblem.from_kappa_ell(table, 0.1)
    p_s = ScatteringProblem.from_kappa_ell(table_source, 0.1)
    z = p_s.z_scale * np.logspace(-1, 1, 11)
    assert np.allclose(badlands(p_t, z), badlands(p_s, z), rtol=1e-3)


def test_table_validation(tmp_path, table_source):
    z = np.logspace(-1, 5, 400)
    v = table_source.v(z)
    p = tmp_path / "t.csv"
    _write_table(p, z, v, header="z,V")
    with pytest.raises(ConfigurationError, match="header"):
        Tabulated.from_csv(p, table_source.c3, table_source.c4)
    _write_table(p, z[:49], v[:49])
    with pytest.raises(ConfigurationError, match="50 rows"):
        Tabulated.from_csv(p, table_source.c3, table_source.c4)
    _write_table(p, z[::-1], v[::-1])
    with pytest.raises(ConfigurationError, match="increasing"):
        Tabulated.from_csv(p, table_source.c3, table_source.c4)
    _write_table(p, z, v)
    with pytest.raises(ConfigurationError, match="C3 tail"):
        Tabulated.from_csv(p, 1.2 * table_source.c3, table_source.c4)
    with pytest.raises(ConfigurationError, match="C4 tail"):
        Tabulated.from_csv(p, table_source.c3, 0.9 * table_source.c4)
    _write_table(p, z, -v)
    with pytest.raises(ConfigurationError, match="attractive"):
        Tabulated.from_csv(p, table_source.c3, table_source.c4)
