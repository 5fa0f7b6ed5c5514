import csv
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import c4_problem
from qrefl.errors import ConfigurationError, FitError, NumericError
from qrefl.gauge import (
    affine_map,
    compose,
    identity_map,
    log_map,
    power_map,
    wiggle_map,
    wkb_gauge_map,
)
from qrefl.potentials import C3C4, PureC4, ScatteringProblem, SILICA_LIKE_C3
from qrefl.scatter import (
    ReflectionScan,
    ScanRow,
    SolverConfig,
    check_gauge_invariance,
    extract_b,
    matching_points,
    reflection_scan,
    solve_one_way,
    wronskian,
)

FIXTURE = Path(__file__).parent / "fixtures" / "c4_oracle.csv"


def _fixture_rows():
    with FIXTURE.open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(lines)]


# --- wronskian ------------------------------------------------------------------

@given(st.complex_numbers(max_magnitude=1e3), st.complex_numbers(max_magnitude=1e3))
def test_wronskian_self(p, d):
    assert wronskian((p, d), (p, d)) == 0


@pytest.mark.parametrize("z", [0.0, 1.3, -7.0])
def test_wronskian_plane_waves(z):
    kappa = 0.7
    up = np.exp(1j * kappa * z)
    down = np.exp(-1j * kappa * z)
    w = wronskian((up, 1j * kappa * up), (down, -1j * kappa * down))
    assert w == pytest.approx(-2j * kappa, abs=1e-15)


# --- single solves -------------------------------------------------------------

def test_free_particle(free_problem):
    cfg = SolverConfig(z_inner=1.0, z_outer=30.0)
    a = solve_one_way(free_problem, cfg)
    assert abs(a.r) < 1e-12
    assert abs(a.t) == pytest.approx(1.0, abs=1e-12)


def test_low_energy_limit():
    a = solve_one_way(c4_problem(1e-4))
    assert abs(a.R - (1 - 4e-4)) < 2e-6


@pytest.mark.parametrize("row", _fixture_rows(), ids=lambda r: f"kl={r['kappa_ell']}")
def test_oracle_fixture(row):
    a = solve_one_way(c4_problem(row["kappa_ell"]))
    assert abs(a.R - row["R"]) < max(row["error_bar"], 1e-10)


@pytest.mark.parametrize("kl", [1e-3, 0.1, 1.0, 10.0])
def test_diagnostics(kl):
    a = solve_one_way(c4_problem(kl))
    assert 0 <= a.R <= 1
    assert a.unitarity_defect < 1e-8
    assert a.wronskian_drift < 1e-8
    assert a.z_inner < c4_problem(kl).z_scale < a.z_outer


def test_c3c4_diagnostics(silica_model):
    a = solve_one_way(ScatteringProblem.from_kappa_ell(silica_model, 1.0))
    assert a.unitarity_defect < 1e-8 and a.wronskian_drift < 1e-8


def test_boundary_correction_matters():
    p = c4_problem(1.0)
    loose = dict(badlands_threshold=1e-6)
    plain = solve_one_way(p, SolverConfig(boundary_correction=False, **loose))
    corrected = solve_one_way(p, SolverConfig(**loose))
    ref = solve_one_way(p)
    assert abs(corrected.R - ref.R) < 0.2 * abs(plain.R - ref.R)


@pytest.mark.parametrize("kl", [0.1, 1.0])
def test_mesh_refinement(kl):
    p = c4_problem(kl)
    a = solve_one_way(p, SolverConfig(rel_tol=1e-11))
    b = solve_one_way(p, SolverConfig(rel_tol=5e-12))
    assert abs(a.R - b.R) < 10 * max(a.unitarity_defect, b.unitarity_defect, 1e-13)


@pytest.mark.parametrize("kl", [0.1, 1.0, 10.0])
def test_matching_point_insensitivity(kl):
    p = c4_problem(kl)
    cfg = SolverConfig()
    zi, zo = matching_points(p, cfg)
    a = solve_one_way(p, cfg)
    b = solve_one_way(p, SolverConfig(z_inner=zi / 2, z_outer=2 * zo))
    assert abs(a.R - b.R) < 1e-7


def test_step_budget():
    with pytest.raises(NumericError, match="step budget"):
        solve_one_way(c4_problem(1.0), SolverConfig(max_steps=5))


def test_config_validation():
    for kw in ({"rel_tol": 0.0}, {"rel_tol": 0.1}, {"abs_tol": -1.0},
               {"badlands_threshold": 2.0}, {"z_inner": -1.0},
               {"z_inner": 5.0, "z_outer": 2.0}, {"max_steps": 0},
               {"max_inner_phase": 0.0}):
        with pytest.raises(ConfigurationError):
            SolverConfig(**kw)


# --- gauge invariance ------------------------------------------------------------

def test_gauge_identity():
    g = check_gauge_invariance(c4_problem(0.5), identity_map())
    assert g.dr < 1e-10 and g.dt < 1e-10


def test_gauge_affine():
    g = check_gauge_invariance(c4_problem(0.5), affine_map(2.0))
    assert g.dr < 1e-7


def test_gauge_wkb():
    p = c4_problem(0.5)
    g = check_gauge_invariance(p, wkb_gauge_map(p))
    assert g.dR < 1e-6


def _random_maps(rng, zs):
    yield wiggle_map(rng.uniform(-0.7, 2.0), zs * rng.uniform(0.2, 2.0), zs * rng.uniform(0.5, 2.0))
    yield power_map(rng.uniform(0.5, 2.0))
    yield compose(power_map(rng.uniform(0.5, 2.0)), log_map())


@pytest.mark.slow
@pytest.mark.parametrize("kl", [0.1, 1.0, 10.0])
def test_gauge_random_maps(kl):
    rng = np.random.default_rng(int(kl * 1000))
    p = c4_problem(kl)
    for gmap in _random_maps(rng, p.z_scale):
        g = check_gauge_invariance(p, gmap)
        assert g.dr < 1e-6 and g.dt < 1e-6, gmap.name


# --- scans ------------------------------------------------------------------------

def test_scan_monotone():
    p = c4_problem(1.0)
    kappa = np.array([1e-4, 1e-3, 1e-2]) / p.ell
    scan = reflection_scan(p, kappa)
    assert scan.monotone_decreasing
    assert not scan.failures
    assert len(scan) == 3


def test_scan_ell_ordering():
    e = c4_problem(0.01).energy
    r_long = solve_one_way(ScatteringProblem(PureC4.from_ell(321.3), energy=e)).R
    r_short = solve_one_way(ScatteringProblem(PureC4.from_ell(111.8), energy=e)).R
    assert r_short > r_long


def test_scan_single_point():
    p = c4_problem(0.3)
    scan = reflection_scan(p, [p.kappa])
    assert len(scan) == 1
    assert scan.R[0] == solve_one_way(p.with_kappa(p.kappa)).R


def test_scan_parallel_matches_serial():
    p = c4_problem(0.3)
    grid = p.kappa * np.array([0.5, 1.0, 2.0])
    assert np.array_equal(reflection_scan(p, grid).R, reflection_scan(p, grid, workers=2).R)


def test_scan_records_failures():
    p = c4_problem(1.0)
    scan = reflection_scan(p, p.kappa * np.array([1e-3, 1.0]), SolverConfig(max_steps=50))
    assert len(scan) == 2
    assert scan.failures and all("step budget" in r.error for r in scan.failures)


@pytest.mark.parametrize("grid", [[], [1.0, 0.5], [-1.0, 1.0]])
def test_scan_grid_validation(grid):
    with pytest.raises(ConfigurationError):
        reflection_scan(c4_problem(1.0), grid)


# --- b fit -------------------------------------------------------------------------

def _synthetic(b0, kappas):
    rows = tuple(ScanRow(k, 1 - 4 * k * b0, 4 * k * b0, 0.0, 0.0) for k in kappas)
    return ReflectionScan(rows)


def test_b_synthetic():
    fit = extract_b(_synthetic(100.0, np.logspace(-7, -5, 6)))
    assert fit.b == pytest.approx(100.0, rel=1e-10)
    assert fit.points == 6


def test_b_needs_small_kappa():
    with pytest.raises(FitError, match="smaller kappa"):
        extract_b(_synthetic(100.0, np.logspace(-3, -2, 6)))
    with pytest.raises(FitError):
        extract_b(ReflectionScan(()))


def _fit_model(model):
    p = ScatteringProblem.from_kappa_ell(model, 1.0)
    grid = np.logspace(-4, math.log10(5e-3), 8) / model_ell(model)
    return extract_b(reflection_scan(p, grid))


def model_ell(model):
    return ScatteringProblem.from_kappa_ell(model, 1.0).ell


@pytest.mark.slow
def test_b_pure_c4():
    fit = _fit_model(PureC4.from_ell(321.3))
    assert fit.b == pytest.approx(321.3, rel=1e-3)


@pytest.mark.slow
def test_b_c3c4_below_ell():
    fit = _fit_model(C3C4.from_ell(321.3, c3=SILICA_LIKE_C3))
    assert 0 < fit.b < 321.3
