from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cgi_sim import (AtomSpecies, ExperimentParams, IdealPotential, LaserConfig, Kind,
                     closed_form_breakdown, closed_form_differential, ideal_cgi_phase, run_cgi,
                     scale_factor, table1_catalog)

from conftest import INF_C, TABLE1_PARAMS

F = Fraction
SPEC_PREFACTORS = [(2, 2, 0), (2, 2, 0), (2, 2, 0), (F(-7, 6), F(-7, 6), 0), (2, 0, 2), (-6, -6, 0),
                   (6, 6, 0), (10, 0, 10), (-4, 0, -4), (0, 4, -4)]
# printed magnitudes and the size of their last printed digit
PRINTED = {"1": (1.4e7, 1e6), "2": (20.0, 10.0), "3": (14.0, 1.0), "4": (14.0, 1.0),
           "6": (2.3e-9, 1e-10), "7": (2.4e-9, 1e-10), "8": (1.1e-12, 1e-13), "10": (5.7e-16, 1e-17)}


@pytest.fixture(scope="module")
def catalog(laser, atom):
    return table1_catalog(laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6)


def test_catalog_prefactors(catalog):
    assert [t.id for t in catalog] == [str(i) for i in range(1, 11)]
    got = [(t.prefactor_mzi, t.prefactor_sddi, t.prefactor_diff) for t in catalog]
    assert got == [tuple(F(x) for x in row) for row in SPEC_PREFACTORS]
    assert all(isinstance(t.prefactor_mzi, Fraction) for t in catalog)


def test_differential_column_is_exact_difference(catalog):
    for t in catalog:
        assert t.prefactor_diff == t.prefactor_mzi - t.prefactor_sddi


@pytest.mark.parametrize("row", sorted(PRINTED))
def test_magnitudes_match_printed_table(catalog, row):
    value = abs(next(t.value for t in catalog if t.id == row))
    printed, digit = PRINTED[row]
    assert abs(value - printed) <= 0.5 * digit


def test_derived_magnitudes(catalog):
    vals = {t.id: t.value for t in catalog}
    assert vals["1"] == pytest.approx(1.413e7, rel=5e-4)
    assert vals["4"] == pytest.approx(-13.73, rel=5e-4)
    assert vals["6"] == pytest.approx(2.313e-9, rel=5e-4)


def test_row5_magnitude_differs_from_print(catalog):
    row5 = next(t for t in catalog if t.id == "5")
    assert abs(row5.value) == pytest.approx(6.8115e-3, rel=1e-4)
    assert abs(row5.differential) == pytest.approx(1.3623e-2, rel=1e-4)
    assert 1.5e-2 / 2.5 < abs(row5.differential) < 1.5e-2 * 2.5


def test_row9_magnitude_close_to_print(catalog):
    row9 = next(t for t in catalog if t.id == "9")
    assert row9.value == pytest.approx(1.1696e-12, rel=1e-4)
    assert row9.value == pytest.approx(1.1e-12, rel=0.1)


def test_relativistic_rows_vanish_at_infinite_c(laser, atom):
    rows = table1_catalog(laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6, INF_C)
    assert all(t.value == 0.0 for t in rows[5:])


def test_omega_r_taken_from_laser(atom):
    a = table1_catalog(LaserConfig(omega_R=1e7), atom, TABLE1_PARAMS, 9.81, -2.7e-6)
    b = table1_catalog(LaserConfig(omega_R=2e7), atom, TABLE1_PARAMS, 9.81, -2.7e-6)
    assert b[5].value == pytest.approx(2 * a[5].value, rel=1e-15)


def test_closed_form_uniform_gravity(laser, atom):
    b = closed_form_breakdown("MZI", laser, atom, TABLE1_PARAMS, 9.81, 0.0, INF_C)
    assert b.kick == pytest.approx(2 * 4e6 * 9.81 * 0.36, rel=1e-15)
    assert b.propagation == 0.0 and b.separation == 0.0


@pytest.mark.parametrize("kind", ["MZI", "SDDI"])
def test_closed_form_separation_velocity_term(kind, laser, atom):
    p = ExperimentParams(z0=0.0, v0=6.0, T_R=0.6)
    b = closed_form_breakdown(kind, laser, atom, p, 0.0, -2.7e-6, INF_C)
    assert b.separation == pytest.approx(27.9936, rel=1e-12)


def test_closed_form_differential_propagation(laser, atom):
    m = closed_form_breakdown("MZI", laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6, INF_C)
    s = closed_form_breakdown("SDDI", laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6, INF_C)
    assert m.propagation - s.propagation == pytest.approx(-1.3623e-2, rel=1e-4)


def test_disputed_term_is_opt_in(laser, atom):
    a = closed_form_breakdown("SDDI", laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6)
    b = closed_form_breakdown("SDDI", laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6, include_disputed=True)
    row5 = table1_catalog(laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6)[4].value
    assert b.propagation - a.propagation == pytest.approx(-2 * row5, rel=1e-9)


@pytest.mark.parametrize("kind", ["MZI", "SDDI"])
def test_breakdown_totals_reproduce_catalog_columns(kind, laser, atom):
    b = closed_form_breakdown(kind, laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6)
    rows = table1_catalog(laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6)
    assert b.total == pytest.approx(sum(t.phase(Kind(kind)) for t in rows), rel=1e-14)


def test_closed_form_differential_sum(laser, atom):
    d = closed_form_differential(laser, atom, TABLE1_PARAMS, 9.81, -2.7e-6)
    assert d == pytest.approx(-1.3623e-2, rel=1e-4)


CASES = [(5.0, 6.0, 9.81), (2.0, 4.0, 9.81), (5.0, 6.0, 3.0)]


@pytest.mark.parametrize("z0, v0, g", CASES)
def test_simulation_matches_closed_form_components(z0, v0, g, laser, atom):
    p = ExperimentParams(z0, v0, 0.6)
    r = run_cgi(laser, p, IdealPotential(g, -2.7e-6), atom, INF_C)
    for kind, num in ((Kind.MZI, r.mzi), (Kind.SDDI, r.sddi)):
        cf = closed_form_breakdown(kind, laser, atom, p, g, -2.7e-6, INF_C)
        for part in ("propagation", "kick", "separation"):
            assert getattr(num, part) == pytest.approx(getattr(cf, part), rel=1e-3)


def test_scale_factor_value(laser, atom):
    assert scale_factor(laser, atom, 0.6) == pytest.approx(5.0456e3, rel=1e-4)


def test_ideal_phase_examples(laser, atom):
    assert ideal_cgi_phase(laser, atom, 0.6, -2.7e-6) == pytest.approx(-1.3623e-2, rel=1e-4)
    assert ideal_cgi_phase(laser, atom, 0.6, 0.0) == 0.0


@given(st.integers(1, 8), st.floats(0.01, 2.0))
def test_scale_factor_scaling(N, T):
    a = AtomSpecies()
    f = scale_factor(LaserConfig(N=N), a, T)
    assert scale_factor(LaserConfig(N=2 * N), a, T) == pytest.approx(4 * f, rel=1e-14)
    assert scale_factor(LaserConfig(N=N), a, 2 * T) == pytest.approx(8 * f, rel=1e-14)
