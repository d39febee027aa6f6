"""Surface fitting, separable minimization, and PES output files."""

import json
import math

import numpy as np
import pytest

from vqepes.chem import build_geometry
from vqepes.pes import (
    INVERSE_POWERS,
    PESRecord,
    SurfaceFit,
    emit_pes,
    fit_surface,
    minimize_surface,
    records_to_csv,
)
from vqepes.vqe import ProbabilityDiagnostics


def synth_surface(intercept, angle_coeffs, length_coeffs, angles, lengths):
    points = []
    for x in angles:
        for y in lengths:
            value = intercept
            for p, a, b in zip(INVERSE_POWERS, angle_coeffs, length_coeffs):
                value += a * x**-p + b * y**-p
            points.append((x, y, value))
    return points


def test_fit_recovers_known_coefficients():
    intercept = -74.2
    angle_coeffs = [1.3, -0.7, 0.45, -0.1]
    length_coeffs = [-2.0, 1.5, -0.6, 0.25]
    angles = np.linspace(1.0, 3.0, 6)
    lengths = np.linspace(0.8, 2.4, 6)
    points = synth_surface(intercept, angle_coeffs, length_coeffs, angles, lengths)
    fit = fit_surface(points)
    assert fit.intercept == pytest.approx(intercept, rel=1e-8)
    for got, want in zip(fit.angle_coefficients, angle_coeffs):
        assert got == pytest.approx(want, rel=1e-8)
    for got, want in zip(fit.length_coefficients, length_coeffs):
        assert got == pytest.approx(want, rel=1e-8)
    assert fit.residual_rms < 1e-10


def test_fit_constant_surface():
    # 4 inverse powers plus a shared intercept need >= 5 distinct values per axis
    angles = [80.0, 90.0, 100.0, 110.0, 120.0]
    lengths = [0.8, 0.9, 1.0, 1.1, 1.2]
    points = [(x, y, 3.25) for x in angles for y in lengths]
    fit = fit_surface(points)
    assert fit.intercept == pytest.approx(3.25, abs=1e-8)
    assert np.all(np.abs(fit.angle_coefficients) < 1e-8)
    assert np.all(np.abs(fit.length_coefficients) < 1e-8)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-10)


def test_fit_requires_ten_points():
    points = [(90.0 + i, 1.0 + 0.1 * (i % 3), 1.0) for i in range(9)]
    with pytest.raises(ValueError, match="at least 10"):
        fit_surface(points)


def test_fit_requires_distinct_values():
    points = [(90.0, 0.8 + 0.05 * i, 1.0) for i in range(12)]
    with pytest.raises(ValueError, match="distinct"):
        fit_surface(points)


def test_fit_rejects_nonpositive_inputs():
    points = [(90.0 + i, -1.0 + 0.2 * (i % 4), 1.0) for i in range(12)]
    with pytest.raises(ValueError, match="positive"):
        fit_surface(points)


def test_fit_rank_deficiency_reported():
    # exactly three distinct lengths span a 3-dim column space, which cannot
    # carry four length powers plus the intercept: exact rank deficiency
    angles = np.linspace(80.0, 120.0, 6)
    lengths = [0.8, 1.0, 1.2]
    points = [(x, y, 1.0) for x in angles for y in lengths]
    with pytest.raises(ValueError, match="rank deficient.*length"):
        fit_surface(points)


def test_minimize_synthetic_separable():
    # E(x) = -1/x^2 + k/x^3 has its minimum at x = 3k/2
    k_angle, k_length = 70.0, 0.66
    angles = np.linspace(80.0, 130.0, 8)
    lengths = np.linspace(0.7, 1.3, 8)
    points = synth_surface(
        0.0, [-1.0, k_angle, 0.0, 0.0], [-1.0, k_length, 0.0, 0.0], angles, lengths
    )
    fit = fit_surface(points)
    minimum = minimize_surface(fit)
    assert minimum.angle_star == pytest.approx(1.5 * k_angle, abs=1e-5)
    assert minimum.length_star == pytest.approx(1.5 * k_length, abs=1e-5)
    assert not minimum.angle_on_boundary
    assert not minimum.length_on_boundary


def test_minimize_matches_dense_grid():
    rng = np.random.default_rng(3)
    angles = np.linspace(85.0, 125.0, 9)
    lengths = np.linspace(0.75, 1.25, 9)
    points = synth_surface(
        -75.0, [-2.0, 160.0, -1.0, 0.5], [-1.2, 0.9, -0.05, 0.01], angles, lengths
    )
    fit = fit_surface(points)
    minimum = minimize_surface(fit)

    grid_a = np.linspace(85.0, 125.0, 400)
    grid_l = np.linspace(0.75, 1.25, 400)
    surface = fit.predict(grid_a[:, None], grid_l[None, :])
    i, j = np.unravel_index(np.argmin(surface), surface.shape)
    assert abs(minimum.angle_star - grid_a[i]) <= (grid_a[1] - grid_a[0])
    assert abs(minimum.length_star - grid_l[j]) <= (grid_l[1] - grid_l[0])
    assert minimum.energy_star <= surface[i, j] + 1e-12


def test_minimize_second_differences_nonnegative():
    angles = np.linspace(80.0, 130.0, 8)
    lengths = np.linspace(0.7, 1.3, 8)
    points = synth_surface(0.0, [-1.0, 70.0, 0.0, 0.0], [-1.0, 0.66, 0.0, 0.0], angles, lengths)
    fit = fit_surface(points)
    m = minimize_surface(fit)
    for section, star in ((fit.angle_section, m.angle_star), (fit.length_section, m.length_star)):
        h = 1e-4 * star
        second = section(star + h) - 2 * section(star) + section(star - h)
        assert second >= 0.0


def _flat_fit():
    angles = (80.0, 90.0, 100.0, 110.0, 120.0)
    lengths = (0.8, 0.9, 1.0, 1.1, 1.2)
    return fit_surface([(x, y, 5.0) for x in angles for y in lengths])


def test_minimize_flat_surface_flags_boundary():
    minimum = minimize_surface(_flat_fit())
    assert minimum.angle_on_boundary or minimum.length_on_boundary


def test_minimize_range_validation():
    with pytest.raises(ValueError, match="outside fitted span"):
        minimize_surface(_flat_fit(), angle_range=(50.0, 120.0))


def make_records(n):
    records = []
    for i in range(n):
        records.append(
            PESRecord(
                geometry=build_geometry(90.0 + i, 1.0),
                vqe_energy=-75.0 + 0.001 * i,
                exact_energy=-75.0005 + 0.001 * i,
                diagnostics=ProbabilityDiagnostics(
                    top_index=27, top_probability=0.9, second_probability=0.05
                ),
            )
        )
    return records


def test_emit_empty_records(tmp_path):
    csv_path, json_path = emit_pes([], None, tmp_path / "pes")
    assert csv_path.read_text() == (
        "angle_deg,length_angstrom,vqe_energy,exact_energy,delta,top_prob,gap\n"
    )
    payload = json.loads(json_path.read_text())
    assert payload["n_records"] == 0
    assert payload["fit"] is None


def test_emit_single_record(tmp_path):
    csv_path, _ = emit_pes(make_records(1), None, tmp_path / "pes")
    lines = csv_path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[1].startswith("90,1,")


def test_emit_row_count_and_stability(tmp_path):
    records = make_records(5)
    a = emit_pes(records, None, tmp_path / "a")
    b = emit_pes(records, None, tmp_path / "b")
    assert a[0].read_text().count("\n") == 6
    assert a[0].read_text() == b[0].read_text()
    assert a[1].read_text() == b[1].read_text()


def test_records_csv_delta_column():
    text = records_to_csv(make_records(2))
    row = text.splitlines()[1].split(",")
    assert float(row[4]) == pytest.approx(0.0005, abs=1e-12)
    assert float(row[6]) == pytest.approx(0.85, abs=1e-12)
