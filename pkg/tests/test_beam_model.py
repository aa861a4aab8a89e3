"""
OAM beam model tests: far field, pattern, divergence angle, beamwidth and divergence models
"""
import math
import warnings

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import special

from oamlens.core.exceptions import BeamwidthUndefinedError, DomainError, RangeWarning, SingularityError
from oamlens.schemas.beam import DipoleExcitation, DivergenceForm, DivergenceModel, DivergenceTable, UcaGeometry
from oamlens.services import numerics
from oamlens.services.beam_model import BeamModelService


def _dense_peak(scale: float, order: int) -> float:
    theta = np.linspace(0.0, math.pi / 2, 1_000_001)
    return float(theta[np.argmax(special.jv(order, scale * np.sin(theta)) ** 2)])


class TestFarField:
    """UCA far-field tests"""

    @pytest.mark.parametrize("mode", [-4, -2, -1, 0, 1, 2, 3, 4])
    def test_winding_number(self, uca, mode):
        """Phase accumulated around a full φ circle equals 2πl"""
        exc = DipoleExcitation()
        phis = np.linspace(0.0, 2 * math.pi, 257)
        field = [BeamModelService.field_amplitude(uca, exc, mode, 10.0, 0.3, float(phi)) for phi in phis]
        phases = np.unwrap(np.angle(field))
        winding = phases[-1] - phases[0]
        assert abs(winding - 2 * math.pi * mode) <= 1e-9, f"mode {mode}: winding {winding}"

    @pytest.mark.parametrize("mode", [-4, -1, 0, 1, 3, 4])
    def test_magnitude_independent_of_azimuth(self, uca, mode):
        """|E| is unchanged by rotating φ"""
        exc = DipoleExcitation()
        magnitudes = [
            abs(BeamModelService.field_amplitude(uca, exc, mode, 10.0, 0.4, float(phi)))
            for phi in np.linspace(0.0, 2 * math.pi, 97)
        ]
        assert max(magnitudes) > 0
        spread = max(magnitudes) - min(magnitudes)
        assert spread <= 1e-12 * max(magnitudes), f"mode {mode}: spread {spread:.3e}"

    def test_null_at_bessel_zero(self, uca):
        """Field vanishes where 2kR·sinθ hits the first zero of J_1"""
        exc = DipoleExcitation()
        zero = numerics.solve_scalar(lambda x: numerics.bessel_j(1, x), 3.0, 4.5, tol=1e-14)
        theta_null = math.asin(zero / uca.argument_scale)
        theta_peak = BeamModelService.peak_divergence_angle(uca, 1)
        null = abs(BeamModelService.field_amplitude(uca, exc, 1, 10.0, theta_null, 0.0))
        peak = abs(BeamModelService.field_amplitude(uca, exc, 1, 10.0, theta_peak, 0.0))
        assert null <= 1e-8 * peak

    def test_singular_at_origin(self, uca):
        with pytest.raises(SingularityError):
            BeamModelService.field_amplitude(uca, DipoleExcitation(), 1, 0.0, 0.3, 0.0)

    def test_mode_outside_array_range(self, uca):
        with pytest.raises(DomainError, match="outside"):
            BeamModelService.pattern_gain(uca, 8, 0.2)


class TestPattern:
    """Normalized pattern and divergence angle tests"""

    def test_gain_is_one_at_peak(self, uca):
        theta = BeamModelService.peak_divergence_angle(uca, 2)
        assert abs(BeamModelService.pattern_gain(uca, 2, theta) - 1.0) <= 1e-12

    def test_gain_bounds(self, uca):
        for theta in np.linspace(0.0, math.pi / 2, 91):
            gain = BeamModelService.pattern_gain(uca, 3, float(theta))
            assert 0.0 <= gain <= 1.0

    def test_vortex_null_on_axis(self, uca):
        assert BeamModelService.pattern_gain(uca, 1, 0.0) == 0.0
        assert BeamModelService.peak_divergence_angle(uca, 0) == 0.0

    @pytest.mark.parametrize("mode", [1, 2, 3])
    def test_peak_matches_dense_grid(self, uca, mode):
        theta = BeamModelService.peak_divergence_angle(uca, mode)
        assert abs(theta - _dense_peak(uca.argument_scale, mode)) <= 1e-5

    def test_peak_for_argument_scale_ten(self, wavelength):
        """2kR = 10 puts the peak at arcsin(x*/10), x* the first maximum of J_1"""
        geom = UcaGeometry(n_elements=16, radius=10.0 * wavelength / (4 * math.pi), frequency=35e9)
        assert abs(geom.argument_scale - 10.0) <= 1e-12
        expected = math.asin(1.8411837813406593 / 10.0)
        assert abs(BeamModelService.peak_divergence_angle(geom, 1) - expected) <= 1e-6

    def test_operating_point_angles(self, uca):
        """R = 0.6λ gives θ_1 ≈ 14.13° and θ_2 ≈ 23.9°"""
        theta_1 = math.degrees(BeamModelService.peak_divergence_angle(uca, 1))
        theta_2 = math.degrees(BeamModelService.peak_divergence_angle(uca, 2))
        assert abs(theta_1 - 14.13) <= 0.01
        assert abs(theta_2 - 23.90) <= 0.05
        print(f"\n✅ θ_1 = {theta_1:.3f}°, θ_2 = {theta_2:.3f}°")

    @pytest.mark.parametrize("radius_wavelengths", [0.6, 1.0, 2.0])
    def test_divergence_grows_with_mode(self, wavelength, radius_wavelengths):
        """θ_l is non-decreasing in |l| and symmetric in the sign of l"""
        geom = UcaGeometry.from_wavelengths(16, radius_wavelengths, 35.0e9)
        thetas = [BeamModelService.peak_divergence_angle(geom, mode) for mode in range(0, 8)]
        for mode, (lower, upper) in enumerate(zip(thetas, thetas[1:])):
            assert upper >= lower, f"R={radius_wavelengths}λ: θ_{mode + 1} < θ_{mode}"
        for mode in range(1, 8):
            assert BeamModelService.peak_divergence_angle(geom, -mode) == thetas[mode]

    def test_peak_beyond_horizon(self):
        """Small arrays push the first maximum past θ = π/2"""
        geom = UcaGeometry.from_wavelengths(16, 0.1, 35e9)
        assert BeamModelService.peak_divergence_angle(geom, 1) == math.pi / 2
        with pytest.raises(BeamwidthUndefinedError):
            BeamModelService.half_power_beamwidth(geom, 1)


class TestBeamwidth:
    """Half-power beamwidth tests"""

    @pytest.mark.parametrize("mode", [1, 2, 3])
    def test_crossings_are_half_power(self, uca, mode):
        lower, upper = BeamModelService.half_power_crossings(uca, mode)
        assert lower < BeamModelService.peak_divergence_angle(uca, mode) < upper
        assert abs(BeamModelService.pattern_gain(uca, mode, lower) - 0.5) <= 1e-6
        assert abs(BeamModelService.pattern_gain(uca, mode, upper) - 0.5) <= 1e-6

    def test_matches_grid_scan(self, uca):
        theta = np.linspace(0.0, math.pi / 2, 1_000_001)
        pattern = special.jv(1, uca.argument_scale * np.sin(theta)) ** 2
        above = theta[pattern / pattern.max() >= 0.5]
        expected = 0.5 * (above[-1] - above[0])
        assert abs(BeamModelService.half_power_beamwidth(uca, 1) - expected) <= 1e-4

    def test_plane_wave_beamwidth(self, uca):
        """l = 0: Δθ_0 is the half-power angle itself"""
        _, upper = BeamModelService.half_power_crossings(uca, 0)
        assert BeamModelService.half_power_beamwidth(uca, 0) == upper
        assert abs(BeamModelService.pattern_gain(uca, 0, upper) - 0.5) <= 1e-6

    def test_divergence_exceeds_beamwidth(self, uca):
        for mode in (1, 2, 3):
            assert BeamModelService.peak_divergence_angle(uca, mode) > BeamModelService.half_power_beamwidth(uca, mode)

    def test_peak_gain(self, uca):
        for mode in (0, 1, 2):
            gain = BeamModelService.peak_gain(uca, mode)
            assert math.isfinite(gain) and gain > 2.0


class TestDivergenceModels:
    """Empirical divergence model tests"""

    def test_power_law_at_table_start(self):
        model = DivergenceModel(
            form=DivergenceForm.POWER_LAW, mode_l=1, params=(147.0, -1.011), valid_R_range=(8.8, 24.2)
        )
        theta = BeamModelService.divergence_from_model(model, 8.8)
        assert abs(theta - 16.4) <= 0.05 * 16.4

    def test_rational_at_table_end(self):
        model = DivergenceModel(
            form=DivergenceForm.RATIONAL, mode_l=1, params=(140.9, -0.1902), valid_R_range=(8.8, 24.2)
        )
        theta = BeamModelService.divergence_from_model(model, 24.2)
        assert abs(theta - 5.8) <= 0.05 * 5.8

    def test_out_of_range_warns(self):
        model = BeamModelService.builtin_divergence_models()[0]
        with pytest.warns(RangeWarning):
            theta = BeamModelService.divergence_from_model(model, 30.0)
        assert theta == model.evaluate(30.0)

    def test_in_range_is_silent(self):
        model = BeamModelService.builtin_divergence_models()[0]
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            BeamModelService.divergence_from_model(model, 12.1)

    def test_builtin_models_decrease_in_radius(self):
        """Every published model is strictly decreasing over the table range"""
        for model in BeamModelService.builtin_divergence_models():
            lo, hi = model.valid_R_range
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                thetas = [BeamModelService.divergence_from_model(model, float(r)) for r in np.linspace(lo, hi, 200)]
            for a, b in zip(thetas, thetas[1:]):
                assert b < a, f"mode {model.mode_l} {model.form.value}: {a} -> {b}"

    def test_invalid_models_rejected(self):
        with pytest.raises(ValidationError, match="b < 0"):
            DivergenceModel(form=DivergenceForm.POWER_LAW, mode_l=1, params=(147.0, 0.5), valid_R_range=(8.8, 24.2))
        with pytest.raises(ValidationError):
            DivergenceModel(form=DivergenceForm.RATIONAL, mode_l=1, params=(140.9, -9.0), valid_R_range=(8.8, 24.2))

    def test_builtin_models(self):
        models = BeamModelService.builtin_divergence_models()
        assert len(models) == 8
        assert {model.mode_l for model in models} == {1, 2, 3, 4}


class TestDivergenceTable:
    """Divergence table tests"""

    def test_builtin_table(self, divergence_table):
        assert len(divergence_table.rows) == 15
        assert divergence_table.mode_count == 4
        assert divergence_table.samples(1)[0] == (8.8, 16.4)

    def test_table_must_decrease(self):
        with pytest.raises(ValidationError, match="strictly decrease"):
            DivergenceTable.model_validate({"rows": [
                {"R_mm": 8.0, "thetas_deg": [10.0, 20.0]},
                {"R_mm": 9.0, "thetas_deg": [11.0, 19.0]},
            ]})

    def test_modes_must_increase_within_row(self):
        with pytest.raises(ValidationError):
            DivergenceTable.model_validate({"rows": [{"R_mm": 8.0, "thetas_deg": [20.0, 10.0]}]})

    def test_load_csv(self, tmp_path):
        path = tmp_path / "table.csv"
        path.write_text("R_mm,theta1_deg,theta2_deg\n10,10,20\n20,5,10\n40,2.5,5\n", encoding="utf-8")
        table = BeamModelService.load_divergence_table(path)
        assert table.mode_count == 2
        assert table.samples(2) == [(10.0, 20.0), (20.0, 10.0), (40.0, 5.0)]

    def test_load_csv_without_radius(self, tmp_path):
        path = tmp_path / "table.csv"
        path.write_text("radius,theta1_deg\n10,10\n", encoding="utf-8")
        with pytest.raises(DomainError, match="R_mm"):
            BeamModelService.load_divergence_table(path)

    def test_fit_report(self, divergence_table):
        report = BeamModelService.fit_divergence_models(divergence_table)
        assert report.source == "builtin"
        assert [row.mode for row in report.rows] == [1, 2, 3, 4]
        assert all(row.b < 0 for row in report.rows)
