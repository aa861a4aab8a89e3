"""
Link budget tests: received power, SNR cases, converged and bifocal SNR, capacity and sweeps
"""
import math

import pytest
from pydantic import ValidationError

from oamlens.core.exceptions import BeamGeometryError, ConfigError, DomainError
from oamlens.schemas.bifocal import LensBranch
from oamlens.schemas.link import (
    CapacityCurve,
    LinkSystem,
    ModeBeam,
    ReceptionCase,
    Scenario,
    SnrCaseResult,
    SweepVariable,
)
from oamlens.services.beam_model import BeamModelService
from oamlens.services.bifocal_design import BifocalDesignService
from oamlens.services.lens_design import LensDesignService
from oamlens.services.link_budget import LinkBudgetService


def _scale(cfg) -> float:
    a_er = cfg.wavelength ** 2 * cfg.rx_gain / (4 * math.pi)
    return a_er * cfg.tx_power / (4 * math.pi * cfg.distance ** 2) / cfg.noise


@pytest.fixture
def bifocal(uca, lens):
    return BifocalDesignService.design(uca, lens, [1, 2], target_rho=2.17)


class TestPowerBudget:
    """Effective aperture, received power and Shannon capacity"""

    def test_effective_aperture(self):
        assert abs(LinkBudgetService.effective_aperture(1.0, 4 * math.pi) - 1.0) <= 1e-15
        assert abs(LinkBudgetService.effective_aperture(8.571e-3, 1.0) - 5.846e-6) <= 1e-3 * 5.846e-6
        ratio = LinkBudgetService.effective_aperture(0.02, 3.0) / LinkBudgetService.effective_aperture(0.01, 3.0)
        assert abs(ratio - 4.0) <= 1e-12

    def test_received_power(self):
        assert LinkBudgetService.received_power(1.0, 0.0, 1e-4, 10.0) == 0.0
        value = LinkBudgetService.received_power(1.0, 10.0, 1e-4, 10.0)
        assert abs(value - 7.96e-7) <= 1e-3 * 7.96e-7
        near = LinkBudgetService.received_power(1.0, 10.0, 1e-4, 5.0)
        assert abs(near / value - 4.0) <= 1e-12

    def test_received_power_needs_distance(self):
        with pytest.raises(DomainError):
            LinkBudgetService.received_power(1.0, 10.0, 1e-4, 0.0)

    def test_shannon_capacity(self):
        assert LinkBudgetService.shannon_capacity(1e6, [0.0, 0.0]) == 0.0
        assert LinkBudgetService.shannon_capacity(1e6, [1.0]) == 1e6
        assert LinkBudgetService.shannon_capacity(1.0, [3.0, 3.0]) == 4.0

    def test_max_distance(self):
        assert LinkBudgetService.max_distance(0.1, 0.0) is None
        assert abs(LinkBudgetService.max_distance(0.1, math.radians(0.5)) - 0.1 / math.tan(math.radians(0.5))) <= 1e-12


class TestDivergentSnr:
    """Divergent beam reception cases"""

    def test_case_bounds(self, link_config):
        beam = ModeBeam(mode=1, theta=math.radians(8.0), delta_theta=math.radians(2.0), peak_gain=10.0)
        result = LinkBudgetService.snr_divergent(link_config, beam)
        d1, d2 = result.d_bounds
        assert abs(d1 - 0.567) <= 1e-3
        assert abs(d2 - 0.951) <= 1e-3
        assert result.case == ReceptionCase.NO_RECEPTION
        assert result.snr == 0.0

    def test_partition(self, link_config):
        beam = ModeBeam(mode=1, theta=math.radians(8.0), delta_theta=math.radians(2.0), peak_gain=10.0)
        d1, d2 = LinkBudgetService.snr_divergent(link_config, beam).d_bounds
        assert d1 < d2
        for distance, case in ((0.3, ReceptionCase.FULL_MAIN_LOBE), (0.8, ReceptionCase.PARTIAL),
                               (1.5, ReceptionCase.NO_RECEPTION)):
            cfg = link_config.model_copy(update={"distance": distance})
            assert LinkBudgetService.snr_divergent(cfg, beam).case == case

    def test_full_main_lobe_scaling(self, link_config):
        beam = ModeBeam(mode=1, theta=math.radians(30.0), delta_theta=math.radians(5.0), peak_gain=10.0)
        near = link_config.model_copy(update={"distance": 0.05})
        far = link_config.model_copy(update={"distance": 0.1})
        loud = near.model_copy(update={"tx_power": 2.0})
        snr_near = LinkBudgetService.snr_divergent(near, beam).snr
        assert abs(snr_near - 10.0 * _scale(near)) <= 1e-9 * snr_near
        assert abs(snr_near / LinkBudgetService.snr_divergent(far, beam).snr - 4.0) <= 1e-12
        assert abs(LinkBudgetService.snr_divergent(loud, beam).snr / snr_near - 2.0) <= 1e-12

    def test_continuity_at_inner_bound(self, uca, link_config):
        """SNR is continuous where FullMainLobe hands over to Partial"""
        beam = LinkBudgetService.mode_beam(uca, 1)
        profile = LinkBudgetService.gain_profile(uca, 1, beam.peak_gain)
        d1, _ = LinkBudgetService.snr_divergent(link_config, beam, profile).d_bounds
        at = LinkBudgetService.snr_divergent(link_config.model_copy(update={"distance": d1}), beam, profile)
        past = LinkBudgetService.snr_divergent(
            link_config.model_copy(update={"distance": d1 * (1 + 1e-12)}), beam, profile
        )
        assert at.case == ReceptionCase.FULL_MAIN_LOBE
        assert past.case == ReceptionCase.PARTIAL
        assert abs(past.snr - at.snr) <= 1e-9 * at.snr

    def test_partial_uses_pattern(self, uca, link_config):
        beam = LinkBudgetService.mode_beam(uca, 1)
        profile = LinkBudgetService.gain_profile(uca, 1, beam.peak_gain)
        _, d2 = LinkBudgetService.snr_divergent(link_config, beam, profile).d_bounds
        cfg = link_config.model_copy(update={"distance": 0.99 * d2})
        result = LinkBudgetService.snr_divergent(cfg, beam, profile)
        theta_rx = math.atan(cfg.rx_radius / cfg.distance)
        expected = beam.peak_gain * BeamModelService.pattern_gain(uca, 1, theta_rx) * _scale(cfg)
        assert result.case == ReceptionCase.PARTIAL
        assert abs(result.snr - expected) <= 1e-9 * expected

    def test_plane_wave(self, uca, link_config):
        beam = LinkBudgetService.mode_beam(uca, 0)
        d1, d2 = LinkBudgetService.snr_divergent(link_config, beam).d_bounds
        assert d2 is None
        assert abs(d1 - link_config.rx_radius / math.tan(beam.delta_theta)) <= 1e-12
        far = link_config.model_copy(update={"distance": 100.0})
        assert LinkBudgetService.snr_divergent(far, beam).case == ReceptionCase.PARTIAL

    def test_beam_geometry_error(self, link_config):
        beam = ModeBeam(mode=1, theta=math.radians(5.0), delta_theta=math.radians(5.0), peak_gain=10.0)
        with pytest.raises(BeamGeometryError):
            LinkBudgetService.snr_divergent(link_config, beam)

    def test_no_reception_must_be_zero(self):
        with pytest.raises(ValidationError):
            SnrCaseResult(snr=1.0, case=ReceptionCase.NO_RECEPTION, d_bounds=(0.1, 0.2))

    def test_capacity_divergent(self, link_config):
        beams = [
            ModeBeam(mode=1, theta=math.radians(30.0), delta_theta=math.radians(5.0), peak_gain=10.0),
            ModeBeam(mode=2, theta=math.radians(40.0), delta_theta=math.radians(5.0), peak_gain=8.0),
            ModeBeam(mode=3, theta=math.radians(50.0), delta_theta=math.radians(5.0), peak_gain=6.0),
        ]
        cfg = link_config.model_copy(update={"distance": 0.05})
        total = LinkBudgetService.capacity_divergent(cfg, beams)
        manual = sum(cfg.bandwidth * math.log2(1 + beam.peak_gain * _scale(cfg)) for beam in beams)
        assert abs(total - manual) <= 1e-9 * manual
        assert LinkBudgetService.capacity_divergent(cfg, beams[:2]) <= total


class TestConvergedSnr:
    """Single-focal converged beam tests"""

    def test_bracket(self, uca, lens, link_config):
        theta = BeamModelService.peak_divergence_angle(uca, 1)
        result = LinkBudgetService.snr_converged(link_config, 1, lens, theta)
        gain = LensDesignService.converged_gain(lens.diameter, link_config.wavelength)
        n, f, c = lens.refraction_index, lens.focal_distance, math.cos(theta)
        redistributed = gain * lens.energy_ratio * (n * c - 1) ** 3 / (f * f * (n - 1) ** 2 * (n - c))
        depth = LensDesignService.thickness(n, f, lens.diameter, theta)
        expected = (redistributed - lens.attenuation_factor * depth) * _scale(link_config)
        assert result.case == ReceptionCase.FULL_MAIN_LOBE
        assert abs(result.snr - expected) <= 1e-9 * expected
        assert abs(result.d_max - 0.1 / math.tan(math.radians(0.5))) <= 1e-9

    def test_unbounded_without_residual_divergence(self, uca, lens, link_config):
        cfg = link_config.model_copy(update={"residual_divergence": 0.0, "distance": 1000.0})
        result = LinkBudgetService.snr_converged(cfg, 1, lens, BeamModelService.peak_divergence_angle(uca, 1))
        assert result.d_max is None
        assert result.snr > 0

    def test_beyond_max_distance(self, uca, lens, link_config):
        cfg = link_config.model_copy(update={"distance": 20.0})
        result = LinkBudgetService.snr_converged(cfg, 1, lens, BeamModelService.peak_divergence_angle(uca, 1))
        assert result.case == ReceptionCase.NO_RECEPTION
        assert result.snr == 0.0

    def test_fully_absorbed(self, uca, lens, link_config):
        heavy = lens.model_copy(update={"attenuation_factor": 1.0e6})
        result = LinkBudgetService.snr_converged(link_config, 1, heavy, BeamModelService.peak_divergence_angle(uca, 1))
        assert result.snr == 0.0
        assert result.fully_absorbed

    def test_capacity_converged(self, uca, lens, link_config):
        beams = [LinkBudgetService.mode_beam(uca, mode) for mode in (1, 2, 3)]
        cfg = link_config.model_copy(update={"modes": [1, 2, 3]})
        total = LinkBudgetService.capacity_converged(cfg, lens, beams)
        manual = sum(
            cfg.bandwidth * math.log2(1 + LinkBudgetService.snr_converged(cfg, b.mode, lens, b.theta).snr)
            for b in beams
        )
        assert abs(total - manual) <= 1e-9 * manual


class TestBifocalSnr:
    """Bifocal converged beam tests"""

    def test_external_branch_equals_converged(self, uca, lens, link_config, bifocal):
        theta = BeamModelService.peak_divergence_angle(uca, 2)
        result = LinkBudgetService.snr_bifocal(link_config, 2, bifocal, lens, theta)
        single = LinkBudgetService.snr_converged(link_config, 2, lens, theta)
        assert result.branch == LensBranch.EXTERNAL
        assert result.snr == single.snr

    def test_internal_branch_beats_single(self, uca, lens, link_config, bifocal):
        theta = BeamModelService.peak_divergence_angle(uca, 1)
        result = LinkBudgetService.snr_bifocal(link_config, 1, bifocal, lens, theta)
        single = LinkBudgetService.snr_converged(link_config, 1, lens, theta)
        assert result.branch == LensBranch.INTERNAL
        assert result.snr > single.snr

    def test_internal_branch_default_divergence(self, uca, lens, link_config, bifocal):
        """Without σ the internal branch is bounded by its own residual divergence τ"""
        cfg = link_config.model_copy(update={"residual_divergence": None})
        theta = BeamModelService.peak_divergence_angle(uca, 1)
        result = LinkBudgetService.snr_bifocal(cfg, 1, bifocal, lens, theta)
        theta_fi = BifocalDesignService.internal_angle(bifocal.f_e, bifocal.f_i, theta)
        tau = BifocalDesignService.residual_divergence(theta, theta_fi, bifocal.n)
        assert abs(result.d_max - cfg.rx_radius / math.tan(tau)) <= 1e-12

    def test_zero_amplitude(self, uca, lens, link_config, bifocal):
        heavy = lens.model_copy(update={"attenuation_factor": 1.0e7})
        result = LinkBudgetService.snr_bifocal(
            link_config, 1, bifocal, heavy, BeamModelService.peak_divergence_angle(uca, 1)
        )
        assert result.snr == 0.0 and result.fully_absorbed

    def test_bifocal_capacity_not_below_converged(self, uca, lens, link_config, bifocal):
        beams = [LinkBudgetService.mode_beam(uca, mode) for mode in link_config.modes]
        converged = LinkBudgetService.capacity_converged(link_config, lens, beams)
        with_bifocal = LinkBudgetService.capacity_bifocal(link_config, bifocal, lens, beams)
        assert with_bifocal > converged
        print(f"\n✅ bifocal {with_bifocal / 1e6:.3f} Mbit/s vs single-focal {converged / 1e6:.3f} Mbit/s")


class TestSweep:
    """Capacity sweep tests"""

    def _system(self, uca, lens, link_config, bifocal=None, **updates):
        cfg = link_config.model_copy(update=updates) if updates else link_config
        return LinkSystem(link=cfg, uca=uca, lens=lens, bifocal=bifocal)

    def test_divergent_distance(self, uca, lens, link_config):
        system = self._system(uca, lens, link_config, modes=[1, 2, 3])
        curve = LinkBudgetService.sweep(system, Scenario.DIVERGENT, SweepVariable.DISTANCE, 0.05, 2.0, 200)
        capacities = curve.capacities
        assert len(capacities) == 200
        assert all(b <= a * (1 + 1e-12) for a, b in zip(capacities, capacities[1:]))
        assert capacities[-1] == 0.0
        assert curve.xs[0] == 0.05 and curve.xs[-1] == 2.0

    def test_converged_focal(self, uca, lens, link_config):
        system = self._system(uca, lens, link_config)
        curve = LinkBudgetService.sweep(system, Scenario.CONVERGED, SweepVariable.FOCAL, 0.02, 0.06, 200)
        capacities = curve.capacities
        assert all(b <= a * (1 + 1e-12) for a, b in zip(capacities, capacities[1:]))
        assert capacities[0] > capacities[-1]

    def test_bifocal_radius(self, uca, lens, link_config, bifocal):
        """Capacity grows with the UCA radius at a decreasing rate"""
        lens = lens.model_copy(update={"attenuation_factor": 10.0})
        system = LinkSystem(
            link=link_config.model_copy(update={"distance": 0.5}),
            uca=uca,
            lens=lens,
            bifocal=bifocal,
            converged_gain=1000.0,
        )
        start = 0.6 * uca.wavelength
        curve = LinkBudgetService.sweep(system, Scenario.BIFOCAL, SweepVariable.UCA_RADIUS, start, 2.5 * start, 200)
        capacities = curve.capacities
        steps = [b - a for a, b in zip(capacities, capacities[1:])]
        assert all(step >= 0 for step in steps)
        assert all(b <= a + 1e-6 for a, b in zip(steps, steps[1:]))

    def test_bifocal_radius_default_settings(self, uca, lens, link_config, bifocal):
        """p = 5/mm and G′ = 7A/λ²: capacity still grows with the UCA radius at a decreasing rate"""
        assert lens.attenuation_factor == 5000.0
        system = LinkSystem(
            link=link_config.model_copy(update={"distance": 0.5}),
            uca=uca,
            lens=lens,
            bifocal=bifocal,
        )
        assert system.converged_gain is None
        start = 0.6 * uca.wavelength
        curve = LinkBudgetService.sweep(system, Scenario.BIFOCAL, SweepVariable.UCA_RADIUS, start, 2.5 * start, 200)
        capacities = curve.capacities
        assert capacities[0] > 0
        steps = [b - a for a, b in zip(capacities, capacities[1:])]
        tolerance = 1e-9 * capacities[-1]
        negative = [step for step in steps if step < -tolerance]
        growing = [(a, b) for a, b in zip(steps, steps[1:]) if b > a + tolerance]
        assert not negative, f"{len(negative)} decreasing steps"
        assert not growing, f"{len(growing)} growing increments"
        print(f"\n✅ default-settings radius sweep: {capacities[0]:.4g} -> {capacities[-1]:.4g} bit/s")

    def test_distance_sweep_matches_point_evaluation(self, uca, lens, link_config, bifocal):
        system = self._system(uca, lens, link_config, bifocal=bifocal)
        curve = LinkBudgetService.sweep(system, Scenario.BIFOCAL, SweepVariable.DISTANCE, 0.2, 1.0, 5)
        beams = [LinkBudgetService.mode_beam(uca, mode) for mode in link_config.modes]
        cfg = link_config.model_copy(update={"distance": 0.6})
        expected = LinkBudgetService.capacity_bifocal(cfg, bifocal, lens, beams)
        assert abs(curve.points[2].capacity_bps - expected) <= 1e-9 * expected

    def test_explicit_beams(self, uca, lens, link_config):
        beams = [
            ModeBeam(mode=1, theta=math.radians(30.0), delta_theta=math.radians(5.0), peak_gain=10.0),
            ModeBeam(mode=2, theta=math.radians(40.0), delta_theta=math.radians(5.0), peak_gain=8.0),
        ]
        system = LinkSystem(link=link_config, uca=uca, lens=lens, beams=beams)
        point = LinkBudgetService.evaluate_point(system, Scenario.DIVERGENT, SweepVariable.DISTANCE, 0.05)
        cfg = link_config.model_copy(update={"distance": 0.05})
        assert point.per_mode_snr == [
            LinkBudgetService.snr_divergent(cfg, beam, LinkBudgetService.gain_profile(uca, beam.mode, beam.peak_gain)).snr
            for beam in beams
        ]

    def test_beams_must_match_modes(self, uca, lens, link_config):
        beams = [ModeBeam(mode=3, theta=0.5, delta_theta=0.1, peak_gain=5.0)]
        with pytest.raises(ValidationError, match="configured modes"):
            LinkSystem(link=link_config, uca=uca, lens=lens, beams=beams)

    def test_invalid_combinations(self, uca, lens, link_config):
        system = self._system(uca, lens, link_config)
        with pytest.raises(ConfigError, match="focal"):
            LinkBudgetService.sweep(system, Scenario.DIVERGENT, SweepVariable.FOCAL, 0.02, 0.06, 10)
        with pytest.raises(ConfigError, match="bifocal"):
            LinkBudgetService.sweep(system, Scenario.BIFOCAL, SweepVariable.DISTANCE, 0.2, 1.0, 10)
        with pytest.raises(ConfigError, match="steps"):
            LinkBudgetService.sweep(system, Scenario.CONVERGED, SweepVariable.DISTANCE, 0.2, 1.0, 1)
        with pytest.raises(ConfigError):
            LinkBudgetService.sweep(system, Scenario.CONVERGED, SweepVariable.DISTANCE, 1.0, 0.2, 10)

    def test_curve_is_serialisable(self, uca, lens, link_config):
        curve = LinkBudgetService.sweep(
            self._system(uca, lens, link_config), Scenario.CONVERGED, SweepVariable.DISTANCE, 0.2, 1.0, 3
        )
        dumped = curve.model_dump(mode="json")
        assert dumped["scenario"] == "converged"
        assert CapacityCurve.model_validate(dumped) == curve
