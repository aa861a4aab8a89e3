"""
lens-design: single-focal or bifocal lens profile and spec
"""
import logging
import math
from typing import Any, Dict, Optional

import click
import pandas as pd

from ..config import get_settings
from ..schemas.beam import SPEED_OF_LIGHT, UcaGeometry
from ..schemas.lens import LensSpec
from ..schemas.run_config import LensDesignRun, OutputFormat
from ..services.beam_model import BeamModelService
from ..services.bifocal_design import BifocalDesignService
from ..services.lens_design import LensDesignService
from ..utils.output import render_csv, render_json, sidecar_path, write_output
from ..utils.validation import build_run_config, command_errors

logger = logging.getLogger(__name__)


def _mm(value: float) -> float:
    return value * 1e3


def _single_lens(run: LensDesignRun) -> LensSpec:
    n = LensDesignService.refraction_index(run.eps_r)
    f = run.focal_mm * 1e-3
    if run.theta_max_deg is not None:
        diameter = LensDesignService.diameter_for(n, f, math.radians(run.theta_max_deg))
    else:
        balance = run.balance if run.balance is not None else get_settings().DEFAULT_BALANCE_COEFFICIENT
        diameter = balance * f
    return LensSpec.from_millimetres(n, run.focal_mm, _mm(diameter), run.attenuation_per_mm, run.energy_ratio)


def _lens_section(lens: LensSpec, t_max: float) -> Dict[str, Any]:
    n = lens.refraction_index
    balance = lens.diameter / lens.focal_distance
    return {
        "refraction_index": n,
        "focal_mm": _mm(lens.focal_distance),
        "diameter_mm": _mm(lens.diameter),
        "balance_coefficient": balance,
        "theta_max_deg": math.degrees(LensDesignService.coverage_angle_for(n, balance)),
        "mu_max_deg": math.degrees(LensDesignService.max_feed_angle(n)),
        "t_max_mm": _mm(t_max),
        "attenuation_per_mm": lens.attenuation_factor * 1e-3,
        "energy_ratio": lens.energy_ratio,
    }


def _design_single(run: LensDesignRun):
    lens = _single_lens(run)
    profile = LensDesignService.sample_profile(lens, run.samples)
    spec = {"lens": _lens_section(lens, profile.t_max), "samples": run.samples}
    frame = pd.DataFrame([{"y_mm": _mm(y), "x_mm": _mm(x)} for x, y in profile.samples])
    logger.info(f"✅ single-focal lens: D={_mm(lens.diameter):.3f} mm, T_max={_mm(profile.t_max):.4f} mm")
    return spec, frame


def _design_bifocal(run: LensDesignRun):
    lens = _single_lens(run)
    frequency = run.freq_ghz * 1e9
    wavelength = SPEED_OF_LIGHT / frequency
    geom = UcaGeometry.from_wavelengths(run.n_elements, run.radius_wavelengths, frequency)
    nu = math.radians(run.nu_deg) if run.nu_deg is not None else None
    bifocal = BifocalDesignService.design(geom, lens, run.modes, m_int=run.m_int, target_rho=run.target_rho, nu=nu)

    n = lens.refraction_index
    geometry = BifocalDesignService.solve_bifocal(
        bifocal.f_e, bifocal.rho, bifocal.nu, n, diameter=lens.diameter, samples=run.samples
    )
    theta_lo, theta_hi = BifocalDesignService.mode_pair(
        [BeamModelService.peak_divergence_angle(geom, mode) for mode in run.modes]
    )
    check = BifocalDesignService.wave_path_check(
        bifocal.f_e, bifocal.f_i, theta_lo, geometry.internal_profile.t_max, n, bifocal.m_int, wavelength
    )
    exact_f_i = BifocalDesignService.exact_internal_focal(bifocal.f_e, theta_lo, wavelength, bifocal.m_int)
    if not check.within_bound:
        logger.warning(
            f"⚠️ wave-path difference {_mm(check.difference):.3f} mm misses m_int·λ = {_mm(check.target):.3f} mm; "
            f"the exact internal focal for m_int={bifocal.m_int} is {_mm(exact_f_i):.3f} mm"
        )
    spec = {
        "lens": _lens_section(lens, geometry.external_profile.t_max),
        "bifocal": {
            "f_e_mm": _mm(bifocal.f_e),
            "f_i_mm": _mm(bifocal.f_i),
            "rho": bifocal.rho,
            "m_int": bifocal.m_int,
            "nu_deg": math.degrees(bifocal.nu),
            "theta_lo_deg": math.degrees(theta_lo),
            "theta_hi_deg": math.degrees(theta_hi),
            "axial_offset_mm": _mm(geometry.axial_offset),
            "boundary_x_mm": _mm(geometry.boundary_point[0]),
            "boundary_z_mm": _mm(geometry.boundary_point[1]),
            "center_thickness_mm": _mm(geometry.center_thickness),
            "wave_path": {
                "difference_mm": _mm(check.difference),
                "target_mm": _mm(check.target),
                "bound_mm": _mm(check.bound),
                "within_bound": check.within_bound,
                "exact_f_i_mm": _mm(exact_f_i),
            },
        },
        "uca": {"n_elements": run.n_elements, "radius_wavelengths": run.radius_wavelengths, "modes": run.modes},
        "samples": run.samples,
    }
    rows = [
        {"region": region, "y_mm": _mm(y), "x_mm": _mm(x)}
        for region, profile in (("internal", geometry.internal_profile), ("external", geometry.external_profile))
        for x, y in profile.samples
    ]
    return spec, pd.DataFrame(rows)


@click.command("lens-design")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON run config (exclusive with parameter flags)")
@click.option("--freq-ghz", type=float, default=None, help="Operating frequency in GHz")
@click.option("--eps-r", type=float, default=None, help="Lens relative permittivity")
@click.option("--focal-mm", type=float, default=None, help="Focal distance (external focal when --bifocal) in mm")
@click.option("--balance", type=float, default=None, help="Balance coefficient m = D/f")
@click.option("--theta-max-deg", type=float, default=None, help="Largest feed angle the aperture covers")
@click.option("--samples", type=int, default=None, help="Profile samples (per region when --bifocal)")
@click.option("--attenuation-per-mm", type=float, default=None, help="Amplitude attenuation p per mm")
@click.option("--energy-ratio", type=float, default=None, help="Energy ratio a entering the lens")
@click.option("--bifocal", is_flag=True, help="Design a bifocal lens")
@click.option("--m-int", type=int, default=None, help="Integer wavelength multiple for the internal focal")
@click.option("--target-rho", type=float, default=None, help="Pick the m_int whose focal ratio is closest")
@click.option("--nu-deg", type=float, default=None, help="Boundary angle (default: mid-point of the mode pair)")
@click.option("--n-elements", type=int, default=None, help="UCA element count")
@click.option("--radius-wavelengths", type=float, default=None, help="UCA radius in wavelengths")
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default: stdout)")
@command_errors
def lens_design(config_path: Optional[str], output_format: Optional[str], out: Optional[str], **params):
    """
    Design a hyperbolic converging lens, or a bifocal lens with --bifocal.

    CSV output is the sampled profile; the design summary goes to <out stem>.spec.json.

    Examples:

        oamlens lens-design --freq-ghz 35 --eps-r 2.2 --focal-mm 30 --balance 1.67

        oamlens lens-design --freq-ghz 35 --eps-r 2.2 --focal-mm 30 --bifocal --target-rho 2.17
    """
    run = build_run_config(LensDesignRun, config_path, params, out, output_format)
    logger.info(f"🚀 {'bifocal' if run.bifocal else 'single-focal'} lens design")
    spec, frame = _design_bifocal(run) if run.bifocal else _design_single(run)

    if run.format == OutputFormat.JSON:
        write_output(render_json({"spec": spec, "profile": frame.to_dict(orient="records")}), run.out)
        return

    write_output(render_csv(frame), run.out)
    if run.out is None:
        logger.warning("⚠️ spec sidecar is only written together with --out")
        return
    write_output(render_json(spec), str(sidecar_path(run.out)))
