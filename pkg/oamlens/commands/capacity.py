"""
capacity: SNR / Shannon capacity sweeps for divergent, converged and bifocal links
"""
import logging
import math
from typing import List, Optional

import click
import pandas as pd

from ..config import get_settings
from ..schemas.beam import SPEED_OF_LIGHT, UcaGeometry
from ..schemas.lens import LensSpec
from ..schemas.link import LinkConfig, LinkSystem, Scenario, SweepVariable
from ..schemas.run_config import CapacityRun, OutputFormat
from ..services.bifocal_design import BifocalDesignService
from ..services.lens_design import LensDesignService
from ..services.link_budget import LinkBudgetService
from ..utils.output import render_csv, render_json, write_output
from ..utils.validation import build_run_config, command_errors

logger = logging.getLogger(__name__)


def _scaled(value: Optional[float], factor: float) -> Optional[float]:
    return value * factor if value is not None else None


def _parse_modes(ctx, param, value: Optional[str]) -> Optional[List[int]]:
    if value is None:
        return None
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise click.BadParameter("expected a comma-separated list of integers, e.g. 1,2")


def build_system(run: CapacityRun) -> LinkSystem:
    """把运行配置转换为 LinkSystem（双焦参数仅在需要时求解）"""
    frequency = run.uca.frequency
    wavelength = SPEED_OF_LIGHT / frequency
    uca = UcaGeometry(
        n_elements=run.uca.n_elements,
        radius=run.uca.radius if run.uca.radius is not None else run.uca.radius_wavelengths * wavelength,
        frequency=frequency,
    )
    n = LensDesignService.refraction_index(run.lens.eps_r)
    focal = run.lens.focal_distance
    diameter = run.lens.diameter or get_settings().DEFAULT_BALANCE_COEFFICIENT * focal
    lens = LensSpec(
        refraction_index=n,
        focal_distance=focal,
        diameter=diameter,
        attenuation_factor=run.lens.attenuation_per_mm * 1e3,
        energy_ratio=run.lens.energy_ratio,
    )
    sigma_deg = run.link.residual_divergence_deg
    link = LinkConfig(
        tx_power=run.link.tx_power,
        bandwidth=run.link.bandwidth,
        noise=run.link.noise,
        rx_gain=run.link.rx_gain,
        rx_radius=run.link.rx_radius,
        distance=run.link.distance,
        wavelength=wavelength,
        modes=run.link.modes,
        residual_divergence=math.radians(sigma_deg) if sigma_deg is not None else None,
    )
    bifocal = None
    if run.sweep.scenario in ("bifocal", "all"):
        nu_deg = run.bifocal.nu_deg
        bifocal = BifocalDesignService.design(
            uca,
            lens,
            link.modes,
            m_int=run.bifocal.m_int,
            target_rho=run.bifocal.target_rho,
            nu=math.radians(nu_deg) if nu_deg is not None else None,
        )
    return LinkSystem(link=link, uca=uca, lens=lens, bifocal=bifocal, converged_gain=run.lens.converged_gain)


@click.command("capacity")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON run config (exclusive with parameter flags)")
@click.option("--scenario", type=click.Choice(["divergent", "converged", "bifocal", "all"]), default=None)
@click.option("--variable", type=click.Choice(["distance", "focal", "uca_radius"]), default=None)
@click.option("--start", type=float, default=None, help="Sweep start (SI units of the variable)")
@click.option("--stop", type=float, default=None, help="Sweep stop (SI units of the variable)")
@click.option("--steps", type=int, default=None, help="Grid points (default 200)")
@click.option("--tx-power-w", type=float, default=None)
@click.option("--bandwidth-hz", type=float, default=None)
@click.option("--noise-w", type=float, default=None)
@click.option("--rx-gain", type=float, default=None)
@click.option("--rx-radius-m", type=float, default=None)
@click.option("--distance-m", type=float, default=None)
@click.option("--modes", type=str, callback=_parse_modes, default=None, help="Comma-separated OAM modes, e.g. 1,2")
@click.option("--sigma-deg", type=float, default=None, help="Residual divergence of converged beams")
@click.option("--freq-ghz", type=float, default=None)
@click.option("--n-elements", type=int, default=None)
@click.option("--radius-wavelengths", type=float, default=None)
@click.option("--eps-r", type=float, default=None)
@click.option("--focal-mm", type=float, default=None)
@click.option("--diameter-mm", type=float, default=None)
@click.option("--attenuation-per-mm", type=float, default=None)
@click.option("--energy-ratio", type=float, default=None)
@click.option("--converged-gain", type=float, default=None)
@click.option("--m-int", type=int, default=None)
@click.option("--target-rho", type=float, default=None)
@click.option("--nu-deg", type=float, default=None)
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default: stdout)")
@command_errors
def capacity(config_path: Optional[str], output_format: Optional[str], out: Optional[str], **flags):
    """
    Sweep link capacity over distance, focal distance or UCA radius.

    Examples:

        oamlens capacity --scenario divergent --variable distance --start 0.1 --stop 5

        oamlens capacity --config docs/examples/capacity_all.json --out curve.csv
    """
    data = {
        "link": {
            "tx_power": flags["tx_power_w"],
            "bandwidth": flags["bandwidth_hz"],
            "noise": flags["noise_w"],
            "rx_gain": flags["rx_gain"],
            "rx_radius": flags["rx_radius_m"],
            "distance": flags["distance_m"],
            "modes": flags["modes"],
            "residual_divergence_deg": flags["sigma_deg"],
        },
        "uca": {
            "n_elements": flags["n_elements"],
            "frequency": _scaled(flags["freq_ghz"], 1e9),
            "radius_wavelengths": flags["radius_wavelengths"],
        },
        "lens": {
            "eps_r": flags["eps_r"],
            "focal_distance": _scaled(flags["focal_mm"], 1e-3),
            "diameter": _scaled(flags["diameter_mm"], 1e-3),
            "attenuation_per_mm": flags["attenuation_per_mm"],
            "energy_ratio": flags["energy_ratio"],
            "converged_gain": flags["converged_gain"],
        },
        "bifocal": {
            "m_int": flags["m_int"],
            "target_rho": flags["target_rho"],
            "nu_deg": flags["nu_deg"],
        },
        "sweep": {
            "scenario": flags["scenario"],
            "variable": flags["variable"],
            "start": flags["start"],
            "stop": flags["stop"],
            "steps": flags["steps"],
        },
    }
    run = build_run_config(CapacityRun, config_path, flags, out, output_format, data=data)
    system = build_system(run)

    sweep = run.sweep
    variable = SweepVariable(sweep.variable)
    if sweep.scenario == "all":
        scenarios = [Scenario.DIVERGENT, Scenario.CONVERGED, Scenario.BIFOCAL]
    else:
        scenarios = [Scenario(sweep.scenario)]
    logger.info(f"🚀 capacity sweep: {', '.join(s.value for s in scenarios)} over {variable.value}")
    curves = [
        LinkBudgetService.sweep(system, scenario, variable, sweep.start, sweep.stop, sweep.steps)
        for scenario in scenarios
    ]

    if run.format == OutputFormat.JSON:
        if len(curves) == 1:
            payload = curves[0].model_dump(mode="json")
        else:
            payload = {
                "sweep_variable": variable.value,
                "curves": {curve.scenario.value: curve.model_dump(mode="json")["points"] for curve in curves},
            }
        write_output(render_json(payload), run.out)
        return

    frame = pd.DataFrame({"x": curves[0].xs})
    if len(curves) == 1:
        frame["capacity_bps"] = curves[0].capacities
    else:
        for curve in curves:
            frame[f"{curve.scenario.value}_bps"] = curve.capacities
    write_output(render_csv(frame), run.out)
