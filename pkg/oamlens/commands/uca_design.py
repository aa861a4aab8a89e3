"""
uca-design: patch element sizing
"""
import logging
from typing import Optional

import click
import pandas as pd

from ..schemas.run_config import OutputFormat, UcaDesignRun
from ..services.uca_design import UcaDesignService
from ..utils.output import render_csv, render_json, write_output
from ..utils.validation import build_run_config, command_errors

logger = logging.getLogger(__name__)


@click.command("uca-design")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON run config (exclusive with parameter flags)")
@click.option("--freq-ghz", type=float, default=None, help="Resonant frequency in GHz")
@click.option("--eps-r", type=float, default=None, help="Substrate relative permittivity")
@click.option("--h-mm", type=float, default=None, help="Substrate height in mm")
@click.option("--solve-h", is_flag=True, help="Solve the substrate height for --target-eps-re")
@click.option("--target-eps-re", type=float, default=None, help="Target effective permittivity")
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default: stdout)")
@command_errors
def uca_design(
    config_path: Optional[str],
    freq_ghz: Optional[float],
    eps_r: Optional[float],
    h_mm: Optional[float],
    solve_h: bool,
    target_eps_re: Optional[float],
    output_format: Optional[str],
    out: Optional[str]
):
    """
    Size the rectangular patch elements of the UCA.

    Examples:

        oamlens uca-design --freq-ghz 35 --eps-r 2.2 --h-mm 0.294

        oamlens uca-design --freq-ghz 35 --eps-r 2.2 --solve-h --target-eps-re 2.039
    """
    flags = {
        "freq_ghz": freq_ghz,
        "eps_r": eps_r,
        "h_mm": h_mm,
        "solve_h": solve_h,
        "target_eps_re": target_eps_re,
    }
    run = build_run_config(UcaDesignRun, config_path, flags, out, output_format)

    f_r = run.freq_ghz * 1e9
    if run.solve_h:
        width = UcaDesignService.patch_width(f_r, run.eps_r)
        h = UcaDesignService.solve_substrate_height(run.target_eps_re, run.eps_r, width)
        logger.info(f"✅ solved substrate height h={h * 1e3:.4f} mm for eps_re={run.target_eps_re}")
    else:
        h = run.h_mm * 1e-3

    report = UcaDesignService.design_patch(f_r, run.eps_r, h).to_report()
    report["h_solved"] = run.solve_h

    if run.format == OutputFormat.JSON:
        text = render_json(report)
    else:
        row = {key: value for key, value in report.items() if key != "inputs"}
        row.update(report["inputs"])
        text = render_csv(pd.DataFrame([row]))
    write_output(text, run.out)
