"""
fit-divergence: power-law and rational divergence models per mode
"""
import logging
from typing import Optional

import click
import pandas as pd

from ..schemas.run_config import FitDivergenceRun, OutputFormat
from ..services.beam_model import BeamModelService
from ..utils.output import render_csv, render_json, write_output
from ..utils.validation import build_run_config, command_errors

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["mode", "a", "b", "power_rms_deg", "p", "q", "rational_rms_deg"]


@click.command("fit-divergence")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON run config (exclusive with parameter flags)")
@click.option("--table", type=click.Path(exists=True, dir_okay=False), default=None,
              help="CSV with R_mm,theta1_deg,... (default: built-in table)")
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default: stdout)")
@command_errors
def fit_divergence(config_path: Optional[str], table: Optional[str], output_format: Optional[str], out: Optional[str]):
    """
    Fit θ = a·R^b and θ = p/(R + q) to every mode of a divergence table.

    Examples:

        oamlens fit-divergence

        oamlens fit-divergence --table measured.csv --format json
    """
    run = build_run_config(FitDivergenceRun, config_path, {"table": table}, out, output_format)

    if run.table:
        source = run.table
        divergence = BeamModelService.load_divergence_table(run.table)
    else:
        source = "builtin"
        divergence = BeamModelService.builtin_divergence_table()

    logger.info(f"🚀 Fitting {divergence.mode_count} modes from {source}")
    report = BeamModelService.fit_divergence_models(divergence, source=source)

    if run.format == OutputFormat.JSON:
        text = render_json(report.model_dump(mode="json"))
    else:
        frame = pd.DataFrame([row.model_dump() for row in report.rows])
        text = render_csv(frame[REPORT_COLUMNS])
    write_output(text, run.out)
