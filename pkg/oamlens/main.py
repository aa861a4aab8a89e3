"""
OAM Lens Toolkit - command-line entry point
"""
import logging

import click

from oamlens import __version__
from oamlens.commands import capacity, fit_divergence, lens_design, uca_design
from oamlens.config import get_settings

settings = get_settings()

# Configure logging
logging.basicConfig(
    level=settings.LOG_LEVEL,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


@click.group()
@click.version_option(version=__version__, prog_name="oamlens")
def cli():
    """
    OAM Lens Toolkit - UCA vortex beams, converging lenses and link capacity.

    Examples:

        oamlens uca-design --freq-ghz 35 --eps-r 2.2 --h-mm 0.294

        oamlens fit-divergence --format json

        oamlens lens-design --freq-ghz 35 --eps-r 2.2 --focal-mm 30 --bifocal --target-rho 2.17

        oamlens capacity --scenario all --variable distance --start 0.1 --stop 2
    """


cli.add_command(uca_design)
cli.add_command(fit_divergence)
cli.add_command(lens_design)
cli.add_command(capacity)


def run():
    logger.debug(f"{settings.APP_NAME} v{__version__}")
    cli()


if __name__ == "__main__":
    run()
