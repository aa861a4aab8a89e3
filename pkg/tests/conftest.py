"""
Shared fixtures: the 35 GHz operating point (ε_r = 2.2, f_e = 30 mm, m = 1.67, R = 0.6λ)
"""
import math
from pathlib import Path

import pytest

from oamlens.schemas.beam import SPEED_OF_LIGHT, UcaGeometry
from oamlens.schemas.lens import LensSpec
from oamlens.schemas.link import LinkConfig
from oamlens.services.beam_model import BeamModelService

FREQUENCY = 35.0e9
WAVELENGTH = SPEED_OF_LIGHT / FREQUENCY
REFRACTION_INDEX = math.sqrt(2.2)
FOCAL = 0.03
DIAMETER = 1.67 * FOCAL

EXAMPLES_DIR = Path(__file__).resolve().parent.parent / "docs" / "examples"


@pytest.fixture
def wavelength() -> float:
    return WAVELENGTH


@pytest.fixture
def uca() -> UcaGeometry:
    """16 阵元 UCA，半径 0.6λ"""
    return UcaGeometry.from_wavelengths(16, 0.6, FREQUENCY)


@pytest.fixture
def lens() -> LensSpec:
    """f = 30 mm, D = 50.1 mm, p = 5/mm, a = 1e-3"""
    return LensSpec(
        refraction_index=REFRACTION_INDEX,
        focal_distance=FOCAL,
        diameter=DIAMETER,
        attenuation_factor=5000.0,
        energy_ratio=1e-3,
    )


@pytest.fixture
def link_config() -> LinkConfig:
    return LinkConfig(
        tx_power=1.0,
        bandwidth=1.0e6,
        noise=1.0e-12,
        rx_gain=10.0,
        rx_radius=0.1,
        distance=1.0,
        wavelength=WAVELENGTH,
        modes=[1, 2],
        residual_divergence=math.radians(0.5),
    )


@pytest.fixture
def divergence_table():
    return BeamModelService.builtin_divergence_table()


@pytest.fixture
def examples_dir() -> Path:
    return EXAMPLES_DIR
