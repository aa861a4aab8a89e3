"""
Domain services
"""
from oamlens.services import numerics
from oamlens.services.beam_model import BeamModelService
from oamlens.services.lens_design import LensDesignService
from oamlens.services.bifocal_design import BifocalDesignService
from oamlens.services.link_budget import LinkBudgetService
from oamlens.services.uca_design import UcaDesignService

__all__ = [
    "numerics",
    "BeamModelService",
    "LensDesignService",
    "BifocalDesignService",
    "LinkBudgetService",
    "UcaDesignService",
]
