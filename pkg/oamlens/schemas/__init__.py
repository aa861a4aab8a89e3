"""
Pydantic schemas for the OAM lens toolkit
"""
from oamlens.schemas.fit import FitResult
from oamlens.schemas.beam import (
    SPEED_OF_LIGHT, MU_0,
    UcaGeometry, OamMode, DipoleExcitation,
    DivergenceForm, DivergenceModel,
    DivergenceRow, DivergenceTable,
    DivergenceFitRow, DivergenceFitReport
)
from oamlens.schemas.lens import LensSpec, LensProfile, AttenuatedAmplitude
from oamlens.schemas.bifocal import (
    LensBranch, BifocalSpec, BifocalGeometry,
    FocalRatio, WavePathCheck, BifocalAmplitude
)
from oamlens.schemas.link import (
    Scenario, SweepVariable, ReceptionCase,
    LinkConfig, ModeBeam, LinkSystem,
    SnrCaseResult, ConvergedSnr, BifocalSnr,
    CapacityPoint, CapacityCurve
)
from oamlens.schemas.patch import PatchDesign
from oamlens.schemas.run_config import (
    OutputFormat,
    UcaDesignRun, FitDivergenceRun, LensDesignRun,
    LinkSection, UcaSection, LensSection, BifocalSection, SweepSection,
    CapacityRun
)

__all__ = [
    # Fit
    "FitResult",
    # Beam
    "SPEED_OF_LIGHT", "MU_0",
    "UcaGeometry", "OamMode", "DipoleExcitation",
    "DivergenceForm", "DivergenceModel",
    "DivergenceRow", "DivergenceTable",
    "DivergenceFitRow", "DivergenceFitReport",
    # Lens
    "LensSpec", "LensProfile", "AttenuatedAmplitude",
    # Bifocal
    "LensBranch", "BifocalSpec", "BifocalGeometry",
    "FocalRatio", "WavePathCheck", "BifocalAmplitude",
    # Link
    "Scenario", "SweepVariable", "ReceptionCase",
    "LinkConfig", "ModeBeam", "LinkSystem",
    "SnrCaseResult", "ConvergedSnr", "BifocalSnr",
    "CapacityPoint", "CapacityCurve",
    # Patch
    "PatchDesign",
    # Run configs
    "OutputFormat",
    "UcaDesignRun", "FitDivergenceRun", "LensDesignRun",
    "LinkSection", "UcaSection", "LensSection", "BifocalSection", "SweepSection",
    "CapacityRun",
]
