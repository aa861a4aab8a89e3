"""
CLI commands
"""
from oamlens.commands.uca_design import uca_design
from oamlens.commands.fit_divergence import fit_divergence
from oamlens.commands.lens_design import lens_design
from oamlens.commands.capacity import capacity

__all__ = ["uca_design", "fit_divergence", "lens_design", "capacity"]
