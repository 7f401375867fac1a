"""Local dimensions of self-similar measures on the line and their quotients on the torus."""

__version__ = "0.1.0"

from .catalog import catalog_spec
from .classes import loop_classes
from .dims import inner_interval, isolated_report, outer_interval, periodic_dim, point_symbolic
from .model import load_spec, parse_spec_text, spec_cantor, spec_validate
from .netgen import closure
from .numberfield import FieldContext, rational_field

__all__ = [
    "FieldContext",
    "rational_field",
    "spec_validate",
    "spec_cantor",
    "parse_spec_text",
    "load_spec",
    "catalog_spec",
    "closure",
    "loop_classes",
    "periodic_dim",
    "inner_interval",
    "outer_interval",
    "isolated_report",
    "point_symbolic",
]
