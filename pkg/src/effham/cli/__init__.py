"""Command-line front end: configs, table files, contours."""

from .config import ConfigError, RunConfig, load_config, parse_config
from .contours import contour_lines, contours
from .main import main
from .tables import SCHEMA_VERSION, TableFormatError, read_table, write_table

__all__ = [
    "ConfigError", "RunConfig", "load_config", "parse_config", "contour_lines", "contours",
    "main", "SCHEMA_VERSION", "TableFormatError", "read_table", "write_table",
]
