"""surfenum: exact enumeration workbench for maps and graphs on surfaces."""

__version__ = "0.1.0"
