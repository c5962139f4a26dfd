"""Verification workbench for two-color Hales-Jewett numbers on [4]^n."""

__version__ = "0.1.0"
