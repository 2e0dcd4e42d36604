"""Exact workbench for Brylinski-Kostant filtrations of tilting module
weight spaces in positive characteristic, with Lusztig q-analogue and
B-invariant-model cross-checks."""

__version__ = "0.1.0"

SCHEMA_VERSION = "bkclab/1"
