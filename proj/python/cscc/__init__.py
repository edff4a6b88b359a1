"""Coloured SCC decomposition of partially specified Boolean networks."""

import json
from pathlib import Path

from ._cscc import ContractViolation, OracleLimitError, ParseError, expand, generate
from ._cscc import _run

__all__ = ["run", "run_file", "expand", "generate", "ParseError", "OracleLimitError", "ContractViolation"]


def run(text, format="bnet-psbn", *, name="model", saturation=True, threads=1, trimming=True,
        trim_cutoff=2.0, timeout=None, verify=False):
    """Decompose a model given as text; returns the report as a dict."""
    return json.loads(_run(text, format, name, saturation, threads, trimming, trim_cutoff, timeout, verify))


def run_file(path, format=None, **options):
    """Like run(), reading the model from a file; the format follows the suffix by default."""
    path = Path(path)
    if format is None:
        format = "edges" if path.suffix == ".edges" else "bnet-psbn"
    return run(path.read_text(), format, name=path.stem, **options)
