"""Python bindings for the vl hardware description toolchain."""

import json

from ._vl import format, run, tokenize, transpile
from ._vl import check_json as _check_json

__all__ = ["check", "format", "run", "tokenize", "transpile"]


def check(source):
    """Diagnostics for a single source file as a list of dicts."""
    return json.loads(_check_json(source))
