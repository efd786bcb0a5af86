"""Rendering of command reports as JSON documents or plain tables."""

from dataclasses import fields, is_dataclass
from enum import Enum
from fractions import Fraction
from typing import Any

import orjson
import pandas as pd

from core.exact import CoxPolynomial, RationalMatrix
from core.geom import ChowClass
from core.strata import SplitType
from core.variety import VarietyTag

FORMAT_VERSION = 1


def to_plain(obj: Any) -> Any:
    """Convert report values to JSON-ready data; rationals become "p/q" strings."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (ChowClass, CoxPolynomial, VarietyTag, SplitType)):
        return str(obj)
    if isinstance(obj, RationalMatrix):
        return [[str(x) for x in obj.row(i)] for i in range(obj.rows)]
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(command: str, **items: Any) -> dict[str, Any]:
    """Return a report document with the format header."""
    return {"format": FORMAT_VERSION, "command": command, **to_plain(items)}


def _table(report: dict[str, Any]) -> pd.DataFrame:
    rows = report.get("rows")
    if isinstance(rows, list) and rows and all(isinstance(r, dict) for r in rows):
        return pd.DataFrame(rows)
    flat = [
        {"key": k, "value": v if isinstance(v, str) else orjson.dumps(v).decode()}
        for k, v in report.items()
    ]
    return pd.DataFrame(flat)


def render_report(report: dict[str, Any], table: bool = False, indent: bool = True) -> str:
    """Render a report as sorted-key JSON, or as a plain table.

    Parameters
    ----------
    report : dict
        A document from `make_report`.
    table : bool, optional
        Render the `rows` list (or the top-level keys) with pandas.
    indent : bool, optional
        Indent JSON output by two spaces, by default True.

    """
    if table:
        return _table(report).to_string(index=False, header=True, justify="left")
    option = orjson.OPT_SORT_KEYS | (orjson.OPT_INDENT_2 if indent else 0)
    return orjson.dumps(report, option=option).decode()
