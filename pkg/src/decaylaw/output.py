"""Locale-independent CSV/JSON record writers with fixed 17-digit numbers."""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence


def fmt_number(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
        return format(v, ".17g")
    return str(v)


def to_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt_number(_plain(v)) for v in row))
    return "\n".join(lines) + "\n"


def _plain(v):
    # numpy scalars -> python scalars so formatting does not depend on numpy's repr
    if hasattr(v, "item"):
        return v.item()
    return v


def _json_value(v) -> str:
    v = _plain(v)
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return json.dumps(fmt_number(v))
        return format(v, ".17g")
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(columns: Sequence[str], rows: Iterable[Sequence], meta: dict) -> str:
    records = [dict(zip(columns, row)) for row in rows]
    body = ",\n".join("    " + _json_value(r) for r in records)
    return '{\n  "meta": ' + _json_value(meta) + ',\n  "records": [\n' + body + ("\n" if records else "") + "  ]\n}\n"
