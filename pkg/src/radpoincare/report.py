"""JSON / CSV serialization of check reports.

Floats are written with 17 significant digits so that parsing recovers them
bit for bit.  JSON reports have the shape
``{meta: {version, n, spec, config_hash, ...}, rows: [{func, lhs, rhs, deficit, rel_deficit}], verdict}``;
CSV reports hold the rows only, with the fixed header below.
"""

import csv
import io
import json
import math

__all__ = ["CSV_COLUMNS", "VERDICTS", "format_float", "encode_json", "to_json", "to_csv", "parse_json", "parse_csv", "emit_report"]

CSV_COLUMNS = ("func", "lhs", "rhs", "deficit", "rel_deficit")
VERDICTS = ("pass", "fail", "spec_error")


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def encode_json(obj):
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {encode_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(encode_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _as_dict(report):
    d = report.to_dict() if hasattr(report, "to_dict") else report
    if d.get("verdict") not in VERDICTS:
        raise ValueError(f"verdict must be one of {VERDICTS}, got {d.get('verdict')!r}")
    return d


def to_json(report):
    return encode_json(_as_dict(report)) + "\n"


def to_csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in _as_dict(report)["rows"]:
        w.writerow([row["func"]] + [format_float(row[c]) for c in CSV_COLUMNS[1:]])
    return buf.getvalue()


def parse_json(text):
    return json.loads(text)


def parse_csv(text):
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header!r}")
    return [
        {"func": rec[0], **{c: float(v) for c, v in zip(CSV_COLUMNS[1:], rec[1:])}}
        for rec in reader
    ]


def emit_report(report, fmt, path=None):
    """Serialize ``report`` as ``json`` or ``csv``; write to ``path`` if given and return the text."""
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text
