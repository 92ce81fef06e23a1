"""Report serialization: floats become 17-significant-digit decimal strings
so JSON outputs are byte-stable across runs, and log-domain fields carry
what would overflow a double."""

import csv
import json
from fractions import Fraction


def fmt_float(x):
    return f"{float(x):.17g}"


def jsonable(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    path.write_text(dumps(obj))


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow([fmt_float(v) if isinstance(v, float) else v
                             for v in row])
