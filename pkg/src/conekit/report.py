"""Run reports: deterministic JSON and flat CSV.

Floats are written with 17 significant digits, which round-trips every
double, and keys are sorted.  The content digest covers everything except
the ``timing`` block, so re-running a command reproduces it bit for bit.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

from .errors import InputError

FORMATS = ("json", "csv")
UNDIGESTED = ("timing", "report_digest")


def toolkit_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def plain(value):
    """Convert numpy containers and scalars into JSON-ready Python values."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    return value


def dumps(value, indent: int = 0, step: int = 2) -> str:
    """JSON with sorted keys and '%.17g' floats."""
    pad, inner = " " * indent, " " * (indent + step)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(value[k], indent + step)}" for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, list):
        if not value:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in value):
            return "[" + ", ".join(dumps(v) for v in value) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + step) for v in value) + "\n" + pad + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        text = "%.17g" % value
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(value, int):
        return str(value)
    return json.dumps(value)


def content_digest(doc: dict) -> str:
    body = {k: v for k, v in doc.items() if k not in UNDIGESTED}
    return hashlib.sha256(dumps(plain(body)).encode()).hexdigest()


@dataclass
class RunReport:
    command: list[str]
    source: str
    input_digest: str
    parameters: dict = field(default_factory=dict)  # seeds, tolerances, mode: always echoed
    verdicts: dict = field(default_factory=dict)
    constants: list[dict] = field(default_factory=list)  # {quantity, value, mode, witness}
    certificates: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)
    elapsed_s: float = 0.0
    version: str = field(default_factory=toolkit_version)

    def add_constant(self, quantity: str, value, mode: str = "", witness=None) -> None:
        self.constants.append({"quantity": quantity, "value": value, "mode": mode,
                               "witness": [] if witness is None else np.asarray(witness, dtype=float).ravel()})

    def to_dict(self) -> dict:
        doc = plain({
            "command": self.command,
            "source": self.source,
            "input_digest": self.input_digest,
            "parameters": self.parameters,
            "verdicts": self.verdicts,
            "constants": self.constants,
            "certificates": self.certificates,
            "results": self.results,
            "caveats": self.caveats,
            "version": self.version,
            "timing": {"elapsed_s": self.elapsed_s},
        })
        doc["report_digest"] = content_digest(doc)
        return doc

    def to_json(self) -> str:
        return dumps(self.to_dict()) + "\n"

    def to_csv(self) -> str:
        rows = [(c["quantity"], c["value"], c["mode"], list(np.asarray(c["witness"], dtype=float)))
                for c in self.constants]
        rows += [(f"verdict.{k}", float(bool(v)), "", []) for k, v in sorted(self.verdicts.items())
                 if isinstance(v, (bool, np.bool_))]
        width = max((len(r[3]) for r in rows), default=0)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["quantity", "value", "mode"] + [f"witness_{i}" for i in range(width)])
        for quantity, value, mode, witness in rows:
            cells = [_num(value), mode] + [_num(w) for w in witness]
            writer.writerow([quantity] + cells + [""] * (width - len(witness)))
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise InputError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _num(v) -> str:
    if v is None:
        return ""
    v = float(v)
    return "%.17g" % v if math.isfinite(v) else ""


def verify_digest(text: str) -> bool:
    """Whether a parsed JSON report still matches its own digest."""
    doc = json.loads(text)
    return doc.get("report_digest") == content_digest(doc)
