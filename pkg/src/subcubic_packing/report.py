"""Versioned JSON reports, strict loading and atomic file output."""

from __future__ import annotations

import json
import os
import tempfile
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from . import __version__
from .certify import Certificate
from .graph import UNREACHABLE, Graph, build_graph

SCHEMA_VERSION = "1"


class ReportError(ValueError):
    pass


@lru_cache(maxsize=None)
def report_schema() -> dict[str, Any]:
    text = resources.files("subcubic_packing").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def result(value: Any, provenance: str) -> dict[str, Any]:
    return {"value": value, "provenance": provenance}


def make_report(
    command: str,
    inputs: dict[str, Any],
    results: dict[str, dict[str, Any]],
    seconds: float,
    *,
    checks: list[dict[str, Any]] | None = None,
    certificate: Certificate | None = None,
    figures: list[str] | None = None,
    exit_code: int | None = None,
    distances: bool = False,
) -> dict[str, Any]:
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "command": command,
        "inputs": inputs,
        "results": results,
        "timing": {"seconds": round(float(seconds), 6)},
    }
    if checks is not None:
        report["checks"] = checks
    if certificate is not None:
        report["certificate"] = certificate.to_dict()
    if figures:
        report["figures"] = figures
    if exit_code is not None:
        report["exit_code"] = exit_code
    if distances:
        report["unreachable_sentinel"] = int(UNREACHABLE)
    validate_report(report)
    return report


def validate_report(report: dict[str, Any]) -> None:
    try:
        jsonschema.validate(report, report_schema())
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ReportError(f"report does not match schema {SCHEMA_VERSION} at '{path}': {exc.message}") from None


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def load_report(text: str) -> dict[str, Any]:
    """Parse and validate; unknown fields are rejected."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"not JSON: {exc}") from None
    validate_report(data)
    return data


def load_certificate(text: str) -> Certificate:
    """Certificate from a report (``certificate`` field) or a bare certificate document."""
    data = json.loads(text)
    if "schema_version" in data:
        validate_report(data)
        if "certificate" not in data:
            raise ReportError("report carries no certificate")
        data = data["certificate"]
    else:
        schema = report_schema()
        try:
            jsonschema.validate(data, {**schema["$defs"]["certificate"], "$defs": schema["$defs"]})
        except jsonschema.ValidationError as exc:
            raise ReportError(f"certificate does not match schema: {exc.message}") from None
    return Certificate.from_dict(data)


def graph_document(g: Graph, labels: list[str] | None = None, family: str | None = None) -> dict[str, Any]:
    doc: dict[str, Any] = {"n": g.n, "m": g.m, "edges": [list(e) for e in g.edges()]}
    if labels is not None:
        doc["labels"] = labels
    if family is not None:
        doc["family"] = family
    return doc


def graph_from_json(text: str) -> Graph:
    """Graph from a ``build --format json`` report or a bare ``{"n", "edges"}`` document."""
    data = json.loads(text)
    if "schema_version" in data:
        validate_report(data)
        try:
            data = data["results"]["graph"]["value"]
        except KeyError:
            raise ReportError("report carries no graph") from None
    try:
        return build_graph(int(data["n"]), [tuple(e) for e in data["edges"]])
    except (KeyError, TypeError) as exc:
        raise ReportError(f"bad graph document: {exc}") from None


def write_atomic(path: str | Path, text: str) -> None:
    """Write to a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
