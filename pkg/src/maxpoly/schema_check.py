"""Validation of the package's JSON documents against the shipped schemas."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

SCHEMA_NAMES = ("qp", "result", "cert", "moments")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    if name not in SCHEMA_NAMES:
        raise KeyError(f"unknown schema {name!r}; have {SCHEMA_NAMES}")
    path = resources.files("maxpoly").joinpath("schemas").joinpath(f"{name}.json")
    return json.loads(path.read_text())


def validate_document(doc: dict, name: str) -> None:
    """Raise jsonschema.ValidationError (with JSON path) on violation."""
    jsonschema.validate(doc, load_schema(name))
