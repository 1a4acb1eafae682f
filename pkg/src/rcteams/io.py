"""JSON model documents (format ``rct/1``).

Layout::

    {
      "format": "rct/1",
      "signature": {"variables": [{"name": "A", "values": ["0", "1"]}, ...]},
      "laws": {"C": {"parents": ["A"], "relation": [["0", "none"], ...]}},
      "team": [{"A": "1", "C": "heads"}, ...]
    }

Relation rows list parent values in the order of ``parents`` and then the
value of the law's own variable.  Variables without a law are exogenous.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from rcteams.model import ModelError, RelationalCausalTeam, Signature, validate_model

FORMAT = "rct/1"


class DocumentError(ModelError):
    pass


def signature_from_json(data) -> Signature:
    try:
        return Signature(
            tuple(v["name"] for v in data["variables"]),
            tuple(tuple(str(x) for x in v["values"]) for v in data["variables"]),
        )
    except (KeyError, TypeError) as e:
        raise DocumentError(f"malformed signature: {e}") from None


def signature_to_json(sig: Signature) -> dict:
    return {"variables": [{"name": v, "values": list(r)} for v, r in zip(sig.variables, sig.ranges)]}


def model_from_document(doc: dict) -> RelationalCausalTeam:
    if not isinstance(doc, dict):
        raise DocumentError("a model document must be a JSON object")
    if doc.get("format") != FORMAT:
        raise DocumentError(f"expected format {FORMAT!r}, got {doc.get('format')!r}")
    sig = signature_from_json(doc.get("signature", {}))
    laws = {}
    for var, entry in (doc.get("laws") or {}).items():
        if not isinstance(entry, dict):
            raise DocumentError(f"law of {var} must be an object with parents and relation")
        laws[var] = (entry.get("parents", []), entry.get("relation", []))
    return validate_model(sig, doc.get("team", []), laws)


def model_to_document(model: RelationalCausalTeam) -> dict:
    sig = model.signature
    laws = {}
    for law in model.laws:
        name = sig.variables[law.var]
        parents = [sig.variables[p] for p in law.parents]
        relation = [
            [sig.ranges[p][x] for p, x in zip(law.parents, row[:-1])] + [sig.ranges[law.var][row[-1]]]
            for row in sorted(law.relation)
        ]
        laws[name] = {"parents": parents, "relation": relation}
    return {
        "format": FORMAT,
        "signature": signature_to_json(sig),
        "laws": laws,
        "team": model.named_team(),
    }


def dumps(model: RelationalCausalTeam) -> str:
    return json.dumps(model_to_document(model), indent=2)


def loads(text: str) -> RelationalCausalTeam:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise DocumentError(f"invalid JSON: {e}") from None
    return model_from_document(doc)


def load(path: str | Path) -> RelationalCausalTeam:
    return loads(Path(path).read_text())


def save(model: RelationalCausalTeam, path: str | Path) -> None:
    Path(path).write_text(dumps(model) + "\n")


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture (``coin``, ``annbob``, ``annbob_b``, ``twocoin``, ``game``)."""
    base = resources.files("rcteams") / "fixtures"
    return Path(str(base / (name if name.endswith(".json") else f"{name}.json")))


def load_fixture(name: str) -> RelationalCausalTeam:
    return load(fixture_path(name))
