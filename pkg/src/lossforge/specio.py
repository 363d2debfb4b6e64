"""Spec-file formats (JSON) and the audit CSV.

All rationals are serialized canonically ("3", "1/2"), so emit -> ingest ->
emit is byte-identical.  Loaders validate and raise ValueError on malformed
input; the CLI maps that to exit code 1.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .discrete import DiscreteLoss, OutcomeSpace
from .embedding import Embedding
from .polyhedral import AffinePiece, PolyhedralLoss
from .rational import format_rational, parse_rational
from .zoo import SetFunction


def dumps_canonical(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_json(path, obj):
    Path(path).write_text(dumps_canonical(obj), encoding="utf-8")


def load_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError("%s: not valid JSON (%s)" % (path, exc)) from exc


def discrete_loss_to_obj(loss: DiscreteLoss, emb: Embedding | None = None) -> dict:
    obj = {
        "kind": "discrete-loss",
        "outcomes": list(loss.space.labels),
        "reports": list(loss.reports),
        "matrix": [[format_rational(v) for v in row] for row in loss.matrix],
    }
    if emb is not None:
        obj["embedding"] = {r: [format_rational(v) for v in u] for r, u in emb.points}
    return obj


def discrete_loss_from_obj(obj) -> DiscreteLoss:
    for key in ("outcomes", "reports", "matrix"):
        if key not in obj:
            raise ValueError("discrete-loss spec missing %r" % key)
    space = OutcomeSpace(tuple(obj["outcomes"]))
    matrix = tuple(tuple(parse_rational(v) for v in row) for row in obj["matrix"])
    return DiscreteLoss(space, tuple(obj["reports"]), matrix)


def embedding_from_obj(obj) -> Embedding | None:
    if "embedding" not in obj:
        return None
    return Embedding(
        tuple((r, tuple(parse_rational(v) for v in u)) for r, u in sorted(obj["embedding"].items()))
    )


def polyhedral_loss_to_obj(loss: PolyhedralLoss) -> dict:
    pieces = {}
    for label, per_outcome in zip(loss.space.labels, loss.pieces):
        pieces[label] = [
            {"a": [format_rational(v) for v in p.a], "b": format_rational(p.b)}
            for p in per_outcome
        ]
    return {
        "kind": "polyhedral-loss",
        "d": loss.d,
        "outcomes": list(loss.space.labels),
        "pieces": pieces,
    }


def polyhedral_loss_from_obj(obj) -> PolyhedralLoss:
    for key in ("d", "outcomes", "pieces"):
        if key not in obj:
            raise ValueError("polyhedral-loss spec missing %r" % key)
    space = OutcomeSpace(tuple(obj["outcomes"]))
    per_outcome = []
    for label in space.labels:
        if label not in obj["pieces"]:
            raise ValueError("no pieces for outcome %r" % label)
        per_outcome.append(
            tuple(
                AffinePiece(tuple(parse_rational(v) for v in p["a"]), parse_rational(p["b"]))
                for p in obj["pieces"][label]
            )
        )
    return PolyhedralLoss(space, int(obj["d"]), tuple(per_outcome))


def set_function_from_obj(obj) -> SetFunction:
    for key in ("k", "values"):
        if key not in obj:
            raise ValueError("set-function spec missing %r" % key)
    return SetFunction(int(obj["k"]), tuple(parse_rational(v) for v in obj["values"]))


def set_function_to_obj(f: SetFunction) -> dict:
    return {
        "kind": "set-function",
        "k": f.k,
        "values": [format_rational(v) for v in f.values],
    }


def link_spec_to_obj(norm_tag: str, epsilon, tie_break=(), grid_m: int = 8) -> dict:
    return {
        "kind": "link",
        "link_type": "thickened",
        "norm": norm_tag,
        "epsilon": format_rational(epsilon),
        "tie_break": list(tie_break),
        "grid_m": grid_m,
    }


def builtin_link_to_obj(name: str, **params) -> dict:
    obj = {"kind": "link", "link_type": "builtin", "name": name}
    obj.update(params)
    return obj


def vector_str(vec) -> str:
    return "|".join(format_rational(v) for v in vec)


def write_audit_csv(path, audit):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["p", "gap", "witness_u", "verdict"])
        for e in audit.entries:
            if e.vacuous:
                w.writerow([vector_str(e.p), "", "", "vacuous"])
            else:
                verdict = "violation" if e.violation else "evidence"
                w.writerow([vector_str(e.p), format_rational(e.gap), vector_str(e.witness), verdict])


def load_loss_file(path):
    """Load either kind of loss file; returns ('discrete'|'polyhedral', loss, embedding|None)."""
    obj = load_json(path)
    kind = obj.get("kind")
    if kind == "discrete-loss" or ("matrix" in obj and "kind" not in obj):
        return "discrete", discrete_loss_from_obj(obj), embedding_from_obj(obj)
    if kind == "polyhedral-loss" or ("pieces" in obj and "kind" not in obj):
        return "polyhedral", polyhedral_loss_from_obj(obj), None
    raise ValueError("%s: unrecognized loss spec" % path)
