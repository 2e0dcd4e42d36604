"""Versioned JSON serialization for the command-line cache.

Schema "bkclab/1": every integer is rendered as a decimal string so that
arbitrary-precision values survive any JSON reader; weights are coordinate
arrays; polynomials are coefficient arrays starting at exponent zero.

A cache entry stores a tilting module together with its divided-power family
matrices, which is everything the filtration and the invariant model need;
provenance graphs are flattened to a descriptive tag on the way out.
"""

from __future__ import annotations

import hashlib
import json
import os

from . import SCHEMA_VERSION
from .bkfilt import DividedPowerFamily, PrincipalPair
from .errors import InternalCheckError
from .exactalg import MatrixFp
from .repbuild import ModularModule
from .rootdata import RootDatum


def enc_int(x: int) -> str:
    return str(int(x))


def enc_vec(v) -> list:
    return [enc_int(x) for x in v]


def enc_matrix(m: MatrixFp) -> dict:
    return {
        "rows": enc_int(m.rows),
        "cols": enc_int(m.cols),
        "entries": [[enc_int(x) for x in row] for row in m.entries],
    }


def dec_matrix(doc: dict, p: int) -> MatrixFp:
    rows = int(doc["rows"])
    cols = int(doc["cols"])
    entries = [[int(x) for x in row] for row in doc["entries"]]
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise InternalCheckError("matrix document shape mismatch")
    return MatrixFp.from_rows(entries, p) if rows else MatrixFp.zero(0, cols, p)


def module_with_family_document(
    module: ModularModule, family: DividedPowerFamily, route: str
) -> dict:
    gens = {}
    for (kind, i, m), mat in sorted(module.gens.items()):
        gens[f"{kind}/{i}/{m}"] = enc_matrix(mat)
    return {
        "schema": SCHEMA_VERSION,
        "kind": "tilting-with-family",
        "group": module.datum.kind,
        "p": enc_int(module.p),
        "highest_weight": enc_vec(module.highest_weight),
        "route": route,
        "provenance": module.provenance[0],
        "dimension": enc_int(module.dimension),
        "basis_weights": [enc_vec(w) for w in module.basis_weights],
        "gens": gens,
        "family": [enc_matrix(m) for m in family.matrices],
        "family_provenance": family.provenance,
    }


def module_with_family_from_document(
    doc: dict, datum: RootDatum, pair: PrincipalPair
):
    if doc.get("schema") != SCHEMA_VERSION:
        raise InternalCheckError(f"unsupported cache schema {doc.get('schema')}")
    if doc.get("group") != datum.kind:
        raise InternalCheckError("cache document group mismatch")
    p = int(doc["p"])
    gens = {}
    for key, mdoc in doc["gens"].items():
        kind, i, m = key.split("/")
        gens[(kind, int(i), int(m))] = dec_matrix(mdoc, p)
    module = ModularModule(
        datum=datum,
        p=p,
        dimension=int(doc["dimension"]),
        basis_weights=[tuple(int(x) for x in w) for w in doc["basis_weights"]],
        gens=gens,
        provenance=("cache", {"route": doc["route"]}),
        highest_weight=tuple(int(x) for x in doc["highest_weight"]),
    )
    module.verify_weight_homogeneity()
    family = DividedPowerFamily(
        module=module,
        pair=pair,
        matrices=[dec_matrix(m, p) for m in doc["family"]],
        provenance=doc["family_provenance"],
    )
    family.verify()
    return module, family, doc["route"]


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


class Cache:
    """Content-addressed JSON store keyed by canonical request fingerprints."""

    def __init__(self, directory):
        self.directory = directory
        if directory:
            os.makedirs(directory, exist_ok=True)

    def _path(self, key: dict) -> str:
        digest = hashlib.sha256(canonical_json(key).encode()).hexdigest()
        return os.path.join(self.directory, f"{digest}.json")

    def load(self, key: dict):
        if not self.directory:
            return None
        path = self._path(key)
        if not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)

    def store(self, key: dict, doc: dict):
        if not self.directory:
            return
        path = self._path(key)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(doc))
        os.replace(tmp, path)


def tilting_cache_key(group: str, p: int, lam, seed: int) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "kind": "tilting-with-family",
        "group": group,
        "p": enc_int(p),
        "lambda": enc_vec(lam),
        "seed": enc_int(seed),
    }
