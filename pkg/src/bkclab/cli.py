"""Command-line driver: hypothesis checks, single computations, verification
sweeps, caching, and machine-readable reports.

Commands:

    bkclab check     --group GL2 --p 2
    bkclab bk        --group GL2 --p 2 --lambda 2,0 [--mu 1,1]
    bkclab qanalogue --group GL2 --lambda 2,0 --mu 1,1
    bkclab verify    --config sweep.toml

Exit codes: 0 success, 1 usage, 2 hypothesis failure, 3 cap exceeded,
4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from . import SCHEMA_VERSION, __version__
from .bkfilt import bk_filtration, build_principal_pair, divided_family
from .cache import (
    Cache,
    canonical_json,
    enc_int,
    enc_vec,
    module_with_family_document,
    module_with_family_from_document,
    tilting_cache_key,
)
from .errors import (
    BkclabError,
    CapExceeded,
    InternalCheckError,
    UnsupportedGroup,
)
from .invmodel import b_invariant_filtration, lambda_bijective, regularity_check
from .qanalogue import lusztig_q_analogue
from .repbuild import freudenthal_multiplicity
from .rootdata import GroupSpec, build_root_datum, check_hypotheses
from .tilting import extract_tilting, in_lowest_alcove, tilting_module

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_HYPOTHESIS = 2
EXIT_CAP = 3
EXIT_INTERNAL = 4

DEFAULT_CAPS = {"dimension": 5000, "weyl": 10000, "degree": 24}


class HypothesisFailure(BkclabError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"hypotheses fail for {report.group} at p={report.p}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def parse_weight(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise UnsupportedGroup(f"cannot parse weight {text!r}") from exc


def hypothesis_document(report) -> dict:
    return {
        "group": report.group,
        "p": enc_int(report.p),
        "flags": report.flags(),
        "verdict": report.verdict,
        "coxeter_number": enc_int(report.coxeter_number),
        "h": enc_vec(report.h_coords) if report.h_coords is not None else None,
    }


def _dominant_weights(datum, module) -> list:
    return sorted(w for w in set(module.basis_weights) if datum.is_dominant(w))


def _empty_report_document(lam, mu, p) -> dict:
    return {
        "lambda": enc_vec(lam),
        "mu": enc_vec(mu),
        "p": enc_int(p),
        "multiplicity": "0",
        "dims": [],
        "graded": [],
        "jump_polynomial": [],
        "q_analogue": [],
        "costalk": [],
        "flags": {"sum_rule": None, "char0_match": None, "invmodel_match": None},
    }


def run_case(config: dict) -> dict:
    """One (group, p, lambda) computation; plain-dict in and out so sweeps
    can run in worker processes."""
    group = config["group"]
    p = config["p"]
    lam = tuple(config["lam"])
    mu_sel = config["mu"]
    seed = config["seed"]
    caps = config.get("caps", DEFAULT_CAPS)
    cache_dir = config.get("cache_dir")
    want_invmodel = config.get("invmodel", False)
    want_routes = config.get("routes", False)

    spec = GroupSpec(group, p)
    hyp = check_hypotheses(spec)
    if not hyp.verdict:
        raise HypothesisFailure(hyp)
    datum = build_root_datum(spec)
    if len(lam) != datum.coord_dim:
        raise UnsupportedGroup(
            f"lambda must have {datum.coord_dim} coordinates for {group}"
        )
    pair = build_principal_pair(datum, hyp)

    cache = Cache(cache_dir)
    key = tilting_cache_key(group, p, lam, seed)
    cached = cache.load(key)
    if cached is not None:
        module, family, route = module_with_family_from_document(cached, datum, pair)
    else:
        rng = random.Random(seed)
        module, route = tilting_module(datum, p, lam, rng, caps["dimension"])
        family = divided_family(module, pair)
        cache.store(key, module_with_family_document(module, family, route))

    alcove = in_lowest_alcove(datum, p, lam)
    if mu_sel == "all":
        mus = _dominant_weights(datum, module)
    else:
        mus = [tuple(mu_sel)]
        if any(len(mu) != datum.coord_dim for mu in mus):
            raise UnsupportedGroup(
                f"mu must have {datum.coord_dim} coordinates for {group}"
            )

    weight_set = set(module.basis_weights)
    reports = []
    for mu in mus:
        if mu not in weight_set:
            reports.append(_empty_report_document(lam, mu, p))
            continue
        filt = bk_filtration(family, mu)
        mu_dominant = datum.is_dominant(mu)
        q_poly = (
            lusztig_q_analogue(datum, lam, mu, weyl_cap=caps["weyl"])
            if mu_dominant
            else None
        )
        flags = {"sum_rule": None, "char0_match": None, "invmodel_match": None}
        mult = filt.multiplicity
        if q_poly is not None:
            freud = freudenthal_multiplicity(datum, lam, mu)
            flags["sum_rule"] = (
                filt.jump.evaluate(1) == mult
                and q_poly.evaluate(1) == freud
                and mult - q_poly.evaluate(1) >= 0
            )
            if alcove:
                flags["char0_match"] = filt.jump.coeffs == q_poly.coeffs
        if want_invmodel:
            degree_needed = sum(
                datum.root_coordinates(datum.sub_weights(lam, mu))
            ) + 1
            if degree_needed > caps["degree"]:
                raise CapExceeded(
                    f"invariant-model degree {degree_needed} above cap"
                )
            inv = b_invariant_filtration(module, mu)
            match = all(
                inv.dims[n] == filt.level_dim(n)
                for n in range(inv.degree_bound + 1)
            )
            flags["invmodel_match"] = match and lambda_bijective(inv)
        filt.flags.update(flags)
        doc = {
            "lambda": enc_vec(lam),
            "mu": enc_vec(mu),
            "p": enc_int(p),
            "multiplicity": enc_int(mult),
            "dims": [enc_int(x) for x in filt.dims],
            "graded": [enc_int(x) for x in filt.graded],
            "jump_polynomial": [enc_int(x) for x in filt.jump.coeffs],
            "q_analogue": [enc_int(x) for x in q_poly.coeffs]
            if q_poly is not None
            else None,
            "costalk": [[enc_int(d), enc_int(g)] for d, g in filt.costalk]
            if filt.costalk is not None
            else None,
            "flags": flags,
        }
        reports.append(doc)

    route_consistency = None
    if want_routes and alcove and datum.family in ("GL", "A") and p >= datum.coxeter_number:
        other = extract_tilting(datum, p, lam, random.Random(seed))
        other_family = divided_family(other, pair)
        route_consistency = other.character() == module.character()
        if route_consistency:
            for mu in _dominant_weights(datum, module):
                a = bk_filtration(family, mu).jump.coeffs
                b = bk_filtration(other_family, mu).jump.coeffs
                if a != b:
                    route_consistency = False
                    break

    return {
        "group": group,
        "p": enc_int(p),
        "lambda": enc_vec(lam),
        "route": route,
        "regular_h": regularity_check(datum, p, hyp.h_coords),
        "tilting_dimension": enc_int(module.dimension),
        "character": sorted(
            [[enc_vec(w), enc_int(m)] for w, m in module.character().items()]
        ),
        "hypotheses": hypothesis_document(hyp),
        "reports": reports,
        "route_consistency": route_consistency,
    }


def _aggregate_crosschecks(runs) -> dict:
    names = ("sum_rule", "char0_match", "invmodel_match")
    out = {}
    for name in names:
        values = [
            rep["flags"][name]
            for run in runs
            for rep in run["reports"]
            if rep["flags"].get(name) is not None
        ]
        out[name] = all(values) if values else None
    route_values = [
        run["route_consistency"]
        for run in runs
        if run["route_consistency"] is not None
    ]
    out["route_consistency"] = all(route_values) if route_values else None
    return out


def build_document(runs, config_echo, deterministic: bool) -> dict:
    doc = {
        "schema": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": config_echo,
        "runs": runs,
        "crosschecks": _aggregate_crosschecks(runs),
    }
    if not deterministic:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat()
    return doc


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return canonical_json(doc)
    if fmt == "csv":
        return _render_csv(doc)
    return _render_pretty(doc)


def _render_csv(doc: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["group", "p", "lambda", "mu", "n", "g_n", "degree", "q_coeff"]
    )
    for run in doc["runs"]:
        for rep in run["reports"]:
            graded = rep["graded"]
            q_coeffs = rep["q_analogue"] or []
            span = max(len(graded), len(q_coeffs))
            nonzero_index = 0
            for n in range(span):
                g_n = graded[n] if n < len(graded) else "0"
                q_c = q_coeffs[n] if n < len(q_coeffs) else "0"
                degree = ""
                if rep["costalk"] is not None and n < len(graded) and graded[n] != "0":
                    degree = rep["costalk"][nonzero_index][0]
                    nonzero_index += 1
                writer.writerow(
                    [
                        run["group"],
                        run["p"],
                        ",".join(rep["lambda"]),
                        ",".join(rep["mu"]),
                        n,
                        g_n,
                        degree,
                        q_c,
                    ]
                )
    return buf.getvalue()


def _render_pretty(doc: dict) -> str:
    lines = []
    for run in doc["runs"]:
        lam = ",".join(run["lambda"])
        lines.append(
            f"{run['group']} p={run['p']} lambda=({lam}) route={run['route']} "
            f"dim T = {run['tilting_dimension']}"
        )
        for rep in run["reports"]:
            mu = ",".join(rep["mu"])
            jump = rep["jump_polynomial"]
            q = rep["q_analogue"]
            costalk = rep["costalk"]
            lines.append(
                f"  mu=({mu}) mult={rep['multiplicity']} jump={jump} "
                f"q-analogue={q} costalk={costalk} flags={rep['flags']}"
            )
        if run["route_consistency"] is not None:
            lines.append(f"  route consistency: {run['route_consistency']}")
    lines.append(f"crosschecks: {doc['crosschecks']}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    report = check_hypotheses(GroupSpec(args.group, args.p))
    doc = hypothesis_document(report)
    if args.json:
        _emit(canonical_json(doc), None)
    else:
        for name, value in doc["flags"].items():
            sys.stdout.write(f"{name}: {value}\n")
        sys.stdout.write(f"verdict: {doc['verdict']}\n")
    return EXIT_OK if report.verdict else EXIT_HYPOTHESIS


def cmd_bk(args) -> int:
    config = {
        "group": args.group,
        "p": args.p,
        "lam": list(parse_weight(args.lam)),
        "mu": "all" if args.mu is None else list(parse_weight(args.mu)),
        "seed": args.seed,
        "caps": dict(DEFAULT_CAPS),
        "cache_dir": args.cache_dir,
        "invmodel": False,
        "routes": False,
    }
    run = run_case(config)
    echo = {
        "group": args.group,
        "p": enc_int(args.p),
        "lambda": enc_vec(parse_weight(args.lam)),
        "mu": "all" if args.mu is None else enc_vec(parse_weight(args.mu)),
        "seed": enc_int(args.seed),
        "caps": {k: enc_int(v) for k, v in DEFAULT_CAPS.items()},
        "cache_dir": args.cache_dir,
        "format": args.format,
    }
    doc = build_document([run], echo, args.deterministic)
    _emit(render(doc, args.format), args.out)
    return EXIT_OK


def cmd_qanalogue(args) -> int:
    datum = build_root_datum(GroupSpec(args.group))
    poly = lusztig_q_analogue(datum, parse_weight(args.lam), parse_weight(args.mu))
    doc = {
        "schema": SCHEMA_VERSION,
        "group": args.group,
        "lambda": enc_vec(parse_weight(args.lam)),
        "mu": enc_vec(parse_weight(args.mu)),
        "q_analogue": [enc_int(c) for c in poly.coeffs],
    }
    _emit(canonical_json(doc), args.out)
    return EXIT_OK


def _load_toml(path: str) -> dict:
    try:
        import tomllib as toml_reader  # py311+
    except ModuleNotFoundError:
        import tomli as toml_reader
    with open(path, "rb") as fh:
        return toml_reader.load(fh)


def cmd_verify(args) -> int:
    config = _load_toml(args.config)
    seed = int(config.get("seed", 0))
    fmt = args.format or config.get("format", "json")
    cache_dir = args.cache_dir or config.get("cache_dir") or os.environ.get(
        "BKCLAB_CACHE"
    )
    deterministic = args.deterministic or bool(config.get("deterministic", False))
    caps = dict(DEFAULT_CAPS)
    caps.update({k: int(v) for k, v in config.get("caps", {}).items()})
    if any(v <= 0 for v in caps.values()):
        raise UnsupportedGroup("caps must be positive")

    run_configs = []
    for entry in config.get("runs", []):
        mu = entry.get("mu", "all")
        run_configs.append(
            {
                "group": entry["group"],
                "p": int(entry["p"]),
                "lam": [int(x) for x in entry["lambda"]],
                "mu": "all" if mu == "all" else [int(x) for x in mu],
                "seed": seed,
                "caps": caps,
                "cache_dir": cache_dir,
                "invmodel": True,
                "routes": True,
            }
        )
    run_configs.sort(key=lambda c: (c["group"], c["p"], c["lam"]))

    jobs = args.jobs or int(config.get("jobs", 1))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(run_case, run_configs))
    else:
        runs = [run_case(c) for c in run_configs]

    echo = {
        "config_file": os.path.basename(args.config),
        "seed": enc_int(seed),
        "caps": {k: enc_int(v) for k, v in caps.items()},
        "runs": [
            {
                "group": c["group"],
                "p": enc_int(c["p"]),
                "lambda": enc_vec(c["lam"]),
                "mu": "all" if c["mu"] == "all" else enc_vec(c["mu"]),
            }
            for c in run_configs
        ],
    }
    doc = build_document(runs, echo, deterministic)
    _emit(render(doc, fmt), args.out)
    return EXIT_OK


def make_parser() -> _Parser:
    parser = _Parser(prog="bkclab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run the hypothesis checker")
    check.add_argument("--group", required=True)
    check.add_argument("--p", type=int, required=True)
    check.add_argument("--json", action="store_true")
    check.set_defaults(func=cmd_check)

    bk = sub.add_parser("bk", help="filtration of one tilting module")
    bk.add_argument("--group", required=True)
    bk.add_argument("--p", type=int, required=True)
    bk.add_argument("--lambda", dest="lam", required=True)
    bk.add_argument("--mu", default=None)
    bk.add_argument("--seed", type=int, default=0)
    bk.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    bk.add_argument("--deterministic", action="store_true")
    bk.add_argument("--cache-dir", default=os.environ.get("BKCLAB_CACHE"))
    bk.add_argument("--out", default=None)
    bk.set_defaults(func=cmd_bk)

    qan = sub.add_parser("qanalogue", help="q-analogue of a weight multiplicity")
    qan.add_argument("--group", required=True)
    qan.add_argument("--lambda", dest="lam", required=True)
    qan.add_argument("--mu", required=True)
    qan.add_argument("--out", default=None)
    qan.set_defaults(func=cmd_qanalogue)

    verify = sub.add_parser("verify", help="full sweep with all cross-checks")
    verify.add_argument("--config", required=True)
    verify.add_argument("--format", choices=("json", "csv", "pretty"), default=None)
    verify.add_argument("--deterministic", action="store_true")
    verify.add_argument("--jobs", type=int, default=None)
    verify.add_argument("--cache-dir", default=None)
    verify.add_argument("--out", default=None)
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except HypothesisFailure as exc:
        sys.stderr.write(f"{exc}\n")
        for name, value in exc.report.flags().items():
            sys.stderr.write(f"{name}: {value}\n")
        return EXIT_HYPOTHESIS
    except CapExceeded as exc:
        sys.stderr.write(f"cap exceeded: {exc}\n")
        return EXIT_CAP
    except (InternalCheckError, AssertionError) as exc:
        sys.stderr.write(f"internal check failed: {exc}\n")
        return EXIT_INTERNAL
    except BkclabError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
