"""Command-line surface: reproducible runs, JSON serialization and caching.

Exit codes: 0 success, 2 precondition violation (unknown pair, invalid
parabolic, incompatible triple, rank caps), 1 internal error.  Rationals are
serialized as "p/q" strings, never floats, and identical configurations
produce byte-identical JSON.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .branching import (
    BranchingTable,
    VermaSpec,
    branch_multiplicities,
    closed_form_law,
    genericity_check,
    law_setting,
    mf_scan,
    verify_character_identity,
)
from .liealg import RankCapError, Weight
from .pairs import PairSpec, build_pair, catalog_pairs
from .parabolic import (
    IncompatibleRestrictionError,
    closed_orbit_census,
    closedness_report,
    compatibility_report,
    condition_iii_spot_check,
    parabolic_from_H,
    parabolic_from_simple_subset,
)

log = logging.getLogger("vermabranch")

ENGINE_VERSION = "0.1.0"
SCHEMA_VERSION = "vb-schema-1"
CACHE_ENV_VAR = "VERMABRANCH_CACHE_DIR"

COMMANDS = ("pairs", "analyze", "census", "branch", "verify", "mf-scan")

DEGREE_CAP = 12
LEVEL_CAP = 12


class PreconditionError(ValueError):
    """Configuration problems that map to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    pair_id: Optional[str] = None
    parabolic: Optional[str] = None
    lam: str = "generic"
    degree: int = 6
    level: int = 4
    law: Optional[str] = None
    n: Optional[int] = None
    l: Optional[int] = None
    rank_bound: int = 4
    format: str = "text"
    cache_dir: Optional[str] = None
    seed: int = 20260810

    def canonical_encoding(self) -> str:
        skip = {"format", "cache_dir"}
        items = [
            "%s=%s" % (k, v)
            for k, v in sorted(self.__dict__.items())
            if k not in skip and v is not None
        ]
        return ";".join(items)

    def cache_key(self) -> str:
        text = "%s|%s|%s" % (SCHEMA_VERSION, ENGINE_VERSION, self.canonical_encoding())
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(eq=False)
class ResultEnvelope:
    payload: dict
    timing_ms: Optional[float] = field(default=None, compare=False)

    def __eq__(self, other):
        return isinstance(other, ResultEnvelope) and self.payload == other.payload


def serialize_envelope(env: ResultEnvelope, format: str = "json") -> str:
    if format == "json":
        return json.dumps(env.payload, sort_keys=True, separators=(",", ":")) + "\n"
    if format == "text":
        return _render_text(env.payload)
    raise PreconditionError("unknown format %r" % format)


def parse_envelope(text: str) -> ResultEnvelope:
    return ResultEnvelope(payload=json.loads(text))


def _render_text(payload: dict) -> str:
    lines = ["%s (engine %s)" % (payload.get("command"), payload.get("engine"))]
    for key in ("pair", "parabolic", "compatible", "closed", "gk_dim", "result"):
        if payload.get(key) is not None:
            lines.append("%s: %s" % (key, payload[key]))
    if payload.get("census") is not None:
        c = payload["census"]
        lines.append(
            "census: %d closed classes among %d parabolics containing j"
            % (c["closed_count"], c["total_parabolics_containing_j"])
        )
        for rep in c["representatives"]:
            lines.append("  %s  gk_dim=%d" % (rep["descriptor"], rep["gk_dim"]))
    if payload.get("summands") is not None:
        base = payload.get("base_offset")
        base_txt = "lambda" if base is None else "(%s)" % ", ".join(base)
        lines.append("summands (%d):" % len(payload["summands"]))
        for s in payload["summands"]:
            disp = ", ".join("%+d" % d for d in s["delta_displacement"])
            lines.append(
                "  delta = %s + (%s)   multiplicity %d   degree %d"
                % (base_txt, disp, s["multiplicity"], s["degree"])
            )
    if payload.get("scan") is not None:
        lines.append("multiplicity-free scan (pass):")
        for row in payload["scan"]:
            lines.append("  %s" % row["pair"])
    if payload.get("catalog") is not None:
        lines.append("catalog:")
        for pid in payload["catalog"]:
            lines.append("  %s" % pid)
    for note in payload.get("assumptions") or ():
        lines.append("assuming: %s" % note)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------

def _fraction_str(x: Fraction) -> str:
    return str(x)


def _resolve_pair(pair_id: str):
    try:
        spec = PairSpec.parse(pair_id)
        return build_pair(spec)
    except (ValueError, KeyError) as exc:
        listing = ", ".join(s.id for s in catalog_pairs(3))
        raise PreconditionError(
            "cannot resolve pair %r (%s); catalog families: %s" % (pair_id, exc, listing)
        ) from exc


def _resolve_parabolic(pair, descriptor: str):
    g = pair.g
    from .liealg import root_datum

    datum = root_datum(g)
    nsimple = len(datum.simple_roots)
    text = (descriptor or "borel").strip().lower()
    if text == "borel":
        return parabolic_from_simple_subset(g, set())
    if text == "full":
        return parabolic_from_simple_subset(g, set(range(nsimple)))
    if text == "heisenberg":
        if nsimple < 2:
            raise PreconditionError("heisenberg parabolic needs rank >= 2")
        return parabolic_from_simple_subset(g, set(range(1, nsimple - 1)))
    if text == "siegel":
        if g.type is None or g.type.family != "C":
            raise PreconditionError("siegel parabolic requires a symplectic pair")
        return parabolic_from_simple_subset(g, set(range(nsimple - 1)))
    if text.startswith("h="):
        try:
            params = Weight(Fraction(v) for v in text[2:].split(","))
            h = g.cartan_element(params)
        except (ValueError, ZeroDivisionError) as exc:
            raise PreconditionError("bad Cartan parameters %r" % descriptor) from exc
        return parabolic_from_H(g, h)
    try:
        subset = {int(v) for v in text.split(",") if v != ""}
    except ValueError as exc:
        raise PreconditionError("bad parabolic descriptor %r" % descriptor) from exc
    if not subset <= set(range(nsimple)):
        raise PreconditionError(
            "simple root indices out of range (0..%d)" % (nsimple - 1)
        )
    return parabolic_from_simple_subset(g, subset)


def _resolve_lambda(pair, parabolic, text: str) -> VermaSpec:
    text = (text or "generic").strip()
    if text.lower() == "generic":
        return VermaSpec.generic(parabolic)
    try:
        coords = [Fraction(v.strip()) for v in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise PreconditionError("bad lambda %r" % text) from exc
    if len(coords) != pair.g.eps_dim:
        raise PreconditionError(
            "lambda needs %d coordinates for this pair" % pair.g.eps_dim
        )
    try:
        return VermaSpec.of(parabolic, Weight(coords))
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc


def _table_json(table: BranchingTable):
    return [
        {
            "delta_displacement": list(e.delta_displacement),
            "multiplicity": e.multiplicity,
            "degree": e.first_degree,
        }
        for e in table.entries
    ]


# ---------------------------------------------------------------------------
# command dispatch
# ---------------------------------------------------------------------------

def _base_payload(config: RunConfig) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "engine": ENGINE_VERSION,
        "command": config.command,
        "config": config.canonical_encoding(),
        "pair": config.pair_id,
        "parabolic": config.parabolic,
        "closed": None,
        "compatible": None,
        "gk_dim": None,
        "summands": None,
        "assumptions": [],
    }


def _cmd_pairs(config: RunConfig, payload: dict):
    payload["catalog"] = [s.id for s in catalog_pairs(config.rank_bound)]
    payload["result"] = "%d catalog pairs" % len(payload["catalog"])


def _cmd_analyze(config: RunConfig, payload: dict):
    pair = _resolve_pair(config.pair_id)
    p = _resolve_parabolic(pair, config.parabolic)
    comp = compatibility_report(p, pair)
    rep = closedness_report(p, pair)
    payload["compatible"] = comp.compatible
    payload["closed"] = rep.closed
    payload["gk_dim"] = rep.gk_dim
    payload["nilpotency"] = {
        "bracket_closed": rep.nil_report.bracket_closed,
        "nilpotent": rep.nil_report.nilpotent,
        "lcs_length": rep.nil_report.lcs_length,
    }
    payload["spot_check_iii"] = condition_iii_spot_check(
        p, pair, samples=20, seed=config.seed
    )
    payload["result"] = "closed" if rep.closed else "not closed"


def _cmd_census(config: RunConfig, payload: dict):
    pair = _resolve_pair(config.pair_id)
    p = _resolve_parabolic(pair, config.parabolic)
    # standard type of p: the Weyl-dominant representative of its H
    datum = p.datum
    dominant = datum.dominant_representative(pair.g.eps_params(p.H))
    levi_indices = frozenset(
        i
        for i, a in enumerate(datum.simple_roots)
        if a.dot(dominant) == 0
    )
    report = closed_orbit_census(pair, levi_indices)
    payload["census"] = {
        "total_parabolics_containing_j": report.total_parabolics_containing_j,
        "closed_count": report.closed_count,
        "representatives": [
            {"descriptor": d, "gk_dim": gk} for d, _, gk in report.representatives
        ],
    }
    payload["closed"] = report.closed_count > 0
    payload["result"] = "%d closed classes" % report.closed_count


def _cmd_branch(config: RunConfig, payload: dict):
    if config.degree > DEGREE_CAP:
        raise PreconditionError("degree capped at %d" % DEGREE_CAP)
    pair = _resolve_pair(config.pair_id)
    p = _resolve_parabolic(pair, config.parabolic)
    spec = _resolve_lambda(pair, p, config.lam)
    comp = compatibility_report(p, pair)
    payload["compatible"] = comp.compatible
    if not comp.compatible:
        raise IncompatibleRestrictionError(
            "restriction not discretely decomposable for this embedding"
        )
    rep = closedness_report(p, pair)
    payload["closed"] = rep.closed
    payload["gk_dim"] = rep.gk_dim
    table = branch_multiplicities(spec, pair, config.degree)
    payload["summands"] = _table_json(table)
    payload["base_offset"] = (
        None
        if table.base_offset is None
        else [_fraction_str(c) for c in table.base_offset.coords]
    )
    payload["assumptions"] = list(table.genericity_assumptions)
    if spec.lam is not None:
        gen = genericity_check(spec, pair, table)
        payload["simple_certified"] = gen.simple_certified
        payload["distinct_infchar"] = gen.distinct_infchar
    payload["result"] = "%d summands up to degree %d" % (len(table), config.degree)


def _cmd_verify(config: RunConfig, payload: dict):
    if config.law:
        n = config.n
        if n is None:
            raise PreconditionError("verify --law needs --n")
        params = {"n": n}
        if config.law.upper() == "AA":
            params["l"] = config.l if config.l is not None else 1
        if config.degree > DEGREE_CAP:
            raise PreconditionError("degree capped at %d" % DEGREE_CAP)
        pair, spec = law_setting(config.law, params)
        engine = branch_multiplicities(spec, pair, config.degree)
        law = closed_form_law(config.law, params, config.degree)
        ok = engine.as_dict() == law.as_dict() and engine.degrees() == law.degrees()
        payload["law"] = config.law.upper()
        payload["result"] = "identity holds" if ok else "MISMATCH"
        payload["closed"] = ok
        if not ok:
            raise AssertionError("closed-form law disagrees with the engine")
        payload["assumptions"] = list(law.genericity_assumptions)
        return
    if config.level > LEVEL_CAP:
        raise PreconditionError("level capped at %d" % LEVEL_CAP)
    pair = _resolve_pair(config.pair_id)
    p = _resolve_parabolic(pair, config.parabolic)
    spec = _resolve_lambda(pair, p, config.lam)
    ok = verify_character_identity(spec, pair, config.level)
    payload["closed"] = ok
    payload["result"] = "identity holds" if ok else "MISMATCH"
    if not ok:
        raise AssertionError("character identity failed")


def _cmd_mf_scan(config: RunConfig, payload: dict):
    if config.rank_bound > 6:
        raise PreconditionError("rank bound capped at 6")
    rows = mf_scan(config.rank_bound, include_failing=True)
    payload["scan"] = [
        {
            "pair": r.spec_id,
            "dim_g": r.dim_g,
            "dim_fixed": r.dim_fixed,
            "rank_g": r.rank_g,
            "rank_fixed": r.rank_fixed,
            "passes": r.passes,
        }
        for r in rows
        if r.passes
    ]
    payload["scan_failing"] = [r.spec_id for r in rows if not r.passes]
    payload["result"] = "%d passing pairs" % len(payload["scan"])


_DISPATCH = {
    "pairs": _cmd_pairs,
    "analyze": _cmd_analyze,
    "census": _cmd_census,
    "branch": _cmd_branch,
    "verify": _cmd_verify,
    "mf-scan": _cmd_mf_scan,
}


def run_command(config: RunConfig):
    """Execute a config; returns (envelope, exit_code)."""
    started = time.monotonic()
    payload = _base_payload(config)
    try:
        cached = cache_lookup(config)
        if cached is not None:
            return cached, 0
        _DISPATCH[config.command](config, payload)
    except (PreconditionError, IncompatibleRestrictionError, RankCapError) as exc:
        payload["error"] = str(exc)
        payload["result"] = "precondition violation"
        payload["summands"] = None
        env = ResultEnvelope(payload=payload)
        return env, 2
    except Exception as exc:  # internal error contract
        payload["error"] = "%s: %s" % (type(exc).__name__, exc)
        payload["result"] = "internal error"
        env = ResultEnvelope(payload=payload)
        return env, 1
    env = ResultEnvelope(payload=payload, timing_ms=1000 * (time.monotonic() - started))
    cache_store(config, env)
    return env, 0


# ---------------------------------------------------------------------------
# cache
# ---------------------------------------------------------------------------

def _cache_dir(config: RunConfig) -> Optional[str]:
    return config.cache_dir or os.environ.get(CACHE_ENV_VAR)


def cache_lookup(config: RunConfig) -> Optional[ResultEnvelope]:
    """Content-addressed lookup; stale versions and corrupt files are misses."""
    root = _cache_dir(config)
    if not root:
        return None
    path = os.path.join(root, config.cache_key() + ".json")
    if not os.path.exists(path):
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            env = parse_envelope(fh.read())
    except (OSError, ValueError) as exc:
        log.warning("corrupt cache entry %s ignored: %s", path, exc)
        return None
    if env.payload.get("engine") != ENGINE_VERSION or env.payload.get("schema") != SCHEMA_VERSION:
        return None
    return env


def cache_store(config: RunConfig, env: ResultEnvelope) -> None:
    root = _cache_dir(config)
    if not root:
        return
    os.makedirs(root, exist_ok=True)
    path = os.path.join(root, config.cache_key() + ".json")
    data = serialize_envelope(env, "json")
    fd, tmp = tempfile.mkstemp(dir=root, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _read_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise PreconditionError("bad config line %r" % line)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vermabranch",
        description="Discretely decomposable restrictions of generalized "
        "Verma modules to symmetric subalgebras",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--pair", dest="pair_id")
    parser.add_argument("--parabolic", default=None)
    parser.add_argument("--lambda", dest="lam", default="generic")
    parser.add_argument("--degree", type=int, default=6)
    parser.add_argument("--level", type=int, default=4)
    parser.add_argument("--law")
    parser.add_argument("--n", type=int)
    parser.add_argument("--l", type=int)
    parser.add_argument("--rank-bound", type=int, default=4)
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--cache-dir")
    parser.add_argument("--seed", type=int, default=20260810)
    parser.add_argument("--config", dest="config_file")
    return parser


_INT_KEYS = {"degree", "level", "n", "l", "rank_bound", "seed"}


def config_from_args(argv) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    values = vars(args)
    config_file = values.pop("config_file", None)
    if config_file:
        defaults = _read_config_file(config_file)
        for key, raw in defaults.items():
            if key not in values:
                raise PreconditionError("unknown config key %r" % key)
            if values[key] == parser.get_default(key) or values[key] is None:
                values[key] = int(raw) if key in _INT_KEYS else raw
    return RunConfig(**values)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING)
    try:
        config = config_from_args(argv if argv is not None else sys.argv[1:])
    except PreconditionError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    env, code = run_command(config)
    sys.stdout.write(serialize_envelope(env, config.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
