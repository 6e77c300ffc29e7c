"""Batch front end: configs, the experiment DAG, run manifests and reports.

Configs are INI files whose values are JSON literals (bare words are read as
strings).  Command-line flags override config keys, which override defaults.
"""
from __future__ import annotations

import argparse
import configparser
import copy
import hashlib
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Callable

import numpy as np
import scipy

from . import __version__
from ._integrate import FlowOptions
from .candidates import confirm_candidates, enumerate_candidates, extract_weights
from .flow import basin_survey, check_hessian_at_limits, flow_to_limit, seed_rng
from .lie_core import GroupSpec, GroupSpecError, load_spec, preset, validate_group_spec
from .morse import PoincareSeries, check_inequalities, sl2c_p1_data, sl2r_p1_data
from .proj_geom import random_point
from .strata import (
    Membership,
    k_orbit_distance,
    prestratum_membership,
    value_floor_check,
    verify_maximal_stratum,
)

EXIT_OK, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2

EXPERIMENTS = ("validate", "candidates", "survey", "stratify", "morse")
DEPENDENCIES = {
    "validate": (),
    "candidates": (),
    "survey": ("candidates",),
    "stratify": ("candidates", "survey"),
    "morse": (),
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "run": {"group": "sl2r", "space": "complex", "rng_seed": 0, "experiments": list(EXPERIMENTS)},
    "flow": {"rtol": 1e-9, "atol": 1e-12, "crit_rel": 1e-8, "max_steps": 1_000_000, "t_max": 1000.0},
    "candidates": {"max_support": None, "budget": 200_000},
    "survey": {
        "seeds": 200,
        "real_seeds": 0,
        "audit_points": 0,
        "audit_neighbors": 6,
        "audit_eps": [1e-2, 1e-3],
        "trace_seeds": 2,
        "workers": 1,
    },
    "stratify": {"samples": 10, "membership_points": 4, "hessian_points": 5, "group_draws": 50},
    "morse": {"data": "sl2r_p1", "truncation": 32, "field": "Q", "terms": None, "total": None},
}

MORSE_DATA = {"sl2r_p1": sl2r_p1_data, "sl2c_p1": sl2c_p1_data}


class ConfigError(ValueError):
    pass


# ----------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    values: dict[str, dict[str, Any]]
    base_dir: Path = field(default_factory=Path.cwd)

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.values[section]

    @property
    def experiments(self) -> list[str]:
        return list(self.values["run"]["experiments"])

    def canonical(self) -> str:
        return json.dumps(self.values, sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def flow_options(self) -> FlowOptions:
        f = self.values["flow"]
        return FlowOptions(
            rtol=float(f["rtol"]),
            atol=float(f["atol"]),
            crit_rel=float(f["crit_rel"]),
            max_steps=int(f["max_steps"]),
            t_max=float(f["t_max"]),
            record=False,
        )

    @property
    def real_space(self) -> bool:
        return self.values["run"]["space"] == "real"

    def group(self) -> GroupSpec:
        g = self.values["run"]["group"]
        if isinstance(g, str) and g.startswith("file:"):
            path = Path(g[5:])
            if not path.is_absolute():
                path = self.base_dir / path
            return load_spec(path)
        return preset(g)


def _parse_value(raw: str) -> Any:
    raw = raw.strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def shipped_configs() -> list[str]:
    return sorted(p.name for p in resources.files("realstrata").joinpath("data").iterdir() if p.name.endswith(".cfg"))


def _resolve_config_path(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    cand = resources.files("realstrata").joinpath("data", p.name)
    if cand.is_file():
        return Path(str(cand))
    raise ConfigError(f"config {name!r} not found (shipped: {', '.join(shipped_configs())})")


def load_config(path: str | None, overrides: dict[str, dict[str, Any]] | None = None) -> RunConfig:
    values = copy.deepcopy(DEFAULTS)
    base = Path.cwd()
    if path:
        p = _resolve_config_path(path)
        base = p.parent
        parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
        try:
            parser.read_string(p.read_text())
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse {p}: {exc}") from exc
        for section in parser.sections():
            if section not in values:
                raise ConfigError(f"unknown section [{section}]")
            for key, raw in parser.items(section):
                if key not in values[section]:
                    raise ConfigError(f"unknown key {section}.{key}")
                values[section][key] = _parse_value(raw)
    for section, kv in (overrides or {}).items():
        for key, v in kv.items():
            if v is not None:
                values[section][key] = v
    exps = values["run"]["experiments"]
    if isinstance(exps, str):
        exps = [e.strip() for e in exps.split(",") if e.strip()]
    values["run"]["experiments"] = list(exps)
    cfg = RunConfig(values, base)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig) -> None:
    run = cfg["run"]
    for e in cfg.experiments:
        if e not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {e!r}")
    listed = set(cfg.experiments)
    for e in cfg.experiments:
        missing = [d for d in DEPENDENCIES[e] if d not in listed]
        if missing:
            raise ConfigError(f"experiment {e!r} needs {', '.join(missing)}")
    if run["space"] not in ("complex", "real"):
        raise ConfigError("run.space must be 'complex' or 'real'")
    if not isinstance(run["rng_seed"], int) or run["rng_seed"] < 0:
        raise ConfigError("run.rng_seed must be a non-negative integer")
    try:
        spec = cfg.group()
    except (GroupSpecError, ValueError, OSError, KeyError) as exc:
        raise ConfigError(f"bad group: {exc}") from exc
    if cfg.real_space and not spec.is_real:
        raise ConfigError(f"group {spec.name} does not preserve the real locus")
    for key in ("rtol", "atol", "crit_rel", "t_max"):
        v = cfg["flow"][key]
        if not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"flow.{key} must be positive")
    if not isinstance(cfg["flow"]["max_steps"], int) or cfg["flow"]["max_steps"] <= 0:
        raise ConfigError("flow.max_steps must be a positive integer")
    s = cfg["survey"]
    for key in ("seeds", "real_seeds", "audit_points", "audit_neighbors", "trace_seeds", "workers"):
        if not isinstance(s[key], int) or s[key] < 0:
            raise ConfigError(f"survey.{key} must be a non-negative integer")
    if any(not (isinstance(e, (int, float)) and e > 0) for e in s["audit_eps"]):
        raise ConfigError("survey.audit_eps must be positive")
    if s["real_seeds"] and not spec.is_real:
        raise ConfigError(f"group {spec.name} has no real locus for real_seeds")
    m = cfg["morse"]
    if m["data"] not in MORSE_DATA and m["data"] != "custom":
        raise ConfigError(f"morse.data must be one of {sorted(MORSE_DATA)} or 'custom'")
    if m["data"] == "custom" and (m["terms"] is None or m["total"] is None):
        raise ConfigError("custom morse data needs 'terms' and 'total'")
    if m["field"] not in ("Q", "Z2"):
        raise ConfigError("morse.field must be Q or Z2")


# ----------------------------------------------------------------------------
# output


def fmt(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    if isinstance(v, (list, tuple)):
        return ",".join(fmt(x) for x in v)
    return str(v)


def write_table(path: Path, header: list[str], rows: list[list[Any]]) -> None:
    lines = ["\t".join(header)] + ["\t".join(fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    lines = path.read_text().splitlines()
    header = lines[0].split("\t")
    return header, [ln.split("\t") for ln in lines[1:]]


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v) if math.isfinite(v) else str(float(v))
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    return v


def dump_json(path: Path, obj: Any) -> None:
    path.write_text(json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n")


# ----------------------------------------------------------------------------
# experiments


@dataclass
class Context:
    cfg: RunConfig
    spec: GroupSpec
    out: Path
    results: dict[str, Any] = field(default_factory=dict)


class Output:
    """Collects the files one experiment writes, relative to the run directory."""

    def __init__(self, ctx: Context):
        self.ctx = ctx
        self.files: list[str] = []

    def table(self, name: str, header: list[str], rows: list[list[Any]]) -> None:
        write_table(self.ctx.out / name, header, rows)
        self.files.append(name)


def exp_validate(ctx: Context, out: Output) -> dict:
    rep = validate_group_spec(ctx.spec)
    out.table(
        "validate.tsv",
        ["check", "value", "tolerance", "passed"],
        [[c.name, c.value, c.tolerance, c.passed] for c in rep.checks],
    )
    if not rep.ok:
        failed = [c.name for c in rep.checks if not c.passed]
        raise RuntimeError(f"group spec failed checks: {', '.join(failed)}")
    return {"ok": rep.ok, "checks": len(rep.checks)}


def exp_candidates(ctx: Context, out: Output) -> dict:
    c = ctx.cfg["candidates"]
    table = extract_weights(ctx.spec, real=ctx.cfg.real_space)
    cands = enumerate_candidates(ctx.spec, table, max_support=c["max_support"], budget=int(c["budget"]))
    ctx.results["candidates"] = cands
    da = ctx.spec.dim_a
    out.table(
        "weights.tsv",
        ["index", "multiplicity"] + [f"w{j}" for j in range(da)],
        [[i, m] + list(w) for i, (w, m) in enumerate(zip(table.weights, table.multiplicities))],
    )
    out.table(
        "candidates.tsv",
        ["index", "norm"] + [f"beta{j}" for j in range(da)] + ["support"],
        [[i, cb.norm] + list(cb.beta) + [list(cb.support)] for i, cb in enumerate(cands)],
    )
    return {"count": len(cands), "norms": [cb.norm for cb in cands], "weights": len(table)}


def _label_name(i: int | None) -> str:
    return "none" if i is None else str(i)


def exp_survey(ctx: Context, out: Output) -> dict:
    s = ctx.cfg["survey"]
    cands = ctx.results["candidates"]
    opts = ctx.cfg.flow_options()
    seed = int(ctx.cfg["run"]["rng_seed"])
    real_space = ctx.cfg.real_space
    n_complex = 0 if real_space else int(s["seeds"])
    n_real = int(s["seeds"]) if real_space else int(s["real_seeds"])
    rep = basin_survey(
        ctx.spec,
        n_complex,
        seed,
        cands,
        real_seeds=n_real,
        opts=opts,
        audit_points=int(s["audit_points"]),
        audit_neighbors=int(s["audit_neighbors"]),
        audit_eps=tuple(s["audit_eps"]),
        workers=int(s["workers"]),
    )
    ctx.results["survey"] = rep
    confirmed = confirm_candidates(cands, rep.realized)
    ctx.results["candidates"] = confirmed
    n = ctx.spec.n
    out.table(
        "survey_seeds.tsv",
        ["kind", "index", "label", "converged", "stalled", "eta", "steps"] + [f"{p}{j}" for j in range(n) for p in ("seed_re", "seed_im")],
        [
            [r.kind, r.index, r.label.key, r.label.converged, r.stalled, r.eta, r.steps] + r.point.to_reals()
            for r in rep.records
        ],
    )
    rows = []
    for kind in ("complex", "real"):
        pct = rep.percentages(kind)
        counts = rep.counts(kind)
        for key in sorted(counts):
            norm = confirmed[int(key)].norm if key.isdigit() else None
            rows.append([kind, key, norm, counts[key], pct[key]])
    out.table("survey_counts.tsv", ["kind", "label", "beta_norm", "count", "percent"], rows)
    out.table(
        "survey_candidates.tsv",
        ["index", "norm", "confirmed"],
        [[i, c.norm, c.confirmed] for i, c in enumerate(confirmed)],
    )
    # full traces for a few seeds, regenerated from the same per-seed streams
    trace_opts = FlowOptions(**{**opts.__dict__, "record": True})
    for kind, stream, count in (("complex", 0, min(s["trace_seeds"], n_complex)), ("real", 1, min(s["trace_seeds"], n_real))):
        for i in range(count):
            pt = random_point(n, seed_rng(seed, stream, i), real=(kind == "real"))
            tr = flow_to_limit(ctx.spec, pt, trace_opts, real=(kind == "real" and real_space))
            out.table(f"trace_{kind}_{i}.tsv", ["t", "eta", "grad_norm"], [[a, b, c] for a, b, c in zip(tr.times, tr.etas, tr.grad_norms)])
    summary = {
        "counts": {k: dict(rep.counts(k)) for k in ("complex", "real")},
        "realized": sorted(rep.realized),
        "unmatched": rep.unmatched,
    }
    if rep.audit is not None:
        a = rep.audit
        arows = []
        for eps in a.eps_values:
            for (src, dst), cnt in sorted(a.per_eps_counts[eps].items()):
                arows.append([eps, src, dst, cnt])
        out.table("survey_audit.tsv", ["eps", "label", "neighbor_label", "count"], arows)
        summary["audit"] = {
            "points": a.points_checked,
            "adjacencies": len(a.adjacencies),
            "violations": len(a.violations),
            "unresolved": a.unresolved,
        }
    return summary


def exp_stratify(ctx: Context, out: Output) -> dict:
    st = ctx.cfg["stratify"]
    spec = ctx.spec
    cands = ctx.results["candidates"]
    rep = ctx.results["survey"]
    real = ctx.cfg.real_space
    seed = int(ctx.cfg["run"]["rng_seed"])
    realized = sorted(rep.realized)
    floor_rows, member_rows, hess_rows = [], [], []
    summary: dict[str, Any] = {"floor": {}, "membership": {}, "hessian": {}}
    for idx in realized:
        b = cands[idx].matrix(spec)
        fr = value_floor_check(spec, b, seed_rng(seed, 10, idx), int(st["samples"]), real=real)
        for j, smp in enumerate(fr.samples):
            floor_rows.append([idx, j, smp.confirmed, smp.eta, fr.floor, smp.eta - fr.floor, smp.equality_eta, smp.equality_mu_residual, smp.equality_fixed_residual])
        summary["floor"][str(idx)] = {"confirmed": fr.confirmed_count, "violations": len(fr.violations), "equality_failures": len(fr.equality_failures)}
    out.table(
        "stratify_floor.tsv",
        ["beta", "sample", "confirmed", "eta", "floor", "margin", "equality_eta", "equality_mu_residual", "equality_fixed_residual"],
        floor_rows,
    )
    # membership of surveyed points against their own label and against the others
    double = 0
    for idx in realized:
        pts = [r for r in rep.records if r.label.index == idx][: int(st["membership_points"])]
        for r in pts:
            verdicts = {}
            for j in realized:
                m = prestratum_membership(spec, cands[j], r.point, candidates=cands, beta_index=j, rng_seed=seed)
                verdicts[j] = m.verdict
                member_rows.append([r.kind, r.index, idx, j, m.verdict.value, m.residual])
            if sum(v is Membership.MEMBER for v in verdicts.values()) > 1:
                double += 1
    out.table("stratify_membership.tsv", ["kind", "index", "flow_label", "beta", "verdict", "residual"], member_rows)
    own = [row for row in member_rows if row[2] == row[3]]
    summary["membership"] = {
        "tested": len(member_rows),
        "own_label_members": sum(row[4] == "member" for row in own),
        "own_label_tests": len(own),
        "double_members": double,
    }
    # Hessian sign pattern and K-orbit uniqueness at flow terminals
    opts = ctx.cfg.flow_options()
    for idx in realized:
        recs = [r for r in rep.records if r.label.index == idx][: int(st["hessian_points"])]
        base = None
        for r in recs:
            tr = flow_to_limit(spec, r.point, opts)
            h = check_hessian_at_limits(spec, tr)
            base = base or tr.terminal
            kd, _ = k_orbit_distance(spec, base, tr.terminal)
            hess_rows.append([r.kind, r.index, idx, h.codimension, h.negative_count, h.passed, kd])
    out.table("stratify_hessian.tsv", ["kind", "index", "beta", "codimension", "negative", "passed", "k_orbit_distance"], hess_rows)
    summary["hessian"] = {"checked": len(hess_rows), "passed": sum(bool(r[5]) for r in hess_rows)}
    if realized:
        top = max(realized, key=lambda i: cands[i].norm)
        terms = [flow_to_limit(spec, r.point, opts).terminal for r in rep.records if r.label.index == top][: int(st["hessian_points"])]
        mx = verify_maximal_stratum(spec, cands[top], terms, group_draws=int(st["group_draws"]), rng_seed=seed)
        summary["maximal"] = {"beta": top, "samples": mx.samples_checked, "max_norm_deviation": mx.max_norm_deviation, "ok": mx.ok}
    return summary


def exp_morse(ctx: Context, out: Output) -> dict:
    m = ctx.cfg["morse"]
    n = int(m["truncation"])
    if m["data"] == "custom":
        f = m["field"]
        terms = [(int(c), PoincareSeries.polynomial(s, n, f"term{i}", f)) for i, (c, s) in enumerate(m["terms"])]
        total = PoincareSeries.polynomial(m["total"], n, "total", f)
    else:
        terms, total = MORSE_DATA[m["data"]](n)
    chk = check_inequalities(terms, total)
    out.table(
        "morse.tsv",
        ["degree", "D", "R"],
        [[k, chk.difference.coeffs[k], chk.quotient.coeffs[k] if k < len(chk.quotient.coeffs) else None] for k in range(len(chk.difference.coeffs))],
    )
    if chk.verdict.value != "PASS":
        raise RuntimeError(f"Morse inequalities fail at degree {chk.offending_degree}")
    return {"verdict": chk.verdict.value, "R": str(chk.quotient), "D": str(chk.difference), "field": chk.field}


RUNNERS: dict[str, Callable[[Context, Output], dict]] = {
    "validate": exp_validate,
    "candidates": exp_candidates,
    "survey": exp_survey,
    "stratify": exp_stratify,
    "morse": exp_morse,
}


def _order(experiments: list[str]) -> list[str]:
    return [e for e in EXPERIMENTS if e in experiments]


def run(cfg: RunConfig, out_dir: str | Path, timings: bool = False) -> tuple[dict, int]:
    """Execute the configured experiments and write the manifest.

    Returns (manifest, exit code).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = cfg.group()
    ctx = Context(cfg, spec, out)
    entries: dict[str, dict] = {}
    failed: set[str] = set()
    for name in _order(cfg.experiments):
        blocked = [d for d in DEPENDENCIES[name] if d in failed]
        if blocked:
            entries[name] = {"status": "skipped", "reason": f"dependency failed: {', '.join(blocked)}", "artifacts": []}
            failed.add(name)
            continue
        writer = Output(ctx)
        t0 = time.perf_counter()
        try:
            summary = RUNNERS[name](ctx, writer)
            entry = {"status": "ok", "summary": summary}
        except Exception as exc:  # recorded in the manifest; dependents are skipped
            failed.add(name)
            entry = {"status": "failed", "error": f"{type(exc).__name__}: {exc}"}
        entry["artifacts"] = list(writer.files)
        if timings:
            entry["wall_time"] = time.perf_counter() - t0
        entries[name] = entry
    manifest = {
        "config": cfg.values,
        "config_hash": cfg.digest(),
        "group": spec.name,
        "versions": {
            "realstrata": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "experiments": entries,
    }
    dump_json(out / "manifest.json", manifest)
    return manifest, (EXIT_FAILURE if failed else EXIT_OK)


# ----------------------------------------------------------------------------
# report


def report(manifest_path: str | Path, stream=None) -> tuple[list[str], list[str]]:
    """Print per-experiment summaries and write plot data under ``report/``.

    Returns (written files, missing artifacts).
    """
    stream = stream or sys.stdout
    mpath = Path(manifest_path)
    if mpath.is_dir():
        mpath = mpath / "manifest.json"
    manifest = json.loads(mpath.read_text())
    root = mpath.parent
    rdir = root / "report"
    rdir.mkdir(exist_ok=True)
    written, missing = [], []
    print(f"run of {manifest['group']} (config {manifest['config_hash'][:12]})", file=stream)
    for name, entry in manifest["experiments"].items():
        status = entry["status"]
        print(f"[{name}] {status}", file=stream)
        if status != "ok":
            print(f"  {entry.get('error') or entry.get('reason')}", file=stream)
        for art in entry.get("artifacts", []):
            if not (root / art).exists():
                missing.append(art)
        for k, v in sorted((entry.get("summary") or {}).items()):
            print(f"  {k}: {json.dumps(v, sort_keys=True)}", file=stream)
    if (root / "candidates.tsv").exists():
        _, rows = read_table(root / "candidates.tsv")
        write_table(rdir / "candidate_norms.tsv", ["index", "norm"], [[int(r[0]), float(r[1])] for r in rows])
        written.append("report/candidate_norms.tsv")
    if (root / "survey_counts.tsv").exists():
        _, rows = read_table(root / "survey_counts.tsv")
        write_table(rdir / "basin_counts.tsv", ["kind", "label", "count", "percent"], [[r[0], r[1], int(r[3]), float(r[4])] for r in rows])
        written.append("report/basin_counts.tsv")
    traces = sorted(p.name for p in root.glob("trace_*.tsv"))
    for name in traces:
        _, rows = read_table(root / name)
        etas = [float(r[1]) for r in rows]
        monotone = all(b <= a + 1e-9 for a, b in zip(etas, etas[1:]))
        write_table(rdir / name, ["t", "eta", "monotone"], [[float(r[0]), float(r[1]), monotone] for r in rows])
        written.append(f"report/{name}")
        print(f"  {name}: {len(rows)} samples, eta {etas[0]:.6g} -> {etas[-1]:.6g}, monotone={monotone}", file=stream)
    if missing:
        print("missing artifacts: " + ", ".join(missing), file=stream)
    return written, missing


# ----------------------------------------------------------------------------
# command line


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run config (.cfg path or shipped name)")
    common.add_argument("--out", default="realstrata-run", help="output directory")
    common.add_argument("--rng-seed", type=int, dest="rng_seed")
    common.add_argument("--budget", type=int, help="flow step budget")
    common.add_argument("--tol", type=float, help="relative criticality tolerance")
    common.add_argument("--group", help="preset name, or file:<spec.json>")
    common.add_argument("--timings", action="store_true", help="record wall times in the manifest")
    p = argparse.ArgumentParser(prog="realstrata", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"realstrata {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)
    for verb in EXPERIMENTS + ("run",):
        sub.add_parser(verb, parents=[common], help=f"run the {verb} experiment" if verb != "run" else "run the configured experiments")
    rp = sub.add_parser("report", help="summarize a run")
    rp.add_argument("manifest", nargs="?", help="manifest.json or run directory")
    rp.add_argument("--out", default="realstrata-run")
    sub.add_parser("configs", help="list shipped configs")
    return p


def _with_dependencies(verb: str) -> list[str]:
    need = {verb}
    stack = [verb]
    while stack:
        for d in DEPENDENCIES[stack.pop()]:
            if d not in need:
                need.add(d)
                stack.append(d)
    return _order(list(need))


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.verb == "configs":
        print("\n".join(shipped_configs()))
        return EXIT_OK
    if args.verb == "report":
        path = Path(args.manifest or args.out)
        if not (path / "manifest.json").exists() and not path.is_file():
            print(f"error: no manifest at {path}", file=sys.stderr)
            return EXIT_CONFIG
        _, missing = report(path)
        return EXIT_FAILURE if missing else EXIT_OK
    overrides = {
        "run": {"rng_seed": args.rng_seed, "group": args.group},
        "flow": {"max_steps": args.budget, "crit_rel": args.tol},
    }
    if args.verb != "run":
        overrides["run"]["experiments"] = _with_dependencies(args.verb)
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    manifest, code = run(cfg, args.out, timings=args.timings)
    for name, entry in manifest["experiments"].items():
        print(f"{name}: {entry['status']}" + (f" ({entry.get('error') or entry.get('reason')})" if entry["status"] != "ok" else ""))
    print(f"manifest: {Path(args.out) / 'manifest.json'}")
    return code


if __name__ == "__main__":
    sys.exit(main())
