"""Batch experiment driver.

Config files are flat `key = value` lines with `#` comments; list-valued
settings repeat the key. Runs write report.csv and report.json (and
report.svg with --plot) into the output directory. Exit codes: 0 for a
passing/completed run, 1 for a failing verdict, 2 for configuration or
execution errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import approx, experiments, geometry, nfunctions
from .fields import Grid, ScalarField, field_from_literal, sample
from .geometry import Domain
from .nfunctions import (
    DoublePhase,
    GrowthData,
    VarExpDoublePhase,
    coefficient_from_literal,
    exponent_from_literal,
)


class ConfigError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


_KINDS = ("check", "approx", "converge", "minimize", "gap")

_FLOAT_KEYS = {"p", "q", "alpha", "rel_tol", "tol", "d_budget", "step_tol", "cp", "cq", "case_p", "xi0"}
_INT_KEYS = {"max_iter", "case"}
_STR_KEYS = {"kind", "domain", "nfunction", "coefficient", "field", "u0", "p_exp", "q_exp"}
_LIST_FLOAT_KEYS = {"epsilon", "gamma"}
_LIST_INT_KEYS = {"resolution"}


@dataclass
class ExperimentConfig:
    kind: str = None
    domain: str = None
    nfunction: str = "double_phase"
    p: float = None
    q: float = None
    alpha: float = None
    xi0: float = 1.0
    coefficient: str = "const 0"
    p_exp: str = None
    q_exp: str = None
    cp: float = None
    cq: float = None
    grid: tuple = None  # (n, h, pad)
    field: str = None
    u0: str = None
    epsilon: list = dc_field(default_factory=list)
    gamma: list = dc_field(default_factory=list)
    resolution: list = dc_field(default_factory=list)
    rel_tol: float = 0.01
    tol: float = 1e-8
    d_budget: float = 2.0
    max_iter: int = 5000
    step_tol: float = 1e-10
    case: int = 1
    case_p: float = 3.0

    def canonical_text(self):
        lines = []
        for key in sorted(vars(self)):
            val = getattr(self, key)
            if val is None:
                continue
            if isinstance(val, list):
                for item in val:
                    lines.append(f"{key} = {_canon_value(item)}")
            elif isinstance(val, tuple):
                lines.append(f"{key} = " + " ".join(_canon_value(v) for v in val))
            else:
                lines.append(f"{key} = {_canon_value(val)}")
        return "\n".join(lines) + "\n"

    def config_hash(self):
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def _canon_value(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_config(text) -> ExperimentConfig:
    """Parse and validate; raises ConfigError carrying every problem found."""
    cfg = ExperimentConfig()
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value'")
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            if key in _STR_KEYS:
                setattr(cfg, key, value)
            elif key in _FLOAT_KEYS:
                setattr(cfg, key, float(value))
            elif key in _INT_KEYS:
                setattr(cfg, key, int(value))
            elif key in _LIST_FLOAT_KEYS:
                getattr(cfg, key).append(float(value))
            elif key in _LIST_INT_KEYS:
                getattr(cfg, key).append(int(value))
            elif key == "grid":
                parts = value.split()
                if len(parts) != 3:
                    raise ValueError("grid needs 'n h pad'")
                cfg.grid = (int(parts[0]), float(parts[1]), float(parts[2]))
            else:
                raise ValueError(f"unknown key '{key}'")
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")

    if cfg.kind not in _KINDS:
        errors.append(f"kind must be one of {_KINDS}, got {cfg.kind!r}")
    if cfg.domain is None:
        errors.append("domain is required")
    else:
        try:
            Domain.from_literal(cfg.domain)
        except geometry.GeometryError as exc:
            errors.append(f"domain: {exc}")
    if cfg.p is not None and cfg.q is not None:
        if cfg.q <= cfg.p:
            errors.append("q must exceed p")
        if not (cfg.p > 1):
            errors.append("p must exceed 1")
    elif cfg.kind is not None:
        errors.append("p and q are required")
    if cfg.alpha is None:
        errors.append("alpha is required")
    elif not (0 < cfg.alpha <= 1):
        errors.append("alpha in (0,1]")
    if cfg.xi0 < 1:
        errors.append("xi0 must be >= 1")
    if cfg.kind in ("approx", "converge") and not cfg.epsilon:
        errors.append(f"kind '{cfg.kind}' needs at least one epsilon")
    if cfg.kind in ("approx", "converge") and cfg.field is None:
        errors.append(f"kind '{cfg.kind}' needs a field literal")
    if cfg.kind in ("minimize", "gap") and cfg.u0 is None:
        errors.append(f"kind '{cfg.kind}' needs a u0 literal")
    if cfg.kind == "gap" and not cfg.resolution:
        errors.append("kind 'gap' needs at least one resolution")
    if cfg.kind == "check" and not cfg.gamma:
        errors.append("kind 'check' needs at least one gamma")
    if cfg.kind in ("approx", "converge", "minimize") and cfg.grid is None:
        errors.append(f"kind '{cfg.kind}' needs a grid spec")
    if errors:
        raise ConfigError(errors)

    # invariants of the growth data must hold before any run starts
    try:
        _growth_from(cfg)
    except nfunctions.NFunctionError as exc:
        raise ConfigError([str(exc)])
    return cfg


def _estimate_sup(fn, domain, per_axis=64):
    lo, hi = domain.bounding_box()
    axes = [np.linspace(lo[a], hi[a], per_axis) for a in range(domain.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1)
    vals = fn(pts)
    inside = domain.contains(pts)
    return float(np.max(vals[inside])) if inside.any() else float(np.max(vals))


def build_spec(cfg: ExperimentConfig, domain: Domain):
    coeff, seminorm, _ = coefficient_from_literal(cfg.coefficient)
    sup_a = _estimate_sup(coeff, domain)
    if cfg.nfunction == "double_phase":
        growth = GrowthData(
            p=cfg.p, q=cfg.q, alpha=cfg.alpha, dim=domain.dim, xi0=cfg.xi0,
            C1=1.0, C2=1.0 + sup_a, C4=2.0**cfg.q,
        )
        return DoublePhase(growth, coeff, seminorm)
    if cfg.nfunction == "varexp":
        p_map, cp_auto, _ = exponent_from_literal(cfg.p_exp or "const " + repr(cfg.p), cfg.p)
        q_map, cq_auto, _ = exponent_from_literal(cfg.q_exp or "const " + repr(cfg.q), cfg.q)
        growth = GrowthData(
            p=cfg.p, q=cfg.q, alpha=cfg.alpha, dim=domain.dim, xi0=cfg.xi0,
            C1=1.0, C2=2.0 + sup_a, C4=2.0**cfg.q,
        )
        return VarExpDoublePhase(
            growth, p_map, q_map,
            cfg.cp if cfg.cp is not None else cp_auto,
            cfg.cq if cfg.cq is not None else cq_auto,
            coeff, seminorm,
        )
    raise ConfigError([f"unknown nfunction family '{cfg.nfunction}'"])


def _growth_from(cfg):
    if cfg.p is None or cfg.q is None or cfg.alpha is None:
        return None
    dim = Domain.from_literal(cfg.domain).dim if cfg.domain else 2
    return GrowthData(p=cfg.p, q=cfg.q, alpha=cfg.alpha, dim=dim, xi0=cfg.xi0)


def _make_grid(cfg, domain):
    n, h, pad = cfg.grid
    lo, hi = domain.bounding_box()
    grid = Grid.cover(lo, hi, h, pad)
    span = max(hi - lo)
    expected = span / h + 1
    if abs(expected - n) > 2:
        raise ConfigError([f"grid: n={n} inconsistent with h={h} over span {span}"])
    return grid


def _empty_constants():
    return {"kappa_eps": None, "C_Omega_R": None, "D": None, "M": None, "N": None, "delta": None}


def run(cfg: ExperimentConfig, out_dir, plot=False):
    """Execute one experiment; returns the process exit code."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    domain = Domain.from_literal(cfg.domain)
    spec = build_spec(cfg, domain)

    if cfg.kind == "converge":
        grid = _make_grid(cfg, domain)
        u = sample(field_from_literal(cfg.field), grid, domain)
        cover = geometry.build_cover(domain)
        rho = max(2.0 * grid.h, cover.R / 8.0)
        pou = geometry.build_partition(cover, grid, rho)
        report = experiments.convergence_run(
            spec, u, domain, cover, pou, cfg.epsilon, rel_tol=cfg.rel_tol
        )
    elif cfg.kind == "approx":
        grid = _make_grid(cfg, domain)
        u = sample(field_from_literal(cfg.field), grid, domain)
        rows = []
        worst = 0.0
        for e in cfg.epsilon:
            t0 = time.perf_counter()
            if cfg.case == 1:
                bound, measured = approx.grad_bound_case1(u, e)
            else:
                bound, measured = approx.grad_bound_case2(u, e, cfg.case_p)
            worst = max(worst, measured / bound if bound > 0 else 0.0)
            rows.append(
                experiments.ReportRow(e, measured, bound - measured, bound, 0.0, time.perf_counter() - t0)
            )
        verdict = "PASS" if worst <= 1.05 else "FAIL"
        report = experiments.ExperimentReport("approx", rows, verdict, {"constants": _empty_constants()})
    elif cfg.kind == "minimize":
        grid = _make_grid(cfg, domain)
        u0 = field_from_literal(cfg.u0)
        t0 = time.perf_counter()
        res = experiments.minimize(
            spec, domain, u0, grid, max_iter=cfg.max_iter, step_tol=cfg.step_tol, boundary_id=cfg.u0
        )
        dt = time.perf_counter() - t0
        stride = max(1, len(res.objective_trace) // 64)
        rows = [
            experiments.ReportRow(float(i), v, res.final_step_norm, 0.0, 0.0, dt)
            for i, v in enumerate(res.objective_trace)
            if i % stride == 0 or i == len(res.objective_trace) - 1
        ]
        report = experiments.ExperimentReport(
            "minimize", rows, "COMPLETED", {"constants": _empty_constants(), "objective": res.objective}
        )
    elif cfg.kind == "gap":
        report = experiments.gap_probe(
            spec, domain, field_from_literal(cfg.u0), cfg.resolution,
            rel_slack=cfg.rel_tol, max_iter=cfg.max_iter, step_tol=cfg.step_tol,
        )
    else:  # check
        lo, hi = domain.bounding_box()
        axes = [np.linspace(lo[a], hi[a], 5) for a in range(domain.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack(mesh, axis=-1).reshape(-1, domain.dim)
        pts = pts[domain.contains(pts)]
        xi = np.concatenate([np.linspace(0.1, spec.growth.xi0, 8, endpoint=False),
                             np.geomspace(spec.growth.xi0, 50.0, 24)])
        reports = {
            "delta2": nfunctions.check_delta2(spec, pts, xi),
            "pq_growth": nfunctions.check_pq_growth(spec, pts, np.concatenate([[0.0], xi])),
        }
        if isinstance(spec, DoublePhase):
            pairs = np.stack([pts[:-1], pts[1:]], axis=1)
            reports["holder_in_x"] = nfunctions.check_holder_in_x(spec, pairs, xi[xi >= spec.growth.xi0])
            reports["continuity"] = nfunctions.check_continuity_assumption(
                spec, domain, cfg.d_budget, cfg.gamma
            )
        else:
            reports["varexp_quotient"] = nfunctions.check_varexp_quotient(
                spec, domain, cfg.d_budget, cfg.gamma
            )
        rows = []
        for i, (name, rep) in enumerate(sorted(reports.items())):
            rows.append(experiments.ReportRow(float(i), 1.0 if rep.passed else 0.0, 0.0, 0.0, 0.0, 0.0))
        verdict = "PASS" if all(r.passed for r in reports.values()) else "FAIL"
        constants = _empty_constants()
        constants["D"] = cfg.d_budget
        cont = reports.get("continuity")
        if cont is not None:
            constants["M"] = cont.constants.get("declared_M")
            constants["N"] = cont.constants.get("declared_N")
            if isinstance(spec, DoublePhase):
                delta, _, _ = nfunctions.lemma_constants(
                    spec.growth.C1, spec.holder_seminorm, spec.growth.C2,
                    spec.growth.xi0, spec.growth.p, spec.growth.q, cfg.d_budget,
                )
                constants["delta"] = delta
        report = experiments.ExperimentReport(
            "check", rows, verdict,
            {"constants": constants,
             "details": {k: {"passed": v.passed, "constants": v.constants} for k, v in reports.items()}},
        )

    constants = report.provenance.get("constants", _empty_constants())
    for key in ("kappa_eps", "C_Omega_R", "D", "M", "N", "delta"):
        constants.setdefault(key, None)
    report.provenance["constants"] = constants

    (out / "report.csv").write_text(report.csv_text())
    payload = report.json_payload(cfg.config_hash())
    if "details" in report.provenance:
        payload["details"] = report.provenance["details"]
    (out / "report.json").write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    if plot:
        (out / "report.svg").write_text(render_svg(report))
    return 0 if report.verdict in ("PASS", "COMPLETED", "IN-RANGE-CONSISTENT", "OUT-OF-RANGE-REPORTED") else 1


def render_svg(report, width=640, height=440):
    """Hand-rolled log-log plot: sweep parameter on x, error columns on y."""
    margin = 60
    series = []
    for label, getter in (("abs_err", lambda r: r.abs_err), ("modular_dist", lambda r: r.modular_dist)):
        pts = [(r.sweep, getter(r)) for r in report.rows if r.sweep > 0 and getter(r) > 0]
        if len(pts) >= 2:
            series.append((label, pts))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if not series:
        parts.append('<text x="20" y="30">no positive data to plot</text></svg>')
        return "\n".join(parts)
    xs = [math.log10(x) for _, pts in series for x, _ in pts]
    ys = [math.log10(y) for _, pts in series for _, y in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def sx(v):
        return margin + (math.log10(v) - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(v):
        return height - margin - (math.log10(v) - y0) / (y1 - y0) * (height - 2 * margin)

    for dec in range(math.floor(x0), math.ceil(x1) + 1):
        px = margin + (dec - x0) / (x1 - x0) * (width - 2 * margin)
        parts.append(f'<line x1="{px:.1f}" y1="{margin}" x2="{px:.1f}" y2="{height-margin}" stroke="#ddd"/>')
        parts.append(f'<text x="{px:.1f}" y="{height-margin+18}" font-size="11" text-anchor="middle">1e{dec}</text>')
    for dec in range(math.floor(y0), math.ceil(y1) + 1):
        py = height - margin - (dec - y0) / (y1 - y0) * (height - 2 * margin)
        parts.append(f'<line x1="{margin}" y1="{py:.1f}" x2="{width-margin}" y2="{py:.1f}" stroke="#ddd"/>')
        parts.append(f'<text x="{margin-8}" y="{py:.1f}" font-size="11" text-anchor="end">1e{dec}</text>')
    colors = {"abs_err": "#d62728", "modular_dist": "#1f77b4"}
    for i, (label, pts) in enumerate(series):
        path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{colors[label]}" stroke-width="1.5"/>')
        parts.append(f'<text x="{margin+4}" y="{margin+16*(i+1)}" font-size="12" fill="{colors[label]}">{label}</text>')
    parts.append(
        f'<rect x="{margin}" y="{margin}" width="{width-2*margin}" height="{height-2*margin}" '
        f'fill="none" stroke="black"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="dplab", description="Run a configured experiment.")
    parser.add_argument("--config", required=True, help="path to the experiment config")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--plot", action="store_true", help="also write an SVG convergence plot")
    parser.add_argument("--threads", type=int, default=0, help="worker bound (0 = auto); results are thread-count independent")
    args = parser.parse_args(argv)
    if args.threads < 0:
        print("--threads must be >= 0", file=sys.stderr)
        return 2
    try:
        cfg = parse_config(Path(args.config).read_text())
    except (ConfigError, OSError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    try:
        return run(cfg, args.out, plot=args.plot)
    except Exception as exc:  # execution failure, distinct from a FAIL verdict
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
