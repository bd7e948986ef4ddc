"""Modulars, Luxemburg norms, and the Sobolev-style norm built from them.

The modular is the same node-sum quadrature used everywhere in the package;
the Luxemburg norm inverts it by bisection in the scaling parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fields import ScalarField, VectorField, gradient, lp_norm, sup_norm


class ModularError(RuntimeError):
    pass


@dataclass
class ModularResult:
    value: float
    h: float
    measure: float


def _field_parts(f, mask=None):
    if isinstance(f, VectorField):
        f = f.magnitude()
    m = f.mask if mask is None else mask
    return f.grid, np.abs(f.values), m


def modular(spec, f, mask=None) -> ModularResult:
    """Node-sum of psi(x, |f(x)|) over the masked region."""
    grid, vals, m = _field_parts(f, mask)
    hd = grid.h**grid.dim
    pts = grid.nodes()[m]
    if pts.size == 0:
        return ModularResult(0.0, grid.h, 0.0)
    total = float(np.sum(spec.evaluate(pts, vals[m])) * hd)
    return ModularResult(total, grid.h, float(m.sum()) * hd)


def _envelope_inverse(spec, target):
    """Largest xi with lower_envelope(xi) <= target, by doubling + bisection."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        if spec.lower_envelope(hi) > target:
            break
        lo, hi = hi, 2.0 * hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if spec.lower_envelope(mid) <= target:
            lo = mid
        else:
            hi = mid
    return max(lo, 1e-300)


def luxemburg_norm(spec, f, tol=1e-8, mask=None) -> float:
    """inf of lambda > 0 with modular(f / lambda) <= 1, by bisection on the
    monotone map lambda -> modular(f / lambda)."""
    grid, vals, m = _field_parts(f, mask)
    fsup = float(np.max(vals[m])) if m.any() else 0.0
    if fsup == 0.0:
        return 0.0
    hd = grid.h**grid.dim
    measure = float(m.sum()) * hd

    pts = grid.nodes()[m]
    av = vals[m]

    def rho(lam):
        return float(np.sum(spec.evaluate(pts, av / lam)) * hd)

    # bracket: a single node already forces the modular above 1 at lam_lo
    xi_hi = _envelope_inverse(spec, 1.0 / hd)
    lam_lo = fsup / xi_hi if xi_hi > 0 else fsup * 1e-12
    lam_hi = fsup * max(1.0, measure)
    it = 0
    while rho(lam_lo) < 1.0 and it < 200:
        lam_lo /= 2.0
        it += 1
    it = 0
    while rho(lam_hi) > 1.0 and it < 200:
        lam_hi *= 2.0
        it += 1
    if rho(lam_lo) < 1.0 or rho(lam_hi) > 1.0:
        raise ModularError(f"bracketing failed: [{lam_lo}, {lam_hi}]")
    it = 0
    while (lam_hi - lam_lo) > tol * lam_lo:
        mid = 0.5 * (lam_lo + lam_hi)
        if rho(mid) > 1.0:
            lam_lo = mid
        else:
            lam_hi = mid
        it += 1
        if it > 400:
            raise ModularError(f"bisection stalled at bracket [{lam_lo}, {lam_hi}]")
    return 0.5 * (lam_lo + lam_hi)


def sobolev_norm(spec, u: ScalarField, tol=1e-8) -> float:
    """L1 norm of u plus the Luxemburg norm of |grad u|."""
    g = gradient(u)
    return lp_norm(u, 1) + luxemburg_norm(spec, g.magnitude(), tol=tol, mask=u.mask)


def scaling_inequalities_check(spec, f, c, dd, mask=None):
    """Scaling comparisons between modulars at levels dd and c: the Jensen
    route for dd < c and the doubling route (k steps) for dd > c."""
    if c <= 0 or dd <= 0:
        raise ValueError("scaling levels must be positive")
    grid, vals, m = _field_parts(f, mask)
    base = ScalarField(grid, vals, m)
    rho_c = modular(spec, base.copy_with(values=c * vals), m).value
    rho_d = modular(spec, base.copy_with(values=dd * vals), m).value
    out = {"rho_c": rho_c, "rho_d": rho_d, "c": c, "dd": dd}
    if dd <= c:
        bound = (dd / c) * rho_c
        out.update(kind="jensen", bound=bound, passed=bool(rho_d <= bound * (1 + 1e-12) + 1e-300))
    else:
        k = int(math.ceil(math.log2(dd / c)))
        bound = spec.growth.C4**k * (dd / (2.0**k * c)) * rho_c
        out.update(kind="doubling", k=k, bound=bound, passed=bool(rho_d <= bound * (1 + 1e-12)))
    return out


def norm_modular_equivalence_probe(spec, f_sequence, limit, tol=1e-3, mask=None):
    """Tabulate Luxemburg and modular distances of a sequence to its limit;
    consistent when both columns decrease (at most one inversion) and end
    below the tolerance."""
    rows = []
    for fn in f_sequence:
        diff = fn.copy_with(values=fn.values - limit.values)
        lux = luxemburg_norm(spec, diff, mask=mask) if np.any(diff.values) else 0.0
        rho = modular(spec, diff, mask=mask).value
        rows.append({"lux": lux, "modular": rho})
    lux_col = [r["lux"] for r in rows]
    mod_col = [r["modular"] for r in rows]

    def inversions(col):
        return sum(1 for a, b in zip(col, col[1:]) if b > a * (1 + 1e-12) + 1e-300)

    ok = (
        inversions(lux_col) <= 1
        and inversions(mod_col) <= 1
        and (not rows or (lux_col[-1] <= tol and mod_col[-1] <= tol))
    )
    return {"rows": rows, "verdict": "consistent" if ok else "inconsistent", "tol": tol}
