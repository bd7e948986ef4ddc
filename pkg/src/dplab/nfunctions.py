"""Pointwise growth densities psi(x, xi): evaluable families with growth
metadata, empirical verification of the structural assumptions, infimal
envelopes over balls, and second convex conjugates.

The checkers are sweeps over deterministic lattices; a report always records
the densities used, and a failing report carries a witness sample that
violates the stated inequality on re-evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class NFunctionError(ValueError):
    pass


@dataclass(frozen=True)
class GrowthData:
    """Exponents and structural constants of a density."""

    p: float
    q: float
    alpha: float
    dim: int
    xi0: float = 1.0
    C1: float = 1.0
    C2: float = 1.0
    C4: float = 1.0

    def __post_init__(self):
        problems = []
        if not (1.0 < self.p < self.q):
            problems.append("need 1 < p < q")
        if not (0.0 < self.alpha <= 1.0):
            problems.append("alpha must lie in (0, 1]")
        if self.xi0 < 1.0:
            problems.append("xi0 must be >= 1")
        if min(self.C1, self.C2, self.C4) <= 0:
            problems.append("C1, C2, C4 must be positive")
        if self.dim < 1:
            problems.append("dim must be a positive integer")
        if problems:
            raise NFunctionError("; ".join(problems))


def exponent_range_ok(p, q, alpha, d):
    """Gate q <= p + alpha * max(1, p/d) for the no-gap regime."""
    if not (p > 1 and q >= p and 0 < alpha <= 1 and d >= 1):
        raise NFunctionError("need p > 1, q >= p, alpha in (0,1], d >= 1")
    return q <= p + alpha * max(1.0, p / d)


class NFunctionSpec:
    """Base density: evaluate(x, xi) with declared growth and a strictly
    increasing superlinear lower envelope."""

    def __init__(self, growth: GrowthData):
        self.growth = growth

    def evaluate(self, x, xi):
        raise NotImplementedError

    def lower_envelope(self, xi):
        raise NotImplementedError

    def xi_derivative(self, x, xi):
        """d/dxi of the density; numeric fallback."""
        xi = np.asarray(xi, dtype=float)
        dd = 1e-6 * (1.0 + np.abs(xi))
        return (self.evaluate(x, xi + dd) - self.evaluate(x, np.maximum(xi - dd, 0.0))) / (
            dd + np.minimum(xi, dd)
        )


class DoublePhase(NFunctionSpec):
    """xi^p + a(x) * xi^q with a Hoelder coefficient a >= 0."""

    def __init__(self, growth, coefficient, holder_seminorm):
        super().__init__(growth)
        self.coefficient = coefficient
        self.holder_seminorm = float(holder_seminorm)

    @classmethod
    def make(cls, p, q, alpha, dim, coefficient, holder_seminorm, sup_a, xi0=1.0):
        growth = GrowthData(p=p, q=q, alpha=alpha, dim=dim, xi0=xi0, C1=1.0, C2=1.0 + sup_a, C4=2.0**q)
        return cls(growth, coefficient, holder_seminorm)

    def evaluate(self, x, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        g = self.growth
        return xi**g.p + self.coefficient(np.asarray(x, dtype=float)) * xi**g.q

    def lower_envelope(self, xi):
        return np.abs(np.asarray(xi, dtype=float)) ** self.growth.p

    def xi_derivative(self, x, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        g = self.growth
        return g.p * xi ** (g.p - 1.0) + self.coefficient(np.asarray(x, dtype=float)) * g.q * xi ** (g.q - 1.0)


class VarExpDoublePhase(NFunctionSpec):
    """xi^{p(x)} + a(x) * xi^{q(x)} with log-Hoelder variable exponents."""

    def __init__(self, growth, p_of_x, q_of_x, Cp, Cq, coefficient, holder_seminorm):
        super().__init__(growth)
        self.p_of_x = p_of_x
        self.q_of_x = q_of_x
        self.Cp = float(Cp)
        self.Cq = float(Cq)
        self.coefficient = coefficient
        self.holder_seminorm = float(holder_seminorm)

    def evaluate(self, x, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        x = np.asarray(x, dtype=float)
        return xi ** self.p_of_x(x) + self.coefficient(x) * xi ** self.q_of_x(x)

    def lower_envelope(self, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        g = self.growth
        return np.where(xi < 1.0, xi**g.q, xi**g.p)

    def xi_derivative(self, x, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        x = np.asarray(x, dtype=float)
        px, qx = self.p_of_x(x), self.q_of_x(x)
        return px * xi ** (px - 1.0) + self.coefficient(x) * qx * xi ** (qx - 1.0)


@dataclass
class Sampled1D:
    """Real function of one variable on a strictly increasing grid; samples
    flagged non-finite stand for +infinity."""

    xs: np.ndarray
    values: np.ndarray
    finite: np.ndarray = None

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.finite is None:
            self.finite = np.ones(self.xs.shape, dtype=bool)
        else:
            self.finite = np.asarray(self.finite, dtype=bool)
        if self.xs.ndim != 1 or self.xs.shape != self.values.shape:
            raise NFunctionError("xs and values must be equal-length 1-d arrays")
        if np.any(np.diff(self.xs) <= 0):
            raise NFunctionError("xs must be strictly increasing")
        if not np.all(np.isfinite(self.values[self.finite])):
            raise NFunctionError("values flagged finite must be finite")


@dataclass
class AssumptionReport:
    assumption: str
    passed: bool
    constants: dict
    witness: dict = None
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# structural checkers


def check_delta2(spec: NFunctionSpec, x_samples, xi_samples) -> AssumptionReport:
    """Doubling: sup psi(x, 2 xi)/psi(x, xi) over the samples against C4."""
    x = np.asarray(x_samples, dtype=float)
    xi = np.asarray(xi_samples, dtype=float)
    if x.size == 0 or xi.size == 0 or np.any(xi <= 0):
        raise NFunctionError("need nonempty samples with xi > 0")
    base = spec.evaluate(x[:, None, :], xi[None, :])
    doubled = spec.evaluate(x[:, None, :], 2.0 * xi[None, :])
    ratio = doubled / base
    k = np.unravel_index(np.argmax(ratio), ratio.shape)
    worst = float(ratio[k])
    passed = worst <= spec.growth.C4 * (1 + 1e-12)
    witness = None
    if not passed:
        witness = {"x": x[k[0]].tolist(), "xi": float(xi[k[1]]), "ratio": worst}
    return AssumptionReport(
        "delta2",
        passed,
        {"sup_ratio": worst, "C4": spec.growth.C4},
        witness,
        {"n_x": len(x), "n_xi": len(xi)},
    )


def check_pq_growth(spec: NFunctionSpec, x_samples, xi_samples) -> AssumptionReport:
    """C1 xi^p <= psi for xi >= xi0, and psi <= C2 (1 + xi^q) everywhere."""
    g = spec.growth
    x = np.asarray(x_samples, dtype=float)
    xi = np.asarray(xi_samples, dtype=float)
    if not (np.any(xi < g.xi0) and np.any(xi >= g.xi0)):
        raise NFunctionError("xi samples must straddle xi0")
    vals = spec.evaluate(x[:, None, :], xi[None, :])
    big = xi >= g.xi0
    lower_gap = g.C1 * xi[None, big] ** g.p - vals[:, big]
    upper_gap = vals - g.C2 * (1.0 + xi[None, :] ** g.q)
    passed = bool(np.all(lower_gap <= 1e-12) and np.all(upper_gap <= 1e-12))
    witness = None
    if not passed:
        if np.any(lower_gap > 1e-12):
            k = np.unravel_index(np.argmax(lower_gap), lower_gap.shape)
            witness = {"side": "lower", "x": x[k[0]].tolist(), "xi": float(xi[big][k[1]])}
        else:
            k = np.unravel_index(np.argmax(upper_gap), upper_gap.shape)
            witness = {"side": "upper", "x": x[k[0]].tolist(), "xi": float(xi[k[1]])}
    return AssumptionReport(
        "pq_growth",
        passed,
        {"C1": g.C1, "C2": g.C2, "max_lower_gap": float(lower_gap.max()), "max_upper_gap": float(upper_gap.max())},
        witness,
        {"n_x": len(x), "n_xi": len(xi)},
    )


def check_holder_in_x(spec: DoublePhase, point_pairs, xi_samples) -> AssumptionReport:
    """Smallest empirical C3 with |psi(x1,.) - psi(x2,.)| <= C3 |x1-x2|^a (1+xi^q)."""
    g = spec.growth
    pairs = np.asarray(point_pairs, dtype=float)  # (n, 2, d)
    xi = np.asarray(xi_samples, dtype=float)
    if np.any(xi < g.xi0):
        raise NFunctionError("xi samples must be >= xi0")
    v1 = spec.evaluate(pairs[:, 0, None, :], xi[None, :])
    v2 = spec.evaluate(pairs[:, 1, None, :], xi[None, :])
    sep = np.linalg.norm(pairs[:, 0] - pairs[:, 1], axis=-1)
    denom = sep[:, None] ** g.alpha * (1.0 + xi[None, :] ** g.q)
    with np.errstate(invalid="ignore", divide="ignore"):
        c3 = np.where(sep[:, None] > 0, np.abs(v1 - v2) / denom, 0.0)
    worst = float(c3.max()) if c3.size else 0.0
    passed = worst <= spec.holder_seminorm * (1 + 1e-9) + 1e-15
    witness = None
    if not passed:
        k = np.unravel_index(np.argmax(c3), c3.shape)
        witness = {"pair": pairs[k[0]].tolist(), "xi": float(xi[k[1]]), "empirical_C3": worst}
    return AssumptionReport(
        "holder_in_x",
        passed,
        {"empirical_C3": worst, "declared": spec.holder_seminorm},
        witness,
        {"n_pairs": len(pairs), "n_xi": len(xi)},
    )


def lemma_constants(C1, C3, C2, xi0, p, q, D):
    """Constants (delta, M, N) making the local comparability explicit for a
    Hoelder-in-x density: delta = C1/(C1 + 2 C3 D^(q-p)), M = max(1/delta, 1),
    N = C2 (1 + xi0^q)."""
    if min(C1, C2, xi0) <= 0 or C3 < 0 or q <= p:
        raise NFunctionError("need positive constants and q > p")
    if D <= 1:
        raise NFunctionError("D must exceed 1")
    delta = C1 / (C1 + 2.0 * C3 * D ** (q - p))
    M = max(1.0 / delta, 1.0)
    N = C2 * (1.0 + xi0**q)
    return delta, M, N


def _lattice_in_ball(center, gamma, domain, per_axis):
    center = np.asarray(center, dtype=float)
    ax = np.linspace(-gamma, gamma, per_axis)
    mesh = np.meshgrid(*([ax] * len(center)), indexing="ij")
    pts = center + np.stack(mesh, axis=-1).reshape(-1, len(center))
    keep = np.sum((pts - center) ** 2, axis=-1) <= gamma**2 * (1 + 1e-12)
    pts = pts[keep]
    keep = domain.contains(pts, closed=True)
    return pts[keep]


def _center_lattice(domain, gamma, per_axis=6):
    lo, hi = domain.bounding_box()
    axes = [np.linspace(lo[a] - gamma / 2, hi[a] + gamma / 2, per_axis) for a in range(domain.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack(mesh, axis=-1).reshape(-1, domain.dim)
    keep = domain.distance_to_set(pts) <= 0.999 * gamma
    return pts[keep]


def warped_xi_grid(ximax, n=96, power=2.0):
    """Grid on [0, ximax], quadratically denser near 0."""
    t = np.linspace(0.0, 1.0, n)
    return ximax * t**power


_M_SWEEP = 2.0 ** np.arange(0, 40)
_N_SWEEP = np.concatenate([[0.0], 2.0 ** np.arange(0, 40)])


def _fit_budget(upper, lower):
    """Lexicographically smallest (M, N) on the log sweep with
    upper <= M * lower + N on all samples."""
    for M in _M_SWEEP:
        need = float(np.max(upper - M * lower)) if upper.size else 0.0
        for N in _N_SWEEP:
            if need <= N * (1 + 1e-12) + 1e-12:
                return float(M), float(N)
    return None


def check_continuity_assumption(
    spec, domain, D, gamma_list, sample_density=9, xi_points=64, declared=None
) -> AssumptionReport:
    """Brute-force the local comparability psi(z, xi) <= M psi(y, xi) + N over
    sampled balls, sampled point pairs, and xi up to D * gamma^-min(1, d/p).

    declared defaults to the Hoelder-route constants when the spec carries a
    Hoelder seminorm; otherwise pass/fail reflects whether any finite budget
    on the sweep works.
    """
    g = spec.growth
    if D <= 1:
        raise NFunctionError("D must exceed 1")
    if any(not (0 < gm < 0.5) for gm in gamma_list):
        raise NFunctionError("gammas must lie in (0, 1/2)")
    expo = min(1.0, g.dim / g.p)
    if declared is None and isinstance(spec, DoublePhase):
        _, M_decl, N_decl = lemma_constants(g.C1, spec.holder_seminorm, g.C2, g.xi0, g.p, g.q, D)
    elif declared is not None:
        M_decl, N_decl = declared
    else:
        M_decl = N_decl = None

    uppers, lowers = [], []
    worst = None
    for gamma in gamma_list:
        xi = warped_xi_grid(D * gamma ** (-expo), xi_points)
        for center in _center_lattice(domain, gamma):
            ys = _lattice_in_ball(center, gamma, domain, sample_density)
            if len(ys) == 0:
                continue
            vals = spec.evaluate(ys[:, None, :], xi[None, :])
            hi, lo = vals.max(axis=0), vals.min(axis=0)
            uppers.append(hi)
            lowers.append(lo)
            if M_decl is not None:
                gap = hi - (M_decl * lo + N_decl)
                k = int(np.argmax(gap))
                if worst is None or gap[k] > worst["gap"]:
                    ih, il = int(np.argmax(vals[:, k])), int(np.argmin(vals[:, k]))
                    worst = {
                        "gap": float(gap[k]),
                        "gamma": gamma,
                        "z": ys[ih].tolist(),
                        "y": ys[il].tolist(),
                        "xi": float(xi[k]),
                    }
    upper = np.concatenate(uppers)
    lower = np.concatenate(lowers)
    fitted = _fit_budget(upper, lower)
    if M_decl is not None:
        passed = worst is None or worst["gap"] <= 1e-9 * (1.0 + abs(worst["gap"]))
        witness = None if passed else worst
    else:
        passed = fitted is not None
        witness = None if passed else {"note": "no finite constants at declared budget"}
    constants = {"fitted_M": None, "fitted_N": None, "declared_M": M_decl, "declared_N": N_decl, "D": D}
    if fitted is not None:
        constants["fitted_M"], constants["fitted_N"] = fitted
    return AssumptionReport(
        "continuity",
        bool(passed),
        constants,
        witness,
        {"gammas": list(gamma_list), "sample_density": sample_density, "xi_points": xi_points},
    )


def varexp_quotient_bound(spec: VarExpDoublePhase, D, gamma_list):
    """Dominating constant M = E (E^2 + D^(a max(1, p/d)) |a|_a + 1), with E
    bounding D^(-C/log gamma) e^(C min(1, d/p)) over the gamma range for both
    log-Hoelder constants; the sup over gamma in (0, 1/2) sits at gamma = 1/2."""
    g = spec.growth
    mn = min(1.0, g.dim / g.p)
    E = 1.0
    for C in (spec.Cp, spec.Cq):
        E = max(E, D ** (C / math.log(2.0)) * math.exp(C * mn))
    M = E * (E**2 + D ** (g.alpha * max(1.0, g.p / g.dim)) * spec.holder_seminorm + 1.0)
    return E, M


def check_varexp_quotient(
    spec: VarExpDoublePhase, domain, D, gamma_list, sample_density=9, xi_points=48
) -> AssumptionReport:
    """Sampled quotient psi(x, xi)/psi(y, xi) against the dominating budget."""
    g = spec.growth
    if not exponent_range_ok(g.p, g.q, g.alpha, g.dim):
        raise NFunctionError("exponent range gate fails; the quotient bound does not apply")
    if any(not (0 < gm < 0.5) for gm in gamma_list):
        raise NFunctionError("gammas must lie in (0, 1/2)")
    expo = min(1.0, g.dim / g.p)
    E, M = varexp_quotient_bound(spec, D, gamma_list)
    worst = {"quotient": 0.0}
    for gamma in gamma_list:
        ximax = D * gamma ** (-expo)
        xi = np.geomspace(1.0, ximax, xi_points)
        for center in _center_lattice(domain, gamma):
            ys = _lattice_in_ball(center, gamma, domain, sample_density)
            if len(ys) < 2:
                continue
            vals = spec.evaluate(ys[:, None, :], xi[None, :])
            quot = vals.max(axis=0) / vals.min(axis=0)
            k = int(np.argmax(quot))
            if quot[k] > worst["quotient"]:
                worst = {"quotient": float(quot[k]), "gamma": gamma, "xi": float(xi[k]), "center": center.tolist()}
    passed = worst["quotient"] <= M * (1 + 1e-12)
    return AssumptionReport(
        "varexp_quotient",
        bool(passed),
        {"E": E, "M": M, "max_quotient": worst["quotient"], "D": D},
        None if passed else worst,
        {"gammas": list(gamma_list), "sample_density": sample_density},
    )


# ---------------------------------------------------------------------------
# infimal envelope and convex conjugation


def infimal_envelope(spec, x, gamma, domain, xi_grid, y_sample_density=32) -> Sampled1D:
    """Pointwise min of psi(y, .) over the sampled closed ball intersected
    with the closed domain."""
    ys = _lattice_in_ball(np.asarray(x, dtype=float), gamma, domain, y_sample_density)
    if len(ys) == 0:
        raise NFunctionError("ball does not intersect the domain closure")
    xi = np.asarray(xi_grid, dtype=float)
    vals = spec.evaluate(ys[:, None, :], xi[None, :])
    return Sampled1D(xi, vals.min(axis=0))


def legendre(f: Sampled1D, eta_grid) -> Sampled1D:
    """Grid-restricted conjugate: sup over samples of xi*eta - f(xi)."""
    eta = np.asarray(eta_grid, dtype=float)
    xs, vs = f.xs[f.finite], f.values[f.finite]
    if xs.size == 0:
        raise NFunctionError("conjugate of a nowhere-finite function")
    out = np.max(eta[:, None] * xs[None, :] - vs[None, :], axis=1)
    return Sampled1D(eta, out)


def _lower_hull_indices(xs, vs):
    """Monotone-chain lower hull with a small collinearity tolerance, so that
    points sitting on a chord (up to rounding) are dropped."""
    span = (xs[-1] - xs[0]) * max(1.0, float(np.ptp(vs)) if len(vs) else 1.0)
    atol = 1e-12 * max(1.0, span)
    hull = []
    for j in range(len(xs)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            cross = (xs[i1] - xs[i0]) * (vs[j] - vs[i0]) - (xs[j] - xs[i0]) * (vs[i1] - vs[i0])
            if cross <= atol:  # middle point on or above the chord
                hull.pop()
            else:
                break
        hull.append(j)
    return np.asarray(hull, dtype=int)


def biconjugate(f: Sampled1D) -> Sampled1D:
    """Greatest convex minorant of the samples, on the same grid.

    Computed as the lower convex hull (exact for sampled data); applying it
    twice reproduces the output bit for bit.
    """
    if not np.all(f.finite):
        ff = Sampled1D(f.xs[f.finite], f.values[f.finite])
        hullv = biconjugate(ff)
        out = np.interp(f.xs, hullv.xs, hullv.values)
        return Sampled1D(f.xs, np.where(f.finite, np.minimum(out, f.values), out))
    hull = _lower_hull_indices(f.xs, f.values)
    out = np.interp(f.xs, f.xs[hull], f.values[hull])
    out = np.minimum(out, f.values)
    return Sampled1D(f.xs, out)


def biconjugate_via_legendre(f: Sampled1D, eta_grid=None) -> Sampled1D:
    """Cross-check path: two grid-restricted conjugations."""
    if eta_grid is None:
        xs, vs = f.xs[f.finite], f.values[f.finite]
        slopes = np.diff(vs) / np.diff(xs)
        lo, hi = float(slopes.min()), float(slopes.max())
        pad = 0.05 * (hi - lo + 1.0)
        eta_grid = np.linspace(lo - pad, hi + pad, 4 * len(xs))
    star = legendre(f, eta_grid)
    return legendre(star, f.xs)


def sandwich_check(spec, x, gamma, D, M, N, domain, sample_density=24, xi_points=257) -> AssumptionReport:
    """Two-sided control of the biconjugate envelope on a ball: it never
    exceeds psi(y, .) on samples, and psi(y, .) <= M * envelope + N up to the
    admissible magnitude D * gamma^-min(1, d/p)."""
    g = spec.growth
    expo = min(1.0, g.dim / g.p)
    ximax = D * gamma ** (-expo)
    xi = warped_xi_grid(ximax, xi_points)
    ys = _lattice_in_ball(np.asarray(x, dtype=float), gamma, domain, sample_density)
    if len(ys) == 0:
        raise NFunctionError("ball does not intersect the domain closure")
    vals = spec.evaluate(ys[:, None, :], xi[None, :])
    env = vals.min(axis=0)
    conj2 = biconjugate(Sampled1D(xi, env)).values
    lower_ok = bool(np.all(conj2 >= 0.0) and np.all(conj2[None, :] <= vals + 1e-12 * (1.0 + vals)))
    gap = vals - (M * conj2[None, :] + N)
    upper_ok = bool(np.all(gap <= 1e-9 * (1.0 + np.abs(vals))))
    fitted = _fit_budget(vals.max(axis=0), conj2)
    witness = None
    if not (lower_ok and upper_ok):
        k = np.unravel_index(np.argmax(gap), gap.shape)
        witness = {"y": ys[k[0]].tolist(), "xi": float(xi[k[1]]), "gap": float(gap[k])}
    constants = {"M": M, "N": N, "fitted_M": None, "fitted_N": None, "D": D, "ximax": ximax}
    if fitted is not None:
        constants["fitted_M"], constants["fitted_N"] = fitted
    return AssumptionReport(
        "sandwich",
        lower_ok and upper_ok,
        constants,
        witness,
        {"gamma": gamma, "sample_density": sample_density, "xi_points": xi_points, "n_y": len(ys)},
    )


# ---------------------------------------------------------------------------
# coefficient literals


def coefficient_from_literal(text):
    """Build (callable, holder_seminorm, natural_alpha) from a coefficient
    literal; the seminorm is an upper bound valid on any domain."""
    tok = text.split()
    if not tok:
        raise NFunctionError("empty coefficient literal")
    name, args = tok[0], [float(t) for t in tok[1:]]
    if name == "const":
        (c,) = args
        if c < 0:
            raise NFunctionError("coefficient must be nonnegative")
        return (lambda x: np.full(np.asarray(x).shape[:-1], c)), 0.0, 1.0
    if name == "abs_pow":
        axis, alpha, scale = int(args[0]), args[1], args[2]

        def f(x):
            return scale * np.abs(np.asarray(x)[..., axis]) ** alpha

        return f, scale, alpha
    if name == "dist_pow":
        *pt, alpha, scale = args
        c = np.asarray(pt)

        def f(x):
            return scale * np.sqrt(np.sum((np.asarray(x) - c) ** 2, axis=-1)) ** alpha

        return f, scale, alpha
    if name == "checkerboard":
        (scale,) = args

        def f(x):
            x = np.asarray(x)
            u, v = x[..., 0], x[..., 1]
            d1 = np.abs(u - v) / math.sqrt(2.0)
            d2 = np.abs(u + v - 1.0) / math.sqrt(2.0)
            return scale * np.minimum(d1, d2)

        return f, scale, 1.0
    raise NFunctionError(f"unknown coefficient literal '{name}'")


def exponent_from_literal(text, base):
    """Variable exponent map from a literal; returns (callable, log_holder_C,
    sup_value). `const c` ignores the base."""
    tok = text.split()
    name, args = tok[0], [float(t) for t in tok[1:]]
    if name == "const":
        (c,) = args
        return (lambda x: np.full(np.asarray(x).shape[:-1], c)), 0.0, c
    if name == "sin_perturb":
        axis, amplitude, frequency = int(args[0]), args[1], args[2]

        def f(x):
            return base + amplitude * (0.5 + 0.5 * np.sin(frequency * np.asarray(x)[..., axis]))

        # |f(x)-f(y)| <= 0.5 a w |x-y| and t |log t| <= 1/e on (0, 1/2]
        C = 0.5 * amplitude * frequency / math.e + 1e-12
        return f, C, base + amplitude
    raise NFunctionError(f"unknown exponent literal '{name}'")
