"""Grid-sampled scalar/vector fields with zero extension, finite-difference
gradients, truncation, norms, and mollification kernels.

All quadrature in the package is the plain node sum with weight h^d, so a
constant-preserving kernel (discrete mass exactly 1) keeps convolution free
of quadrature bias.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    """Uniform tensor grid: node (i_1,...,i_d) sits at lo + h*(i_1,...,i_d)."""

    lo: tuple
    h: float
    shape: tuple

    def __post_init__(self):
        if self.h <= 0:
            raise GridError("grid spacing must be positive")
        if len(self.lo) != len(self.shape) or not self.shape:
            raise GridError("grid lo/shape dimension mismatch")

    @property
    def dim(self):
        return len(self.shape)

    def axes(self):
        return [self.lo[a] + self.h * np.arange(self.shape[a]) for a in range(self.dim)]

    def nodes(self):
        """All node coordinates, shape (*shape, dim)."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1)

    def node_count(self):
        return int(np.prod(self.shape))

    @property
    def hi(self):
        return tuple(self.lo[a] + self.h * (self.shape[a] - 1) for a in range(self.dim))

    @classmethod
    def cover(cls, lo, hi, h, pad=0.0):
        """Smallest grid with spacing h containing [lo-pad, hi+pad]."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        start = lo - pad
        n = np.ceil((hi + pad - start) / h - 1e-12).astype(int) + 1
        return cls(lo=tuple(start), h=float(h), shape=tuple(int(k) for k in n))

    def index_coords(self, pts):
        """Fractional index coordinates of physical points, shape (d, ...)."""
        pts = np.asarray(pts, dtype=float)
        out = [(pts[..., a] - self.lo[a]) / self.h for a in range(self.dim)]
        return np.stack(out, axis=0)


def _masked(values, mask):
    return np.where(mask, values, 0.0)


@dataclass
class ScalarField:
    """Node values that vanish outside the support mask (extension by zero)."""

    grid: Grid
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.values = _masked(np.asarray(self.values, dtype=float), self.mask)

    def copy_with(self, values=None, mask=None):
        return ScalarField(
            self.grid,
            self.values if values is None else values,
            self.mask if mask is None else mask,
        )


@dataclass
class VectorField:
    """One value channel per axis, each extended by zero outside the mask."""

    grid: Grid
    channels: np.ndarray  # shape (dim, *grid.shape)
    mask: np.ndarray

    def __post_init__(self):
        self.channels = np.asarray(self.channels, dtype=float)
        self.channels = np.where(self.mask[None], self.channels, 0.0)

    def magnitude(self):
        return ScalarField(self.grid, np.sqrt(np.sum(self.channels**2, axis=0)), self.mask)


def _bump_profile(r2):
    """Radial bump exp(-1/(1-r^2)) for r^2 < 1, not normalized."""
    out = np.zeros_like(r2, dtype=float)
    inside = r2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r2[inside]))
    return out


def _bump_gradient_magnitude(r):
    """|grad| of the unnormalized bump as a function of radius."""
    out = np.zeros_like(r, dtype=float)
    inside = r < 1.0
    ri = r[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ri**2)) * 2.0 * ri / (1.0 - ri**2) ** 2
    return out


_UNIT_NORM_CACHE = {}

_UNIT_RESOLUTION = {1: 20001, 2: 1501, 3: 181}


def unit_kernel_norms(dim, p=None):
    """Reference norms of the unit bump (normalized to mass 1): the L1 norm of
    its gradient and, when p is given, the L^{p'} norm with p' = p/(p-1)."""
    key = (dim, None if p is None else round(float(p), 12))
    if key in _UNIT_NORM_CACHE:
        return _UNIT_NORM_CACHE[key]
    n = _UNIT_RESOLUTION[dim]
    ax = np.linspace(-1.0, 1.0, n)
    hh = ax[1] - ax[0]
    mesh = np.meshgrid(*([ax] * dim), indexing="ij")
    r2 = sum(m**2 for m in mesh)
    prof = _bump_profile(r2)
    mass = prof.sum() * hh**dim
    c = 1.0 / mass
    grad_l1 = float((_bump_gradient_magnitude(np.sqrt(r2)) * c).sum() * hh**dim)
    lpprime = None
    if p is not None:
        pp = p / (p - 1.0)
        lpprime = float((((prof * c) ** pp).sum() * hh**dim) ** (1.0 / pp))
    _UNIT_NORM_CACHE[key] = (grad_l1, lpprime)
    return grad_l1, lpprime


class Mollifier:
    """Scaled radial bump eta_eps(x) = eps^-d * eta(x/eps) sampled on the grid
    lattice and renormalized so the discrete mass is exactly 1."""

    def __init__(self, epsilon, h, dim):
        if epsilon < 2.0 * h:
            raise GridError(f"kernel under-resolved: epsilon={epsilon} < 2h={2*h}")
        self.epsilon = float(epsilon)
        self.h = float(h)
        self.dim = int(dim)
        k = int(math.floor(epsilon / h + 1e-12))
        ax = np.arange(-k, k + 1) * h
        mesh = np.meshgrid(*([ax] * dim), indexing="ij")
        r2 = sum(m**2 for m in mesh) / epsilon**2
        raw = _bump_profile(r2) * epsilon ** (-dim)
        mass = raw.sum() * h**dim
        self.norm_const = 1.0 / mass
        self.weights = raw * self.norm_const * h**dim  # sums to exactly 1/mass*mass
        self.halfwidth = k

    def eval(self, pts):
        """Kernel value at physical offsets, zero outside the closed eps-ball."""
        pts = np.asarray(pts, dtype=float)
        r2 = np.sum(pts**2, axis=-1) / self.epsilon**2
        return _bump_profile(r2) * self.epsilon ** (-self.dim) * self.norm_const

    def gradient_magnitude(self, pts):
        pts = np.asarray(pts, dtype=float)
        r = np.sqrt(np.sum(pts**2, axis=-1)) / self.epsilon
        scale = self.norm_const * self.epsilon ** (-self.dim - 1)
        return _bump_gradient_magnitude(r) * scale


def mollifier_eval(eta: Mollifier, x):
    return eta.eval(x)


def mollifier_dual_norms(eta: Mollifier, epsilon, p):
    """Grid quadrature of ||grad eta_eps||_1 and ||eta_eps||_{p'}.

    Returns (grad_l1, lpprime, resolved) where resolved flags eps/h >= 20,
    below which the quadrature is reported but not trusted to 2%.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    pp = p / (p - 1.0)
    h = eta.h
    k = eta.halfwidth
    ax = np.arange(-k, k + 1) * h
    mesh = np.meshgrid(*([ax] * eta.dim), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    vals = eta.eval(pts)
    lpprime = float((vals**pp).sum() * h**eta.dim) ** (1.0 / pp)
    grad_l1 = float(eta.gradient_magnitude(pts).sum() * h**eta.dim)
    resolved = epsilon / h >= 20.0
    return grad_l1, lpprime, resolved


def sample(fn, grid: Grid, domain) -> ScalarField:
    """Sample a function on the grid, zero outside the domain mask."""
    mask = domain.grid_mask(grid)
    values = np.asarray(fn(grid.nodes()), dtype=float)
    return ScalarField(grid, values, mask)


def _shifted(values, axis, offset):
    """values shifted by offset along axis, vacated entries filled with 0."""
    out = np.zeros_like(values)
    src = [slice(None)] * values.ndim
    dst = [slice(None)] * values.ndim
    if offset > 0:
        src[axis] = slice(offset, None)
        dst[axis] = slice(None, -offset)
    elif offset < 0:
        src[axis] = slice(None, offset)
        dst[axis] = slice(-offset, None)
    out[tuple(dst)] = values[tuple(src)]
    return out


def _dilate_mask(mask, cells=1):
    out = mask.copy()
    for a in range(mask.ndim):
        for s in (-cells, cells):
            out |= _shifted(mask, a, s).astype(bool)
    return out


def gradient(f: ScalarField) -> VectorField:
    """Central differences on the zero-extended lattice."""
    g = f.grid
    chans = np.stack(
        [(_shifted(f.values, a, -1) - _shifted(f.values, a, 1)) / (2.0 * g.h) for a in range(g.dim)]
    )
    return VectorField(g, chans, _dilate_mask(f.mask))


def truncate(f: ScalarField, k) -> ScalarField:
    if k <= 0:
        raise ValueError("truncation level must be positive")
    return f.copy_with(values=np.clip(f.values, -k, k))


def sup_norm(f) -> float:
    vals = f.magnitude().values if isinstance(f, VectorField) else f.values
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def lp_norm(f, p) -> float:
    if p < 1:
        raise ValueError("p must be >= 1")
    vals = f.magnitude().values if isinstance(f, VectorField) else f.values
    mask = f.mask
    return float((np.abs(vals[mask]) ** p).sum() * f.grid.h**f.grid.dim) ** (1.0 / p)


def convolve(f: ScalarField, eta: Mollifier) -> ScalarField:
    """Direct node-sum convolution with the kernel's quadrature weights."""
    if abs(eta.h - f.grid.h) > 1e-12 * f.grid.h:
        raise GridError("kernel lattice spacing does not match the field grid")
    out = ndimage.convolve(f.values, eta.weights, mode="constant", cval=0.0)
    mask = _dilate_mask(f.mask, cells=eta.halfwidth)
    return ScalarField(f.grid, out, mask)


def interpolate(f_values, grid: Grid, pts):
    """Multilinear interpolation of a node array at physical points,
    zero outside the grid box."""
    coords = grid.index_coords(pts)
    return ndimage.map_coordinates(f_values, coords, order=1, mode="constant", cval=0.0)


# ---------------------------------------------------------------------------
# field literals


def field_from_literal(text):
    """Build a callable ((..., d) -> (...)) from a field fixture literal."""
    text = text.strip()
    if text.startswith("product"):
        body = text[len("product"):].strip()
        parts = [s.strip() for s in body.split(";") if s.strip()]
        if len(parts) < 2:
            raise ValueError("product literal needs at least two factors")
        fns = [field_from_literal(s) for s in parts]

        def prod(x):
            out = fns[0](x)
            for fn in fns[1:]:
                out = out * fn(x)
            return out

        return prod

    tok = text.split()
    if not tok:
        raise ValueError("empty field literal")
    name, args = tok[0], [float(t) for t in tok[1:]]
    if name == "const":
        (c,) = args

        def f(x):
            return np.full(x.shape[:-1], c)

        return f
    if name == "linear":
        b = np.asarray(args)

        def f(x):
            return x @ b

        return f
    if name == "bump":
        *center, r, height = args
        c = np.asarray(center)

        def f(x):
            s2 = np.sum((x - c) ** 2, axis=-1) / r**2
            out = np.zeros(x.shape[:-1])
            inside = s2 < 1.0
            out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
            return out

        return f
    if name == "power_spike":
        *center, beta, clip = args
        c = np.asarray(center)

        def f(x):
            r = np.sqrt(np.sum((x - c) ** 2, axis=-1))
            with np.errstate(divide="ignore"):
                v = np.where(r > 0, r ** (-beta), np.inf)
            return np.minimum(v, clip)

        return f
    raise ValueError(f"unknown field literal '{name}'")
