"""Quadrature of topological integrals of matrix-valued fields.

Three detectors:
  winding_1d  - (1/2πi) ∫ Tr(f' f^{-1}) dz over a half-line, with the sign
                convention that makes the reference phases on both half-lines
                wind +1 (minus sign on R_+, plus sign on R_-);
  chern_2d    - (1/2πi) ∫ Tr(P [∂₁P, ∂₂P]) over a 2D grid domain;
  winding_3d  - -(1/24π²) ∫ Tr((g^{-1}dg)^3) over a 3D grid domain,
                orientation given by the coordinate order.

Grids are midpoint rules; sums are chunked and compensated (math.fsum), so
the result is independent of the chunking to round-off.  Integer outputs are
always reported together with the raw value and the pre-rounding residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

__all__ = [
    "Axis",
    "GridDomain",
    "MatrixField",
    "IntegralResult",
    "BoundaryConditionError",
    "NonInvertibleFieldError",
    "ResidualError",
    "projection_residual",
    "min_singular_value",
    "derivative_check",
    "expi_hermitian",
    "winding_1d",
    "chern_2d",
    "winding_3d",
]


def expi_hermitian(mats: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """e^{i * scale * H} for batched Hermitian H, via eigendecomposition."""
    mats = np.asarray(mats, dtype=complex)
    w, v = np.linalg.eigh(mats)
    phases = np.exp(1j * scale * w)
    return (v * phases[..., None, :]) @ v.conj().swapaxes(-1, -2)

RESIDUAL_LIMIT = 0.05
BOUNDARY_TOL_2D = 1e-3
BOUNDARY_TOL_3D = 1e-2


class BoundaryConditionError(ValueError):
    """Field does not satisfy the boundary behaviour the integral needs."""


class NonInvertibleFieldError(ValueError):
    """An invertible-kind field has a nearly singular sample."""


class ResidualError(ValueError):
    """Pre-rounding residual too large; refinement requested."""


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    n: int
    tag: str = "constant"  # "constant" | "periodic" | "decay"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError("axis range must be finite with lo < hi")
        if self.n < 16:
            raise ValueError("axis sample count must be >= 16")
        if self.tag not in ("constant", "periodic", "decay"):
            raise ValueError(f"unknown axis tag {self.tag!r}")

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / self.n

    def midpoints(self) -> np.ndarray:
        return self.lo + (np.arange(self.n) + 0.5) * self.step


@dataclass(frozen=True)
class GridDomain:
    axes: tuple[Axis, ...]

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def cell_volume(self) -> float:
        return float(np.prod([ax.step for ax in self.axes]))

    def shape(self) -> tuple[int, ...]:
        return tuple(ax.n for ax in self.axes)

    def refine(self, factor: int) -> "GridDomain":
        return GridDomain(tuple(Axis(a.lo, a.hi, a.n * factor, a.tag) for a in self.axes))

    def coarsen(self) -> "GridDomain":
        return GridDomain(tuple(Axis(a.lo, a.hi, max(16, a.n // 2), a.tag) for a in self.axes))


@dataclass(frozen=True)
class MatrixField:
    """A matrix-valued function sampled pointwise.

    evaluator maps an (N, dim) array of points to (N, size, size) complex
    values; derivative(pts, axis), when present, is the exact partial
    derivative along one coordinate.  `nonsmooth` marks points to skip in
    finite-difference cross-checks (e.g. chart seams of a frozen extension).
    """

    evaluator: Callable
    kind: str  # "projection" | "invertible" | "selfadjoint_lift"
    size: int
    dim: int
    name: str = ""
    derivative: Callable | None = None
    default_domain: GridDomain | None = None
    nonsmooth: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("projection", "invertible", "selfadjoint_lift"):
            raise ValueError(f"unknown field kind {self.kind!r}")

    def __call__(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return self.evaluator(pts)

    def partial(self, pts, axis: int, h_scale: float = 1e-6) -> np.ndarray:
        """Exact derivative when available, central differences otherwise."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.derivative is not None:
            return self.derivative(pts, axis)
        h = h_scale * (1.0 + np.abs(pts[:, axis]))
        up = pts.copy()
        dn = pts.copy()
        up[:, axis] += h
        dn[:, axis] -= h
        return (self.evaluator(up) - self.evaluator(dn)) / (2 * h)[:, None, None]


def projection_residual(field: MatrixField, pts) -> float:
    p = field(pts)
    idem = np.abs(p @ p - p).max()
    herm = np.abs(p - p.conj().transpose(0, 2, 1)).max()
    return float(max(idem, herm))


def min_singular_value(field: MatrixField, pts) -> float:
    vals = field(pts)
    sv = np.linalg.svd(vals, compute_uv=False)
    return float(sv[:, -1].min())


def derivative_check(field: MatrixField, pts, h: float = 1e-6) -> float:
    """Max deviation between exact and finite-difference derivatives."""
    if field.derivative is None:
        return 0.0
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if field.nonsmooth is not None:
        pts = pts[~field.nonsmooth(pts)]
    if len(pts) == 0:
        return 0.0
    worst = 0.0
    for axis in range(field.dim):
        exact = field.derivative(pts, axis)
        up = pts.copy()
        dn = pts.copy()
        up[:, axis] += h
        dn[:, axis] -= h
        fd = (field.evaluator(up) - field.evaluator(dn)) / (2 * h)
        worst = max(worst, float(np.abs(exact - fd).max()))
    return worst


@dataclass
class IntegralResult:
    raw: float
    rounded: int
    residual: float
    boundary_residual: float
    grid: tuple[int, ...]
    name: str = ""
    extra: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "witness": self.name,
            "raw_integral": self.raw,
            "rounded": self.rounded,
            "residual": self.residual,
            "boundary_residual": self.boundary_residual,
            "grid": list(self.grid),
            **self.extra,
        }


def _finish(raw_complex, boundary_residual, grid, name, extra=None,
            residual_limit=RESIDUAL_LIMIT) -> IntegralResult:
    raw = float(raw_complex.real)
    rounded = int(round(raw))
    residual = abs(raw - rounded) + abs(float(raw_complex.imag))
    res = IntegralResult(raw, rounded, residual, boundary_residual, grid, name, extra or {})
    if residual >= residual_limit:
        raise ResidualError(
            f"{name or 'integral'}: pre-rounding residual {residual:.3g} >= {residual_limit}; "
            f"refine the grid (current {grid}) or enlarge the domain")
    return res


# ---------------------------------------------------------------------------
# 1D winding

def _adaptive_simpson(g, a, b, tol, max_depth=40):
    fa, fb = g(a), g(b)
    m = 0.5 * (a + b)
    fm = g(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, fa, b, fb, m, fm, whole, tol, depth):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = g(lm), g(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return (rec(a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + rec(m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1))

    return rec(a, fa, b, fb, m, fm, whole, tol, max_depth)


def winding_1d(f: MatrixField, side: str = "+", tol: float = 1e-8,
               inv_floor: float = 1e-6) -> IntegralResult:
    """Winding number of an invertible field on a half-line.

    Computes -(1/2πi) ∫ Tr(f'(z) f(z)^{-1}) dz along the path running outward
    from 0 to infinity; this realizes the sign convention that is -(1/2πi) of
    the increasing-z integral on R_+ and +(1/2πi) of it on R_-, making the
    reference phase on either side wind +1.  The field must be safely
    invertible with a common limit at 0 and at infinity.  The half-line is
    compactified with z = sgn * w/(1-w) and integrated by adaptive Simpson.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    sgn = 1.0 if side == "+" else -1.0

    zs = sgn * np.geomspace(1e-6, 1e6, 97)
    sv_min = min_singular_value(f, zs[:, None])
    if sv_min <= inv_floor:
        raise NonInvertibleFieldError(
            f"{f.name or 'field'}: min singular value {sv_min:.3g} <= {inv_floor}")
    v0 = f(np.array([[0.0]]))[0]
    vinf = f(np.array([[sgn * 1e9]]))[0]
    limit_gap = float(np.abs(v0 - vinf).max())
    if limit_gap > 1e-6:
        raise BoundaryConditionError(
            f"{f.name or 'field'}: limits at 0 and infinity differ by {limit_gap:.3g}")

    def integrand(w):
        if w >= 1.0:
            return 0.0 + 0.0j
        z = sgn * w / (1.0 - w)
        dz = sgn / (1.0 - w) ** 2  # dz/dw of the outward path
        pt = np.array([[z]])
        df = f.partial(pt, 0)[0]
        val = f(pt)[0]
        tr = np.trace(df @ np.linalg.inv(val))
        return tr * dz

    total = _adaptive_simpson(integrand, 0.0, 1.0 - 1e-12, tol)
    raw = -total / (2.0j * math.pi)
    return _finish(raw, limit_gap, (0,), f.name or f"winding_1d[{side}]",
                   {"side": side})


# ---------------------------------------------------------------------------
# Shared helpers for grid integrals

def _inv2(m):
    if m.shape[-1] == 1:
        return 1.0 / m
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out / det[..., None, None]


def _fsum_complex(chunks) -> complex:
    return complex(math.fsum(c.real for c in chunks), math.fsum(c.imag for c in chunks))


def _face_points(domain: GridDomain, axis: int, where: str, per_axis: int = 17):
    grids = []
    for i, ax in enumerate(domain.axes):
        if i == axis:
            grids.append(np.array([ax.lo if where == "lo" else ax.hi]))
        else:
            grids.append(np.linspace(ax.lo, ax.hi, per_axis))
    mesh = np.meshgrid(*grids, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _edge_constancy(field: MatrixField, domain: GridDomain) -> float:
    """Max in-edge variation over non-periodic edges; periodic axes checked for wraparound."""
    worst = 0.0
    for axis, ax in enumerate(domain.axes):
        if ax.tag == "periodic":
            lo = field(_face_points(domain, axis, "lo"))
            hi = field(_face_points(domain, axis, "hi"))
            worst = max(worst, float(np.abs(lo - hi).max()))
        else:
            for where in ("lo", "hi"):
                vals = field(_face_points(domain, axis, where))
                worst = max(worst, float(np.abs(vals - vals.mean(axis=0)).max()))
    return worst


def _boundary_identity_residual(field: MatrixField, domain: GridDomain) -> float:
    eye = np.eye(field.size)
    worst = 0.0
    for axis in range(domain.dim):
        if domain.axes[axis].tag == "periodic":
            continue
        for where in ("lo", "hi"):
            vals = field(_face_points(domain, axis, where))
            worst = max(worst, float(np.abs(vals - eye).max()))
    return worst


# ---------------------------------------------------------------------------
# 2D Chern number

def chern_2d(p: MatrixField, domain: GridDomain | None = None,
             check_derivatives: bool = True) -> IntegralResult:
    """First Chern number (1/2πi) ∫ Tr(P [∂₁P, ∂₂P]) of a projection field."""
    if domain is None:
        domain = p.default_domain
    if domain is None or domain.dim != 2 or p.dim != 2:
        raise ValueError("chern_2d needs a 2D field with a 2D domain")

    edge_var = _edge_constancy(p, domain)
    if edge_var > BOUNDARY_TOL_2D:
        raise BoundaryConditionError(
            f"{p.name or 'field'}: boundary variation {edge_var:.3g} > {BOUNDARY_TOL_2D} "
            "(field must be constant on each boundary component)")

    xs = domain.axes[0].midpoints()
    ys = domain.axes[1].midpoints()
    proj_res = 0.0
    chunks = []
    for x_block in np.array_split(xs, max(1, len(xs) // 64)):
        mesh = np.stack(np.meshgrid(x_block, ys, indexing="ij"), axis=-1).reshape(-1, 2)
        pv = p(mesh)
        proj_res = max(proj_res, float(np.abs(pv @ pv - pv).max()))
        d1 = p.partial(mesh, 0)
        d2 = p.partial(mesh, 1)
        comm = d1 @ d2 - d2 @ d1
        integrand = np.trace(pv @ comm, axis1=1, axis2=2)
        chunks.append(_fsum_complex(integrand))
    total = _fsum_complex(chunks) * domain.cell_volume / (2.0j * math.pi)

    if proj_res > 1e-10:
        raise ValueError(f"{p.name or 'field'}: projection residual {proj_res:.3g} > 1e-10")
    extra = {"projection_residual": proj_res}
    if check_derivatives and p.derivative is not None:
        rng = np.random.default_rng(0)
        sample = np.stack([rng.uniform(a.lo + a.step, a.hi - a.step, 64)
                           for a in domain.axes], axis=1)
        dev = derivative_check(p, sample)
        if dev > 1e-6:
            raise ValueError(f"{p.name or 'field'}: analytic/FD derivative gap {dev:.3g} > 1e-6")
        extra["derivative_check"] = dev
    return _finish(total, edge_var, domain.shape(), p.name or "chern_2d", extra)


# ---------------------------------------------------------------------------
# 3D odd winding

def winding_3d(g: MatrixField, domain: GridDomain | None = None,
               chunk_slabs: int = 8, richardson: bool = False,
               check_derivatives: bool = True) -> IntegralResult:
    """Odd topological charge -(1/24π²) ∫ Tr((g^{-1}dg)^3) of an invertible field.

    Midpoint rule on the domain grid; the field must be the identity on every
    non-periodic boundary face (within 1e-2).  Orientation is the coordinate
    order of the domain axes.
    """
    if domain is None:
        domain = g.default_domain
    if domain is None or domain.dim != 3 or g.dim != 3:
        raise ValueError("winding_3d needs a 3D field with a 3D domain")

    brv = _boundary_identity_residual(g, domain)
    if brv > BOUNDARY_TOL_3D:
        raise BoundaryConditionError(
            f"{g.name or 'field'}: boundary-identity residual {brv:.3g} > {BOUNDARY_TOL_3D}; "
            "enlarge the truncated domain")

    def integrate(dom: GridDomain) -> complex:
        xs, ys, zs = (ax.midpoints() for ax in dom.axes)
        chunks = []
        inv_floor_hit = [1.0]
        for x_block in np.array_split(xs, max(1, len(xs) // chunk_slabs)):
            mesh = np.stack(np.meshgrid(x_block, ys, zs, indexing="ij"), axis=-1).reshape(-1, 3)
            gv = g(mesh)
            sv = np.linalg.svd(gv, compute_uv=False)
            inv_floor_hit[0] = min(inv_floor_hit[0], float(sv[:, -1].min()))
            gi = _inv2(gv)
            a0 = gi @ g.partial(mesh, 0)
            a1 = gi @ g.partial(mesh, 1)
            a2 = gi @ g.partial(mesh, 2)
            comm = a1 @ a2 - a2 @ a1
            integrand = np.trace(a0 @ comm, axis1=1, axis2=2)
            chunks.append(_fsum_complex(integrand))
        if inv_floor_hit[0] <= 1e-6:
            raise NonInvertibleFieldError(
                f"{g.name or 'field'}: min singular value {inv_floor_hit[0]:.3g} on the grid")
        # epsilon-contraction = 3 Tr(A0 [A1, A2]); normalization -(1/24π²).
        return _fsum_complex(chunks) * 3.0 * dom.cell_volume * (-1.0 / (24.0 * math.pi ** 2))

    total = integrate(domain)
    extra: dict = {}
    if richardson:
        coarse = integrate(domain.coarsen())
        extra["raw_coarse"] = float(coarse.real)
        total = (4.0 * total - coarse) / 3.0
    if check_derivatives and g.derivative is not None:
        rng = np.random.default_rng(0)
        sample = np.stack([rng.uniform(a.lo + a.step, a.hi - a.step, 48)
                           for a in domain.axes], axis=1)
        dev = derivative_check(g, sample)
        if dev > 1e-6:
            raise ValueError(f"{g.name or 'field'}: analytic/FD derivative gap {dev:.3g} > 1e-6")
        extra["derivative_check"] = dev
    return _finish(total, brv, domain.shape(), g.name or "winding_3d", extra)
