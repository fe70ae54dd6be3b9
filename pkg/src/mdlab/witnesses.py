"""The concrete matrix-valued fields fed to the topological detectors.

The hedgehog projection on the closed unit disk (constant on the boundary
circle, so it factors through the disk-with-collapsed-boundary ~ 2-sphere):

    phat(x, y) = 1/2 [[1 - cos(pi r),  (x+iy)/r sin(pi r)],
                      [(x-iy)/r sin(pi r),  1 + cos(pi r)]],   r = |(x, y)|,

frozen at diag(1, 0) for r >= 1.  Its self-adjoint lift is
ptilde(x, y, z) = phat(x, y) / sqrt(1 + z^2), and the exponentials
exp(2 pi i ptilde) restricted to the half-spaces z >= 0 / z <= 0 are the 3D
winding witnesses.  Two normalizations are built in:

  * the half-line coordinate is compactified, z = tan(pi v / 2) with
    v in [0, 1] (or [-1, 0]), under which the degree form is invariant and
    the slow 1/z tail disappears;
  * the value at (x, y)-infinity, diag(e^{2 pi i f(z)}, 1), is divided out,
    which is the standard unitization normalization for classes over
    C0(R^2 x R_pm) and makes the field exactly the identity on every
    boundary face.

The remaining witnesses are the scalar phases u_pm on the half-lines, the
unitary u over the 3-sphere chart (theta1, theta2, phi), the constant
projection q = diag(1, 0), and p = u q u^{-1} together with its transverse
disk slice used for the 2D Chern pairing.
"""

from __future__ import annotations

import math

import numpy as np

from .topology import Axis, GridDomain, MatrixField

__all__ = [
    "WITNESS_NAMES",
    "build_witness",
    "phat",
    "phat_disk",
    "ptilde",
    "exp_ptilde",
    "uplus",
    "uminus",
    "u_gamma3",
    "q_const",
    "p_gamma3",
    "gamma3_disk",
    "epsilon1_field",
    "trivial_lift_unit",
    "trivial_lift_eps1",
]

TAU = 2.0 * math.pi

WITNESS_NAMES = ("phat", "ptilde", "uplus", "uminus", "u_gamma3", "q",
                 "p_gamma3", "exp_ptilde_plus", "exp_ptilde_minus")


def _phat_values(x, y):
    """phat entries, frozen at diag(1,0) outside the unit disk."""
    r = np.hypot(x, y)
    inside = r < 1.0
    c = np.cos(math.pi * r)
    half_sinc = 0.5 * math.pi * np.sinc(r)  # sin(pi r) / (2 r), finite at r = 0
    p = np.zeros(x.shape + (2, 2), dtype=complex)
    p[..., 0, 0] = np.where(inside, 0.5 * (1.0 - c), 1.0)
    p[..., 1, 1] = np.where(inside, 0.5 * (1.0 + c), 0.0)
    off = (x + 1j * y) * half_sinc
    p[..., 0, 1] = np.where(inside, off, 0.0)
    p[..., 1, 0] = np.conj(p[..., 0, 1])
    return p


def _phat_grad(x, y, axis):
    """Exact partial of phat; zero outside the unit disk."""
    r = np.hypot(x, y)
    inside = r < 1.0
    c = np.cos(math.pi * r)
    sinc = np.sinc(r)  # sin(pi r)/(pi r)
    # (pi c r - sin(pi r)) / r^3 = pi (c - sinc) / r^2, with its r -> 0 limit.
    small = r < 1e-3
    rs = np.where(small, 1.0, r)
    w3 = np.where(small,
                  -math.pi ** 3 / 3.0 + math.pi ** 5 * r * r / 30.0,
                  math.pi * (c - sinc) / (rs * rs))
    t = x if axis == 0 else y
    d = np.zeros(x.shape + (2, 2), dtype=complex)
    d11 = 0.5 * math.pi ** 2 * t * sinc
    d[..., 0, 0] = np.where(inside, d11, 0.0)
    d[..., 1, 1] = -d[..., 0, 0]
    unit = 1.0 if axis == 0 else 1.0j
    doff = 0.5 * (math.pi * sinc * unit + (x + 1j * y) * t * w3)
    d[..., 0, 1] = np.where(inside, doff, 0.0)
    d[..., 1, 0] = np.conj(d[..., 0, 1])
    return d


def _phat_nonsmooth(pts):
    r = np.hypot(pts[:, 0], pts[:, 1])
    return (np.abs(r - 1.0) < 2e-2) | (r < 2e-2)


def phat() -> MatrixField:
    """The hedgehog projection on the plane (Cartesian chart)."""
    return MatrixField(
        evaluator=lambda pts: _phat_values(pts[:, 0], pts[:, 1]),
        kind="projection", size=2, dim=2, name="phat",
        derivative=lambda pts, axis: _phat_grad(pts[:, 0], pts[:, 1], axis),
        nonsmooth=_phat_nonsmooth,
    )


def _phat_polar_values(r, th):
    c = np.cos(math.pi * r)
    s = np.sin(math.pi * r)
    e = np.exp(1j * th)
    p = np.empty(r.shape + (2, 2), dtype=complex)
    p[..., 0, 0] = 0.5 * (1.0 - c)
    p[..., 1, 1] = 0.5 * (1.0 + c)
    p[..., 0, 1] = 0.5 * e * s
    p[..., 1, 0] = np.conj(p[..., 0, 1])
    return p


def _phat_polar_grad(r, th, axis):
    c = np.cos(math.pi * r)
    s = np.sin(math.pi * r)
    e = np.exp(1j * th)
    d = np.zeros(r.shape + (2, 2), dtype=complex)
    if axis == 0:
        d[..., 0, 0] = 0.5 * math.pi * s
        d[..., 1, 1] = -0.5 * math.pi * s
        d[..., 0, 1] = 0.5 * math.pi * c * e
    else:
        d[..., 0, 1] = 0.5j * s * e
    d[..., 1, 0] = np.conj(d[..., 0, 1])
    return d


def phat_disk(n: int = 512) -> MatrixField:
    """phat in the polar chart (r, theta) on [0,1] x [0,2pi].

    All boundary components are exactly constant (diag(0,1) at r=0,
    diag(1,0) at r=1) and the angle is periodic; the Chern integral over
    this domain is the orientation calibration reference +1.
    """
    dom = GridDomain((Axis(0.0, 1.0, n, "constant"), Axis(0.0, TAU, n, "periodic")))
    return MatrixField(
        evaluator=lambda pts: _phat_polar_values(pts[:, 0], pts[:, 1]),
        kind="projection", size=2, dim=2, name="phat_disk",
        derivative=lambda pts, axis: _phat_polar_grad(pts[:, 0], pts[:, 1], axis),
        default_domain=dom,
    )


def ptilde() -> MatrixField:
    """Self-adjoint lift phat(x, y)/sqrt(1 + z^2) of the hedgehog projection."""
    def ev(pts):
        base = _phat_values(pts[:, 0], pts[:, 1])
        return base / np.sqrt(1.0 + pts[:, 2] ** 2)[:, None, None]
    return MatrixField(evaluator=ev, kind="selfadjoint_lift", size=2, dim=3, name="ptilde")


def exp_ptilde(side: str, n: int = 128, xy_extent: float = 1.5) -> MatrixField:
    """Normalized exponential e^{2 pi i ptilde} over one half-space.

    Coordinates are (x, y, v) with v in [0, 1] the compactified *outward*
    half-line coordinate, z = tan(pi v/2) on the plus side and
    z = -tan(pi v/2) on the minus side (the same outward orientation the 1D
    winding uses; the lift 1/sqrt(1+z^2) is even in z).  The field is exactly
    the identity on all six boundary faces.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    name = "exp_ptilde_plus" if side == "+" else "exp_ptilde_minus"
    dom = GridDomain((Axis(-xy_extent, xy_extent, n, "constant"),
                      Axis(-xy_extent, xy_extent, n, "constant"),
                      Axis(0.0, 1.0, n, "constant")))

    def pieces(pts):
        p = _phat_values(pts[:, 0], pts[:, 1])
        # chi = 2 pi / sqrt(1 + z^2) with z = -+tan(pi v/2): even in z.
        chi = TAU * np.cos(0.5 * math.pi * pts[:, 2])
        e = np.exp(1j * chi)
        kmat = np.zeros_like(p)
        kmat[:, 0, 0] = np.conj(e)
        kmat[:, 1, 1] = 1.0
        gmat = np.eye(2)[None, :, :] + (e - 1.0)[:, None, None] * p
        return p, chi, e, kmat, gmat

    def ev(pts):
        _, _, _, kmat, gmat = pieces(pts)
        return gmat @ kmat

    def dv(pts, axis):
        p, chi, e, kmat, gmat = pieces(pts)
        if axis in (0, 1):
            dp = _phat_grad(pts[:, 0], pts[:, 1], axis)
            return (e - 1.0)[:, None, None] * (dp @ kmat)
        dchi = -math.pi ** 2 * np.sin(0.5 * math.pi * pts[:, 2])
        dg = (1j * dchi * e)[:, None, None] * p
        dk = np.zeros_like(kmat)
        dk[:, 0, 0] = -1j * dchi * np.conj(e)
        return dg @ kmat + gmat @ dk

    return MatrixField(evaluator=ev, kind="invertible", size=2, dim=3, name=name,
                       derivative=dv, default_domain=dom, nonsmooth=_phat_nonsmooth)


def _phase_field(name: str, sign: float) -> MatrixField:
    # u(z) = exp(2 pi i (sign * z / sqrt(1+z^2))); derivative in closed form.
    def ev(pts):
        z = pts[:, 0]
        theta = TAU * sign * z / np.sqrt(1.0 + z * z)
        return np.exp(1j * theta)[:, None, None]

    def dv(pts, axis):
        z = pts[:, 0]
        theta = TAU * sign * z / np.sqrt(1.0 + z * z)
        dtheta = TAU * sign * (1.0 + z * z) ** -1.5
        return (1j * dtheta * np.exp(1j * theta))[:, None, None]

    return MatrixField(evaluator=ev, kind="invertible", size=1, dim=1,
                       name=name, derivative=dv)


def uplus() -> MatrixField:
    """u_+(z) = e^{2 pi i (-z/sqrt(1+z^2))} on the positive half-line."""
    return _phase_field("uplus", -1.0)


def uminus() -> MatrixField:
    """u_-(z) = e^{2 pi i (+z/sqrt(1+z^2))} on the negative half-line."""
    return _phase_field("uminus", 1.0)


def u_gamma3() -> MatrixField:
    """The unitary [[e^{i(phi+t1)} cos t2, -sin t2], [sin t2, e^{-i(phi+t1)} cos t2]].

    Chart coordinates (theta1, theta2, phi); det = 1 identically.
    """
    def ev(pts):
        t1, t2, ph = pts[:, 0], pts[:, 1], pts[:, 2]
        e = np.exp(1j * (ph + t1))
        u = np.empty((len(pts), 2, 2), dtype=complex)
        u[:, 0, 0] = e * np.cos(t2)
        u[:, 0, 1] = -np.sin(t2)
        u[:, 1, 0] = np.sin(t2)
        u[:, 1, 1] = np.conj(e) * np.cos(t2)
        return u

    def dv(pts, axis):
        t1, t2, ph = pts[:, 0], pts[:, 1], pts[:, 2]
        e = np.exp(1j * (ph + t1))
        d = np.zeros((len(pts), 2, 2), dtype=complex)
        if axis in (0, 2):
            d[:, 0, 0] = 1j * e * np.cos(t2)
            d[:, 1, 1] = -1j * np.conj(e) * np.cos(t2)
        else:
            d[:, 0, 0] = -e * np.sin(t2)
            d[:, 0, 1] = -np.cos(t2)
            d[:, 1, 0] = np.cos(t2)
            d[:, 1, 1] = -np.conj(e) * np.sin(t2)
        return d

    return MatrixField(evaluator=ev, kind="invertible", size=2, dim=3,
                       name="u_gamma3", derivative=dv)


def q_const(dim: int = 2) -> MatrixField:
    """The constant rank-1 projection diag(1, 0)."""
    def ev(pts):
        q = np.zeros((len(pts), 2, 2), dtype=complex)
        q[:, 0, 0] = 1.0
        return q
    return MatrixField(evaluator=ev, kind="projection", size=2, dim=dim, name="q",
                       derivative=lambda pts, axis: np.zeros((len(pts), 2, 2), dtype=complex))


def epsilon1_field(n: int = 128) -> MatrixField:
    """q with a default 2D domain, for the constant-projection Chern check."""
    f = q_const(2)
    dom = GridDomain((Axis(-1.0, 1.0, n, "constant"), Axis(-1.0, 1.0, n, "constant")))
    return MatrixField(evaluator=f.evaluator, kind="projection", size=2, dim=2,
                       name="eps1", derivative=f.derivative, default_domain=dom)


def p_gamma3() -> MatrixField:
    """p = u q u^{-1}: the rank-1 projection onto the first column of u."""
    def ev(pts):
        t1, t2, ph = pts[:, 0], pts[:, 1], pts[:, 2]
        e = np.exp(1j * (ph + t1))
        p = np.empty((len(pts), 2, 2), dtype=complex)
        p[:, 0, 0] = np.cos(t2) ** 2
        p[:, 1, 1] = np.sin(t2) ** 2
        p[:, 0, 1] = e * np.cos(t2) * np.sin(t2)
        p[:, 1, 0] = np.conj(p[:, 0, 1])
        return p
    return MatrixField(evaluator=ev, kind="projection", size=2, dim=3, name="p_gamma3")


def gamma3_disk(n: int = 512) -> MatrixField:
    """p restricted to the transverse disk, chart (theta2, phi) at theta1 = 0.

    theta2 in [0, pi/2] runs from the quotient circle (p = q there) to the
    complementary circle (p = diag(0,1)); phi is the angle around the disk.
    Both theta2 edges are exactly constant, so the Chern integral is the
    integer pairing against the plane factor; expected magnitude 1.
    """
    dom = GridDomain((Axis(0.0, 0.5 * math.pi, n, "constant"), Axis(0.0, TAU, n, "periodic")))

    def ev(pts):
        t2, ph = pts[:, 0], pts[:, 1]
        e = np.exp(1j * ph)
        p = np.empty((len(pts), 2, 2), dtype=complex)
        p[:, 0, 0] = np.cos(t2) ** 2
        p[:, 1, 1] = np.sin(t2) ** 2
        p[:, 0, 1] = e * np.cos(t2) * np.sin(t2)
        p[:, 1, 0] = np.conj(p[:, 0, 1])
        return p

    def dv(pts, axis):
        t2, ph = pts[:, 0], pts[:, 1]
        e = np.exp(1j * ph)
        d = np.zeros((len(pts), 2, 2), dtype=complex)
        if axis == 0:
            d[:, 0, 0] = -np.sin(2 * t2)
            d[:, 1, 1] = np.sin(2 * t2)
            d[:, 0, 1] = e * np.cos(2 * t2)
        else:
            d[:, 0, 1] = 1j * e * np.cos(t2) * np.sin(t2)
        d[:, 1, 0] = np.conj(d[:, 0, 1])
        return d

    return MatrixField(evaluator=ev, kind="projection", size=2, dim=2,
                       name="p_gamma3_disk", derivative=dv, default_domain=dom)


def _constant_identity(size: int, name: str, n: int) -> MatrixField:
    dom = GridDomain((Axis(-1.0, 1.0, n, "constant"), Axis(-1.0, 1.0, n, "constant"),
                      Axis(0.0, 1.0, n, "constant")))

    def ev(pts):
        return np.broadcast_to(np.eye(size, dtype=complex), (len(pts), size, size)).copy()

    return MatrixField(evaluator=ev, kind="invertible", size=size, dim=3, name=name,
                       derivative=lambda pts, axis: np.zeros((len(pts), size, size),
                                                             dtype=complex),
                       default_domain=dom)


def trivial_lift_unit(n: int = 16) -> MatrixField:
    """Normalized exponential of the lift of the unit class: identically 1."""
    return _constant_identity(1, "exp_lift_unit", n)


def trivial_lift_eps1(n: int = 16) -> MatrixField:
    """Normalized exponential of the lift of the constant projection: identity."""
    return _constant_identity(2, "exp_lift_eps1", n)


def build_witness(name: str, **kwargs) -> MatrixField:
    """Construct a named witness field."""
    factories = {
        "phat": phat,
        "ptilde": ptilde,
        "uplus": uplus,
        "uminus": uminus,
        "u_gamma3": u_gamma3,
        "q": q_const,
        "p_gamma3": p_gamma3,
        "exp_ptilde_plus": lambda **kw: exp_ptilde("+", **kw),
        "exp_ptilde_minus": lambda **kw: exp_ptilde("-", **kw),
    }
    if name not in factories:
        raise ValueError(f"unknown witness {name!r}; choose from {WITNESS_NAMES}")
    return factories[name](**kwargs)
