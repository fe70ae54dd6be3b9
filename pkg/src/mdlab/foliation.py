"""Two commuting R^2-actions on V = R x (R^4 \\ {0}) and their leaf spaces.

Points are arrays (x, y, z, t, s).  The action "lambda12" is
(r, a): (x, y+iz, t, s) -> (x + r, (y+iz) e^{-ia}, t e^a, s e^a)
and "lambda14" is
(r, a): (x, y+iz, t+is) -> (x + r, (y+iz) e^{-ia}, (t+is) e^{-ia}),
with complex multiplication expanded to real rotation matrices.

The strata V1, W1, V2, W2, V3, W3 are cut out by sign conditions on t and s;
each maximal stratum carries an explicit complete invariant of the orbit
partition, mapping onto its model leaf space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .liealg import MD5Family, build_md5
from .orbits import closed_form_orbit, kirillov_form

__all__ = [
    "ACTIONS",
    "STRATA",
    "act",
    "in_V",
    "stratum_of",
    "sample_stratum",
    "preservation_check",
    "action_generators",
    "leaf_invariants",
    "LeafInvariants",
    "leafspace_report",
    "integrability_check",
    "f1_fibration_check",
    "p1_submersion_audit",
]

ACTIONS = ("lambda12", "lambda14")
STRATA = ("V1", "W1", "V2", "W2", "V3", "W3")

# Which strata each action preserves (W3 = W2 as sets).
ACTION_STRATA = {
    "lambda12": ("V1", "W1", "V2", "W2"),
    "lambda14": ("V3", "W3"),
}

# The leaf-space algebra each maximal stratum realizes in the extension towers.
STRATUM_ALGEBRA = {"V1": "J1", "V2": "J2", "W2": "B2", "V3": "J3", "W3": "B3"}

STRATUM_MODEL = {
    "V1": "R^3 ⊔ R^3",
    "V2": "R^2 ⊔ R^2",
    "W2": "R_+",
    "V3": "C × R_+",
    "W3": "R_+",
}

STRATUM_MODEL_DIM = {"V1": 3, "V2": 2, "W2": 1, "V3": 3, "W3": 1}


def in_V(p) -> bool:
    p = np.asarray(p, dtype=float)
    return bool(np.any(p[..., 1:] != 0.0))


def _check_in_V(p):
    p = np.asarray(p, dtype=float)
    if p.shape[-1] != 5:
        raise ValueError("points of V have 5 coordinates (x, y, z, t, s)")
    if not np.all(np.any(p[..., 1:] != 0.0, axis=-1)):
        raise ValueError("point outside V: (y, z, t, s) = 0")
    return p


def act(action: str, g, p) -> np.ndarray:
    """Apply the R^2-action element g = (r, a) to point(s) p."""
    p = _check_in_V(p)
    r, a = float(g[0]), float(g[1])
    ca, sa = math.cos(a), math.sin(a)
    out = np.array(p, dtype=float, copy=True)
    x, y, z, t, s = (p[..., i] for i in range(5))
    out[..., 0] = x + r
    # (y + iz) e^{-ia}
    out[..., 1] = y * ca + z * sa
    out[..., 2] = -y * sa + z * ca
    if action == "lambda12":
        out[..., 3] = t * math.exp(a)
        out[..., 4] = s * math.exp(a)
    elif action == "lambda14":
        # (t + is) e^{-ia}
        out[..., 3] = t * ca + s * sa
        out[..., 4] = -t * sa + s * ca
    else:
        raise ValueError(f"unknown action {action!r}")
    return out


_PREDICATES = {
    "V1": lambda p: p[4] != 0.0,
    "W1": lambda p: p[4] == 0.0,
    "V2": lambda p: p[4] == 0.0 and p[3] != 0.0,
    "W2": lambda p: p[4] == 0.0 and p[3] == 0.0,
    "V3": lambda p: p[3] != 0.0 or p[4] != 0.0,
    "W3": lambda p: p[4] == 0.0 and p[3] == 0.0,
}


def stratum_of(p) -> frozenset[str]:
    """All strata containing p, by the literal sign predicates."""
    p = _check_in_V(np.asarray(p, dtype=float))
    return frozenset(tag for tag, pred in _PREDICATES.items() if pred(p))


def sample_stratum(tag: str, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    """Draw points of the given stratum (standard normal coordinates)."""
    pts = rng.standard_normal((n, 5))
    if tag == "V1":
        pass  # s = 0 has probability zero
    elif tag == "W1":
        pts[:, 4] = 0.0
    elif tag == "V2":
        pts[:, 4] = 0.0
    elif tag in ("W2", "W3"):
        pts[:, 3] = 0.0
        pts[:, 4] = 0.0
    elif tag == "V3":
        pass
    else:
        raise ValueError(f"unknown stratum {tag!r}")
    # Regenerate the rare degenerate draws rather than shifting them.
    for i in range(n):
        while not (_PREDICATES[tag](pts[i]) and np.any(pts[i, 1:] != 0.0)):  # pragma: no cover
            fresh = rng.standard_normal(5)
            pts[i] = fresh
            if tag in ("W1", "V2"):
                pts[i, 4] = 0.0
            elif tag in ("W2", "W3"):
                pts[i, 3] = 0.0
                pts[i, 4] = 0.0
    return pts


@dataclass
class PreservationReport:
    action: str
    stratum: str
    n_samples: int
    seed: int
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "action": self.action,
            "stratum": self.stratum,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "violations": [list(map(float, v)) for v in self.violations],
        }


def preservation_check(action: str, stratum: str, n_samples: int, seed: int) -> PreservationReport:
    """Sampled check that the action maps the stratum into itself."""
    if stratum not in ACTION_STRATA[action]:
        raise ValueError(f"stratum {stratum} is not associated with action {action}")
    rng = np.random.default_rng(seed)
    pts = sample_stratum(stratum, rng, n_samples)
    report = PreservationReport(action, stratum, n_samples, seed)
    gs = rng.uniform(-3.0, 3.0, size=(n_samples, 2))
    for p, g in zip(pts, gs):
        q = act(action, g, p)
        if not _PREDICATES[stratum](q):
            report.violations.append(q)
    return report


def action_generators(action: str, p) -> np.ndarray:
    """The two infinitesimal generators at p: d/dr and d/da of the action at (0,0).

    Rows: the translation field (1,0,0,0,0) and the rotation/scaling field,
    (0, z, -y, t, s) for lambda12 and (0, z, -y, s, -t) for lambda14.
    """
    p = np.asarray(p, dtype=float)
    x, y, z, t, s = p
    u = np.array([1.0, 0.0, 0.0, 0.0, 0.0])
    if action == "lambda12":
        v = np.array([0.0, z, -y, t, s])
    elif action == "lambda14":
        v = np.array([0.0, z, -y, s, -t])
    else:
        raise ValueError(f"unknown action {action!r}")
    return np.stack([u, v])


@dataclass(frozen=True)
class LeafInvariants:
    """Complete invariant of the orbit partition on one stratum.

    `mapping` sends a point to (continuous part, discrete part); the
    continuous part lands in a Euclidean model of dimension `dim` and the
    discrete part picks the connected component of the model leaf space.
    """

    stratum: str
    model: str
    dim: int
    mapping: callable


def _inv_V1(p):
    x, y, z, t, s = p
    w = (y + 1j * z) * np.exp(1j * math.log(abs(s)))
    return np.array([w.real, w.imag, t / s]), (int(np.sign(s)),)


def _inv_V2(p):
    x, y, z, t, s = p
    w = (y + 1j * z) * np.exp(1j * math.log(abs(t)))
    return np.array([w.real, w.imag]), (int(np.sign(t)),)


def _inv_W2(p):
    x, y, z, t, s = p
    return np.array([math.hypot(y, z)]), ()


def _inv_V3(p):
    x, y, z, t, s = p
    u = (y + 1j * z) / (t + 1j * s)
    return np.array([u.real, u.imag, abs(t + 1j * s)]), ()


_INVARIANTS = {"V1": _inv_V1, "V2": _inv_V2, "W2": _inv_W2, "V3": _inv_V3, "W3": _inv_W2}


def leaf_invariants(stratum: str) -> LeafInvariants:
    if stratum not in _INVARIANTS:
        raise ValueError(f"no leaf invariant for stratum {stratum!r} (use V1, V2, W2, V3, W3)")
    return LeafInvariants(stratum, STRATUM_MODEL[stratum], STRATUM_MODEL_DIM[stratum],
                          _INVARIANTS[stratum])


def _jacobian(fn, p, h_scale: float = 1e-5):
    """Central finite-difference Jacobian of the continuous invariant part."""
    p = np.asarray(p, dtype=float)
    h = h_scale * (1.0 + np.linalg.norm(p))
    cols = []
    for i in range(5):
        dp = np.zeros(5)
        dp[i] = h
        hi, _ = fn(p + dp)
        lo, _ = fn(p - dp)
        cols.append((hi - lo) / (2 * h))
    return np.stack(cols, axis=1)


def _diff_rank(fn, p, cutoff: float = 1e-6) -> int:
    sv = np.linalg.svd(_jacobian(fn, p), compute_uv=False)
    return int((sv > cutoff).sum())


@dataclass
class StratumReport:
    stratum: str
    model: str
    algebra: str
    constancy_residual: float
    rank_counts: dict[int, int]
    full_rank: bool

    def to_json(self) -> dict:
        return {
            "stratum": self.stratum,
            "model": self.model,
            "algebra": self.algebra,
            "constancy_residual": self.constancy_residual,
            "rank_counts": {str(k): v for k, v in sorted(self.rank_counts.items())},
            "full_rank": self.full_rank,
        }


def _action_of(stratum: str) -> str:
    return "lambda14" if stratum in ("V3", "W3") else "lambda12"


def stratum_invariant_report(stratum: str, n_samples: int, seed: int) -> StratumReport:
    """Orbit-constancy residual and differential-rank histogram on one stratum."""
    action = _action_of(stratum)
    inv = leaf_invariants(stratum)
    rng = np.random.default_rng(seed)
    pts = sample_stratum(stratum, rng, n_samples)
    gs = rng.uniform(-3.0, 3.0, size=(n_samples, 2))
    resid = 0.0
    ranks: dict[int, int] = {}
    for p, g in zip(pts, gs):
        c0, d0 = inv.mapping(p)
        c1, d1 = inv.mapping(act(action, g, p))
        if d0 != d1:
            resid = math.inf
        resid = max(resid, float(np.abs(c1 - c0).max()))
        r = _diff_rank(inv.mapping, p)
        ranks[r] = ranks.get(r, 0) + 1
    full = set(ranks) == {inv.dim}
    return StratumReport(stratum, inv.model, STRATUM_ALGEBRA[stratum], resid, ranks, full)


def leafspace_report(action: str, n_samples: int = 200, seed: int = 0) -> dict:
    """Per-stratum invariant diagnostics plus the leaf-space model table."""
    strata = ["V1", "V2", "W2"] if action == "lambda12" else ["V3", "W3"]
    entries = [stratum_invariant_report(s, n_samples, seed + i) for i, s in enumerate(strata)]
    models = {e.stratum: e.model for e in entries}
    return {
        "action": action,
        "strata": [e.to_json() for e in entries],
        "models": models,
        "identifications": {STRATUM_ALGEBRA[e.stratum]: f"C0({e.model}) ⊗ K" for e in entries},
        "ok": all(e.full_rank and e.constancy_residual < 1e-9 for e in entries),
    }


_ENVOYS = {
    "lambda12": MD5Family("5_4_12", {"lambda": 1.0, "phi": math.pi / 2}),
    "lambda14": MD5Family("5_4_14", {"lambda": 0.0, "mu": 1.0, "phi": math.pi / 2}),
}


def _fd_field_jacobian(field, p, h=1e-6):
    cols = []
    for i in range(5):
        dp = np.zeros(5)
        dp[i] = h
        cols.append((field(p + dp) - field(p - dp)) / (2 * h))
    return np.stack(cols, axis=1)


@dataclass
class IntegrabilityReport:
    action: str
    n_samples: int
    seed: int
    bracket_residual: float
    rank_counts: dict[int, int]
    tangent_residual: float

    @property
    def ok(self) -> bool:
        return (self.bracket_residual < 1e-8 and set(self.rank_counts) == {2}
                and self.tangent_residual < 1e-6)

    def to_json(self) -> dict:
        return {
            "action": self.action,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "bracket_residual": self.bracket_residual,
            "rank_counts": {str(k): v for k, v in sorted(self.rank_counts.items())},
            "tangent_residual": self.tangent_residual,
        }


def integrability_check(action: str, n_samples: int, seed: int) -> IntegrabilityReport:
    """Generators commute, span rank 2, and match the coadjoint orbit tangents.

    The two generator fields come from an abelian R^2-action, so their Lie
    bracket vanishes identically; the finite-difference residual certifies the
    implementation.  Their span is compared (principal angles) with the image
    of the Kirillov form of the envoy family at the same point.
    """
    rng = np.random.default_rng(seed)
    alg = build_md5(_ENVOYS[action])
    u_field = lambda p: action_generators(action, p)[0]
    v_field = lambda p: action_generators(action, p)[1]
    bracket_res = 0.0
    tangent_res = 0.0
    ranks: dict[int, int] = {}
    pts = rng.standard_normal((n_samples, 5))
    for p in pts:
        gen = action_generators(action, p)
        ju = _fd_field_jacobian(u_field, p)
        jv = _fd_field_jacobian(v_field, p)
        lie = jv @ gen[0] - ju @ gen[1]
        bracket_res = max(bracket_res, float(np.abs(lie).max()))
        sv = np.linalg.svd(gen, compute_uv=False)
        r = int((sv > 1e-10 * max(1.0, sv[0])).sum())
        ranks[r] = ranks.get(r, 0) + 1
        b = kirillov_form(alg, p)
        ub, sb, _ = np.linalg.svd(b)
        angles = scipy.linalg.subspace_angles(gen.T, ub[:, :2])
        tangent_res = max(tangent_res, float(np.max(angles)))
    return IntegrabilityReport(action, n_samples, seed, bracket_res, ranks, tangent_res)


@dataclass
class FibrationReport:
    n_samples: int
    seed: int
    constancy_residual: float
    rank_counts: dict[int, int]

    @property
    def ok(self) -> bool:
        return self.constancy_residual < 1e-9 and set(self.rank_counts) == {3}

    def to_json(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "seed": self.seed,
            "constancy_residual": self.constancy_residual,
            "rank_counts": {str(k): v for k, v in sorted(self.rank_counts.items())},
        }


def _sphere_map(p):
    v = np.asarray(p, dtype=float)[1:]
    return v / np.linalg.norm(v), ()


def f1_fibration_check(n_samples: int, seed: int) -> FibrationReport:
    """The simplest family fibers over the unit 3-sphere of directions.

    For the identity-block family the orbit through (x, v) is
    {(x', e^a v)}, so v/|v| is orbit-constant; its differential has rank 3.
    """
    rng = np.random.default_rng(seed)
    fam = MD5Family("5_4_5")
    resid = 0.0
    ranks: dict[int, int] = {}
    avals = np.linspace(-3.0, 3.0, 13)
    pts = rng.standard_normal((n_samples, 5))
    pts = np.vstack([pts, [0.0, 1.0, 0.0, 0.0, 0.0]])
    for p in pts:
        desc = closed_form_orbit(fam, p)
        base, _ = _sphere_map(p)
        for a in avals:
            q = desc.closed_form(0.0, a)
            d, _ = _sphere_map(q)
            resid = max(resid, float(np.abs(d - base).max()))
        r = _diff_rank(_sphere_map, p)
        ranks[r] = ranks.get(r, 0) + 1
    return FibrationReport(n_samples, seed, resid, ranks)


@dataclass
class SubmersionAudit:
    literal_max_deviation: float
    sign_component_constant: bool
    invariant_residual: float
    example_orbit: dict

    @property
    def literal_is_constant(self) -> bool:
        return self.literal_max_deviation < 1e-9

    def to_json(self) -> dict:
        return {
            "literal_map": "(y, z, t, sign s)",
            "literal_max_deviation": self.literal_max_deviation,
            "literal_is_orbit_constant": self.literal_is_constant,
            "sign_component_constant": self.sign_component_constant,
            "invariant_map_residual": self.invariant_residual,
            "example_orbit": self.example_orbit,
        }


def p1_submersion_audit(n_samples: int = 100, seed: int = 0) -> SubmersionAudit:
    """Compare the literal projection (y, z, t, sign s) with the working invariant on V1.

    The literal map is not constant along orbits: the action rotates (y, z)
    and scales t.  Its sign-s component is orbit-constant, and the working
    invariant ((y+iz)e^{i ln|s|}, t/s, sign s) is constant to round-off.
    The audit records both behaviours instead of silently replacing one map
    by the other.
    """
    rng = np.random.default_rng(seed)
    pts = sample_stratum("V1", rng, n_samples)
    gs = rng.uniform(-3.0, 3.0, size=(n_samples, 2))
    inv = leaf_invariants("V1")

    def literal(p):
        return np.array([p[1], p[2], p[3]]), (int(np.sign(p[4])),)

    lit_dev = 0.0
    sign_const = True
    inv_resid = 0.0
    for p, g in zip(pts, gs):
        q = act("lambda12", g, p)
        l0, s0 = literal(p)
        l1, s1 = literal(q)
        lit_dev = max(lit_dev, float(np.abs(l1 - l0).max()))
        sign_const = sign_const and (s0 == s1)
        c0, _ = inv.mapping(p)
        c1, _ = inv.mapping(q)
        inv_resid = max(inv_resid, float(np.abs(c1 - c0).max()))

    p0 = np.array([0.0, 1.0, 0.0, 1.0, 1.0])
    q0 = act("lambda12", (0.0, 1.0), p0)
    example = {
        "point": list(p0),
        "after_a_1": [float(v) for v in q0],
        "literal_changed": bool(np.abs(q0[1:4] - p0[1:4]).max() > 1e-3),
    }
    return SubmersionAudit(lit_dev, sign_const, inv_resid, example)
