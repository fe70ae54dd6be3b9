"""Cyclic six-term sequences of free abelian groups, and the K-group catalogue.

Hexagon positions follow the fixed convention
    G0 = K0(J) -> G1 = K0(A) -> G2 = K0(B)
      -> G3 = K1(J) -> G4 = K1(A) -> G5 = K1(B) -> G0,
so maps[2] is the exponential connecting map (delta0) and maps[5] the index
connecting map (delta1).  All groups are free (Z^r); torsion never occurs in
the catalogue and is rejected where it would arise.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .intlinalg import (
    as_zmatrix,
    cokernel,
    image_basis,
    invariant_factors,
    kernel_basis,
    subgroup_equal,
    zeros,
)

__all__ = [
    "NODES",
    "SixTerm",
    "zmap",
    "exact_at",
    "is_exact",
    "SearchSpaceError",
    "solve_six_term",
    "hexagon_preset",
    "ext_invariant",
    "KDescriptor",
    "KGroups",
    "CatalogueError",
    "point",
    "euclidean",
    "sphere",
    "half_line",
    "leaf_half_line",
    "named",
    "tensor_K",
    "crossed_R2",
    "times_euclidean",
    "times_circle",
    "disjoint_union",
    "ktable",
]

NODES = ("K0(J)", "K0(A)", "K0(B)", "K1(J)", "K1(A)", "K1(B)")


def zmap(target_rank: int, source_rank: int, entries=None) -> np.ndarray:
    """An exact integer matrix Z^source -> Z^target (rows x cols)."""
    if entries is None or target_rank == 0 or source_rank == 0:
        return zeros(target_rank, source_rank)
    m = as_zmatrix(entries)
    if m.shape != (target_rank, source_rank):
        raise ValueError(f"map shape {m.shape} does not match Z^{source_rank} -> Z^{target_rank}")
    return m


@dataclass(frozen=True)
class SixTerm:
    groups: tuple[int, ...]
    maps: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.groups) != 6 or len(self.maps) != 6:
            raise ValueError("a six-term sequence has 6 groups and 6 maps")
        for i, m in enumerate(self.maps):
            want = (self.groups[(i + 1) % 6], self.groups[i])
            if m.shape != want:
                raise ValueError(f"map {i} has shape {m.shape}, expected {want}")

    @property
    def delta0(self) -> np.ndarray:
        return self.maps[2]

    @property
    def delta1(self) -> np.ndarray:
        return self.maps[5]

    def to_json(self) -> dict:
        return {
            "nodes": list(NODES),
            "groups": [int(g) for g in self.groups],
            "maps": [[int(x) for x in m.reshape(-1)] for m in self.maps],
            "exact": [bool(exact_at(self, i)) for i in range(6)],
        }


def exact_at(seq: SixTerm, node: int) -> bool:
    """Exactness at one node: image of the incoming map equals kernel of the outgoing."""
    img = image_basis(seq.maps[(node - 1) % 6])
    ker = kernel_basis(seq.maps[node % 6])
    return subgroup_equal(img, ker)


def is_exact(seq: SixTerm) -> bool:
    return all(exact_at(seq, i) for i in range(6))


class SearchSpaceError(ValueError):
    """The bounded completion search would be too large."""


def _infer_ranks(groups, known) -> list[int]:
    g = list(groups)
    progress = True
    while progress and any(x is None for x in g):
        progress = False
        for i in range(6):
            if g[i] is not None:
                continue
            # 0 -> G_i -> G_{i+1} --f--> G_{i+2} forces G_i = ker f.
            j1 = (i + 1) % 6
            if g[(i - 1) % 6] == 0 and known.get(j1) is not None:
                g[i] = kernel_basis(known[j1]).shape[1]
                progress = True
                continue
            # G_{i-2} --f--> G_{i-1} -> G_i -> 0 forces G_i = coker f (must be free).
            j2 = (i - 2) % 6
            if g[(i + 1) % 6] == 0 and known.get(j2) is not None:
                free, torsion = cokernel(known[j2])
                if torsion:
                    raise ValueError(
                        f"cokernel at node {i} has torsion {torsion}; groups must be free")
                g[i] = free
                progress = True
    missing = [i for i in range(6) if g[i] is None]
    if missing:
        raise ValueError(f"cannot infer ranks of groups at positions {missing}")
    return g


def solve_six_term(groups, known_maps=None, bound: int = 3,
                   max_candidates: int = 5_000_000) -> list[SixTerm]:
    """All exact completions of a partially known hexagon, up to automorphism.

    `groups` lists the six ranks (None = inferred where exactness forces it);
    `known_maps` maps positions 0..5 to fixed integer matrices.  Unknown maps
    are searched with entries in [-bound, bound].  Completions are grouped by
    the tuple of per-map invariant factors (unimodular base changes preserve
    them) and one lexicographically minimal representative per class is kept.
    """
    known = {i: as_zmatrix(m) for i, m in (known_maps or {}).items()}
    ranks = _infer_ranks(groups, known)

    fixed: dict[int, np.ndarray] = {}
    open_idx: list[int] = []
    total = 1
    for i in range(6):
        shape = (ranks[(i + 1) % 6], ranks[i])
        if i in known:
            if known[i].shape != shape:
                raise ValueError(f"known map {i} has shape {known[i].shape}, expected {shape}")
            fixed[i] = known[i]
        elif shape[0] == 0 or shape[1] == 0:
            fixed[i] = zeros(*shape)
        else:
            open_idx.append(i)
            total *= (2 * bound + 1) ** (shape[0] * shape[1])
    if total > max_candidates:
        raise SearchSpaceError(
            f"completion search needs about {total:.3g} candidates (> {max_candidates})")

    solutions: list[SixTerm] = []
    assign = dict(fixed)

    def node_ready(node):
        return (node - 1) % 6 in assign and node % 6 in assign

    def check_node(node):
        img = image_basis(assign[(node - 1) % 6])
        ker = kernel_basis(assign[node % 6])
        return subgroup_equal(img, ker)

    def dfs(k):
        if k == len(open_idx):
            seq = SixTerm(tuple(ranks), tuple(assign[i] for i in range(6)))
            if is_exact(seq):
                solutions.append(seq)
            return
        i = open_idx[k]
        shape = (ranks[(i + 1) % 6], ranks[i])
        for entries in itertools.product(range(-bound, bound + 1), repeat=shape[0] * shape[1]):
            m = zeros(*shape)
            for r in range(shape[0]):
                for c in range(shape[1]):
                    m[r, c] = entries[r * shape[1] + c]
            assign[i] = m
            ok = True
            for node in (i, (i + 1) % 6):
                if node_ready(node) and not check_node(node):
                    ok = False
                    break
            if ok:
                dfs(k + 1)
            del assign[i]

    dfs(0)

    classes: dict[tuple, SixTerm] = {}
    for seq in solutions:
        key = tuple((m.shape, tuple(invariant_factors(m))) for m in seq.maps)
        flat = tuple(int(x) for m in seq.maps for x in m.reshape(-1))
        if key not in classes:
            classes[key] = seq
        else:
            other = classes[key]
            oflat = tuple(int(x) for m in other.maps for x in m.reshape(-1))
            if flat < oflat:
                classes[key] = seq
    return [classes[k] for k in sorted(classes)]


def hexagon_preset(name: str, delta0=None, delta1=None) -> tuple[list, dict]:
    """(groups, known_maps) for the catalogue hexagons.

    gamma1: the V1-tower hexagon, delta0 defaults to [[0,1],[0,1]];
    gamma2: the W1-tower hexagon, delta1 defaults to (1,1)^T;
    gamma3: the all-Z hexagon with delta1 = 1;
    allZ:   six copies of Z, nothing known.
    """
    if name == "gamma1":
        d0 = zmap(2, 2, delta0 if delta0 is not None else [[0, 1], [0, 1]])
        return [0, None, 2, 2, None, 0], {2: d0}
    if name == "gamma2":
        d1 = zmap(2, 1, delta1 if delta1 is not None else [[1], [1]])
        return [2, 2, 1, 0, 0, 1], {5: d1}
    if name == "gamma3":
        d1 = zmap(1, 1, delta1 if delta1 is not None else [[1]])
        return [1, 1, 1, 1, 1, 1], {5: d1}
    if name == "allZ":
        return [1, 1, 1, 1, 1, 1], {}
    raise ValueError(f"unknown preset {name!r}")


def ext_invariant(seq: SixTerm) -> tuple[np.ndarray, np.ndarray]:
    """The connecting-map pair (delta0, delta1), generators as columns."""
    return seq.delta0.copy(), seq.delta1.copy()


# ---------------------------------------------------------------------------
# K-group catalogue

class CatalogueError(ValueError):
    """Descriptor falls outside the encoded catalogue."""


@dataclass(frozen=True)
class KDescriptor:
    op: str
    args: tuple = ()

    def __str__(self):
        if self.op == "atom":
            return self.args[0]
        if self.op == "euclidean":
            return f"C0(R^{self.args[0]})"
        if self.op == "sphere":
            return f"C(S^{self.args[0]})"
        if self.op == "half_line":
            return f"C0(R{self.args[0]})"
        if self.op == "named":
            return self.args[0]
        if self.op == "tensor_K":
            return f"{self.args[0]} ⊗ K"
        if self.op == "crossed_R2":
            return f"{self.args[0]} ⋊ R^2"
        if self.op == "times_euclidean":
            return f"{self.args[0]} ⊗ C0(R^{self.args[1]})"
        if self.op == "times_circle":
            return f"{self.args[0]} ⊗ C(S^1)"
        if self.op == "union":
            return " ⊕ ".join(str(a) for a in self.args)
        return repr(self)  # pragma: no cover


def point() -> KDescriptor:
    return KDescriptor("atom", ("point",))


def euclidean(n: int) -> KDescriptor:
    return KDescriptor("euclidean", (int(n),))


def sphere(n: int) -> KDescriptor:
    return KDescriptor("sphere", (int(n),))


def half_line(sign: str) -> KDescriptor:
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    return KDescriptor("half_line", (sign,))


def leaf_half_line() -> KDescriptor:
    """The leaf-space half-line R_+ carrying the B2/B3 presentation."""
    return KDescriptor("atom", ("R+",))


def named(name: str) -> KDescriptor:
    return KDescriptor("named", (name,))


def tensor_K(d: KDescriptor) -> KDescriptor:
    return KDescriptor("tensor_K", (d,))


def crossed_R2(d: KDescriptor) -> KDescriptor:
    return KDescriptor("crossed_R2", (d,))


def times_euclidean(d: KDescriptor, k: int) -> KDescriptor:
    return KDescriptor("times_euclidean", (d, int(k)))


def times_circle(d: KDescriptor) -> KDescriptor:
    return KDescriptor("times_circle", (d,))


def disjoint_union(*ds: KDescriptor) -> KDescriptor:
    return KDescriptor("union", tuple(ds))


@dataclass(frozen=True)
class KGroups:
    k0: int
    k1: int
    gens0: tuple[str, ...] = ()
    gens1: tuple[str, ...] = ()

    def ranks(self) -> tuple[int, int]:
        return (self.k0, self.k1)


def _euclidean_groups(n: int) -> KGroups:
    if n < 0:
        raise CatalogueError("negative-dimensional Euclidean space")
    if n == 0:
        return KGroups(1, 0, ("[1]",), ())
    if n % 2 == 0:
        return KGroups(1, 0, ("⊠".join(["[b]"] * (n // 2)),), ())
    return KGroups(0, 1, (), ("[b]⊠" * (n // 2) + "[u]",))


_SPHERES = {
    0: KGroups(2, 0, ("[1]+", "[1]-"), ()),
    1: KGroups(1, 1, ("[1]",), ("[Id]",)),
    2: KGroups(2, 0, ("[1hat]", "[phat]-[eps1]"), ()),
    3: KGroups(1, 1, ("[1]",), ("[g3]",)),
}

# Seeded catalogue entries: the extension-tower algebras with their tabulated
# K-groups and generator labels.  The R+ atom carries the B2/B3 presentation
# (the crossed-product route), not the contractible-half-line value; the
# signed fiber half-lines R± keep the true value K1 = Z generated by [u±].
_ATOMS = {
    "point": KGroups(1, 0, ("[1]",), ()),
    "R+": KGroups(1, 1, ("[1]⊠[u+]",), ("[p]-[eps1]",)),
}

_NAMED: dict[str, KGroups] = {
    "J1": KGroups(0, 2, (), ("[b]⊠[u+]", "[b]⊠[u-]")),
    "J2": KGroups(2, 0, ("[b]⊠[u+]", "[b]⊠[u-]"), ()),
    "B1": KGroups(2, 0, ("[1hat]", "[phat]-[eps1]"), ()),
    "B2": KGroups(1, 1, ("[1]⊠[u+]",), ("[p]-[eps1]",)),
    "J3": KGroups(1, 1, ("[1]",), ("[Id]",)),
    "B3": KGroups(1, 1, ("[1]",), ("[Id]",)),
    "CF2": KGroups(1, 1, ("[k0]",), ("[k1]",)),
    "CF3": KGroups(1, 1, ("[k0]",), ("[k1]",)),
}

# Model descriptors of the named algebras (rank cross-checks; labels differ
# because the named entries carry the tower presentation of their generators).
NAMED_MODELS: dict[str, KDescriptor] = {
    "J1": tensor_K(disjoint_union(times_euclidean(half_line("+"), 2),
                                  times_euclidean(half_line("-"), 2))),
    "J2": tensor_K(disjoint_union(euclidean(2), euclidean(2))),
    "B2": tensor_K(leaf_half_line()),
    "B3": tensor_K(leaf_half_line()),
    "J3": tensor_K(times_euclidean(times_circle(euclidean(2)), 2)),
    "CF3": tensor_K(times_euclidean(sphere(3), 2)),
}


def ktable(d: KDescriptor) -> KGroups:
    """K0/K1 ranks and generator labels of a catalogue descriptor.

    Rules: ⊗K and ⋊R^2 (Thom–Connes) are identities; ×R^2 is the Bott
    degree-preserving shift (labels gain a [b]⊠ factor); ×R swaps degrees;
    ×S^1 mixes both degrees; disjoint unions add.
    """
    if d.op == "atom":
        try:
            return _ATOMS[d.args[0]]
        except KeyError:
            raise CatalogueError(f"no atom rule for {d.args[0]!r}") from None
    if d.op == "euclidean":
        return _euclidean_groups(d.args[0])
    if d.op == "sphere":
        try:
            return _SPHERES[d.args[0]]
        except KeyError:
            raise CatalogueError(f"no sphere rule for S^{d.args[0]}") from None
    if d.op == "half_line":
        sign = d.args[0]
        return KGroups(0, 1, (), (f"[u{sign}]",))
    if d.op == "named":
        try:
            return _NAMED[d.args[0]]
        except KeyError:
            raise CatalogueError(f"no named entry {d.args[0]!r}") from None
    if d.op in ("tensor_K", "crossed_R2"):
        return ktable(d.args[0])
    if d.op == "times_euclidean":
        g = ktable(d.args[0])
        k = d.args[1]
        if k % 2 == 1:
            g = KGroups(g.k1, g.k0, g.gens1, g.gens0)
            k -= 1
        pre = "[b]⊠" * (k // 2)
        if not pre:
            return g
        return KGroups(g.k0, g.k1,
                       tuple(pre + s for s in g.gens0),
                       tuple(pre + s for s in g.gens1))
    if d.op == "times_circle":
        g = ktable(d.args[0])
        gens0 = tuple(s + "⊠[1]" for s in g.gens0) + tuple(s + "⊠[Id]" for s in g.gens1)
        gens1 = tuple(s + "⊠[1]" for s in g.gens1) + tuple(s + "⊠[Id]" for s in g.gens0)
        return KGroups(g.k0 + g.k1, g.k0 + g.k1, gens0, gens1)
    if d.op == "union":
        parts = [ktable(a) for a in d.args]
        return KGroups(sum(p.k0 for p in parts), sum(p.k1 for p in parts),
                       tuple(s for p in parts for s in p.gens0),
                       tuple(s for p in parts for s in p.gens1))
    raise CatalogueError(f"no rule for descriptor op {d.op!r}")
