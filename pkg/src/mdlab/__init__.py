"""mdlab: a verification laboratory for 5-dimensional solvable Lie algebras
with 4-dimensional commutative derived ideals, their coadjoint-orbit
foliations, and the K-theoretic index invariants of the two non-trivial
foliation types."""

__version__ = "0.1.0"

from .liealg import MD5Family, LieAlgebra, build_md5  # noqa: F401
from .orbits import md_verify, coadjoint_flow, closed_form_orbit  # noqa: F401
from .invariants import index_invariant  # noqa: F401
