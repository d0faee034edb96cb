"""Random generators and brute-force references shared by the test modules."""

from __future__ import annotations

import itertools

import numpy as np

from stabedp.encoder import ProtocolSpec, make_class
from stabedp.gf import GFVector, Subspace, enumerate_self_orthogonal, quotient_space, standard_hyperbolic_bases
from stabedp.pauli import Stabilizer


def random_vector(rng: np.random.Generator, n: int, p: int) -> GFVector:
    return GFVector(p, tuple(int(x) for x in rng.integers(0, p, 2 * n)))


def brute_symplectic(x: GFVector, y: GFVector) -> int:
    n = x.n
    return sum(x.coords[n + i] * y.coords[i] - x.coords[i] * y.coords[n + i] for i in range(n)) % x.p


def all_gf_vectors(n: int, p: int):
    for c in itertools.product(range(p), repeat=2 * n):
        yield GFVector(p, c)


_SUBSPACES: dict = {}


def subspaces(n: int, k: int, p: int) -> list[Subspace]:
    key = (n, k, p)
    if key not in _SUBSPACES:
        _SUBSPACES[key] = list(enumerate_self_orthogonal(n, k, p))
    return _SUBSPACES[key]


def random_spec(rng: np.random.Generator, n: int, k: int, p: int, T=None) -> ProtocolSpec:
    """Uniform over stabilizers and classes, with random valid eigenvalue labels."""
    C = subspaces(n, k, p)[int(rng.integers(len(subspaces(n, k, p))))]
    B = standard_hyperbolic_bases(k, p)
    Bb = B[int(rng.integers(len(B)))]
    Q = quotient_space(C)
    H = [Q.from_coords(Bb[i]) for i in range(k)]
    G = [Q.from_coords(Bb[k + i]) for i in range(k)]
    S0 = Stabilizer.from_subspace(C)
    lam = []
    for g, l in zip(S0.generators, S0.lam):
        lam.append((l + 2 * int(rng.integers(2))) % 4 if p == 2 else int(rng.integers(p)))
    S = Stabilizer.from_generators(S0.generators, lam)
    return ProtocolSpec.from_class(S, make_class(C, G, H), T)
