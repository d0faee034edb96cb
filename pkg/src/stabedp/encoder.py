"""Encoding-operator data, equivalence classes, and the classical maps f and g.

An encoding class for a fixed stabilizer C is a hyperbolic basis of the
quotient C-perp / C, stored as canonical coset representatives:

    H rows = xi_{n-k+1..n} + C,   G rows = eta_{n-k+1..n} + C.

The class alone fixes the decoding map g: C-perp -> Z_p^{2k},
u = l G + m H + v (v in C)  ->  (l | m), which is all that matters for
Bell-diagonal inputs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gf import (
    GFVector,
    HyperbolicExtension,
    Subspace,
    as_matrix,
    complete_hyperbolic,
    complete_low_partners,
    form_matrix,
    orthogonal_complement,
)
from .pauli import PauliElement, Stabilizer, mu, omega_exponent_to_phase, syndrome, syndrome_array


@dataclass(frozen=True)
class EncodingClass:
    p: int
    n: int
    k: int
    C: Subspace
    G: tuple[GFVector, ...]
    H: tuple[GFVector, ...]

    def g_matrix(self) -> np.ndarray:
        return as_matrix(self.G, 2 * self.n)

    def h_matrix(self) -> np.ndarray:
        return as_matrix(self.H, 2 * self.n)


def _quotient_defects(C: Subspace, G: Sequence[GFVector], H: Sequence[GFVector]) -> list[str]:
    p, k = C.p, len(G)
    bad = []
    if len(H) != k:
        bad.append("G and H differ in length")
        return bad
    Gm, Hm = as_matrix(G, C.ambient_dim), as_matrix(H, C.ambient_dim)
    if C.dim and k and (form_matrix(C.matrix(), np.vstack([Gm, Hm]), p).any()):
        bad.append("a G or H row is not in C-perp")
    if k:
        if not np.array_equal(form_matrix(Hm, Gm, p), np.eye(k, dtype=np.int64)):
            bad.append("<H_i, G_j> != delta_ij")
        if form_matrix(Hm, Hm, p).any() or form_matrix(Gm, Gm, p).any():
            bad.append("H or G block is not isotropic")
    return bad


def make_class(C: Subspace, G: Sequence[GFVector], H: Sequence[GFVector]) -> EncodingClass:
    """Canonicalize rows mod C and check they form a hyperbolic basis of C-perp / C."""
    bad = _quotient_defects(C, G, H)
    if bad:
        raise ValueError("not a hyperbolic basis of C-perp/C: " + "; ".join(bad))
    k = len(G)
    if C.dim + k != C.n:
        raise ValueError(f"expected {C.n - C.dim} hyperbolic pairs, got {k}")
    return EncodingClass(C.p, C.n, k, C, tuple(C.reduce(g) for g in G), tuple(C.reduce(h) for h in H))


def build_class(ext: HyperbolicExtension, C: Subspace) -> EncodingClass:
    r = C.dim
    if Subspace.span(ext.xi[:r], C.p, C.ambient_dim) != C:
        raise ValueError("extension's leading xi vectors do not span C")
    return make_class(C, ext.eta[r:], ext.xi[r:])


def class_equal(a: EncodingClass, b: EncodingClass) -> bool:
    if a.C != b.C:
        raise ValueError("classes belong to different stabilizers")
    return a.G == b.G and a.H == b.H


def default_class(S: Stabilizer) -> EncodingClass:
    """Class of the deterministic Gram-Schmidt completion of the generators."""
    ext = complete_hyperbolic(S.generators, n=S.n, p=S.p)
    return build_class(ext, S.subspace)


def lift_class(cls: EncodingClass, S: Stabilizer) -> HyperbolicExtension:
    """A full hyperbolic extension of S's generators realizing the class."""
    return complete_low_partners(S.generators, cls.H, cls.G)


# -- the maps g and f --------------------------------------------------------------

def g_array(U: np.ndarray, cls: EncodingClass) -> np.ndarray:
    """Rows (l | m) for many C-perp rows U; l_j = <H_j, u>, m_j = <u, G_j>."""
    U = np.atleast_2d(U)
    if cls.k == 0:
        return np.zeros((len(U), 0), dtype=np.int64)
    ell = form_matrix(cls.h_matrix(), U, cls.p).T
    m = form_matrix(U, cls.g_matrix(), cls.p)
    return np.hstack([ell, m])


def g_map(u: GFVector, cls: EncodingClass) -> GFVector:
    if u not in orthogonal_complement(cls.C):
        raise ValueError(f"{u} is not in C-perp")
    return GFVector(cls.p, tuple(g_array(u.array()[None, :], cls)[0]))


@dataclass
class FRule:
    """Correction representatives t'(s) for each accepted syndrome difference s."""

    reps: dict[tuple[int, ...], GFVector] = field(default_factory=dict)

    @classmethod
    def zero(cls, S: Stabilizer) -> FRule:
        return cls({(0,) * S.r: GFVector.zero(S.n, S.p)})

    def t_prime(self, s: Sequence[int]) -> GFVector:
        try:
            return self.reps[tuple(s)]
        except KeyError:
            raise ValueError(f"no correction representative for syndrome {tuple(s)}") from None


def f_map(t: GFVector, f: FRule, S: Stabilizer) -> GFVector:
    return t - f.t_prime(syndrome(t, S))


def most_likely_frule(S: Stabilizer, P_in, T: Sequence[Sequence[int]] | None = None) -> FRule:
    """t'(s) = argmax of P_in over D(s), ties to the lexicographically smallest t."""
    from .edp import all_vectors

    V = all_vectors(S.n, S.p)
    syn = syndrome_array(V, S)
    targets = [tuple(s) for s in T] if T is not None else list(
        itertools.product(range(S.p), repeat=S.r))
    reps = {}
    for s in targets:
        mask = np.all(syn == np.array(s, dtype=np.int64), axis=1)
        idx = np.flatnonzero(mask)
        best = idx[int(np.argmax(P_in.probs[idx]))]
        reps[s] = GFVector(S.p, tuple(V[best]))
    return FRule(reps)


# -- protocol specs ------------------------------------------------------------------

@dataclass(frozen=True)
class ProtocolSpec:
    stabilizer: Stabilizer
    cls: EncodingClass
    T: tuple[tuple[int, ...], ...] = ()
    f: FRule | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.T:
            object.__setattr__(self, "T", ((0,) * self.stabilizer.r,))
        if self.cls.C != self.stabilizer.subspace:
            raise ValueError("encoding class belongs to a different stabilizer")

    @classmethod
    def from_class(cls, S: Stabilizer, enc: EncodingClass, T=None) -> ProtocolSpec:
        return cls(S, enc, tuple(tuple(s) for s in T) if T else ())

    @property
    def p(self) -> int:
        return self.stabilizer.p

    @property
    def n(self) -> int:
        return self.stabilizer.n

    @property
    def k(self) -> int:
        return self.stabilizer.k

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "k": self.k,
            "xi": [list(v.coords) for v in self.stabilizer.generators],
            "eta_high": [list(v.coords) for v in self.cls.G],
            "xi_high": [list(v.coords) for v in self.cls.H],
            "lambda": list(self.stabilizer.lam),
            "T": [list(s) for s in self.T],
        }

    def to_json(self) -> str:
        """Canonical one-line JSON; parse(to_json()) round-trips bit-exactly."""
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> ProtocolSpec:
        p, n = int(d["p"]), int(d["n"])
        vec = lambda row: GFVector(p, tuple(int(x) for x in row))  # noqa: E731
        S = Stabilizer.from_generators([vec(r) for r in d["xi"]], d.get("lambda"), n=n, p=p)
        enc = make_class(S.subspace, [vec(r) for r in d["eta_high"]], [vec(r) for r in d["xi_high"]])
        if "k" in d and int(d["k"]) != enc.k:
            raise ValueError("k disagrees with the number of hyperbolic pairs")
        return cls.from_class(S, enc, d.get("T"))

    @classmethod
    def from_json(cls, text: str) -> ProtocolSpec:
        return cls.from_dict(json.loads(text))


# -- concrete encoder parameters -----------------------------------------------------

@dataclass(frozen=True)
class EncoderParams:
    """Everything needed to materialize one encoding operator.

    theta_x, theta_z are omega exponents.  theta_z entries for the first n-k
    generators are forced by the eigenvalue labels; entries after that may be
    None and are resolved when the code state is built (each choice picks a
    different one-dimensional Q_min(0) inside Q(0)).
    """

    stabilizer: Stabilizer
    ext: HyperbolicExtension
    theta_x: tuple[int, ...]
    theta_z: tuple[int | None, ...]

    @classmethod
    def create(cls, S: Stabilizer, ext: HyperbolicExtension, theta_x: Sequence[int] | None = None,
               theta_z_high: Sequence[int | None] | None = None, strict: bool = True) -> EncoderParams:
        """strict=False skips the hyperbolic checks (for tabulating operators only)."""
        if tuple(ext.xi[: S.r]) != tuple(S.generators):
            raise ValueError("extension must start with the stabilizer generators")
        if strict and not ext.is_valid():
            raise ValueError("invalid hyperbolic extension: " + "; ".join(ext.relation_defects()))
        n, p = S.n, S.p
        theta_x = tuple(int(x) % p for x in theta_x) if theta_x is not None else (0,) * n
        low = []
        for xi, lam in zip(S.generators, S.lam):
            if p == 2:
                # theta_z * mu(xi) = conj(lambda), in units of i
                e = (-lam - mu(xi)) % 4
                low.append(e // 2)
            else:
                low.append((-lam) % p)
        high = tuple(theta_z_high) if theta_z_high is not None else (None,) * S.k
        if len(theta_x) != n or len(high) != S.k:
            raise ValueError("wrong number of phase exponents")
        return cls(S, ext, theta_x, tuple(low) + tuple(None if h is None else int(h) % p for h in high))

    @classmethod
    def for_spec(cls, spec: ProtocolSpec, **kw) -> EncoderParams:
        return cls.create(spec.stabilizer, lift_class(spec.cls, spec.stabilizer), **kw)

    @property
    def p(self) -> int:
        return self.stabilizer.p

    @property
    def n(self) -> int:
        return self.stabilizer.n

    def encoding_class(self) -> EncodingClass:
        return build_class(self.ext, self.stabilizer.subspace)


def encoded_x(params: EncoderParams, i: int) -> PauliElement:
    """theta_x(f_i) [mu(eta_i)] XZ(eta_i)."""
    eta = params.ext.eta[i]
    ph = omega_exponent_to_phase(params.p, params.theta_x[i]) + (mu(eta) if params.p == 2 else 0)
    return PauliElement(params.p, eta, ph)


def encoded_z(params: EncoderParams, i: int, theta: int | None = None) -> PauliElement:
    """theta_z(f_i) [mu(xi_i)] XZ(xi_i); an unresolved theta counts as 0."""
    xi = params.ext.xi[i]
    th = params.theta_z[i] if theta is None else theta
    ph = omega_exponent_to_phase(params.p, th or 0) + (mu(xi) if params.p == 2 else 0)
    return PauliElement(params.p, xi, ph)


def check_class_symplectic(cls: EncodingClass, U: np.ndarray) -> bool:
    """<u, v> == <g(u), g(v)> for all pairs of rows of U (all in C-perp)."""
    W = g_array(U, cls)
    return np.array_equal(form_matrix(U, U, cls.p), form_matrix(W, W, cls.p))

