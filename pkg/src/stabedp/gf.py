"""Exact linear and symplectic algebra over Z_p.

Vectors of Z_p^{2n} use the split convention ``(a_1..a_n | b_1..b_n)``, where
the a-part carries X exponents and the b-part carries Z exponents.  The
symplectic product is

    <(a|b), (c|d)> = sum_i b_i c_i - a_i d_i   (mod p)

Row reduction is done on small numpy integer matrices; everything here is
exact modular arithmetic, no floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np


@lru_cache(maxsize=None)
def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"modulus must be prime, got {p}")


@dataclass(frozen=True)
class GFVector:
    """A vector of Z_p^{2n} in split (a|b) layout."""

    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        _check_prime(self.p)
        if len(self.coords) % 2:
            raise ValueError("symplectic vectors need even length")
        if any(not 0 <= c < self.p for c in self.coords):
            object.__setattr__(self, "coords", tuple(int(c) % self.p for c in self.coords))
        else:
            object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @classmethod
    def from_parts(cls, p: int, a: Sequence[int], b: Sequence[int]) -> GFVector:
        if len(a) != len(b):
            raise ValueError("a and b parts differ in length")
        return cls(p, tuple(a) + tuple(b))

    @classmethod
    def parse(cls, text: str, p: int = 2) -> GFVector:
        """Parse ``"1111|0000"`` (single-digit residues) or ``"1 1|0 2"``."""
        left, right = text.strip().strip("()").split("|")
        conv = (lambda s: [int(c) for c in s.split()]) if " " in text.strip() else (
            lambda s: [int(c) for c in s.strip()])
        return cls.from_parts(p, conv(left), conv(right))

    @classmethod
    def zero(cls, n: int, p: int) -> GFVector:
        return cls(p, (0,) * (2 * n))

    @classmethod
    def from_index(cls, index: int, n: int, p: int) -> GFVector:
        digits = []
        for _ in range(2 * n):
            index, r = divmod(index, p)
            digits.append(r)
        return cls(p, tuple(reversed(digits)))

    @property
    def n(self) -> int:
        return len(self.coords) // 2

    @property
    def a(self) -> tuple[int, ...]:
        return self.coords[: self.n]

    @property
    def b(self) -> tuple[int, ...]:
        return self.coords[self.n:]

    @property
    def index(self) -> int:
        """Base-p integer with the first coordinate most significant (lex order)."""
        idx = 0
        for c in self.coords:
            idx = idx * self.p + c
        return idx

    @property
    def bits(self) -> tuple[int, int]:
        """Bit-packed (a, b) words; only meaningful for p = 2."""
        a = b = 0
        for i in range(self.n):
            a |= self.coords[i] << i
            b |= self.coords[self.n + i] << i
        return a, b

    def is_zero(self) -> bool:
        return not any(self.coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=np.int64)

    def _check(self, other: GFVector) -> None:
        if self.p != other.p or len(self.coords) != len(other.coords):
            raise ValueError("vector modulus or dimension mismatch")

    def __add__(self, other: GFVector) -> GFVector:
        self._check(other)
        return GFVector(self.p, tuple((x + y) % self.p for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: GFVector) -> GFVector:
        self._check(other)
        return GFVector(self.p, tuple((x - y) % self.p for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> GFVector:
        return GFVector(self.p, tuple((-x) % self.p for x in self.coords))

    def scale(self, c: int) -> GFVector:
        return GFVector(self.p, tuple((c * x) % self.p for x in self.coords))

    def star(self) -> GFVector:
        """(a | -b): the label of the entrywise complex conjugate operator."""
        return GFVector.from_parts(self.p, self.a, [(-x) % self.p for x in self.b])

    def __str__(self) -> str:
        sep = "" if self.p < 10 else " "
        return "(" + sep.join(map(str, self.a)) + "|" + sep.join(map(str, self.b)) + ")"


def symplectic_product(x: GFVector, y: GFVector) -> int:
    x._check(y)
    if x.p == 2:
        xa, xb = x.bits
        ya, yb = y.bits
        return (bin(xb & ya).count("1") + bin(xa & yb).count("1")) & 1
    n = x.n
    s = 0
    for i in range(n):
        s += x.coords[n + i] * y.coords[i] - x.coords[i] * y.coords[n + i]
    return s % x.p


def form_matrix(X: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    """Matrix of symplectic products between the rows of X and the rows of Y."""
    X = np.atleast_2d(X)
    Y = np.atleast_2d(Y)
    n = X.shape[1] // 2
    return (X[:, n:] @ Y[:, :n].T - X[:, :n] @ Y[:, n:].T) % p


def as_matrix(vectors: Sequence[GFVector], width: int | None = None) -> np.ndarray:
    if not vectors:
        return np.zeros((0, width or 0), dtype=np.int64)
    return np.array([v.coords for v in vectors], dtype=np.int64)


# -- row reduction -----------------------------------------------------------

def rref(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form mod p; zero rows are dropped."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        others = np.nonzero(A[:, c])[0]
        for o in others:
            if o != r:
                A[o] = (A[o] - A[o, c] * A[r]) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M: np.ndarray, p: int) -> int:
    if np.size(M) == 0:
        return 0
    return len(rref(M, p)[1])


def nullspace(M: np.ndarray, p: int, cols: int | None = None) -> np.ndarray:
    """Basis (rows, in RREF) of {x : M x = 0 mod p}."""
    M = np.asarray(M, dtype=np.int64)
    cols = M.shape[-1] if cols is None else cols
    if M.size == 0:
        return np.eye(cols, dtype=np.int64)
    R, piv = rref(M, p)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(piv):
            v[pc] = (-R[i, f]) % p
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.int64)
    return rref(np.array(basis), p)[0]


def solve_affine(M: np.ndarray, rhs: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray] | None:
    """Solutions of M x = rhs as (particular, kernel basis), or None.

    The particular solution is the lexicographically smallest one: it is
    reduced against the RREF kernel basis so it vanishes on every kernel pivot.
    """
    M = np.atleast_2d(np.asarray(M, dtype=np.int64))
    rhs = np.asarray(rhs, dtype=np.int64).reshape(-1)
    cols = M.shape[1]
    R, piv = rref(np.hstack([M, rhs[:, None]]), p)
    if cols in piv:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = R[i, cols]
    K = nullspace(M, p, cols)
    return reduce_against(x, K, p), K


def reduce_against(x: np.ndarray, R: np.ndarray, p: int) -> np.ndarray:
    """Clear the pivot coordinates of RREF rows R from x (canonical coset rep)."""
    x = np.array(x, dtype=np.int64) % p
    for row in R:
        pc = int(np.nonzero(row)[0][0])
        if x[pc]:
            x = (x - x[pc] * row) % p
    return x


# -- subspaces ----------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    """A subspace of Z_p^{ambient_dim}, held by its unique RREF basis."""

    p: int
    ambient_dim: int
    basis: tuple[GFVector, ...]
    pivots: tuple[int, ...] = field(compare=False, default=())

    @classmethod
    def span(cls, vectors: Iterable[GFVector], p: int | None = None,
             ambient_dim: int | None = None) -> Subspace:
        vectors = list(vectors)
        if vectors:
            p = vectors[0].p
            ambient_dim = len(vectors[0].coords)
        if p is None or ambient_dim is None:
            raise ValueError("empty span needs p and ambient_dim")
        return cls.from_matrix(as_matrix(vectors, ambient_dim), p, ambient_dim)

    @classmethod
    def from_matrix(cls, M: np.ndarray, p: int, ambient_dim: int | None = None) -> Subspace:
        M = np.atleast_2d(np.asarray(M, dtype=np.int64))
        ambient_dim = M.shape[1] if ambient_dim is None else ambient_dim
        if M.size == 0:
            return cls(p, ambient_dim, (), ())
        R, piv = rref(M, p)
        return cls(p, ambient_dim, tuple(GFVector(p, tuple(r)) for r in R), tuple(piv))

    @classmethod
    def full(cls, n: int, p: int) -> Subspace:
        return cls.from_matrix(np.eye(2 * n, dtype=np.int64), p)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return self.ambient_dim // 2

    def matrix(self) -> np.ndarray:
        return as_matrix(self.basis, self.ambient_dim)

    def reduce(self, x: GFVector) -> GFVector:
        """Canonical representative of x + self (zero on every pivot column)."""
        return GFVector(self.p, tuple(reduce_against(x.array(), self.matrix(), self.p)))

    def __contains__(self, x: GFVector) -> bool:
        return self.reduce(x).is_zero()

    def contains_subspace(self, other: Subspace) -> bool:
        return all(v in self for v in other.basis)

    def elements(self) -> Iterator[GFVector]:
        """All p^dim elements, ordered by coefficient tuple."""
        M = self.matrix()
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            v = (np.array(coeffs, dtype=np.int64) @ M) % self.p if self.dim else np.zeros(
                self.ambient_dim, dtype=np.int64)
            yield GFVector(self.p, tuple(v))

    def element_array(self) -> np.ndarray:
        """All elements as an integer array of shape (p^dim, ambient_dim)."""
        coeffs = np.array(list(itertools.product(range(self.p), repeat=self.dim)),
                          dtype=np.int64).reshape(-1, self.dim)
        if self.dim == 0:
            return np.zeros((1, self.ambient_dim), dtype=np.int64)
        return (coeffs @ self.matrix()) % self.p

    def __str__(self) -> str:
        return "<" + ", ".join(map(str, self.basis)) + ">"


def orthogonal_complement(C: Subspace) -> Subspace:
    n = C.n
    if C.dim == 0:
        return Subspace.full(n, C.p)
    B = C.matrix()
    # <c, y> = sum c_b y_a - c_a y_b  ->  linear functional (c_b | -c_a) on y
    F = np.hstack([B[:, n:], (-B[:, :n]) % C.p])
    return Subspace.from_matrix(nullspace(F, C.p, 2 * n), C.p, 2 * n)


def is_self_orthogonal(C: Subspace) -> bool:
    if C.dim == 0:
        return True
    return not form_matrix(C.matrix(), C.matrix(), C.p).any()


# -- hyperbolic bases -----------------------------------------------------------

@dataclass(frozen=True)
class HyperbolicExtension:
    """Hyperbolic basis xi_1..xi_n, eta_1..eta_n of Z_p^{2n}."""

    xi: tuple[GFVector, ...]
    eta: tuple[GFVector, ...]

    @property
    def p(self) -> int:
        return self.xi[0].p

    @property
    def n(self) -> int:
        return len(self.xi)

    def relation_defects(self) -> list[str]:
        """Every violated relation of the hyperbolic table (empty when valid)."""
        p = self.p
        X, E = as_matrix(self.xi), as_matrix(self.eta)
        bad = []
        XE = form_matrix(X, E, p)
        if not np.array_equal(XE, np.eye(self.n, dtype=np.int64) % p):
            bad.append("<xi_i, eta_j> != delta_ij")
        if form_matrix(X, X, p).any():
            bad.append("<xi_i, xi_j> != 0")
        if form_matrix(E, E, p).any():
            bad.append("<eta_i, eta_j> != 0")
        return bad

    def is_valid(self) -> bool:
        return len(self.xi) == len(self.eta) and not self.relation_defects()


def _lex_min_solution(constraints: np.ndarray, rhs: np.ndarray, p: int, dim: int) -> np.ndarray:
    if len(constraints) == 0:
        return np.zeros(dim, dtype=np.int64)
    sol = solve_affine(constraints, rhs, p)
    if sol is None:
        raise ValueError("no partner vector satisfies the constraints")
    return sol[0]


def _functionals(vectors: np.ndarray, p: int) -> np.ndarray:
    """Rows f such that f . y = <v, y> for each row v."""
    n = vectors.shape[1] // 2
    return np.hstack([vectors[:, n:], (-vectors[:, :n]) % p]) % p


def complete_hyperbolic(xi_low: Sequence[GFVector], n: int | None = None,
                        p: int | None = None) -> HyperbolicExtension:
    """Extend isotropic independent xi_1..xi_r to a full hyperbolic basis.

    Symplectic Gram-Schmidt.  Each eta partner is the lexicographically
    smallest vector satisfying its linear constraints; each new xi is the first
    RREF row of the space orthogonal to everything chosen so far.
    """
    xi_low = list(xi_low)
    if xi_low:
        p, n = xi_low[0].p, xi_low[0].n
    if n is None or p is None:
        raise ValueError("empty input needs n and p")
    r = len(xi_low)
    dim = 2 * n
    X = as_matrix(xi_low, dim)
    if rank(X, p) != r:
        raise ValueError("input vectors are linearly dependent")
    if r and form_matrix(X, X, p).any():
        raise ValueError("input vectors are not mutually symplectic-orthogonal")

    xis = [x.array() for x in xi_low]
    etas: list[np.ndarray] = []

    def partner(i: int) -> np.ndarray:
        # <xi_j, eta> = delta_ij for every xi so far, <eta_j, eta> = 0 for earlier etas
        rows = np.array(xis + etas, dtype=np.int64).reshape(-1, dim)
        rhs = np.zeros(len(rows), dtype=np.int64)
        rhs[i] = 1
        return _lex_min_solution(_functionals(rows, p), rhs, p, dim)

    for i in range(r):
        etas.append(partner(i))
    for i in range(r, n):
        rows = np.array(xis + etas, dtype=np.int64).reshape(-1, dim)
        perp = nullspace(_functionals(rows, p), p, dim)
        xis.append(perp[0])
        etas.append(partner(i))
    return HyperbolicExtension(tuple(GFVector(p, tuple(v)) for v in xis),
                               tuple(GFVector(p, tuple(v)) for v in etas))


def complete_low_partners(xi_low: Sequence[GFVector], xi_high: Sequence[GFVector],
                          eta_high: Sequence[GFVector]) -> HyperbolicExtension:
    """Fill in eta_1..eta_r for fixed xi_low and a fixed high hyperbolic block."""
    p, n = xi_low[0].p if xi_low else xi_high[0].p, (xi_low or xi_high)[0].n
    dim = 2 * n
    fixed = [v.array() for v in list(xi_low) + list(xi_high) + list(eta_high)]
    etas: list[np.ndarray] = []
    for i in range(len(xi_low)):
        rows = np.array(fixed + etas, dtype=np.int64)
        rhs = np.zeros(len(rows), dtype=np.int64)
        rhs[i] = 1
        etas.append(_lex_min_solution(_functionals(rows, p), rhs, p, dim))
    ext = HyperbolicExtension(
        tuple(xi_low) + tuple(xi_high),
        tuple(GFVector(p, tuple(v)) for v in etas) + tuple(eta_high))
    if not ext.is_valid():
        raise ValueError("high block is not a hyperbolic basis modulo the stabilizer: "
                         + "; ".join(ext.relation_defects()))
    return ext


# -- quotient C-perp / C ----------------------------------------------------------

class StandardSpace:
    """Z_p^{2k} with the standard form; coordinates are the vectors themselves."""

    def __init__(self, k: int, p: int):
        _check_prime(p)
        self.k, self.p = k, p

    @property
    def dim(self) -> int:
        return 2 * self.k

    def from_coords(self, c: Sequence[int]) -> GFVector:
        return GFVector(self.p, tuple(int(x) % self.p for x in c))

    def gram(self) -> np.ndarray:
        I = np.eye(2 * self.k, dtype=np.int64)
        return form_matrix(I, I, self.p)


class QuotientSpace:
    """The 2k-dimensional symplectic space C-perp / C.

    Coordinates: a coset u + C maps to w = (l | m) with u = sum l_j Y_j + m_j X_j
    (mod C), where X_j, Y_j is a fixed hyperbolic basis of the quotient.  The
    coordinate map preserves the symplectic form.
    """

    def __init__(self, C: Subspace, Cperp: Subspace | None = None):
        if not is_self_orthogonal(C):
            raise ValueError("C is not self-orthogonal")
        self.C = C
        self.Cperp = orthogonal_complement(C) if Cperp is None else Cperp
        if not self.Cperp.contains_subspace(C):
            raise ValueError("C is not contained in Cperp")
        self.p, self.n = C.p, C.n
        self.k = (self.Cperp.dim - C.dim) // 2
        ext = complete_hyperbolic(C.basis, n=self.n, p=self.p)
        r = C.dim
        self.X = tuple(C.reduce(v) for v in ext.xi[r:])
        self.Y = tuple(C.reduce(v) for v in ext.eta[r:])
        self._X = as_matrix(self.X, 2 * self.n)
        self._Y = as_matrix(self.Y, 2 * self.n)

    @property
    def dim(self) -> int:
        return 2 * self.k

    def _check_member(self, x: GFVector) -> None:
        if x not in self.Cperp:
            raise ValueError(f"{x} is not in C-perp")

    def canonical_rep(self, x: GFVector) -> GFVector:
        self._check_member(x)
        return self.C.reduce(x)

    def inner(self, x: GFVector, y: GFVector) -> int:
        self._check_member(x)
        self._check_member(y)
        return symplectic_product(x, y)

    def coords(self, x: GFVector) -> tuple[int, ...]:
        self._check_member(x)
        return tuple(self.coords_array(x.array()[None, :])[0])

    def coords_array(self, U: np.ndarray) -> np.ndarray:
        """Quotient coordinates of many C-perp rows at once (no membership check)."""
        ell = form_matrix(self._X, U, self.p).T
        m = form_matrix(U, self._Y, self.p)
        return np.hstack([ell, m]).reshape(len(U), 2 * self.k)

    def from_coords(self, c: Sequence[int]) -> GFVector:
        c = np.asarray(c, dtype=np.int64)
        k = self.k
        v = (c[:k] @ self._Y + c[k:] @ self._X) % self.p if k else np.zeros(2 * self.n, np.int64)
        return self.C.reduce(GFVector(self.p, tuple(v)))

    def gram(self) -> np.ndarray:
        B = np.vstack([self._Y, self._X]) if self.k else np.zeros((0, 2 * self.n), np.int64)
        return form_matrix(B, B, self.p)


def quotient_space(C: Subspace, Cperp: Subspace | None = None) -> QuotientSpace:
    return QuotientSpace(C, Cperp)


# -- enumerations ---------------------------------------------------------------

def enumerate_self_orthogonal(n: int, k: int, p: int) -> Iterator[Subspace]:
    """Every (n-k)-dimensional self-orthogonal subspace of Z_p^{2n}, once each.

    Depth-first over RREF pivot structures: pivot sets in lexicographic order,
    then the free entries row by row, pruning rows that fail orthogonality with
    the rows already fixed.
    """
    _check_prime(p)
    r = n - k
    if not 0 <= r <= n:
        raise ValueError("need 0 <= n-k <= n")
    dim = 2 * n
    if r == 0:
        yield Subspace(p, dim, (), ())
        return
    for piv in itertools.combinations(range(dim), r):
        pivset = set(piv)
        free_cols = [[c for c in range(pc + 1, dim) if c not in pivset] for pc in piv]
        yield from _dfs_rows(piv, free_cols, [], p, dim)


def _dfs_rows(piv, free_cols, rows, p, dim):
    i = len(rows)
    if i == len(piv):
        yield Subspace(p, dim, tuple(GFVector(p, tuple(r)) for r in rows), tuple(piv))
        return
    fc = free_cols[i]
    prev = np.array(rows, dtype=np.int64) if rows else None
    for vals in itertools.product(range(p), repeat=len(fc)):
        row = np.zeros(dim, dtype=np.int64)
        row[piv[i]] = 1
        row[fc] = vals
        if prev is not None and form_matrix(prev, row, p).any():
            continue
        yield from _dfs_rows(piv, free_cols, rows + [row], p, dim)


@lru_cache(maxsize=None)
def standard_hyperbolic_bases(k: int, p: int) -> np.ndarray:
    """All ordered hyperbolic bases of standard Z_p^{2k}.

    Shape (|Sp_2k|, 2k, 2k); rows 0..k-1 are x_1..x_k, rows k..2k-1 are
    y_1..y_k with <x_i, y_j> = delta_ij.  Order: x_1 over nonzero vectors in
    lex order, then y_1 over its valid partners in lex order, then recurse on
    the complement of span(x_1, y_1).
    """
    _check_prime(p)
    dim = 2 * k
    out: list[np.ndarray] = []

    def rec(W: np.ndarray, xs: list, ys: list):
        if len(xs) == k:
            out.append(np.array(xs + ys, dtype=np.int64).reshape(dim, dim))
            return
        d = len(W)
        elems = [(np.array(c, dtype=np.int64) @ W) % p
                 for c in itertools.product(range(p), repeat=d)]
        elems.sort(key=lambda v: tuple(v))
        for x in elems:
            if not x.any():
                continue
            for y in elems:
                if form_matrix(x, y, p)[0, 0] != 1:
                    continue
                F = _functionals(np.array([x, y]), p)
                # restrict to W: coefficient vectors c with (c W) orthogonal to x, y
                cons = (W @ F.T).T % p
                sub = nullspace(cons, p, d)
                rec((sub @ W) % p if len(sub) else np.zeros((0, dim), np.int64),
                    xs + [x], ys + [y])

    rec(np.eye(dim, dtype=np.int64), [], [])
    if not out:
        return np.zeros((1, 0, 0), dtype=np.int64)
    return np.array(out)


def enumerate_hyperbolic_bases(space: StandardSpace | QuotientSpace
                               ) -> Iterator[tuple[tuple[GFVector, ...], tuple[GFVector, ...]]]:
    """Every ordered hyperbolic basis (x_1..x_k, y_1..y_k) of a symplectic space."""
    G = space.gram()
    if rank(G, space.p) != space.dim:
        raise ValueError("symplectic form is degenerate")
    k = space.k
    for B in standard_hyperbolic_bases(k, space.p):
        xs = tuple(space.from_coords(B[i]) for i in range(k))
        ys = tuple(space.from_coords(B[k + i]) for i in range(k))
        yield xs, ys


# -- counting -------------------------------------------------------------------

def sp_order(m: int, p: int) -> int:
    """|Sp_{2m}(Z_p)| = p^{m^2} prod_{i=1}^m (p^{2i} - 1)."""
    out = p ** (m * m)
    for i in range(1, m + 1):
        out *= p ** (2 * i) - 1
    return out


def selforth_count(n: int, k: int, p: int) -> int:
    """Number of (n-k)-dimensional self-orthogonal subspaces of Z_p^{2n}."""
    num = den = 1
    for i in range(n - k):
        num *= p ** (2 * n - i) - p ** i
        den *= p ** (n - k) - p ** i
    assert num % den == 0
    return num // den


def reduction_factor(n: int, k: int, p: int) -> int:
    """p^{n^2-k^2} prod_{i=1}^{n-k} (p^i - 1)."""
    out = p ** (n * n - k * k)
    for i in range(1, n - k + 1):
        out *= p ** i - 1
    return out
