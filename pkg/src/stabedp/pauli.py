"""Pauli group elements with exact phase tracking.

An element is ``phase * XZ(v)`` with ``XZ(a|b) = X^a1 Z^b1 (x) ... (x) X^an Z^bn``.
Phases are stored as integer exponents: powers of the imaginary unit (mod 4)
for p = 2, powers of omega = exp(2 pi i / p) (mod p) for odd p.  Products use
``Z X = omega X Z``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .gf import GFVector, Subspace, as_matrix, is_self_orthogonal, rank, symplectic_product


def phase_modulus(p: int) -> int:
    return 4 if p == 2 else p


def omega_exponent_to_phase(p: int, e: int) -> int:
    """Express omega^e in the phase unit used for this p."""
    return (2 * e) % 4 if p == 2 else e % p


@dataclass(frozen=True)
class PauliElement:
    p: int
    vec: GFVector
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % phase_modulus(self.p))
        if self.vec.p != self.p:
            raise ValueError("vector modulus does not match")

    @classmethod
    def identity(cls, n: int, p: int) -> PauliElement:
        return cls(p, GFVector.zero(n, p))

    @property
    def n(self) -> int:
        return self.vec.n

    def __mul__(self, other: PauliElement) -> PauliElement:
        return pauli_mul(self, other)

    def inverse(self) -> PauliElement:
        bare = PauliElement(self.p, -self.vec)
        phi = pauli_mul(self, bare).phase
        return PauliElement(self.p, -self.vec, -phi)

    def __pow__(self, e: int) -> PauliElement:
        e = int(e)
        base = self if e >= 0 else self.inverse()
        out = PauliElement.identity(self.n, self.p)
        for _ in range(abs(e)):
            out = out * base
        return out

    def conj(self) -> PauliElement:
        """Entrywise complex conjugate: (a|-b) with the conjugated phase."""
        return PauliElement(self.p, self.vec.star(), -self.phase)

    def __str__(self) -> str:
        return render(self)


def pauli_mul(A: PauliElement, B: PauliElement) -> PauliElement:
    if A.p != B.p or A.n != B.n:
        raise ValueError("Pauli elements differ in modulus or length")
    n = A.n
    # X^a Z^b X^c Z^d = omega^{bc} X^{a+c} Z^{b+d}, slot by slot
    bc = sum(A.vec.coords[n + i] * B.vec.coords[i] for i in range(n))
    return PauliElement(A.p, A.vec + B.vec, A.phase + B.phase + omega_exponent_to_phase(A.p, bc))


def commutation_exponent(A: PauliElement, B: PauliElement) -> int:
    """e with A B = omega^e B A."""
    return symplectic_product(A.vec, B.vec)


def xz_count(v: GFVector) -> int:
    """Number of slots carrying XZ (a_i = b_i = 1)."""
    return sum(1 for x, z in zip(v.a, v.b) if x == 1 and z == 1)


def mu(v: GFVector) -> int:
    """Exponent m(v) of the unit i with (i^m XZ(v))^2 = I; p = 2 only."""
    if v.p != 2:
        raise ValueError("mu is only defined for p = 2")
    return xz_count(v) % 4


def hermitian_pauli(v: GFVector) -> PauliElement:
    """mu(v) XZ(v) for p = 2 (an involution); plain XZ(v) for odd p."""
    return PauliElement(v.p, v, mu(v) if v.p == 2 else 0)


# -- text rendering ---------------------------------------------------------------

_PREFIX2 = {0: "", 1: "i ", 2: "-", 3: "-i "}


def _slot(p: int, a: int, b: int) -> str:
    if p == 2:
        return {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "XZ"}[(a, b)]
    if a == 0 and b == 0:
        return "I"
    return (f"X^{a}" if a else "") + (f"Z^{b}" if b else "")


def render(P: PauliElement) -> str:
    """E.g. ``"i XZ.Z.X.I"``; odd p uses ``X^aZ^b`` slots and a ``w^j`` prefix."""
    if P.p == 2:
        prefix = _PREFIX2[P.phase]
    else:
        prefix = f"w^{P.phase} " if P.phase else ""
    return prefix + ".".join(_slot(P.p, a, b) for a, b in zip(P.vec.a, P.vec.b))


_SLOT_RE = re.compile(r"^(?:X(?:\^(\d+))?)?(?:Z(?:\^(\d+))?)?$")


def parse_pauli(text: str, p: int = 2) -> PauliElement:
    text = text.strip()
    phase = 0
    if p == 2:
        for e, pre in sorted(_PREFIX2.items(), key=lambda kv: -len(kv[1])):
            if pre and text.startswith(pre):
                phase, text = e, text[len(pre):]
                break
    else:
        m = re.match(r"^w\^(\d+)\s+", text)
        if m:
            phase, text = int(m.group(1)), text[m.end():]
    a, b = [], []
    for tok in text.split("."):
        if tok == "I":
            a.append(0)
            b.append(0)
            continue
        m = _SLOT_RE.match(tok)
        if not m or not tok:
            raise ValueError(f"bad Pauli slot {tok!r}")
        a.append((int(m.group(1)) if m.group(1) else 1) if tok.startswith("X") else 0)
        b.append((int(m.group(2)) if m.group(2) else 1) if "Z" in tok else 0)
    return PauliElement(p, GFVector.from_parts(p, a, b), phase)


# -- stabilizers -----------------------------------------------------------------

@dataclass(frozen=True)
class Stabilizer:
    """Stabilizer generators xi_1..xi_{n-k} with eigenvalue labels of Q(0).

    ``lam[i]`` is a phase exponent (same unit as PauliElement.phase): the
    eigenvalue of XZ(xi_i) on the code space Q(0).  Outcome x_i then means
    eigenvalue lam_i * omega^{x_i}.
    """

    generators: tuple[GFVector, ...]
    lam: tuple[int, ...]
    p: int
    n: int

    @classmethod
    def from_generators(cls, generators: Sequence[GFVector], lam: Sequence[int] | None = None,
                        n: int | None = None, p: int | None = None) -> Stabilizer:
        generators = tuple(generators)
        if generators:
            p, n = generators[0].p, generators[0].n
        if p is None or n is None:
            raise ValueError("empty stabilizer needs n and p")
        C = Subspace.span(generators, p, 2 * n)
        if C.dim != len(generators):
            raise ValueError("stabilizer generators are linearly dependent")
        if not is_self_orthogonal(C):
            raise ValueError("stabilizer generators do not commute")
        if lam is None:
            lam = tuple(default_eigenvalue(g) for g in generators)
        lam = tuple(int(x) % phase_modulus(p) for x in lam)
        if len(lam) != len(generators):
            raise ValueError("one eigenvalue label per generator")
        for g, l in zip(generators, lam):
            if not is_eigenvalue(g, l):
                raise ValueError(f"phase exponent {l} is not an eigenvalue of XZ{g}")
        return cls(generators, lam, p, n)

    @classmethod
    def from_subspace(cls, C: Subspace) -> Stabilizer:
        return cls.from_generators(C.basis, n=C.n, p=C.p)

    @property
    def r(self) -> int:
        return len(self.generators)

    @property
    def k(self) -> int:
        return self.n - self.r

    @property
    def subspace(self) -> Subspace:
        return Subspace.span(self.generators, self.p, 2 * self.n)

    def elements(self) -> list[PauliElement]:
        return [PauliElement(self.p, g) for g in self.generators]

    def outcome_phase(self, i: int, x: int) -> int:
        """Phase exponent of eigenvalue lam_i * omega^x of generator i."""
        return (self.lam[i] + omega_exponent_to_phase(self.p, x)) % phase_modulus(self.p)


def default_eigenvalue(v: GFVector) -> int:
    """+1 eigenvalue of the normalized generator: conj(mu(v)) for p = 2, 1 otherwise."""
    return (-mu(v)) % 4 if v.p == 2 else 0


def is_eigenvalue(v: GFVector, lam: int) -> bool:
    if v.p == 2:
        # eigenvalues of XZ(v) are +-conj(mu(v))
        return (lam + mu(v)) % 2 == 0
    return True


def syndrome(t: GFVector, S: Stabilizer) -> tuple[int, ...]:
    return tuple(symplectic_product(xi, t) for xi in S.generators)


def syndrome_array(T: np.ndarray, S: Stabilizer) -> np.ndarray:
    """Syndromes of many error vectors (rows of T) at once."""
    G = as_matrix(S.generators, 2 * S.n)
    n = S.n
    if len(G) == 0:
        return np.zeros((len(T), 0), dtype=np.int64)
    return (T[:, :n] @ G[:, n:].T - T[:, n:] @ G[:, :n].T) % S.p


def syndrome_coset(S: Stabilizer, s: Sequence[int]) -> Iterator[GFVector]:
    """All t in Z_p^{2n} with syndrome(t) = s, in lex order."""
    s = tuple(int(x) % S.p for x in s)
    for coords in itertools.product(range(S.p), repeat=2 * S.n):
        t = GFVector(S.p, coords)
        if syndrome(t, S) == s:
            yield t


def independent(vectors: Sequence[GFVector]) -> bool:
    if not vectors:
        return True
    return rank(as_matrix(vectors), vectors[0].p) == len(vectors)
