"""Classical simulation of stabilizer EDPs on Bell-diagonal inputs.

A Bell-diagonal state of m pairs is a probability vector over Z_p^{2m}; entry
``idx`` belongs to the label whose base-p digits (first coordinate most
significant) are ``(a_1..a_m | b_1..b_m)``.  On such inputs the protocol acts
as a classical channel:

    accept(s)  = sum_{t in D(s)} P_in(t)
    P_out(w)   = sum_{t in D(s), g(f(t)) = w} P_in(t) / accept(s)
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .encoder import FRule, ProtocolSpec, g_array, most_likely_frule
from .gf import GFVector
from .pauli import syndrome_array

NORM_TOL = 1e-12


@lru_cache(maxsize=None)
def all_vectors(m: int, p: int) -> np.ndarray:
    """Every label of Z_p^{2m} as rows, in index (lex) order.  Read-only."""
    grids = np.indices((p,) * (2 * m)).reshape(2 * m, -1).T
    out = np.ascontiguousarray(grids, dtype=np.int64)
    out.setflags(write=False)
    return out


def label_index(V: np.ndarray, p: int) -> np.ndarray:
    width = V.shape[-1]
    weights = p ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return V @ weights


@dataclass(frozen=True, eq=False)
class BellDiagonal:
    p: int
    m: int
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (self.p ** (2 * self.m),):
            raise ValueError(f"expected {self.p ** (2 * self.m)} probabilities, got {probs.shape}")
        if (probs < -NORM_TOL).any() or abs(probs.sum() - 1.0) > NORM_TOL:
            raise ValueError("not a probability distribution")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def normalized(cls, p: int, m: int, weights) -> BellDiagonal:
        w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        return cls(p, m, w / w.sum())

    @classmethod
    def point_mass(cls, v: GFVector) -> BellDiagonal:
        probs = np.zeros(v.p ** len(v.coords))
        probs[v.index] = 1.0
        return cls(v.p, v.n, probs)

    @classmethod
    def uniform(cls, p: int, m: int) -> BellDiagonal:
        N = p ** (2 * m)
        return cls(p, m, np.full(N, 1.0 / N))

    @property
    def fidelity(self) -> float:
        return float(self.probs[0])

    def prob(self, v: GFVector) -> float:
        return float(self.probs[v.index])

    def entropy_bits(self) -> float:
        q = self.probs[self.probs > 0]
        return float(-(q * np.log2(q)).sum())

    def allclose(self, other: BellDiagonal, atol: float = 1e-9) -> bool:
        return self.p == other.p and self.m == other.m and np.allclose(self.probs, other.probs, atol=atol, rtol=0)


def interleave_product(groups: Sequence[BellDiagonal]) -> BellDiagonal:
    """Independent product with group j occupying pair slots j*k .. j*k+k-1."""
    p, k = groups[0].p, groups[0].m
    g = len(groups)
    n = g * k
    V = all_vectors(n, p)
    probs = np.ones(len(V))
    for j, P in enumerate(groups):
        slots = list(range(j * k, (j + 1) * k))
        sub = V[:, slots + [n + s for s in slots]]
        probs = probs * P.probs[label_index(sub, p)]
    return BellDiagonal(p, n, probs / probs.sum())


def werner_input(F: float, pairs: int, p: int = 2) -> BellDiagonal:
    if not 0.0 <= F <= 1.0:
        raise ValueError("fidelity must lie in [0, 1]")
    single = np.full(p * p, (1.0 - F) / (p * p - 1))
    single[0] = F
    one = BellDiagonal(p, 1, single)
    return interleave_product([one] * pairs)


@dataclass(frozen=True)
class BranchResult:
    syndrome_diff: tuple[int, ...]
    accept_prob: float
    P_out: BellDiagonal | None

    @property
    def degenerate(self) -> bool:
        return self.P_out is None


def run_protocol(P_in: BellDiagonal, spec: ProtocolSpec, frule: FRule | None = None) -> list[BranchResult]:
    """One branch per accepted syndrome difference in spec.T."""
    S = spec.stabilizer
    if P_in.p != spec.p or P_in.m != spec.n:
        raise ValueError("input distribution does not match the protocol size")
    f = frule or spec.f or most_likely_frule(S, P_in, spec.T)
    V = all_vectors(spec.n, spec.p)
    syn = syndrome_array(V, S)
    p, k = spec.p, spec.k
    out = []
    for s in spec.T:
        mask = np.all(syn == np.array(s, dtype=np.int64), axis=1)
        weights = P_in.probs[mask]
        accept = float(weights.sum())
        if accept <= 0.0:
            out.append(BranchResult(tuple(s), 0.0, None))
            continue
        U = (V[mask] - f.t_prime(s).array()) % p
        w = label_index(g_array(U, spec.cls), p)
        P = np.bincount(w, weights=weights, minlength=p ** (2 * k)) / accept
        out.append(BranchResult(tuple(s), accept, BellDiagonal(p, k, P / P.sum())))
    return out


def iterate_protocol(P_group: BellDiagonal, spec: ProtocolSpec, rounds: int
                     ) -> tuple[list[float], BellDiagonal | None]:
    """Feed n/k independent copies of the current k-pair state back in, r times.

    Only the agreeing-outcome branch (s = 0, no correction) is kept.
    """
    n, k = spec.n, spec.k
    if k == 0 or n % k:
        raise ValueError("n must be a multiple of k for grouped iteration")
    if P_group.m != k:
        raise ValueError("group state must cover k pairs")
    zero = (0,) * spec.stabilizer.r
    frule = FRule.zero(spec.stabilizer)
    sub = ProtocolSpec(spec.stabilizer, spec.cls, (zero,))
    accepts: list[float] = []
    P: BellDiagonal | None = P_group
    for _ in range(rounds):
        if P is None:
            accepts.append(0.0)
            continue
        (br,) = run_protocol(interleave_product([P] * (n // k)), sub, frule)
        accepts.append(br.accept_prob)
        P = br.P_out
    return accepts, P


def hashing_yield(P: BellDiagonal) -> float:
    """Asymptotic hashing output in ebits per group: max(0, m log2 p - H(P))."""
    return max(0.0, P.m * math.log2(P.p) - P.entropy_bits())


@dataclass(frozen=True)
class YieldPoint:
    F: float
    rounds: int
    success_probs: tuple[float, ...]
    entropy_bits: float
    yield_: float

    @property
    def accept_prob_product(self) -> float:
        return float(np.prod(self.success_probs)) if self.success_probs else 1.0


def yield_from(F: float, rounds: int, accepts: Sequence[float], P: BellDiagonal | None,
               n: int, k: int, p: int) -> YieldPoint:
    """(k/n)^r * prod q_j * (k log2 p - H) / (k log2 p), clamped at 0."""
    if P is None:
        return YieldPoint(F, rounds, tuple(accepts), float("nan"), 0.0)
    full = k * math.log2(p)
    H = P.entropy_bits()
    y = (k / n) ** rounds * float(np.prod(accepts)) * max(0.0, full - H) / full
    return YieldPoint(F, rounds, tuple(accepts), H, y)


def yield_table(spec: ProtocolSpec, F: float, r_max: int) -> list[YieldPoint]:
    """Yield after r = 0..r_max rounds followed by hashing."""
    n, k, p = spec.n, spec.k, spec.p
    P = werner_input(F, k, p)
    rows = [yield_from(F, 0, [], P, n, k, p)]
    accepts: list[float] = []
    for r in range(1, r_max + 1):
        a, P = iterate_protocol(P, spec, 1) if P is not None else ([0.0], None)
        accepts += a
        rows.append(yield_from(F, r, accepts, P, n, k, p))
    return rows


def best_point(rows: Sequence[YieldPoint]) -> YieldPoint:
    """Largest yield; the smallest round count wins ties."""
    best = rows[0]
    for row in rows[1:]:
        if row.yield_ > best.yield_:
            best = row
    return best


def yield_curve(spec: ProtocolSpec, F_grid: Iterable[float], r_max: int = 8) -> list[YieldPoint]:
    return [best_point(yield_table(spec, F, r_max)) for F in F_grid]


CSV_HEADER = ("F", "rounds", "accept_prob_product", "entropy_bits", "yield")


def curve_csv(points: Iterable[YieldPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for pt in sorted(points, key=lambda q: (q.F, q.rounds)):
        w.writerow([_fmt(pt.F), pt.rounds, _fmt(pt.accept_prob_product), _fmt(pt.entropy_bits),
                    _fmt(pt.yield_)])
    return buf.getvalue()


def _fmt(x: float) -> str:
    return repr(float(x))


def fidelity_grid(f_min: float, f_max: float, step: float) -> list[float]:
    count = int(math.floor((f_max - f_min) / step + 1e-9)) + 1
    return [round(f_min + i * step, 12) for i in range(count)]
