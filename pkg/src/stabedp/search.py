"""Exhaustive search over stabilizers and encoding classes.

For a fixed stabilizer C, syndrome zero means t in C-perp, and every class
sends the accepted mass on C-perp / C through a bijection onto Z_p^{2k}.  So one
round is: aggregate the input mass per quotient coordinate (shared by all
classes of C), then permute it per class.  The kernel evaluates all classes of
one C at once as a (classes x labels) array and iterates rounds from there.

Work is split by stabilizer index; each stabilizer is always evaluated by the
same code on the same array shapes, so results do not depend on how many
worker processes run.
"""

from __future__ import annotations

import json
import logging
import math
import multiprocessing as mp
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .edp import YieldPoint, all_vectors, best_point, curve_csv, label_index, werner_input, yield_table
from .encoder import ProtocolSpec, make_class
from .gf import (
    Subspace,
    enumerate_self_orthogonal,
    form_matrix,
    orthogonal_complement,
    quotient_space,
    reduction_factor,
    selforth_count,
    sp_order,
    standard_hyperbolic_bases,
)
from .pauli import Stabilizer

log = logging.getLogger(__name__)

OBJECTIVES = ("yield_at_F", "dominance_count")
TIE_TOL = 1e-12


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    n: int = 4
    k: int = 2
    p: int = 2
    F_eval: tuple[float, ...] = (0.85,)
    F_star: float = 0.85
    r_max: int = 8
    objective: str = "yield_at_F"
    top: int = 100
    workers: int = 1
    budget: int = 10_000_000
    symmetry: bool = False
    checkpoint: str | None = None
    chunk: int = 64

    def __post_init__(self):
        if not self.n > self.k >= 1:
            raise ValueError("need n > k >= 1")
        if self.n % self.k:
            raise ValueError("n must be a multiple of k for iterated rounds")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        object.__setattr__(self, "F_eval", tuple(float(f) for f in self.F_eval))
        if self.objective == "yield_at_F" and self.F_star not in self.F_eval:
            raise ValueError("F_star must be one of F_eval")
        if self.r_max < 0 or self.top < 1 or self.workers < 1:
            raise ValueError("r_max >= 0, top >= 1 and workers >= 1 required")


@dataclass(frozen=True)
class RankedProtocol:
    spec: ProtocolSpec
    objective: float
    yields: tuple[YieldPoint, ...] = field(default=(), compare=False)

    @property
    def rank_key(self) -> tuple[float, str]:
        return (-self.objective, self.spec.to_json())


@dataclass
class SearchResult:
    config: SearchConfig
    ranked: list[RankedProtocol]
    evaluated: int
    stabilizers: int
    maxima: tuple[float, ...] = ()  # best yield per F_eval entry over every candidate


def candidate_count(n: int, k: int, p: int) -> tuple[int, int]:
    """(number of candidate protocols, reduction factor versus raw encoders)."""
    return selforth_count(n, k, p) * sp_order(k, p), reduction_factor(n, k, p)


# -- per-stabilizer kernel ---------------------------------------------------------

@lru_cache(maxsize=None)
def _label_tables(k: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """gidx[b, c] = label of g_b applied to quotient coordinate c, and its inverse."""
    B = standard_hyperbolic_bases(k, p)
    Q = all_vectors(k, p)
    nb, L = len(B), len(Q)
    gidx = np.empty((nb, L), dtype=np.int64)
    for b in range(nb):
        ell = form_matrix(B[b, :k], Q, p).T
        m = form_matrix(Q, B[b, k:], p)
        gidx[b] = label_index(np.hstack([ell, m]), p)
    inv = np.empty_like(gidx)
    rows = np.arange(nb)[:, None]
    inv[rows, gidx] = np.arange(L)[None, :]
    return gidx, inv


def _xlogx_entropy(P: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(P > 0, P * np.log2(np.where(P > 0, P, 1.0)), 0.0)
    return -t.sum(axis=-1)


@dataclass(frozen=True)
class _Prepared:
    """Everything the kernel needs about one stabilizer."""

    order: np.ndarray       # C-perp rows sorted by quotient coordinate
    group_idx: np.ndarray   # (groups, |C-perp|) Z_p^{2k} label per pair group
    coset: int              # |C|


def _prepare(C: Subspace, k: int) -> _Prepared:
    p, n = C.p, C.n
    Cp = orthogonal_complement(C)
    U = Cp.element_array()
    Q = quotient_space(C, Cp)
    cq = label_index(Q.coords_array(U), p)
    order = np.argsort(cq, kind="stable")
    U = U[order]
    groups = []
    for j in range(n // k):
        slots = list(range(j * k, (j + 1) * k))
        groups.append(label_index(U[:, slots + [n + s for s in slots]], p))
    return _Prepared(U, np.array(groups), p ** C.dim)


def evaluate_stabilizer(C: Subspace, k: int, F_eval: Sequence[float], r_max: int) -> np.ndarray:
    """Best-over-r yield for every class of C at every F: shape (classes, len(F_eval))."""
    p, n = C.p, C.n
    prep = _prepare(C, k)
    gidx, inv = _label_tables(k, p)
    nb, L = gidx.shape
    full = k * math.log2(p)
    ratio = k / n
    out = np.empty((nb, len(F_eval)))
    for fi, F in enumerate(F_eval):
        W = werner_input(F, k, p).probs
        best = np.full(nb, max(0.0, full - _xlogx_entropy(W)) / full)
        # round 1: identical mass for every class, then a per-class relabeling
        w = np.prod(W[prep.group_idx], axis=0)
        M = w.reshape(L, prep.coset).sum(axis=1)
        q = M.sum()
        if q <= 0.0 or r_max == 0:
            out[:, fi] = best
            continue
        P = (M / q)[inv]
        acc = np.full(nb, q)
        for r in range(1, r_max + 1):
            if r > 1:
                w = np.prod(P[:, prep.group_idx], axis=1)
                M = w.reshape(nb, L, prep.coset).sum(axis=2)
                q = M.sum(axis=1)
                alive = q > 0.0
                safe = np.where(alive, q, 1.0)
                P = np.take_along_axis(M, inv, axis=1) / safe[:, None]
                acc = acc * np.where(alive, q, 0.0)
            y = ratio ** r * acc * np.clip(full - _xlogx_entropy(P), 0.0, None) / full
            y = np.where(acc > 0.0, y, 0.0)
            best = np.maximum(best, y)
        out[:, fi] = best
    return out


def class_spec(C: Subspace, b: int, k: int) -> ProtocolSpec:
    """The candidate protocol for stabilizer C and standard basis index b."""
    B = standard_hyperbolic_bases(k, C.p)[b]
    Q = quotient_space(C)
    H = [Q.from_coords(B[i]) for i in range(k)]
    G = [Q.from_coords(B[k + i]) for i in range(k)]
    S = Stabilizer.from_subspace(C)
    return ProtocolSpec.from_class(S, make_class(C, G, H))


def _tie_keys(C: Subspace, k: int) -> np.ndarray:
    """Per-class sort keys matching the canonical JSON order within one stabilizer."""
    p = C.p
    B = standard_hyperbolic_bases(k, p)
    Q = quotient_space(C)
    basis = np.vstack([Q._Y, Q._X])
    # rows y_1..y_k then x_1..x_k, lifted to canonical reps mod C
    coords = np.concatenate([B[:, k:], B[:, :k]], axis=1)
    V = (coords @ basis) % p
    M = C.matrix()
    for row, pc in zip(M, C.pivots):
        V = (V - V[..., pc:pc + 1] * row) % p
    return V.reshape(len(B), -1)


# -- symmetry reduction --------------------------------------------------------------

def _local_sp2(p: int) -> list[np.ndarray]:
    """Generators of Sp_2(p) acting on one (a, b) pair: the Fourier and shear maps."""
    return [np.array([[0, 1], [p - 1, 0]]), np.array([[1, 0], [1, 1]])]


def symmetry_generators(n: int, k: int, p: int) -> list[np.ndarray]:
    """Maps of Z_p^{2n} under which iterated yields are exactly invariant.

    A Werner-preserving map on one k-pair group (slot permutation or local
    Sp_2 on a slot), applied identically to every group, plus swaps of whole
    groups.  Returned as (2n, 2n) matrices acting on row vectors.
    """
    g = n // k
    gens = []

    def embed(slot_perm: dict[int, int], local: dict[int, np.ndarray]) -> np.ndarray:
        M = np.zeros((2 * n, 2 * n), dtype=np.int64)
        for s in range(n):
            t = slot_perm.get(s, s)
            A = local.get(s, np.eye(2, dtype=np.int64))
            # row vector (a_s, b_s) -> (a_s, b_s) @ A placed at slot t
            M[s, t], M[s, n + t] = A[0, 0], A[0, 1]
            M[n + s, t], M[n + s, n + t] = A[1, 0], A[1, 1]
        return M % p

    for i in range(k - 1):
        perm = {}
        for j in range(g):
            perm[j * k + i], perm[j * k + i + 1] = j * k + i + 1, j * k + i
        gens.append(embed(perm, {}))
    for A in _local_sp2(p):
        gens.append(embed({}, {j * k: A for j in range(g)}))
    for j in range(g - 1):
        perm = {}
        for i in range(k):
            perm[j * k + i], perm[(j + 1) * k + i] = (j + 1) * k + i, j * k + i
        gens.append(embed(perm, {}))
    return gens


def apply_map(C: Subspace, M: np.ndarray) -> Subspace:
    return Subspace.from_matrix((C.matrix() @ M) % C.p, C.p, C.ambient_dim)


def stabilizer_orbits(subspaces: Sequence[Subspace], gens: Sequence[np.ndarray]) -> list[int]:
    """Representative index (smallest in its orbit) for each subspace."""
    index = {C: i for i, C in enumerate(subspaces)}
    parent = list(range(len(subspaces)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, C in enumerate(subspaces):
        for M in gens:
            j = index[apply_map(C, M)]
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    return [find(i) for i in range(len(subspaces))]


# -- driver ------------------------------------------------------------------------

def _worker(args) -> list[tuple[int, list[tuple[float, int]], list[float]]]:
    """Evaluate a chunk of stabilizers; returns per-C local top entries and per-F maxima."""
    items, k, F_eval, r_max, col, top, maxima = args
    out = []
    for ci, C in items:
        Y = evaluate_stabilizer(C, k, F_eval, r_max)
        if maxima is None:
            obj = Y[:, col]
        else:
            obj = (Y >= np.asarray(maxima)[None, :] - TIE_TOL).sum(axis=1).astype(float)
        keys = _tie_keys(C, k)
        order = np.lexsort(tuple(keys[:, j] for j in range(keys.shape[1] - 1, -1, -1)) + (-obj,))
        sel = order[:top]
        out.append((ci, [(float(obj[b]), int(b)) for b in sel], [float(x) for x in Y.max(axis=0)]))
    return out


def _load_checkpoint(path: str | None, tag: str) -> dict[int, tuple[list, list]]:
    done: dict[int, tuple[list, list]] = {}
    if not path or not os.path.exists(path):
        return done
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn final line from an interrupted run
            if rec.get("tag") != tag:
                continue
            entries = [(float.fromhex(v), b) for v, b in rec["top"]]
            done[rec["c"]] = (entries, [float.fromhex(x) for x in rec["max"]])
    return done


def _run_pass(cfg: SearchConfig, subspaces: list[Subspace], todo: list[int], col: int,
              maxima: list[float] | None, tag: str) -> dict[int, tuple[list, list]]:
    results = _load_checkpoint(cfg.checkpoint, tag)
    pending = [i for i in todo if i not in results]
    if results:
        log.info("resuming %s: %d of %d stabilizers already done", tag, len(todo) - len(pending), len(todo))
    chunks = [pending[i:i + cfg.chunk] for i in range(0, len(pending), cfg.chunk)]
    jobs = [([(i, subspaces[i]) for i in ch], cfg.k, cfg.F_eval, cfg.r_max, col, cfg.top, maxima)
            for ch in chunks]
    fh = open(cfg.checkpoint, "a") if cfg.checkpoint else None
    try:
        if cfg.workers > 1 and jobs:
            ctx = mp.get_context("fork") if hasattr(os, "fork") else mp.get_context()
            with ctx.Pool(cfg.workers) as pool:
                stream = pool.imap_unordered(_worker, jobs)
                _collect(stream, results, fh, tag)
        else:
            _collect(map(_worker, jobs), results, fh, tag)
    finally:
        if fh:
            fh.close()
    return results


def _collect(stream: Iterable, results: dict, fh, tag: str) -> None:
    for batch in stream:
        for ci, entries, mx in batch:
            results[ci] = (entries, mx)
            if fh:
                fh.write(json.dumps({"tag": tag, "c": ci, "top": [[v.hex(), b] for v, b in entries],
                                     "max": [x.hex() for x in mx]}) + "\n")
        if fh:
            fh.flush()


def search(cfg: SearchConfig) -> SearchResult:
    total, _ = candidate_count(cfg.n, cfg.k, cfg.p)
    if total > cfg.budget:
        raise BudgetExceeded(f"{total} candidates exceed the budget of {cfg.budget}")
    subspaces = list(enumerate_self_orthogonal(cfg.n, cfg.k, cfg.p))
    todo = list(range(len(subspaces)))
    if cfg.symmetry:
        reps = stabilizer_orbits(subspaces, symmetry_generators(cfg.n, cfg.k, cfg.p))
        todo = sorted(set(reps))
        log.info("symmetry reduction: %d of %d stabilizers", len(todo), len(subspaces))
    nb = len(standard_hyperbolic_bases(cfg.k, cfg.p))
    col = cfg.F_eval.index(cfg.F_star) if cfg.objective == "yield_at_F" else 0
    if cfg.objective == "yield_at_F":
        results = _run_pass(cfg, subspaces, todo, col, None, "yield")
    else:
        first = _run_pass(cfg, subspaces, todo, col, None, "max")
        maxima = [max(first[i][1][f] for i in todo) for f in range(len(cfg.F_eval))]
        results = _run_pass(cfg, subspaces, todo, col, maxima, "dominance")
    ranked = _merge(cfg, subspaces, results)
    maxima = tuple(max(results[i][1][f] for i in todo) for f in range(len(cfg.F_eval)))
    return SearchResult(cfg, ranked, evaluated=len(todo) * nb, stabilizers=len(todo), maxima=maxima)


def _merge(cfg: SearchConfig, subspaces: list[Subspace], results: dict) -> list[RankedProtocol]:
    pool = []
    for ci in sorted(results):
        C = subspaces[ci]
        xi_key = tuple(int(x) for v in C.basis for x in v.coords)
        keys = _tie_keys(C, cfg.k)
        for val, b in results[ci][0]:
            pool.append((-val, xi_key, tuple(int(x) for x in keys[b]), ci, b))
    pool.sort()
    ranked = []
    for negval, _, _, ci, b in pool[: cfg.top]:
        spec = class_spec(subspaces[ci], b, cfg.k)
        yields = tuple(best_point(yield_table(spec, F, cfg.r_max)) for F in cfg.F_eval)
        ranked.append(RankedProtocol(spec, -negval, yields))
    return ranked


# -- output --------------------------------------------------------------------------

def results_text(result: SearchResult) -> str:
    """One JSON record per ranked protocol; byte-stable for a given config."""
    lines = []
    for i, rp in enumerate(result.ranked, 1):
        lines.append(json.dumps({
            "rank": i,
            "objective": repr(rp.objective),
            "spec": rp.spec.to_json(),
            "csv": curve_csv(rp.yields),
        }, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def load_results(text: str) -> list[tuple[ProtocolSpec, float]]:
    out = []
    for line in text.splitlines():
        if line.strip():
            rec = json.loads(line)
            out.append((ProtocolSpec.from_json(rec["spec"]), float(rec["objective"])))
    return out


def summary_table(result: SearchResult, limit: int = 10) -> str:
    from .encoder import EncoderParams, encoded_x, encoded_z
    from .pauli import render, PauliElement

    rows = [f"evaluated {result.evaluated} candidates over {result.stabilizers} stabilizers"]
    for i, rp in enumerate(result.ranked[:limit], 1):
        S = rp.spec.stabilizer
        params = EncoderParams.for_spec(rp.spec)
        gens = ", ".join(render(PauliElement(S.p, g)) for g in S.generators)
        xs = ", ".join(render(encoded_x(params, j)) for j in range(S.r, S.n))
        zs = ", ".join(render(encoded_z(params, j)) for j in range(S.r, S.n))
        rows.append(f"{i:3d}  obj={rp.objective:.12f}  S=<{gens}>  X~=[{xs}]  Z~=[{zs}]")
    return "\n".join(rows)
