"""Dense state-vector ground truth for small instances.

Two-party states of n pairs are stored as amplitude matrices Psi[iA, iB]
(Alice's n qudits index rows, Bob's index columns, first qudit most
significant).  In that picture Alice applying A is ``A @ Psi`` and Bob
applying B is ``Psi @ B.T``; the Bell state (I (x) XZ(t))|Phi> is XZ(t).T / sqrt(d).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .edp import BellDiagonal, BranchResult, all_vectors, label_index
from .encoder import EncoderParams, ProtocolSpec, encoded_x, encoded_z, most_likely_frule
from .gf import GFVector
from .pauli import PauliElement, phase_modulus

MAX_DIM = 256
TOL = 1e-10


def phase_scalar(p: int, phase: int) -> complex:
    return complex(np.exp(2j * np.pi * phase / phase_modulus(p)))


def qudit_x(p: int) -> np.ndarray:
    return np.roll(np.eye(p), 1, axis=0)


def qudit_z(p: int) -> np.ndarray:
    return np.diag(np.exp(2j * np.pi * np.arange(p) / p))


def xz_matrix(v: GFVector, phase: int = 0) -> np.ndarray:
    """phase * (X^a1 Z^b1 (x) ... (x) X^an Z^bn); phase in the PauliElement unit."""
    p, n = v.p, v.n
    if p ** n > MAX_DIM:
        raise ValueError(f"dimension {p ** n} exceeds the dense limit {MAX_DIM}")
    X, Z = qudit_x(p), qudit_z(p)
    factors = [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a, b in zip(v.a, v.b)]
    M = reduce(np.kron, factors, np.eye(1, dtype=complex))
    return phase_scalar(p, phase) * M


def pauli_matrix(P: PauliElement) -> np.ndarray:
    return xz_matrix(P.vec, P.phase)


def is_unitary(U: np.ndarray, tol: float = TOL) -> bool:
    return float(np.abs(U.conj().T @ U - np.eye(len(U))).max()) <= tol


def same_up_to_phase(x: np.ndarray, y: np.ndarray, tol: float = TOL) -> bool:
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx < tol or ny < tol:
        return nx < tol and ny < tol
    return abs(abs(np.vdot(x, y)) / (nx * ny) - 1.0) <= tol


def averaging_projector(A: np.ndarray, p: int) -> np.ndarray:
    """(1/p) sum_j A^j: projector onto the +1 eigenspace of an order-p unitary."""
    out = np.zeros_like(A)
    Aj = np.eye(len(A), dtype=complex)
    for _ in range(p):
        out += Aj
        Aj = Aj @ A
    return out / p


# -- code state and encoder ---------------------------------------------------------

@dataclass(frozen=True)
class CodeState:
    vector: np.ndarray
    theta_z: tuple[int, ...]


def psi_zero(params: EncoderParams) -> CodeState:
    """Unit vector fixed by every Z~(f_i); unresolved theta_z are chosen here.

    Seeds are computational basis states in index order; an unresolved phase
    takes the smallest exponent that keeps the running vector nonzero.  The
    result has its first nonzero amplitude real and positive.
    """
    p, n = params.p, params.n
    d = p ** n
    if d > MAX_DIM:
        raise ValueError("system too large for the dense oracle")
    for seed in range(d):
        v = np.zeros(d, dtype=complex)
        v[seed] = 1.0
        thetas = []
        for i in range(n):
            options = [params.theta_z[i]] if params.theta_z[i] is not None else list(range(p))
            for th in options:
                w = averaging_projector(pauli_matrix(encoded_z(params, i, th)), p) @ v
                if np.linalg.norm(w) > 1e-8:
                    v = w
                    thetas.append(th)
                    break
            else:
                break
        if len(thetas) == n:
            v = v / np.linalg.norm(v)
            lead = v[np.flatnonzero(np.abs(v) > 1e-9)[0]]
            return CodeState(v * (abs(lead) / lead), tuple(thetas))
    raise ValueError("no common +1 eigenvector: theta_z inconsistent with the eigenstructure")


def resolved(params: EncoderParams) -> EncoderParams:
    """Copy of params with every theta_z fixed as psi_zero would choose it."""
    th = psi_zero(params).theta_z
    return EncoderParams(params.stabilizer, params.ext, params.theta_x, th)


def encoded_x_matrix(params: EncoderParams, u) -> np.ndarray:
    """X~(u) = prod_i X~(f_i)^{u_i}."""
    d = params.p ** params.n
    M = np.eye(d, dtype=complex)
    for i, ui in enumerate(u):
        if ui % params.p:
            M = M @ np.linalg.matrix_power(pauli_matrix(encoded_x(params, i)), int(ui) % params.p)
    return M


def build_encoder(params: EncoderParams) -> np.ndarray:
    """Column u (base-p index of u) is X~(u)|psi(0)>; checked to be unitary."""
    params = resolved(params)
    psi = psi_zero(params).vector
    p, n = params.p, params.n
    cols = [encoded_x_matrix(params, u) @ psi for u in itertools.product(range(p), repeat=n)]
    U = np.array(cols).T
    if not is_unitary(U):
        raise ValueError("encoder columns are not orthonormal")
    return U


def decompose_pauli(M: np.ndarray, n: int, p: int, tol: float = TOL) -> PauliElement | None:
    """Write M as phase * XZ(v) if it is one, else None."""
    d = p ** n
    for idx in range(p ** (2 * n)):
        v = GFVector.from_index(idx, n, p)
        B = xz_matrix(v)
        c = np.vdot(B, M) / d
        if abs(abs(c) - 1.0) > 1e-6:
            continue
        if np.abs(M - c * B).max() > tol:
            return None
        ang = np.angle(c) / (2 * np.pi) * phase_modulus(p)
        ph = int(round(ang)) % phase_modulus(p)
        if abs(ang - round(ang)) > 1e-6:
            return None
        return PauliElement(p, v, ph)
    return None


def conjugation_defects(params: EncoderParams, U: np.ndarray | None = None) -> list[str]:
    """U X(e_i) U^dag = X~(f_i) and U Z(e_i) U^dag = Z~(f_i) for every i."""
    params = resolved(params)
    U = build_encoder(params) if U is None else U
    p, n = params.p, params.n
    bad = []
    for i in range(n):
        a = [0] * n
        a[i] = 1
        X = xz_matrix(GFVector.from_parts(p, a, [0] * n))
        Z = xz_matrix(GFVector.from_parts(p, [0] * n, a))
        if np.abs(U @ X @ U.conj().T - pauli_matrix(encoded_x(params, i))).max() > TOL:
            bad.append(f"X conjugation fails at slot {i}")
        if np.abs(U @ Z @ U.conj().T - pauli_matrix(encoded_z(params, i))).max() > TOL:
            bad.append(f"Z conjugation fails at slot {i}")
    return bad


def is_clifford(U: np.ndarray, n: int, p: int) -> bool:
    """U maps each X(e_i), Z(e_i) to a phase times an XZ matrix."""
    for i in range(n):
        for part in (0, 1):
            a = [0] * (2 * n)
            a[i + part * n] = 1
            G = xz_matrix(GFVector(p, tuple(a)))
            if decompose_pauli(U @ G @ U.conj().T, n, p) is None:
                return False
    return True


# -- Bell states and the literal protocol --------------------------------------------

def bell_matrix(v: GFVector) -> np.ndarray:
    """Amplitude matrix of |beta(v)> = (I (x) XZ(v)) |Phi>."""
    d = v.p ** v.n
    return xz_matrix(v).T / np.sqrt(d)


def bell_vector(v: GFVector) -> np.ndarray:
    return bell_matrix(v).reshape(-1)


def _measurement_projectors(params: EncoderParams) -> list[np.ndarray]:
    """Bob's projector onto eigenvalue lam_i omega^{x_i} of every XZ(xi_i), per x."""
    S = params.stabilizer
    p = S.p
    gens = [pauli_matrix(PauliElement(p, g)) for g in S.generators]
    out = []
    for x in itertools.product(range(p), repeat=S.r):
        P = np.eye(p ** S.n, dtype=complex)
        for i, A in enumerate(gens):
            eps = phase_scalar(p, S.outcome_phase(i, x[i]))
            P = P @ averaging_projector(np.conj(eps) * A, p)
        out.append(P)
    return out


@dataclass(frozen=True)
class DenseBranch:
    result: BranchResult
    off_diagonal: float
    ancilla_leak: float


def run_protocol_dense(P_in: BellDiagonal, spec: ProtocolSpec, params: EncoderParams | None = None,
                       frule=None, diagnostics: bool = False):
    """Literal two-party simulation; BranchResults keyed by b - a for s in spec.T."""
    S = spec.stabilizer
    p, n, k, r = spec.p, spec.n, spec.k, S.r
    if P_in.m != n or P_in.p != p:
        raise ValueError("input distribution does not match the protocol size")
    params = resolved(params or EncoderParams.for_spec(spec))
    U = build_encoder(params)
    f = frule or spec.f or most_likely_frule(S, P_in, spec.T)
    proj_B = _measurement_projectors(params)
    proj_A = [np.conj(P) for P in proj_B]
    outcomes = list(itertools.product(range(p), repeat=r))
    T = [tuple(int(x) % p for x in s) for s in spec.T]
    corr = {s: xz_matrix(-f.t_prime(s)) for s in T}
    dk, da = p ** k, p ** r
    rho = {s: np.zeros((dk * dk, dk * dk), dtype=complex) for s in T}
    accept = {s: 0.0 for s in T}
    leak = {s: 0.0 for s in T}
    UT, Uc = U.T, U.conj()
    V = all_vectors(n, p)
    for idx in np.flatnonzero(P_in.probs > 0):
        weight = P_in.probs[idx]
        psi = bell_matrix(GFVector(p, tuple(V[idx])))
        for ai, a in enumerate(outcomes):
            left = proj_A[ai] @ psi
            for bi, b in enumerate(outcomes):
                s = tuple((bb - aa) % p for aa, bb in zip(a, b))
                if s not in rho:
                    continue
                state = left @ proj_B[bi].T
                prob = float(np.vdot(state, state).real)
                if prob < 1e-15:
                    continue
                accept[s] += weight * prob
                state = UT @ (state @ corr[s].T) @ Uc
                blocks = state.reshape(da, dk, da, dk)
                a_idx = int(label_index(np.array(a), p)) if r else 0
                kept = blocks[a_idx, :, a_idx, :].reshape(-1)
                rho[s] += weight * np.outer(kept, kept.conj())
                leak[s] += weight * max(0.0, prob - float(np.vdot(kept, kept).real))
    bells = np.array([bell_vector(GFVector(p, tuple(w))) for w in all_vectors(k, p)])
    out = []
    for s in T:
        if accept[s] <= 0.0:
            br = BranchResult(s, 0.0, None)
            out.append(DenseBranch(br, 0.0, 0.0) if diagnostics else br)
            continue
        R = bells.conj() @ (rho[s] / accept[s]) @ bells.T
        diag = R.diagonal().real.copy()
        off = float(np.abs(R - np.diag(R.diagonal())).max()) if len(R) > 1 else 0.0
        br = BranchResult(s, accept[s], BellDiagonal(p, k, diag / diag.sum()))
        out.append(DenseBranch(br, off, leak[s] / accept[s]) if diagnostics else br)
    return out


def bell_with_ancilla(k: int, n: int, p: int, e, ell, m) -> np.ndarray:
    """|beta^k(l, m), e> as a two-party amplitude matrix over n qudits a side."""
    r = n - k
    da, dk = p ** r, p ** k
    inner = bell_matrix(GFVector.from_parts(p, list(ell), list(m))) if k else np.ones((1, 1))
    e_idx = int(label_index(np.array(list(e), dtype=np.int64), p)) if r else 0
    out = np.zeros((da, dk, da, dk), dtype=complex)
    out[e_idx, :, e_idx, :] = inner
    return out.reshape(da * dk, da * dk)


def phi_state(params: EncoderParams, e) -> np.ndarray:
    """|phi(e)> = p^{-k/2} sum_x conj(X~(e,x) psi) (x) X~(e,x) psi, as a matrix."""
    params = resolved(params)
    psi = psi_zero(params).vector
    p, n, k = params.p, params.n, params.stabilizer.k
    out = np.zeros((p ** n, p ** n), dtype=complex)
    for x in itertools.product(range(p), repeat=k):
        col = encoded_x_matrix(params, list(e) + list(x)) @ psi
        out += np.outer(col.conj(), col)
    return out / np.sqrt(p ** k)


def verify_encoded_bell(params: EncoderParams, e, ell, m) -> bool:
    """(conj(U) (x) U)|beta^k(l, m), e> equals (I (x) XZ(lG + mH))|phi(e)> up to phase."""
    params = resolved(params)
    U = build_encoder(params)
    S = params.stabilizer
    p, n, k = params.p, params.n, S.k
    start = bell_with_ancilla(k, n, p, e, ell, m)
    mapped = U.conj() @ start @ U.T
    G = params.ext.eta[S.r:]
    H = params.ext.xi[S.r:]
    shift = GFVector.zero(n, p)
    for c, g in zip(ell, G):
        shift = shift + g.scale(c)
    for c, h in zip(m, H):
        shift = shift + h.scale(c)
    target = phi_state(params, e) @ xz_matrix(shift).T
    return same_up_to_phase(mapped.reshape(-1), target.reshape(-1))
