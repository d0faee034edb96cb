from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import all_gf_vectors, brute_symplectic, random_vector, subspaces
from stabedp.gf import (
    GFVector,
    HyperbolicExtension,
    StandardSpace,
    Subspace,
    complete_hyperbolic,
    enumerate_hyperbolic_bases,
    enumerate_self_orthogonal,
    is_self_orthogonal,
    orthogonal_complement,
    quotient_space,
    rank,
    reduction_factor,
    selforth_count,
    sp_order,
    symplectic_product,
)

V = GFVector.parse


def vectors(n: int, p: int):
    return st.lists(st.integers(0, p - 1), min_size=2 * n, max_size=2 * n).map(
        lambda c: GFVector(p, tuple(c)))


@st.composite
def vector_triples(draw):
    p = draw(st.sampled_from([2, 3, 5]))
    n = draw(st.integers(1, 4))
    return p, draw(vectors(n, p)), draw(vectors(n, p)), draw(vectors(n, p)), draw(st.integers(0, p - 1))


# -- vectors and the form ---------------------------------------------------------

def test_parse_and_render():
    v = V("1111|0000")
    assert v.a == (1, 1, 1, 1) and v.b == (0, 0, 0, 0)
    assert str(v) == "(1111|0000)"
    assert GFVector.from_index(v.index, 4, 2) == v


def test_coordinates_reduce_and_validate():
    assert GFVector(3, (4, -1)).coords == (1, 2)
    with pytest.raises(ValueError):
        GFVector(4, (0, 1))
    with pytest.raises(ValueError):
        GFVector(2, (0, 1, 1))


@pytest.mark.parametrize("p, expected", [(2, 1), (5, 4)])
def test_symplectic_unit_vectors(p, expected):
    assert symplectic_product(GFVector(p, (1, 0)), GFVector(p, (0, 1))) == expected


def test_symplectic_example_pair():
    assert symplectic_product(V("1111|0000"), V("0000|1110")) == 1


def test_symplectic_mismatch():
    with pytest.raises(ValueError):
        symplectic_product(V("1|0"), V("10|00"))
    with pytest.raises(ValueError):
        symplectic_product(GFVector(2, (1, 0)), GFVector(3, (1, 0)))


@given(vector_triples())
def test_form_bilinear_antisymmetric(data):
    p, x, y, z, c = data
    assert symplectic_product(x, y) == brute_symplectic(x, y)
    assert symplectic_product(x, y) == (-symplectic_product(y, x)) % p
    assert symplectic_product(x, x) == 0
    assert symplectic_product(x + y, z) == (symplectic_product(x, z) + symplectic_product(y, z)) % p
    assert symplectic_product(x.scale(c), z) == (c * symplectic_product(x, z)) % p


# -- subspaces ----------------------------------------------------------------------

def test_canonical_form_is_unique(rng):
    for _ in range(20):
        vs = [random_vector(rng, 3, 3) for _ in range(3)]
        A = Subspace.span(vs)
        coeffs = rng.integers(0, 3, (3, 3))
        mixed = []
        for row in coeffs:
            w = GFVector.zero(3, 3)
            for c, v in zip(row, vs):
                w = w + v.scale(int(c))
            mixed.append(w)
        B = Subspace.span(mixed + vs)
        assert A == B and A.basis == B.basis


def test_complement_of_zero_is_everything():
    C = Subspace.span([], 2, 6)
    assert orthogonal_complement(C).dim == 6


def test_complement_contains_example_vectors(ext42):
    C = Subspace.span(ext42.xi[:2])
    Cp = orthogonal_complement(C)
    assert Cp.dim == 6
    for v in list(ext42.xi) + list(ext42.eta[2:]):
        assert v in Cp


def test_complement_brute_force(rng):
    subs = subspaces(4, 2, 2)
    for idx in rng.choice(len(subs), 5, replace=False):
        C = subs[idx]
        Cp = orthogonal_complement(C)
        brute = [v for v in all_gf_vectors(4, 2) if all(symplectic_product(c, v) == 0 for c in C.basis)]
        assert Cp.dim == 6 and len(brute) == 64
        assert all(v in Cp for v in brute)
        assert Cp.contains_subspace(C)


def test_self_orthogonality_examples():
    assert is_self_orthogonal(Subspace.span([V("1111|0000"), V("0000|1111")]))
    assert not is_self_orthogonal(Subspace.span([V("1|0"), V("0|1")]))


def test_two_dim_self_orthogonal_in_z2_4_brute_force():
    found = set()
    for x, y in itertools.combinations(all_gf_vectors(2, 2), 2):
        S = Subspace.span([x, y])
        if S.dim == 2 and is_self_orthogonal(S):
            found.add(S)
    assert len(found) == selforth_count(2, 0, 2)
    assert found == set(enumerate_self_orthogonal(2, 0, 2))


# -- hyperbolic completion ------------------------------------------------------

def test_completion_of_example(ext42):
    ext = complete_hyperbolic(ext42.xi[:2])
    assert ext.is_valid()
    assert ext.xi[:2] == ext42.xi[:2]


def test_completion_empty_n1():
    ext = complete_hyperbolic([], n=1, p=2)
    assert ext.xi == (V("1|0"),) and ext.eta == (V("0|1"),)
    assert ext.is_valid()


def test_completion_is_deterministic(ext42):
    assert complete_hyperbolic(ext42.xi[:2]) == complete_hyperbolic(ext42.xi[:2])


@pytest.mark.parametrize("n, k, p", [(4, 2, 2), (4, 1, 2), (3, 1, 3), (3, 0, 2)])
def test_completion_random_inputs(rng, n, k, p):
    subs = subspaces(n, k, p)
    picks = rng.choice(len(subs), min(len(subs), 100 if p == 2 and n == 4 and k == 2 else 25), replace=False)
    for idx in picks:
        ext = complete_hyperbolic(subs[idx].basis)
        assert ext.is_valid(), ext.relation_defects()
        assert Subspace.span(ext.xi + ext.eta, p, 2 * n).dim == 2 * n


def test_completion_rejects_bad_input():
    with pytest.raises(ValueError):
        complete_hyperbolic([V("1|0"), V("0|1")])
    with pytest.raises(ValueError):
        complete_hyperbolic([V("10|00"), V("10|00")])


def test_relation_defects_detects_breakage(ext42):
    broken = HyperbolicExtension(ext42.xi, (ext42.eta[1],) + ext42.eta[1:])
    assert not broken.is_valid()


# -- quotient -------------------------------------------------------------------------

def test_quotient_examples(ext42):
    C = Subspace.span(ext42.xi[:2])
    Q = quotient_space(C)
    assert Q.dim == 4
    assert Q.canonical_rep(ext42.xi[0]).is_zero
    assert Q.canonical_rep(ext42.xi[2] + ext42.xi[0]) == Q.canonical_rep(ext42.xi[2])
    assert Q.inner(ext42.xi[2], ext42.eta[2]) == 1
    with pytest.raises(ValueError):
        Q.canonical_rep(V("0000|1000"))


def test_quotient_gram_is_standard(ext42):
    Q = quotient_space(Subspace.span(ext42.xi[:2]))
    assert np.array_equal(Q.gram(), StandardSpace(2, 2).gram())


def test_canonical_rep_constant_on_cosets(rng):
    for n, k, p in [(4, 2, 2), (3, 1, 3)]:
        subs = subspaces(n, k, p)
        for idx in rng.choice(len(subs), 5, replace=False):
            C = subs[idx]
            Q = quotient_space(C)
            Cp = list(Q.Cperp.elements())
            Cel = list(C.elements())
            for j in rng.choice(len(Cp), 5):
                x = Cp[j]
                rep = Q.canonical_rep(x)
                assert rep in Cp
                for c in Cel:
                    assert Q.canonical_rep(x + c) == rep
                assert rep.coords == min((x + c).coords for c in Cel)
                assert Q.from_coords(Q.coords(x)) == rep


# -- enumeration and counting ----------------------------------------------------------

def test_self_orthogonal_count_42():
    subs = subspaces(4, 2, 2)
    assert len(subs) == 5355 == selforth_count(4, 2, 2)
    assert len(set(subs)) == 5355
    assert all(is_self_orthogonal(C) and C.dim == 2 for C in subs)


def test_self_orthogonal_small_cases():
    assert {str(c) for c in enumerate_self_orthogonal(1, 0, 2)} == {
        str(Subspace.span([V(s)])) for s in ("1|0", "0|1", "1|1")}
    assert len(subspaces(2, 1, 3)) == 40 == selforth_count(2, 1, 3)


# Exhaustive cross-checks for every feasible size; p^{2n} <= 2^16 also covers
# (n, p) = (8, 2), (5, 3) etc. whose enumerations are far too large to run.
FEASIBLE = [(n, k, p) for p in (2, 3, 5) for n in range(1, 5) for k in range(0, n + 1)
            if selforth_count(n, k, p) <= 6000 and p ** (2 * n) <= 2 ** 16]


@pytest.mark.parametrize("n, k, p", FEASIBLE)
def test_self_orthogonal_count_matches_formula(n, k, p):
    subs = list(enumerate_self_orthogonal(n, k, p))
    assert len(subs) == selforth_count(n, k, p)
    assert len(set(subs)) == len(subs)


def test_enumeration_is_deterministic():
    a = [C.basis for C in enumerate_self_orthogonal(3, 1, 2)]
    b = [C.basis for C in enumerate_self_orthogonal(3, 1, 2)]
    assert a == b


@pytest.mark.parametrize("k, p", [(1, 2), (2, 2), (1, 3), (2, 3)])
def test_hyperbolic_basis_count(k, p):
    bases = list(enumerate_hyperbolic_bases(StandardSpace(k, p)))
    assert len(bases) == sp_order(k, p)
    keys = {tuple(v.coords for v in xs + ys) for xs, ys in bases}
    assert len(keys) == len(bases)
    for xs, ys in bases[:: max(1, len(bases) // 200)]:
        assert HyperbolicExtension(xs, ys).is_valid()


def test_sp2_brute_force():
    pairs = [(x, y) for x in all_gf_vectors(1, 2) for y in all_gf_vectors(1, 2)
             if symplectic_product(x, y) == 1]
    assert len(pairs) == sp_order(1, 2) == 6


def test_quotient_bases_distinct(ext42):
    Q = quotient_space(Subspace.span(ext42.xi[:2]))
    keys = {tuple(v.coords for v in xs + ys) for xs, ys in enumerate_hyperbolic_bases(Q)}
    assert len(keys) == 720


def test_degenerate_space_rejected():
    class Flat(StandardSpace):
        def gram(self):
            return np.zeros((2, 2), dtype=np.int64)

    with pytest.raises(ValueError):
        list(enumerate_hyperbolic_bases(Flat(1, 2)))


def test_sp_order_values():
    assert sp_order(1, 2) == 6
    assert sp_order(2, 2) == 720
    assert sp_order(4, 2) == 2 ** 16 * 3 * 15 * 63 * 255
    assert reduction_factor(4, 2, 2) == 12288


@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 7), st.data())
def test_reduction_identity(p, n, data):
    k = data.draw(st.integers(0, n))
    lhs_num = sp_order(n, p)
    lhs_den = selforth_count(n, k, p) * sp_order(k, p)
    assert lhs_num % lhs_den == 0
    assert lhs_num // lhs_den == reduction_factor(n, k, p)


def test_rank_helper():
    assert rank(np.array([[1, 0], [1, 0]]), 2) == 1
