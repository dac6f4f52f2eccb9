"""Exact matrices: rank/kernel, frozen variables, relations, variable types.

Expected values marked as derived were computed with independent oracles:
row-space enumeration for ranks, hand-solved kernels for small paths, and
brute-force membership checks for classifications.
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from frozenrank.errors import ResourceCapError
from frozenrank.exactla import (
    Matrix,
    TypeProfile,
    block,
    classify_variable,
    format_matrix,
    frozen_set,
    is_delta_ell_free,
    is_relation,
    parse_matrix,
    proper_relations,
    relabelled,
    row_in_span,
    symmetric_removal_rank_drop,
    type_census,
)
from frozenrank.field import FieldSpec
from frozenrank.prf import Stream
from frozenrank.verify import random_matrix, rank_by_row_space_enumeration

F2 = FieldSpec.prime(2)
F3 = FieldSpec.prime(3)
F5 = FieldSpec.prime(5)
Q = FieldSpec.rationals()


def path3(field=F2):
    return Matrix.from_rows(field, [[0, 1, 0], [1, 0, 1], [0, 1, 0]], symmetric=True)


def edge2(field=F2, w=1):
    return Matrix.from_rows(field, [[0, w], [w, 0]], symmetric=True)


# ------------------------------------------------------------------- rank


def test_rank_empty():
    assert Matrix.zeros(F2, 0, 0).rank() == 0
    assert Matrix.zeros(F5, 0, 3).rank() == 0
    assert Matrix.zeros(F5, 3, 0).rank() == 0


def test_rank_path3():
    A = path3()
    assert A.rank() == 2  # row space {000,010,101,111}: 4 = 2^2 vectors
    assert A.rank() == rank_by_row_space_enumeration(A)
    assert A.nullity() == 1


@pytest.mark.parametrize("field,w", [(F2, 1), (F3, 2), (F5, 3), (Q, Fraction(-1, 2))])
def test_rank_single_edge_any_field(field, w):
    assert edge2(field, w).rank() == 2  # determinant -w^2 is nonzero


def test_rank_preserves_input():
    A = path3()
    _ = A.rank()
    assert A == path3()


# ----------------------------------------------------------------- kernel


def test_kernel_identity_f3():
    assert Matrix.identity(F3, 3).kernel_basis() == []


def test_kernel_path3():
    (v,) = path3().kernel_basis()
    assert [e.value for e in v] == [1, 0, 1]


def test_kernel_zero_matrix():
    basis = Matrix.zeros(F5, 2, 2).kernel_basis()
    assert len(basis) == 2
    vals = {tuple(e.value for e in v) for v in basis}
    assert vals == {(1, 0), (0, 1)}


def test_kernel_vectors_annihilate():
    stream = Stream(4)
    for field in (F2, F3, F5):
        for _ in range(25):
            A = random_matrix(stream, field, 1 + stream.randbelow(6), 1 + stream.randbelow(6))
            basis = A.kernel_basis()
            assert len(basis) == A.nullity()
            rows = A.to_values()
            for v in basis:
                vec = [e.value for e in v]
                for row in rows:
                    assert sum(r * x for r, x in zip(row, vec)) % field.p == 0


# ----------------------------------------------------------------- remove


def test_remove_nothing():
    A = path3()
    assert A.remove() == A


def test_remove_edge_to_zero():
    B = edge2().remove(rows=[0], cols=[0])
    assert (B.m, B.n) == (1, 1) and B.entry(0, 0).is_zero()


def test_remove_middle_row_path3():
    B = path3().remove(rows=[1])
    assert B.to_values() == [[0, 1, 0], [0, 1, 0]]


def test_remove_bounds_checked():
    with pytest.raises(ValueError):
        path3().remove(rows=[3])
    with pytest.raises(ValueError):
        path3().remove(cols=[-1])


# ------------------------------------------------------------ frozen sets


def test_frozen_examples():
    assert frozen_set(edge2()).frozen == (0, 1)  # trivial kernel: all frozen
    assert frozen_set(path3()).frozen == (1,)
    assert frozen_set(Matrix.zeros(F3, 3, 3)).frozen == ()


def test_frozen_methods_agree_on_examples():
    for A in (edge2(), path3(), Matrix.zeros(F2, 2, 4), Matrix.identity(F5, 4)):
        assert frozen_set(A, "kernel").frozen == frozen_set(A, "rankdrop").frozen


def test_frozen_unknown_method():
    with pytest.raises(ValueError):
        frozen_set(path3(), "guess")


# -------------------------------------------------------------- relations


def test_is_relation_examples():
    assert is_relation(edge2(), [0])  # y = (0,1) gives support {0}
    assert not is_relation(Matrix.zeros(F2, 2, 2), [0, 1])
    assert is_relation(path3(), [0, 2])  # middle row has support {0,2}


def test_is_relation_empty_set_rejected():
    with pytest.raises(ValueError):
        is_relation(path3(), [])


def test_proper_relations_examples():
    assert proper_relations(Matrix.zeros(F2, 3, 3), 2) == []
    assert proper_relations(edge2(), 2) == []  # all frozen: I minus frozen is empty
    assert proper_relations(path3(), 2) == [(0, 2)]


def test_proper_relations_methods_agree():
    stream = Stream(11)
    for field in (F2, F3):
        for _ in range(40):
            A = random_matrix(stream, field, 1 + stream.randbelow(5), 2 + stream.randbelow(5))
            for ell in (2, 3):
                assert proper_relations(A, ell) == proper_relations(A, ell, method="rankdrop")


def test_proper_relations_caps():
    with pytest.raises(ResourceCapError):
        proper_relations(Matrix.zeros(F2, 3, 25), 2)
    with pytest.raises(ResourceCapError):
        proper_relations(Matrix.identity(F2, 15), 2)
    with pytest.raises(ResourceCapError):
        proper_relations(Matrix.identity(F5, 10), 2, max_vectors=1000)
    # rankdrop route has no enumeration caps
    assert proper_relations(Matrix.identity(F2, 15), 2, method="rankdrop") == []


def test_is_delta_ell_free_examples():
    assert is_delta_ell_free(Matrix.zeros(F2, 3, 3), 0.1, 2)
    assert not is_delta_ell_free(path3(), 0.0, 2)  # one proper relation exists
    assert is_delta_ell_free(path3(), 1.0, 2)  # 1 <= 9


def test_row_in_span_examples():
    assert row_in_span(path3(), [0, 0, 0])
    assert row_in_span(edge2(), [1, 0])  # equals row 1
    assert row_in_span(path3(), [1, 1, 1])  # (0,1,0) + (1,0,1)
    assert not row_in_span(path3(), [1, 0, 0])
    with pytest.raises(ValueError):
        row_in_span(path3(), [1, 0])


# ---------------------------------------------------------- variable types


def test_classify_examples():
    assert classify_variable(edge2(), 0) == "Y"
    assert classify_variable(Matrix.zeros(F2, 1, 1), 0) == "Z"
    A = path3()
    assert classify_variable(A, 1) == "Y"
    assert classify_variable(A, 0) == "Z"
    with pytest.raises(ValueError):
        classify_variable(A, 3)


def test_census_examples():
    prof = type_census(Matrix.zeros(F5, 4, 4))
    assert prof.zeta() == (0.0, 0.0, 1.0, 0.0, 0.0)
    assert type_census(edge2()).zeta() == (0.0, 1.0, 0.0, 0.0, 0.0)
    prof = type_census(path3())
    assert prof.zeta() == (0.0, 1 / 3, 2 / 3, 0.0, 0.0)
    assert prof.alpha == prof.alpha_hat == 1 / 3


def test_census_empty_range_rejected():
    with pytest.raises(ValueError):
        type_census(Matrix.zeros(F2, 0, 0))
    with pytest.raises(ValueError):
        type_census(path3(), census_size=4)


def test_census_identities_are_exact_counts():
    stream = Stream(21)
    for _ in range(30):
        m = 1 + stream.randbelow(7)
        n = 1 + stream.randbelow(7)
        A = random_matrix(stream, F3, m, n)
        prof = type_census(A)
        assert prof.count_x + prof.count_y + prof.count_z + prof.count_u + prof.count_v == prof.n
        assert prof.frozen_count == prof.count_x + prof.count_y + prof.count_v
        assert prof.frozen_count_t == prof.count_x + prof.count_y + prof.count_u


def test_type_profile_validates():
    with pytest.raises(ValueError):
        TypeProfile(n=3, count_x=1, count_y=1, count_z=1, count_u=1, count_v=0,
                    frozen_count=2, frozen_count_t=2)


def test_symmetric_removal_examples():
    assert symmetric_removal_rank_drop(edge2(), 0) == 2
    A = path3()
    assert symmetric_removal_rank_drop(A, 0) == 0  # leaves a full-rank edge
    assert symmetric_removal_rank_drop(A, 1) == 2  # leaves the zero matrix
    with pytest.raises(ValueError):
        symmetric_removal_rank_drop(Matrix.zeros(F2, 2, 3), 0)


# -------------------------------------------------------------- structure


def test_block_assembly():
    A = edge2(F3, 2)
    B = block([[A, Matrix.zeros(F3, 2, 1)], [Matrix.zeros(F3, 1, 2), Matrix.identity(F3, 1)]])
    assert B.to_values() == [[0, 2, 0], [2, 0, 0], [0, 0, 1]]


def test_relabelled_requires_permutation():
    with pytest.raises(ValueError):
        relabelled(path3(), [0, 0, 1])


def test_symmetric_flag_validated():
    with pytest.raises(ValueError):
        Matrix.from_rows(F2, [[0, 1], [0, 0]], symmetric=True)
    with pytest.raises(ValueError):
        Matrix.from_rows(Q, [[0, 1, 0], [1, 0, 0]], symmetric=True)


def test_rational_cap():
    big = Matrix.zeros(Q, 65, 65)
    with pytest.raises(ResourceCapError):
        big.rank()
    assert big.rank(rational_cap=70) == 0


def test_entries_and_fields_validated():
    with pytest.raises(ValueError):
        Matrix.from_rows(F2, [[F3.element(1)]])
    with pytest.raises(ValueError):
        path3().entry(5, 0)


# ------------------------------------------------------------ text format


def test_matrix_format_roundtrip():
    for A in (path3(), edge2(F5, 3), Matrix.from_rows(Q, [[Fraction(1, 3), -2]]),
              Matrix.zeros(FieldSpec.prime(7), 2, 5)):
        assert parse_matrix(format_matrix(A)) == A


def test_matrix_format_header():
    text = format_matrix(edge2(F5, 3))
    assert text.splitlines()[0] == "2 2 Fp:5"
    text = format_matrix(path3())
    assert text.splitlines()[0] == "3 3 F2"


def test_parse_matrix_errors():
    with pytest.raises(ValueError):
        parse_matrix("")
    with pytest.raises(ValueError):
        parse_matrix("2 2\n0 0\n0 0\n")
    with pytest.raises(ValueError):
        parse_matrix("2 2 F2\n0 0\n")
    with pytest.raises(ValueError):
        parse_matrix("1 2 F2\n0\n")


# --------------------------------------------- multi-word-scale cross-checks
# The enumeration oracle only reaches n <= 6; these exercise the bit-packed
# GF(2) kernels across 64-bit word boundaries against independent routes.


def test_gf2_packed_rank_matches_generic_modp_at_scale():
    from frozenrank.exactla import _rank_modp
    import numpy as np

    stream = Stream(61)
    for n in (63, 64, 65, 130, 200):
        arr = np.array([[stream.randbelow(2) for _ in range(n)] for _ in range(n)],
                       dtype=np.int64)
        A = Matrix.from_rows(F2, arr.tolist())
        assert A.rank() == _rank_modp(arr, 2)


def test_rank_struct_invariances_at_scale():
    stream = Stream(62)
    for field in (F2, F5):
        A = random_matrix(stream, field, 150, 150, density_percent=3)
        r = A.rank()
        assert A.transpose().rank() == r
        doubled = block([[A, A], [A, A]])  # 300 columns: several words
        assert doubled.rank() == r
        perm = list(range(150))
        stream.shuffle(perm)
        assert relabelled(A, perm).rank() == r


def test_kernel_and_frozen_dual_route_at_scale():
    stream = Stream(63)
    for field in (F2, F5):
        for n in (100, 150):
            A = random_matrix(stream, field, n, n, density_percent=2)
            basis = A.kernel_basis()
            assert len(basis) == A.nullity()
            rows = A.to_values()
            for v in basis[:10]:
                vec = [e.value for e in v]
                for row in rows:
                    assert sum(r * x for r, x in zip(row, vec)) % field.p == 0
            # kernel-support route (RREF backward pass) against the
            # rank-drop route (forward eliminations only)
            assert frozen_set(A, "kernel").frozen == frozen_set(A, "rankdrop").frozen


# ------------------------------------------------------- property checks


@st.composite
def small_matrix(draw):
    field = draw(st.sampled_from([F2, F3, F5]))
    m = draw(st.integers(1, 6))
    n = draw(st.integers(1, 6))
    rows = draw(st.lists(
        st.lists(st.integers(0, field.p - 1), min_size=n, max_size=n),
        min_size=m, max_size=m))
    return Matrix.from_rows(field, rows)


@settings(max_examples=60, deadline=None)
@given(small_matrix())
def test_rank_bounds_and_transpose(A):
    r = A.rank()
    assert 0 <= r <= min(A.m, A.n)
    assert A.transpose().rank() == r
    assert A.rank() == rank_by_row_space_enumeration(A)


@settings(max_examples=60, deadline=None)
@given(small_matrix(), st.integers(0, 10**9))
def test_appending_rows_never_unfreezes(A, seed):
    stream = Stream(seed)
    extra = [stream.randbelow(A.field.p) for _ in range(A.n)]
    before = set(frozen_set(A).frozen)
    after = set(frozen_set(A.append_row(extra)).frozen)
    assert before <= after


@settings(max_examples=40, deadline=None)
@given(small_matrix(), st.integers(0, 10**9))
def test_relabelling_invariance(A, seed):
    if A.m != A.n:
        A = A.remove(rows=range(min(A.m, A.n), A.m), cols=range(min(A.m, A.n), A.n))
    perm = list(range(A.n))
    Stream(seed).shuffle(perm)
    B = relabelled(A, perm)
    assert A.rank() == B.rank()
    assert {perm[i] for i in frozen_set(A).frozen} == set(frozen_set(B).frozen)
    if A.n:
        assert type_census(A) == type_census(B)
