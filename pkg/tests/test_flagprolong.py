"""Flag prolongation, sl2 structure, a/z/p decomposition, dimension predictors."""
import random
from fractions import Fraction
from functools import lru_cache

import pytest

from spflag.exact import (
    MultiPoly,
    mat_add,
    mat_mul,
    mat_sub,
    identity_matrix,
    is_zero_matrix,
    rank,
    span_contains,
    spans_equal,
    transpose,
)
from spflag.flagprolong import (
    MatrixSubspace,
    decompose_azp,
    flag_prolong,
    flatten_matrix,
    graded_symplectic_basis,
    predicted_dims,
    rank_one_element,
    row_scaling_generators,
    sl2_triple,
)
from spflag.symbols import build_model_space, parse_symbol


@lru_cache(maxsize=None)
def space(text):
    return build_model_space(parse_symbol(text))


@lru_cache(maxsize=None)
def prolong(text):
    return flag_prolong(space(text))


@lru_cache(maxsize=None)
def decomposition(text):
    return decompose_azp(space(text))


def commutator(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def test_matrix_subspace_contains_and_equals():
    m1 = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(0)))
    m2 = ((Fraction(0), Fraction(0)), (Fraction(0), Fraction(1)))
    sub = MatrixSubspace((2, 2), (m1, m2))
    assert sub.dim == 2
    assert sub.contains(((Fraction(3), Fraction(0)), (Fraction(0), Fraction(-2))))
    assert not sub.contains(((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0))))
    other = MatrixSubspace((2, 2), (mat_add(m1, m2), mat_sub(m1, m2)))
    assert sub.equals(other)
    assert MatrixSubspace((2, 2), ()).contains(((Fraction(0),) * 2,) * 2)


def test_graded_basis_degree_zero():
    x = space("D(1,0)")
    plain = graded_symplectic_basis(x, 0, conformal=False)
    conf = graded_symplectic_basis(x, 0, conformal=True)
    assert len(plain) == 1 and len(conf) == 2
    flat = [flatten_matrix(m) for m in conf]
    assert span_contains(flat, flatten_matrix(identity_matrix(2)))


@pytest.mark.parametrize("text", ["D(2,3)", "D(1,2)", "R(5/2)", "D(5/2,1)"])
def test_graded_basis_members_are_symplectic(text):
    x = space(text)
    spread = max(x.weights) - min(x.weights)
    k = Fraction(0)
    while k <= spread:
        for a in graded_symplectic_basis(x, k, conformal=False):
            defect = mat_add(mat_mul(transpose(a), x.sigma), mat_mul(x.sigma, a))
            assert is_zero_matrix(defect)
            for i in range(x.dim):
                for j in range(x.dim):
                    if a[i][j] != 0:
                        assert x.weights[i] - x.weights[j] == k
        k += Fraction(1, 2)


@pytest.mark.parametrize(
    "text", ["R(3/2)", "R(5/2)", "D(1,2)", "D(2,3)", "D(3,4)", "D(5/2,1)", "D(2,3)+R(5/2)"]
)
def test_sl2_relations(text):
    x = space(text)
    t = sl2_triple(x)
    assert t.e == x.shift
    minus_two_e = tuple(tuple(-2 * v for v in row) for row in t.e)
    two_f = tuple(tuple(2 * v for v in row) for row in t.f)
    assert commutator(t.e, t.f) == t.h
    assert commutator(t.h, t.e) == minus_two_e
    assert commutator(t.h, t.f) == two_f
    for m in (t.e, t.h, t.f):
        defect = mat_add(mat_mul(transpose(m), x.sigma), mat_mul(x.sigma, m))
        assert is_zero_matrix(defect)


def test_sl2_one_row_values():
    x = space("R(3/2)")
    t = sl2_triple(x)
    diag = [t.h[i][i] for i in range(4)]
    assert sorted(diag, reverse=True) == [3, 1, -1, -3]
    nonzero = sorted(t.f[i][j] for i in range(4) for j in range(4) if t.f[i][j] != 0)
    assert nonzero == [-4, -3, -3]


FLAG_TOTALS = [
    ("R(3/2)", 4),
    ("R(5/2)", 4),
    ("D(1,2)", 7),
    ("D(2,3)", 8),
    ("D(3,4)", 11),
    ("D(2,4)", 7),
    ("D(2,0)", 3),
    ("D(0,0)", 4),
    ("D(5/2,1)", 8),
]


@pytest.mark.parametrize("text,total", FLAG_TOTALS)
def test_flag_totals(text, total):
    assert prolong(text).total_dim == total


def test_flag_per_degree_profile():
    fp = prolong("D(2,3)")
    assert fp.layer_dim(-1) == 1
    assert [fp.layers[d].dim for d in fp.degrees] == [4, 2, 1, 0, 0]


@pytest.mark.parametrize("text", ["D(2,3)", "D(3,4)", "D(1,2)+R(3/2)", "D(2,0)"])
def test_flag_layers_chain_into_previous(text):
    x = space(text)
    fp = prolong(text)
    n = x.dim
    shift_zero = is_zero_matrix(x.shift)
    for k in fp.degrees:
        if k == 0:
            prev = MatrixSubspace((n, n), () if shift_zero else (x.shift,))
        elif k == Fraction(1, 2):
            prev = MatrixSubspace((n, n), ())
        else:
            prev = fp.layers[k - 1]
        for a in fp.layers[k].basis:
            assert prev.contains(commutator(a, x.shift))
            defect = mat_add(mat_mul(transpose(a), x.sigma), mat_mul(x.sigma, a))
            if k != 0:
                assert is_zero_matrix(defect)
            for i in range(n):
                for j in range(n):
                    if a[i][j] != 0:
                        assert x.weights[i] - x.weights[j] == k


def test_flag_kmax_truncates():
    full = prolong("D(2,3)")
    cut = flag_prolong(space("D(2,3)"), k_max=0)
    assert cut.degrees == (Fraction(0),)
    assert cut.total_dim == 1 + full.layers[Fraction(0)].dim


def test_flag_determinism():
    a = flag_prolong(space("D(2,3)"))
    b = flag_prolong(space("D(2,3)"))
    assert a.degrees == b.degrees
    assert all(a.layers[d].basis == b.layers[d].basis for d in a.degrees)


@pytest.mark.parametrize("text", ["D(1,2)", "D(2,3)", "R(5/2)", "D(2,0)", "D(1,0)+R(3/2)"])
def test_flag_is_radical_plus_identity_line(text):
    x = space(text)
    fp = prolong(text)
    dec = decomposition(text)
    ident = identity_matrix(x.dim)
    sl2_part = [m for m in (dec.sl2.e, dec.sl2.h, dec.sl2.f) if not is_zero_matrix(m)]
    expected = list(dec.l_of_x.basis) + sl2_part + [ident]
    assert spans_equal(
        [flatten_matrix(m) for m in fp.matrices()],
        [flatten_matrix(m) for m in expected],
    )
    assert dec.r_of_uf.dim == dec.l_of_x.dim + len(sl2_part)
    assert fp.total_dim == dec.r_of_uf.dim + 1


DECOMP_ORACLES = [
    # text, l, z, p
    ("D(1,2)", 3, 1, 2),
    ("D(2,3)", 4, 1, 3),
    ("R(3/2)", 0, 0, 0),
    ("R(5/2)", 0, 0, 0),
    ("D(3,4)", 7, 1, 6),
]


@pytest.mark.parametrize("text,l,z,p", DECOMP_ORACLES)
def test_decompose_dimensions(text, l, z, p):
    dec = decomposition(text)
    assert dec.l_of_x.dim == l
    assert dec.z.dim == z
    assert dec.p.dim == p


@pytest.mark.parametrize("text", ["D(1,2)", "D(2,3)+D(1,0)", "2*D(1,0)", "D(3/2,2)"])
def test_z_is_row_scaling_span(text):
    x = space(text)
    dec = decomposition(text)
    gens = row_scaling_generators(x)
    assert spans_equal(
        [flatten_matrix(m) for m in dec.z.basis],
        [flatten_matrix(m) for m in gens],
    )


@pytest.mark.parametrize("text", ["D(1,2)", "D(2,3)", "R(5/2)", "D(2,0)", "D(1,2)+R(3/2)"])
def test_a_splits_into_z_and_sl2(text):
    dec = decomposition(text)
    sl2_part = [m for m in (dec.sl2.e, dec.sl2.h, dec.sl2.f) if not is_zero_matrix(m)]
    assert dec.a.dim == dec.z.dim + len(sl2_part)
    assert spans_equal(
        [flatten_matrix(m) for m in dec.a.basis],
        [flatten_matrix(m) for m in list(dec.z.basis) + sl2_part],
    )


@pytest.mark.parametrize(
    "text", ["D(1,2)", "D(2,3)", "D(2,0)", "D(2,3)+D(1,0)", "D(1,2)+R(3/2)", "D(5/2,1)"]
)
def test_l_splits_into_z_and_p(text):
    dec = decomposition(text)
    assert dec.l_of_x.dim == dec.z.dim + dec.p.dim
    assert spans_equal(
        [flatten_matrix(m) for m in dec.l_of_x.basis],
        [flatten_matrix(m) for m in list(dec.z.basis) + list(dec.p.basis)],
    )


def _poly_constant(c):
    return MultiPoly.constant(("t",), c)


def _poly_exp_of_shift(delta, sign):
    # exponential of the nilpotent shift, entries polynomial in t
    n = len(delta)
    t = MultiPoly.variable(("t",), "t")
    out = [[_poly_constant(1 if i == j else 0) for j in range(n)] for i in range(n)]
    power = [[_poly_constant(1 if i == j else 0) for j in range(n)] for i in range(n)]
    dmat = [[_poly_constant(sign * delta[i][j]) for j in range(n)] for i in range(n)]
    fact = Fraction(1)
    for k in range(1, n + 1):
        power = [
            [sum((power[i][m] * dmat[m][j] for m in range(n)), _poly_constant(0)) for j in range(n)]
            for i in range(n)
        ]
        if all(power[i][j] == 0 for i in range(n) for j in range(n)):
            break
        fact *= k
        for i in range(n):
            for j in range(n):
                out[i][j] = out[i][j] + power[i][j] * t ** k * Fraction(1, fact)
    return out


def _poly_matmul(a, b):
    n = len(a)
    return [
        [sum((a[i][m] * b[m][j] for m in range(n)), _poly_constant(0)) for j in range(n)]
        for i in range(n)
    ]


@pytest.mark.parametrize("text", ["D(1,2)", "D(2,3)", "D(5/2,1)"])
def test_l_preserves_exponentiated_weight_filtration(text):
    # conjugating by exp(t * shift) must keep every weight-filtration level
    # invariant, as an identity of polynomial matrices
    x = space(text)
    dec = decomposition(text)
    n = x.dim
    e_plus = _poly_exp_of_shift(x.shift, 1)
    e_minus = _poly_exp_of_shift(x.shift, -1)
    levels = sorted(set(x.weights), reverse=True)
    for a in dec.l_of_x.basis:
        a_poly = [[_poly_constant(a[i][j]) for j in range(n)] for i in range(n)]
        conj = _poly_matmul(e_minus, _poly_matmul(a_poly, e_plus))
        for theta in levels:
            inside = {i for i in range(n) if x.weights[i] >= theta}
            for j in inside:
                for i in range(n):
                    if i not in inside:
                        assert conj[i][j] == 0


def test_rank_one_element_is_symplectic_and_rank_one():
    x = space("D(2,3)")
    rng = random.Random(11)
    for _ in range(10):
        v = [Fraction(rng.randint(-4, 4)) for _ in range(x.dim)]
        a = rank_one_element(x, v)
        defect = mat_add(mat_mul(transpose(a), x.sigma), mat_mul(x.sigma, a))
        assert is_zero_matrix(defect)
        assert rank([list(r) for r in a]) <= 1


@pytest.mark.parametrize("text", ["D(1,1)", "D(2,2)", "D(3,2)", "D(2,1)", "D(3,3)"])
def test_rank_one_witness_when_overlap_condition_fails(text):
    # row-overlap failure admits a rank-one element inside p, found at the
    # top box of the upper row
    x = space(text)
    dec = decomposition(text)
    top = max(range(x.dim), key=lambda i: x.weights[i])
    v = [Fraction(0)] * x.dim
    v[top] = Fraction(1)
    a = rank_one_element(x, v)
    assert rank([list(r) for r in a]) == 1
    assert dec.p.contains(a)


@pytest.mark.parametrize("text", ["D(1,2)", "D(2,3)", "D(3,4)", "R(5/2)", "D(2,3)+R(5/2)"])
def test_rank_one_absent_for_finite_type(text):
    x = space(text)
    dec = decomposition(text)
    rng = random.Random(23)
    candidates = []
    for b in range(x.dim):
        v = [Fraction(0)] * x.dim
        v[b] = Fraction(1)
        candidates.append(v)
    for _ in range(20):
        candidates.append([Fraction(rng.randint(-5, 5)) for _ in range(x.dim)])
    for v in candidates:
        a = rank_one_element(x, v)
        if is_zero_matrix(a):
            continue
        assert not dec.p.contains(a)
        assert not dec.l_of_x.contains(a)


PREDICTION_SAMPLES = [
    "R(3/2)",
    "D(1,2)",
    "D(2,3)",
    "D(3,4)",
    "D(2,4)",
    "D(2,0)",
    "D(0,0)",
    "D(5/2,1)",
    "D(3/2,2)",
    "D(1,2)+R(3/2)",
    "D(2,3)+D(1,0)",
    "2*D(1,0)",
    "D(1,1)+D(1,1)",
    "D(3/2,0)+R(3/2)",
    "D(2,2)",
]


@pytest.mark.parametrize("text", PREDICTION_SAMPLES)
def test_predicted_matches_computed(text):
    sym = parse_symbol(text)
    pd = predicted_dims(sym)
    fp = prolong(text)
    dec = decomposition(text)
    assert pd["flag_total"] == fp.total_dim
    assert pd["l"] == dec.l_of_x.dim
    assert pd["z"] == dec.z.dim
    assert pd["p"] == dec.p.dim


def test_predicted_row_pair_values():
    pd = predicted_dims(parse_symbol("D(2,3)+D(1,0)"))
    # the only nonvanishing cross pair maps the long mirror row onto the pad
    assert sorted(pd["row_pairs"].values()) == [0, 0, 0, 4]
    assert pd["s_e"] == {0: 3, 1: 1}
    assert pd["s_f"] == {0: 0, 1: 0}
    assert pd["l"] == 10

    pd2 = predicted_dims(parse_symbol("2*D(1,0)"))
    assert sorted(pd2["row_pairs"].values()) == [0, 1, 1, 1]
    assert pd2["l"] == 7
    assert pd2["flag_total"] == 8
