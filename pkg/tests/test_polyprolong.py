"""Polynomial prolongations, secant and Hankel ideals, theorem cross-checks."""
from fractions import Fraction
from functools import lru_cache

import pytest

from spflag.errors import RangeError
from spflag.exact import MultiPoly
from spflag.flagprolong import decompose_azp, graded_symplectic_basis
from spflag.liealg import heisenberg_from_space
from spflag.polyprolong import (
    developable_sampler,
    embed_poly,
    hankel_minor_space,
    poly_space,
    secant_ideal,
    shift_orbit_sampler,
    standard_prolong,
    symmetric_form,
    tanaka_layer_polynomials,
    verify_prolongation_theorems,
)
from spflag.symbols import build_model_space, parse_symbol
from spflag.tanaka import prolong
from spflag.flagprolong import flag_prolong


@lru_cache(maxsize=None)
def space(text):
    return build_model_space(parse_symbol(text))


@lru_cache(maxsize=None)
def decomposition(text):
    return decompose_azp(space(text))


def test_poly_space_reduction_and_contains():
    vs = ("x", "y")
    x = MultiPoly.variable(vs, "x")
    y = MultiPoly.variable(vs, "y")
    sp = poly_space(2, vs, [x * x, x * x + y * y, y * y])
    assert sp.dim == 2
    assert sp.contains(x * x - y * y * 3)
    assert not sp.contains(x * y)
    with pytest.raises(ValueError):
        poly_space(2, vs, [x])


def test_symmetric_form_small():
    x = space("D(1,0)")
    a = ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0)))
    q = symmetric_form(a, x.sigma, ("x0", "x1"))
    # sigma(v, Av) with A sending the second basis vector to the first
    assert q == MultiPoly(("x0", "x1"), {(0, 2): Fraction(-1)})


def test_standard_prolong_of_zero_space():
    x = space("D(1,0)")
    for k in range(3):
        assert standard_prolong((), k, x.sigma).dim == 0


def test_standard_prolong_full_sp_gives_all_polynomials():
    # prolongations of all of sp(2) are the full polynomial spaces
    x = space("D(1,0)")
    sp2 = []
    for k in (-2, -1, 0, 1, 2):
        sp2.extend(graded_symplectic_basis(x, k, conformal=False))
    assert len(sp2) == 3
    assert standard_prolong(tuple(sp2), 0, x.sigma).dim == 3
    assert standard_prolong(tuple(sp2), 1, x.sigma).dim == 4
    assert standard_prolong(tuple(sp2), 2, x.sigma).dim == 5


STANDARD_ORACLES = [
    ("D(3,4)", [6, 1, 0]),
    ("D(2,3)", [3, 0]),
    ("D(1,2)", [2, 0]),
]


@pytest.mark.parametrize("text,dims", STANDARD_ORACLES)
def test_standard_prolong_dimensions(text, dims):
    x = space(text)
    dec = decomposition(text)
    got = [
        standard_prolong(dec.p, k, x.sigma, weights=x.weights).dim
        for k in range(len(dims))
    ]
    assert got == dims


def test_standard_prolong_blocked_equals_flat():
    x = space("D(3,4)")
    dec = decomposition("D(3,4)")
    blocked = standard_prolong(dec.p, 1, x.sigma, weights=x.weights)
    flat = standard_prolong(dec.p, 1, x.sigma)
    assert blocked.equals(flat)


def test_standard_prolong_derivative_closure():
    x = space("D(3,4)")
    dec = decomposition("D(3,4)")
    w1 = standard_prolong(dec.p, 1, x.sigma, weights=x.weights)
    w0 = standard_prolong(dec.p, 0, x.sigma, weights=x.weights)
    assert w1.dim == 1
    for f in w1.basis:
        for name in f.variables:
            d = f.derivative(name)
            if d.terms:
                assert w0.contains(d)


def test_secant_ideal_twisted_cubic():
    x = space("D(2,3)")
    base = shift_orbit_sampler(x, 0, "F", restricted=True)
    assert secant_ideal(base, 2, 0).dim == 3
    assert secant_ideal(base, 3, 1).dim == 0


def test_secant_ideal_quartic_catalecticant():
    x = space("D(3,4)")
    base = shift_orbit_sampler(x, 0, "F", restricted=True)
    assert secant_ideal(base, 2, 0).dim == 6
    chords = secant_ideal(base, 3, 1)
    assert chords.dim == 1


def test_secant_ideal_members_vanish_symbolically():
    # independent re-certification of the emitted polynomials
    x = space("D(3,4)")
    base = shift_orbit_sampler(x, 0, "F", restricted=True)
    ideal = secant_ideal(base, 2, 0)
    subs_map = {name: c for name, c in zip(base.ambient, base.coords)}
    for f in ideal.basis:
        assert not f.subs(subs_map).terms


def test_secant_ideal_deterministic():
    x = space("D(2,3)")
    base = shift_orbit_sampler(x, 0, "F", restricted=True)
    a = secant_ideal(base, 2, 0, seed=42)
    b = secant_ideal(base, 2, 0, seed=42)
    assert a.basis == b.basis


def test_developable_ideal_slice():
    # quadrics through the tangent surface of the rational normal quartic
    x = space("D(2,4)")
    base = shift_orbit_sampler(x, 0, "F", restricted=True)
    tangent = developable_sampler(base, 1)
    ideal = secant_ideal(tangent, 2, 0)
    assert ideal.dim == 1
    subs_map = {name: c for name, c in zip(tangent.ambient, tangent.coords)}
    for f in ideal.basis:
        assert not f.subs(subs_map).terms


def test_hankel_minor_space_values():
    assert hankel_minor_space(2, 0, 1).dim == 3
    assert hankel_minor_space(3, 1, 2).dim == 1
    assert hankel_minor_space(3, 1).dim == 1


def test_hankel_range_errors():
    with pytest.raises(RangeError):
        hankel_minor_space(2, 1)
    with pytest.raises(RangeError):
        hankel_minor_space(3, 1, alpha=5)


def test_hankel_minors_vanish_on_moment_curve():
    sp = hankel_minor_space(2, 0)
    t = MultiPoly.variable(("t",), "t")
    subs_map = {f"x{i}": t ** (i - 1) for i in range(1, 5)}
    for f in sp.basis:
        assert not f.subs(subs_map).terms


def test_hankel_matches_secant_after_rescaling():
    # the shifted-row minor space is the curve ideal once coordinates are
    # rescaled from the moment curve to the exponential curve
    x = space("D(2,3)")
    base = shift_orbit_sampler(x, 0, "F", restricted=True)
    ideal = secant_ideal(base, 2, 0)
    hank = hankel_minor_space(2, 0)
    fact = Fraction(1)
    ren = {}
    for i in range(4):
        if i:
            fact *= i
        ren[f"x{i + 1}"] = MultiPoly.variable(base.ambient, f"y{i}") * fact
    rescaled = poly_space(2, base.ambient, [f.subs(ren) for f in hank.basis])
    assert rescaled.equals(ideal)


def test_layer_polynomials_faithful():
    x = space("R(3/2)")
    fp = flag_prolong(x)
    tp = prolong(heisenberg_from_space(x), fp.matrices(), kmax=6)
    u1 = tanaka_layer_polynomials(tp, 1)
    assert u1.dim == len(tp.layers[0]) == 4


def test_embed_poly_renames():
    p = MultiPoly(("y0", "y1"), {(1, 1): Fraction(2)})
    q = embed_poly(p, ("x0", "x1", "x2"), {"y0": 0, "y1": 2})
    assert q == MultiPoly(("x0", "x1", "x2"), {(1, 0, 1): Fraction(2)})


def test_verify_report_nonrectangular_tower():
    rep = verify_prolongation_theorems(parse_symbol("D(2,3)"), 1)
    assert rep["terminated"]
    assert rep["hypotheses"]["standard_equality"]["holds"]
    assert rep["hypotheses"]["tangential_secant"]["holds"]
    e = rep["layers"][0]
    assert e["dim_layer"] == e["dim_p"] == e["dim_l"] == e["dim_ideal"] == 0
    assert rep["passes"]["standard_equality"] is True
    assert rep["passes"]["tangential_secant"] is True
    assert rep["passes"]["row_secant_inclusion"] is True


def test_verify_report_skips_small_rows():
    rep = verify_prolongation_theorems(parse_symbol("R(3/2)"), 1)
    hyp = rep["hypotheses"]["standard_equality"]
    assert hyp["holds"] is False
    assert "6" in hyp["why"]
    assert rep["passes"]["standard_equality"] is None
    # the first layer is computed anyway and is nonzero
    assert rep["layers"][0]["dim_layer"] == 4


def test_verify_report_quartic_tower():
    rep = verify_prolongation_theorems(parse_symbol("D(3,4)"), 2)
    dims = [(e["dim_layer"], e["dim_p"], e["dim_l"], e["dim_ideal"]) for e in rep["layers"]]
    assert dims == [(1, 1, 1, 1), (0, 0, 0, 0)]
    assert all(e["layer_equals_p"] and e["p_equals_l"] and e["ideal_equals_p"]
               for e in rep["layers"])
    assert rep["passes"] == {
        "standard_equality": True,
        "tangential_secant": True,
        "row_secant_inclusion": True,
    }
