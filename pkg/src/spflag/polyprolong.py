"""Spencer prolongations as spaces of homogeneous polynomials, secant and
Hankel-minor ideal slices, and the harness comparing them with the graded
prolongation layers.

Polynomial spaces are exact: secant ideals are found by seeded rational
sampling but every reported polynomial is certified by symbolic substitution
of the variety's parametrization, so randomness never leaks into results.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import CertificationFailure, RangeError
from .exact import (
    MultiPoly,
    det_generic,
    kernel_basis,
    monomials_of_degree,
    rref,
    span_contains,
    spans_equal,
)
from .flagprolong import (
    MatrixSubspace,
    decompose_azp,
    flag_prolong,
)
from .liealg import heisenberg_from_space
from .symbols import (
    GradedSymplecticSpace,
    OneRow,
    TwoRow,
    build_model_space,
    is_finite_type,
    render_symbol,
    rows_of,
)
from .tanaka import TanakaProlongation, prolong
from .errors import CapReached


def default_variables(n):
    return tuple(f"x{i}" for i in range(n))


@dataclass(frozen=True)
class PolySpace:
    degree: int
    variables: tuple
    basis: tuple

    @property
    def dim(self):
        return len(self.basis)

    def _vectors(self):
        monos = monomials_of_degree(len(self.variables), self.degree)
        return [p.coefficient_vector(monos) for p in self.basis]

    def contains(self, p):
        monos = monomials_of_degree(len(self.variables), self.degree)
        v = p.coefficient_vector(monos)
        if not self.basis:
            return all(c == 0 for c in v)
        return span_contains(self._vectors(), v)

    def equals(self, other):
        if self.degree != other.degree or self.variables != other.variables:
            return False
        return spans_equal(self._vectors(), other._vectors())


def poly_space(degree, variables, polys):
    """Span-reduce to a canonical independent basis; validates homogeneity."""
    variables = tuple(variables)
    monos = monomials_of_degree(len(variables), degree)
    vecs = []
    for p in polys:
        if not p.terms:
            continue
        if any(sum(e) != degree for e in p.terms):
            raise ValueError("inhomogeneous polynomial for this space")
        vecs.append(p.coefficient_vector(monos))
    if not vecs:
        return PolySpace(degree, variables, ())
    reduced = rref(vecs)[0]
    basis = tuple(
        MultiPoly(variables, {m: c for m, c in zip(monos, row) if c != 0})
        for row in reduced
    )
    return PolySpace(degree, variables, basis)


def symmetric_form(a, sigma, variables):
    """The quadratic form v -> sigma(v, A v) of a symplectic endomorphism."""
    n = len(sigma)
    terms = {}
    for i in range(n):
        for m in range(n):
            c = sum((sigma[i][j] * a[j][m] for j in range(n)), Fraction(0))
            if c == 0:
                continue
            exp = [0] * n
            exp[i] += 1
            exp[m] += 1
            exp = tuple(exp)
            terms[exp] = terms.get(exp, Fraction(0)) + c
    return MultiPoly(tuple(variables), {e: c for e, c in terms.items() if c != 0})


def _falling_factor(mu, alpha):
    # coefficient of x^(mu-alpha) in d^alpha(x^mu)
    c = 1
    for m_e, a_e in zip(mu, alpha):
        if a_e > m_e:
            return 0
        for t in range(a_e):
            c *= m_e - t
    return c


def standard_prolong(w, k, sigma, variables=None, weights=None):
    """Homogeneous degree-(k+2) polynomials whose order-k partials all lie in
    the quadratic-form space of w; k = 0 gives that quadratic space itself.

    When per-variable weights are supplied and the quadratic space is
    weight-homogeneous, the kernel splits into independent weight blocks.
    """
    if isinstance(w, MatrixSubspace):
        mats = w.basis
    else:
        mats = tuple(w)
    n = len(sigma)
    if variables is None:
        variables = default_variables(n)
    quad = poly_space(2, variables, [symmetric_form(a, sigma, variables) for a in mats])
    if k == 0:
        return quad
    monos_f = monomials_of_degree(n, k + 2)
    monos_a = monomials_of_degree(n, k)
    monos_2 = monomials_of_degree(n, 2)

    def mono_weight(exp):
        return sum((Fraction(e) * weights[i] for i, e in enumerate(exp)), Fraction(0))

    if weights is not None:
        quad_weights = []
        homogeneous = True
        for q in quad.basis:
            ws = {mono_weight(e) for e in q.terms}
            if len(ws) != 1:
                homogeneous = False
                break
            quad_weights.append(ws.pop())
        if not homogeneous:
            weights = None

    if weights is None:
        blocks = {None: list(range(len(monos_f)))}
    else:
        blocks = {}
        for idx, mu in enumerate(monos_f):
            blocks.setdefault(mono_weight(mu), []).append(idx)

    out_polys = []
    for omega, mu_indices in blocks.items():
        mu_col = {monos_f[i]: c for c, i in enumerate(mu_indices)}
        aux = []          # (alpha_index, quad_index) -> column
        aux_col = {}
        for ai, alpha in enumerate(monos_a):
            for qi in range(quad.dim):
                if omega is not None and quad_weights[qi] + mono_weight(alpha) != omega:
                    continue
                aux_col[(ai, qi)] = len(mu_indices) + len(aux)
                aux.append((ai, qi))
        nvars = len(mu_indices) + len(aux)
        rows = []
        for ai, alpha in enumerate(monos_a):
            for m in monos_2:
                mu = tuple(a + b for a, b in zip(alpha, m))
                if mu not in mu_col:
                    continue
                row = [Fraction(0)] * nvars
                row[mu_col[mu]] = Fraction(_falling_factor(mu, alpha))
                for qi in range(quad.dim):
                    col = aux_col.get((ai, qi))
                    if col is not None:
                        row[col] = -quad.basis[qi].terms.get(m, Fraction(0))
                rows.append(row)
        if not rows:
            continue
        for v in kernel_basis(tuple(tuple(r) for r in rows)):
            terms = {}
            for c, i in enumerate(mu_indices):
                if v[c] != 0:
                    terms[monos_f[i]] = v[c]
            if terms:
                out_polys.append(MultiPoly(tuple(variables), terms))
    return poly_space(k + 2, variables, out_polys)


# ---------------------------------------------------------------------------
# varieties: curves, developables, secants

@dataclass(frozen=True)
class VarietySampler:
    params: tuple     # parameter names
    coords: tuple     # MultiPoly over params, one per ambient coordinate
    ambient: tuple    # ambient variable names
    degree: int       # bound on the coordinate degrees


def shift_orbit_sampler(x: GradedSymplecticSpace, component, kind="F", restricted=False):
    """The curve swept from the top box of a row by the shift exponential.

    Coordinates are t^i / i! down the row, zero elsewhere; with restricted
    the ambient is just that row (a rational normal curve of degree = row
    length), otherwise the whole space.
    """
    rows = rows_of(x.symbol)
    row_idx = None
    for ri, r in enumerate(rows):
        if r.component == component and (r.kind == kind or r.kind == "C"):
            row_idx = ri
            break
    if row_idx is None:
        raise ValueError("no such row")
    boxes = [i for i in range(x.dim) if x.row_index[i] == row_idx]
    boxes.sort(key=lambda i: x.weights[i], reverse=True)
    params = ("t",)
    t = MultiPoly.variable(params, "t")
    fact = Fraction(1)
    curve = []
    for pos in range(len(boxes)):
        if pos:
            fact *= pos
        curve.append(t ** pos * Fraction(1, fact))
    if restricted:
        ambient = tuple(f"y{p}" for p in range(len(boxes)))
        coords = tuple(curve)
    else:
        ambient = default_variables(x.dim)
        zero = MultiPoly.constant(params, 0)
        full = [zero] * x.dim
        for pos, i in enumerate(boxes):
            full[i] = curve[pos]
        coords = tuple(full)
    return VarietySampler(params, coords, ambient, len(boxes) - 1)


def developable_sampler(base: VarietySampler, j):
    """Union of j-th osculating spaces: sum of u_i times the i-th derivative."""
    if base.params != ("t",):
        raise ValueError("expected a one-parameter curve")
    params = ("t",) + tuple(f"u{i}" for i in range(j + 1))
    t_new = MultiPoly.variable(params, "t")
    coords = []
    for c in base.coords:
        total = MultiPoly.constant(params, 0)
        deriv = c
        for i in range(j + 1):
            u_i = MultiPoly.variable(params, f"u{i}")
            total = total + deriv.subs({"t": t_new}) * u_i
            deriv = deriv.derivative("t")
        coords.append(total)
    return VarietySampler(params, tuple(coords), base.ambient, base.degree + 1)


def _secant_parametrization(v: VarietySampler, k):
    """Symbolic point of the k-th secant: one parameter copy per point plus
    mixing coefficients c1..ck (the first point enters with coefficient 1)."""
    all_params = []
    for copy in range(k + 1):
        all_params.extend(f"{name}__{copy}" for name in v.params)
    mix = [f"c__{i}" for i in range(1, k + 1)]
    all_params = tuple(all_params) + tuple(mix)
    point = [MultiPoly.constant(all_params, 0) for _ in v.coords]
    for copy in range(k + 1):
        ren = {
            name: MultiPoly.variable(all_params, f"{name}__{copy}") for name in v.params
        }
        scale = (
            MultiPoly.constant(all_params, 1)
            if copy == 0
            else MultiPoly.variable(all_params, f"c__{copy}")
        )
        for idx, c in enumerate(v.coords):
            point[idx] = point[idx] + c.subs(ren) * scale
    return all_params, tuple(point)


def _random_rational(rng):
    return Fraction(rng.randint(-20, 20), rng.randint(1, 7))


def secant_ideal(v: VarietySampler, degree, k, seed=42, max_rounds=4):
    """Degree slice of the ideal of the k-th secant variety.

    Sampling bounds the space from above; symbolic certification of every
    kernel element makes the result exact.  More samples are added until all
    kernel elements certify.
    """
    nvars = len(v.coords)
    monos = monomials_of_degree(nvars, degree)
    rng = random.Random(seed)
    all_params, point = _secant_parametrization(v, k)
    rows = []
    need = len(monos) + 8
    for round_no in range(max_rounds):
        while len(rows) < need:
            vals = {}
            for copy in range(k + 1):
                for name in v.params:
                    vals[f"{name}__{copy}"] = _random_rational(rng)
            for i in range(1, k + 1):
                vals[f"c__{i}"] = _random_rational(rng)
            pt = [c.subs(vals) for c in point]
            row = []
            for m in monos:
                val = Fraction(1)
                for coord, e in zip(pt, m):
                    if e:
                        val *= coord ** e
                row.append(val)
            rows.append(tuple(row))
        kern = kernel_basis(tuple(rows))
        polys = [
            MultiPoly(v.ambient, {m: c for m, c in zip(monos, vec) if c != 0})
            for vec in kern
        ]
        subs_map = {name: p for name, p in zip(v.ambient, point)}
        if all(not p.subs(subs_map).terms for p in polys if p.terms):
            return poly_space(degree, v.ambient, polys)
        need *= 2
    raise CertificationFailure(
        f"secant ideal sampling did not stabilize after {max_rounds} rounds"
    )


def hankel_minor_space(s, k, alpha=None):
    """Span of the (k+2)-minors of the (alpha+1) x (s+2-alpha) Hankel matrix
    in s+2 variables; all admissible alpha when none is given."""
    alphas = [a for a in range(k + 1, s - k + 1)]
    if alpha is not None:
        if alpha not in alphas:
            raise RangeError(f"no (k+2)-minors exist for alpha={alpha}, s={s}, k={k}")
        alphas = [alpha]
    if not alphas:
        raise RangeError(f"no admissible alpha for s={s}, k={k}")
    variables = tuple(f"x{i}" for i in range(1, s + 3))
    gens = [MultiPoly.variable(variables, name) for name in variables]
    minors = []
    size = k + 2
    for a in alphas:
        nrows, ncols = a + 1, s + 2 - a
        for rsel in itertools.combinations(range(nrows), size):
            for csel in itertools.combinations(range(ncols), size):
                sub = [[gens[i + j + 1 - 1] for j in csel] for i in rsel]
                minors.append(det_generic(sub))
    return poly_space(size, variables, minors)


# ---------------------------------------------------------------------------
# layer elements as polynomials

def tanaka_layer_polynomials(tp: TanakaProlongation, k, variables=None):
    """Each positive layer element determines a degree-(k+2) polynomial by
    composing its generator action down to a matrix and pairing with sigma."""
    x = tp.heis.space
    n = x.dim
    if variables is None:
        variables = default_variables(n)
    xs = [MultiPoly.variable(variables, name) for name in variables]
    zero = MultiPoly.constant(variables, 0)
    layer = tp.layers[k - 1] if k - 1 < len(tp.layers) else ()
    polys = []
    for pick in range(len(layer)):
        cur = [MultiPoly.constant(variables, 1 if i == pick else 0) for i in range(len(layer))]
        for j in range(k, 0, -1):
            basis_j = tp.layers[j - 1]
            prev_dim = len(tp.layers[j - 2]) if j >= 2 else len(tp.g0)
            nxt = [zero] * prev_dim
            for idx, elem in enumerate(basis_j):
                if not cur[idx].terms:
                    continue
                for r in range(prev_dim):
                    lin = zero
                    for a in range(n):
                        if elem.m1[r][a] != 0:
                            lin = lin + xs[a] * elem.m1[r][a]
                    if lin.terms:
                        nxt[r] = nxt[r] + cur[idx] * lin
            cur = nxt
        w_vec = [zero] * n
        for s_idx, coord in enumerate(cur):
            if not coord.terms:
                continue
            g = tp.g0[s_idx]
            for row_i in range(n):
                lin = zero
                for m in range(n):
                    if g[row_i][m] != 0:
                        lin = lin + xs[m] * g[row_i][m]
                if lin.terms:
                    w_vec[row_i] = w_vec[row_i] + coord * lin
        f_poly = zero
        for i in range(n):
            for j2 in range(n):
                if x.sigma[i][j2] != 0 and w_vec[j2].terms:
                    f_poly = f_poly + xs[i] * w_vec[j2] * x.sigma[i][j2]
        polys.append(f_poly)
    return poly_space(k + 2, tuple(variables), polys)


def embed_poly(p: MultiPoly, target_vars, position_of):
    """Rename/embed a polynomial into a larger variable tuple."""
    ren = {
        name: MultiPoly.variable(tuple(target_vars), target_vars[position_of[name]])
        for name in p.variables
    }
    out = p.subs(ren)
    if isinstance(out, Fraction):
        return MultiPoly.constant(tuple(target_vars), out)
    return out


# ---------------------------------------------------------------------------
# the verification harness

def _genpr_hypotheses(sym):
    """Every integer-graded row needs at least 4 boxes, every half-odd row at
    least 6, and the symbol must be finite type."""
    if not is_finite_type(sym):
        return False, "not finite type"
    for r in rows_of(sym):
        boxes = int(r.top - r.bottom) + 1
        half_odd = (r.top - int(r.top)) != 0
        if half_odd and boxes < 6:
            return False, f"half-odd row with {boxes} boxes < 6"
        if not half_odd and boxes < 4:
            return False, f"integer row with {boxes} boxes < 4"
    return True, ""


def _pairwise_hypotheses(sym):
    two = [c for c in sym.components if isinstance(c, TwoRow)]
    if any(isinstance(c, OneRow) for c in sym.components):
        return False, "one-row component present"
    for a, b in itertools.combinations(two, 2):
        if a.s + b.s <= max(a.l, b.l):
            return False, "row sums too small for some pair"
    for c in two:
        if 2 * c.s <= c.l:
            return False, "2s <= l for some component"
    return True, ""


def _tangential_hypotheses(sym):
    two = [c for c in sym.components if isinstance(c, TwoRow)]
    if len(sym.components) != 1 or not two:
        return False, "not a single two-row symbol"
    c = two[0]
    if not (c.s < c.l < 2 * c.s):
        return False, "needs s < l < 2s"
    if c.s != int(c.s):
        return False, "integer rows required"
    return True, ""


def verify_prolongation_theorems(sym, k_max, seed=42):
    """Cross-check the graded layers against standard prolongations and the
    secant-variety ideal slices; returns a JSON-friendly report."""
    x = build_model_space(sym)
    fp = flag_prolong(x)
    dec = decompose_azp(x)
    heis = heisenberg_from_space(x)
    genpr_ok, genpr_why = _genpr_hypotheses(sym)
    sec85_ok, sec85_why = _pairwise_hypotheses(sym)
    sec81_ok, sec81_why = _tangential_hypotheses(sym)
    tp = None
    cap_report = None
    try:
        tp = prolong(heis, fp.matrices(), kmax=max(k_max + 1, 6))
    except CapReached as exc:
        cap_report = exc.report

    report = {
        "symbol": render_symbol(sym),
        "seed": seed,
        "hypotheses": {
            "standard_equality": {"holds": genpr_ok, "why": genpr_why},
            "pairwise_ideal": {"holds": sec85_ok, "why": sec85_why},
            "tangential_secant": {"holds": sec81_ok, "why": sec81_why},
        },
        "terminated": tp is not None,
        "layers": [],
    }
    if tp is not None:
        degrees = dict(tp.report.degrees)
    elif cap_report is not None:
        degrees = dict(cap_report.degrees)
    else:
        degrees = {}

    xvars = default_variables(x.dim)
    pos_of = {name: i for i, name in enumerate(xvars)}
    single_two = len(sym.components) == 1 and isinstance(sym.components[0], TwoRow)
    for k in range(1, k_max + 1):
        entry = {"k": k, "dim_layer": degrees.get(k, 0 if tp is not None else None)}
        p_k = standard_prolong(dec.p, k, x.sigma, variables=xvars, weights=x.weights)
        l_k = standard_prolong(dec.l_of_x, k, x.sigma, variables=xvars, weights=x.weights)
        entry["dim_p"] = p_k.dim
        entry["dim_l"] = l_k.dim
        entry["p_equals_l"] = p_k.equals(l_k)
        if tp is not None:
            u_k = tanaka_layer_polynomials(tp, k, variables=xvars)
            entry["dim_layer_polys"] = u_k.dim
            entry["layer_faithful"] = u_k.dim == entry["dim_layer"]
            entry["layer_equals_p"] = u_k.equals(p_k)
        ideal_dim = None
        ideal_equal = None
        if single_two and sec81_ok:
            c = sym.components[0]
            j = int(c.l - c.s - 1)
            base = shift_orbit_sampler(x, 0, "F", restricted=True)
            var = base if j == 0 else developable_sampler(base, j)
            ideal = secant_ideal(var, k + 2, k, seed=seed)
            ideal_dim = ideal.dim
            row_boxes = [
                i
                for i in range(x.dim)
                if x.row_index[i] == _row_index_of(x, 0, "F")
            ]
            row_boxes.sort(key=lambda i: x.weights[i], reverse=True)
            emb_pos = {f"y{p}": row_boxes[p] for p in range(len(row_boxes))}
            embedded = poly_space(
                k + 2, xvars, [embed_poly(q, xvars, emb_pos) for q in ideal.basis]
            )
            ideal_equal = embedded.equals(p_k)
        entry["dim_ideal"] = ideal_dim
        entry["ideal_equals_p"] = ideal_equal
        # containment in the per-row secant ideals: certify each polynomial
        # vanishes on the k-th secant of every row curve
        inclusion = True
        for ci in range(len(sym.components)):
            for kind in ("F",):
                sampler = shift_orbit_sampler(x, ci, kind, restricted=False)
                params, point = _secant_parametrization(sampler, k)
                subs_map = {name: q for name, q in zip(sampler.ambient, point)}
                for q in p_k.basis:
                    if q.subs(subs_map).terms:
                        inclusion = False
        entry["p_vanishes_on_row_secants"] = inclusion
        report["layers"].append(entry)

    passes = {}
    if genpr_ok and tp is not None:
        passes["standard_equality"] = all(
            e["dim_layer"] == e["dim_p"] == e["dim_l"]
            and e["layer_equals_p"]
            and e["p_equals_l"]
            for e in report["layers"]
        )
    else:
        passes["standard_equality"] = None
    if single_two and sec81_ok:
        passes["tangential_secant"] = all(
            e["dim_ideal"] == e["dim_p"] and e["ideal_equals_p"]
            for e in report["layers"]
        )
    else:
        passes["tangential_secant"] = None
    passes["row_secant_inclusion"] = all(
        e["p_vanishes_on_row_secants"] for e in report["layers"]
    )
    report["passes"] = passes
    return report


def _row_index_of(x, component, kind):
    for ri, r in enumerate(rows_of(x.symbol)):
        if r.component == component and (r.kind == kind or r.kind == "C"):
            return ri
    raise ValueError("no such row")
