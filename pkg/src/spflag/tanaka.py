"""Degreewise prolongation of a Heisenberg model under a matrix algebra.

The negative part is a Heisenberg algebra (generators in degree -1, center in
degree -2).  Degree 0 is a given algebra of conformal-symplectic matrices
acting on the generators.  Each positive degree consists of pairs (M1, M2):
M1 sends generators to the previous layer, M2 sends the center two layers
down, subject to the derivation (Leibniz) identities over all of the negative
part.  Positive layers are computed as exact kernels, so dimensions are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapReached, JacobiViolation
from .exact import (
    frac,
    is_zero_vector,
    kernel_basis,
    mat_mul,
    mat_vec,
    solve_linear,
    transpose,
    vec,
    vec_add,
    vec_scale,
    zero_vector,
)
from .liealg import GradedLieAlgebra, HeisenbergModel, algebra_from_entries


def conformal_factor(a, sigma):
    """The scalar c with sigma(Av, w) + sigma(v, Aw) = c sigma(v, w).

    Raises ValueError when A is not conformal-symplectic for sigma.
    """
    n = len(sigma)
    lhs = mat_mul(transpose(a), sigma)
    rhs = mat_mul(sigma, a)
    total = [[lhs[i][j] + rhs[i][j] for j in range(n)] for i in range(n)]
    c = None
    for i in range(n):
        for j in range(n):
            if sigma[i][j] != 0:
                c = total[i][j] / sigma[i][j]
                break
        if c is not None:
            break
    if c is None:
        raise ValueError("degenerate pairing")
    for i in range(n):
        for j in range(n):
            if total[i][j] != c * sigma[i][j]:
                raise ValueError("matrix is not conformal-symplectic")
    return c


@dataclass(frozen=True)
class ProlongationReport:
    degrees: tuple           # ((k, dim), ...) for k >= 1
    terminated: bool
    total_dim: object        # int when terminated, None otherwise
    dim_negative: int
    dim_g0: int

    def to_json_dict(self):
        return {
            "schema": "sp-1",
            "degrees": [{"k": k, "dim": d} for k, d in self.degrees],
            "terminated": self.terminated,
            "total_dim": self.total_dim,
            "dim_negative": self.dim_negative,
            "dim_g0": self.dim_g0,
        }


@dataclass(frozen=True)
class LayerElement:
    m1: tuple    # d_{k-1} x n matrix: column a is the image of generator a
    m2: tuple    # vector of length d_{k-2}: the image of the center


@dataclass(frozen=True)
class TanakaProlongation:
    heis: HeisenbergModel
    g0: tuple                # csp matrices
    g0_factors: tuple        # conformal factor per matrix
    layers: tuple            # layers[i] = tuple of LayerElement for degree i + 1
    report: ProlongationReport

    def layer_dim(self, k):
        if k == -2:
            return 1
        if k == -1:
            return self.heis.space.dim
        if k == 0:
            return len(self.g0)
        if 1 <= k <= len(self.layers):
            return len(self.layers[k - 1])
        return 0


def _layer_flatten(elem: LayerElement):
    out = []
    for col in transpose(elem.m1) if elem.m1 else ():
        out.extend(col)
    out.extend(elem.m2)
    return tuple(out)


class _Engine:
    """Holds the per-layer application tensors during prolongation."""

    def __init__(self, heis: HeisenbergModel, g0):
        self.heis = heis
        self.space = heis.space
        self.n = heis.space.dim
        self.sigma = heis.space.sigma
        self.g0 = tuple(tuple(vec(r) for r in a) for a in g0)
        self.factors = tuple(conformal_factor(a, self.sigma) for a in self.g0)
        self.layers = []

    def dim(self, k):
        if k == -3:
            return 0
        if k == -2:
            return 1
        if k == -1:
            return self.n
        if k == 0:
            return len(self.g0)
        if k - 1 < len(self.layers):
            return len(self.layers[k - 1])
        return 0

    def app_v(self, j, a):
        """Matrix of [ . , v_a]: degree-j coords -> degree-(j-1) coords."""
        if j == -1:
            return (tuple(self.sigma[r][a] for r in range(self.n)),)
        if j == 0:
            cols = [tuple(mat[r][a] for r in range(self.n)) for mat in self.g0]
            return tuple(tuple(cols[s][r] for s in range(len(self.g0))) for r in range(self.n))
        elems = self.layers[j - 1]
        d_prev = self.dim(j - 1)
        return tuple(
            tuple(elems[s].m1[r][a] for s in range(len(elems))) for r in range(d_prev)
        )

    def app_z(self, j):
        """Matrix of [ . , z]: degree-j coords -> degree-(j-2) coords."""
        if j == -1:
            return ()
        if j == 0:
            return (tuple(self.factors),)
        elems = self.layers[j - 1]
        d_prev2 = self.dim(j - 2)
        return tuple(
            tuple(elems[s].m2[r] for s in range(len(elems))) for r in range(d_prev2)
        )

    def next_layer(self, k):
        n = self.n
        d1 = self.dim(k - 1)   # target of M1 columns
        d2 = self.dim(k - 2)   # target of M2
        d3 = self.dim(k - 3)
        nvars = d1 * n + d2

        def m1_index(r, a):
            return a * d1 + r

        m2_off = d1 * n
        rows = []
        # Leibniz over generator pairs:
        #   sigma_ab m2 = [phi(v_a), v_b] - [phi(v_b), v_a]
        av = [self.app_v(k - 1, a) for a in range(n)]
        for a in range(n):
            for b in range(a + 1, n):
                for r in range(d2):
                    row = [Fraction(0)] * nvars
                    for s in range(d1):
                        row[m1_index(s, a)] += av[b][r][s]
                        row[m1_index(s, b)] -= av[a][r][s]
                    row[m2_off + r] -= self.sigma[a][b]
                    rows.append(row)
        # Leibniz over (generator, center) pairs:
        #   [phi(v_a), z] + [v_a, phi(z)] = 0
        zmat = self.app_z(k - 1)
        av2 = [self.app_v(k - 2, a) for a in range(n)]
        for a in range(n):
            for r in range(d3):
                row = [Fraction(0)] * nvars
                for s in range(d1):
                    row[m1_index(s, a)] += zmat[r][s]
                for s in range(d2):
                    row[m2_off + s] -= av2[a][r][s]
                rows.append(row)
        if nvars == 0:
            return ()
        if not rows:
            rows = [[Fraction(0)] * nvars]
        sol = kernel_basis(tuple(tuple(r) for r in rows))
        elems = []
        for v in sol:
            m1 = tuple(tuple(v[m1_index(r, a)] for a in range(n)) for r in range(d1))
            m2 = tuple(v[m2_off + s] for s in range(d2))
            elems.append(LayerElement(m1, m2))
        return tuple(elems)


def prolong(heis: HeisenbergModel, g0, kmax=6) -> TanakaProlongation:
    """Compute positive layers until two consecutive vanish, or raise CapReached."""
    eng = _Engine(heis, g0)
    degrees = []
    terminated = False
    k = 1
    while k <= kmax:
        layer = eng.next_layer(k)
        eng.layers.append(layer)
        degrees.append((k, len(layer)))
        if len(layer) == 0:
            if k >= 2 and degrees[-2][1] == 0:
                terminated = True
                break
            if k == 1 or degrees[-2][1] != 0:
                # one confirming degree after the first zero
                nxt = eng.next_layer(k + 1)
                eng.layers.append(nxt)
                degrees.append((k + 1, len(nxt)))
                if len(nxt) == 0:
                    terminated = True
                    break
                k += 1  # a zero layer followed by a nonzero one; keep going
        k += 1
    dim_neg = heis.space.dim + 1
    total = None
    if terminated:
        total = dim_neg + len(eng.g0) + sum(d for _, d in degrees)
    report = ProlongationReport(tuple(degrees), terminated, total, dim_neg, len(eng.g0))
    tp = TanakaProlongation(heis, eng.g0, eng.factors, tuple(eng.layers), report)
    if not terminated:
        raise CapReached(report)
    return tp


# ---------------------------------------------------------------------------
# assembling the full graded algebra

def assemble_algebra(tp: TanakaProlongation) -> GradedLieAlgebra:
    """Structure constants for the direct sum of all layers.

    Brackets between positive layers are computed by the recursion
    [f, g](w) = [f(w), g] + [f, g(w)] over the negative part, then located in
    the layer bases.  JacobiViolation if anything fails to close or the final
    Jacobi check fails.
    """
    heis = tp.heis
    n = heis.space.dim
    sigma = heis.space.sigma
    top = len(tp.layers)
    dims = {k: tp.layer_dim(k) for k in range(-2, top + 1)}

    # global basis order: generators, center, g0, layers 1..top
    offsets = {-1: 0, -2: n}
    pos = n + 1
    for k in range(0, top + 1):
        offsets[k] = pos
        pos += dims[k]
    total = pos

    flat_layers = {
        k: [_layer_flatten(e) for e in tp.layers[k - 1]] for k in range(1, top + 1)
    }

    def locate(k, flat):
        """Coordinates of a flattened (M1, M2) pair in the degree-k layer basis."""
        basis = flat_layers[k]
        if not basis:
            if all(x == 0 for x in flat):
                return ()
            raise JacobiViolation(f"element of degree {k} outside the computed layer")
        cols = tuple(tuple(b[i] for b in basis) for i in range(len(flat)))
        sol = solve_linear(cols, flat)
        if sol is None:
            raise JacobiViolation(f"element of degree {k} outside the computed layer")
        return sol

    g0_flat = [tuple(x for row in a for x in row) for a in tp.g0]

    def locate_g0(mat):
        flat = tuple(x for row in mat for x in row)
        if not g0_flat:
            if all(x == 0 for x in flat):
                return ()
            raise JacobiViolation("degree-0 bracket leaves the degree-0 algebra")
        cols = tuple(tuple(b[i] for b in g0_flat) for i in range(len(flat)))
        sol = solve_linear(cols, flat)
        if sol is None:
            raise JacobiViolation("degree-0 bracket leaves the degree-0 algebra")
        return sol

    def g0_matrix(coords):
        m = [[Fraction(0)] * n for _ in range(n)]
        for s, c in enumerate(coords):
            if c:
                for i in range(n):
                    for j in range(n):
                        m[i][j] += c * tp.g0[s][i][j]
        return tuple(tuple(r) for r in m)

    def layer_elem(k, coords):
        d1, d2 = dims[k - 1], dims[k - 2]
        m1 = [[Fraction(0)] * n for _ in range(d1)]
        m2 = [Fraction(0)] * d2
        for s, c in enumerate(coords):
            if c:
                e = tp.layers[k - 1][s]
                for r in range(d1):
                    for a in range(n):
                        m1[r][a] += c * e.m1[r][a]
                for r in range(d2):
                    m2[r] += c * e.m2[r]
        return LayerElement(tuple(tuple(r) for r in m1), tuple(m2))

    def bracket(k1, c1, k2, c2):
        """Bracket of homogeneous elements given as (degree, coords)."""
        if k1 > k2:
            k, c = bracket(k2, c2, k1, c1)
            if c is None:
                return None, None
            return k, vec_scale(Fraction(-1), c)
        # now k1 <= k2
        if k2 <= -1:
            if k1 == -1 and k2 == -1:
                val = Fraction(0)
                for i in range(n):
                    for j in range(n):
                        val += c1[i] * c2[j] * sigma[i][j]
                return -2, (val,)
            return None, None  # [-1,-2] and [-2,-2] vanish
        if k1 == -2:
            if k2 == 0:
                lam = sum((c * f for c, f in zip(c2, tp.g0_factors)), Fraction(0))
                return -2, (-lam * c1[0],)
            e = layer_elem(k2, c2)
            out = vec_scale(-c1[0], e.m2)
            return k2 - 2, out
        if k1 == -1:
            if k2 == 0:
                m = g0_matrix(c2)
                return -1, vec_scale(Fraction(-1), mat_vec(m, c1))
            e = layer_elem(k2, c2)
            out = [Fraction(0)] * dims[k2 - 1]
            for a in range(n):
                if c1[a]:
                    for r in range(dims[k2 - 1]):
                        out[r] -= c1[a] * e.m1[r][a]
            return k2 - 1, tuple(out)
        if k1 == 0 and k2 == 0:
            m1m = g0_matrix(c1)
            m2m = g0_matrix(c2)
            comm = tuple(
                tuple(
                    sum((m1m[i][t] * m2m[t][j] - m2m[i][t] * m1m[t][j] for t in range(n)), Fraction(0))
                    for j in range(n)
                )
                for i in range(n)
            )
            return 0, locate_g0(comm)
        # at least one positive layer: use the recursion over the negative part
        kk = k1 + k2
        m1_cols = []
        for a in range(n):
            ea = tuple(Fraction(1) if i == a else Fraction(0) for i in range(n))
            d1, w1 = bracket(k1 - 1, _apply_gen(k1, c1, a), k2, c2)
            d2_, w2 = bracket(k1, c1, k2 - 1, _apply_gen(k2, c2, a))
            col = _sum_parts(kk - 1, (d1, w1), (d2_, w2))
            m1_cols.append(col)
        dz1, wz1 = bracket(k1 - 2, _apply_center(k1, c1), k2, c2)
        dz2, wz2 = bracket(k1, c1, k2 - 2, _apply_center(k2, c2))
        m2v = _sum_parts(kk - 2, (dz1, wz1), (dz2, wz2))
        flat = []
        for a in range(n):
            flat.extend(m1_cols[a])
        flat.extend(m2v)
        if kk > top:
            if all(x == 0 for x in flat):
                return kk, ()
            raise JacobiViolation(f"bracket of degrees {k1},{k2} escapes the computed range")
        return kk, locate(kk, tuple(flat))

    def _apply_gen(k, coords, a):
        """[elem, v_a] coordinates one layer down."""
        if k == 0:
            m = g0_matrix(coords)
            return tuple(m[i][a] for i in range(n))
        e = layer_elem(k, coords)
        return tuple(e.m1[r][a] for r in range(dims[k - 1]))

    def _apply_center(k, coords):
        if k == 0:
            lam = sum((c * f for c, f in zip(coords, tp.g0_factors)), Fraction(0))
            return (lam,)
        e = layer_elem(k, coords)
        return e.m2

    def _sum_parts(expect_deg, *parts):
        out = None
        size = {-2: 1, -1: n}.get(expect_deg, dims.get(expect_deg, 0))
        out = [Fraction(0)] * size
        for d, w in parts:
            if w is None or d is None:
                continue
            if not w:
                continue
            if d != expect_deg:
                if all(x == 0 for x in w):
                    continue
                raise JacobiViolation("inhomogeneous bracket")
            for i, x in enumerate(w):
                out[i] += x
        return tuple(out)

    # build the global structure-constant table
    def global_elems():
        out = []
        for a in range(n):
            out.append((-1, tuple(Fraction(1) if i == a else Fraction(0) for i in range(n))))
        out.append((-2, (Fraction(1),)))
        for k in range(0, top + 1):
            for s in range(dims[k]):
                out.append((k, tuple(Fraction(1) if i == s else Fraction(0) for i in range(dims[k]))))
        return out

    elems = global_elems()
    labels = []
    degrees2 = []
    for a in range(n):
        labels.append(heis.space.labels[a])
        degrees2.append(-2)
    labels.append("z")
    degrees2.append(-4)
    for k in range(0, top + 1):
        for s in range(dims[k]):
            labels.append(f"u{k}[{s}]")
            degrees2.append(2 * k)

    def embed(deg, coords):
        v = [Fraction(0)] * total
        if deg == -1:
            for i, c in enumerate(coords):
                v[i] = c
        elif deg == -2:
            v[n] = coords[0]
        else:
            off = offsets[deg]
            for i, c in enumerate(coords):
                v[off + i] = c
        return tuple(v)

    entries = {}
    for i in range(total):
        ki, ci = elems[i]
        for j in range(i + 1, total):
            kj, cj = elems[j]
            d, w = bracket(ki, ci, kj, cj)
            if d is None or w is None or all(x == 0 for x in w):
                continue
            ev = embed(d, w)
            entries[(i, j)] = {t: ev[t] for t in range(total) if ev[t] != 0}

    alg = algebra_from_entries(tuple(labels), tuple(degrees2), entries)
    alg.check_jacobi()
    return alg
