"""Structure-constant Lie algebras: Heisenberg models and flat models.

Degrees are carried as doubled integers so that half-integer gradings stay in
int arithmetic.  A bracket table stores [b_i, b_j] for i < j as coefficient
vectors; skewness fills the rest.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import JacobiViolation
from .exact import (
    Rational,
    frac,
    is_zero_vector,
    rref,
    span_contains,
    vec,
    vec_add,
    vec_scale,
    zero_vector,
)
from .symbols import (
    HALF,
    FlagSymbol,
    GradedSymplecticSpace,
    OneRow,
    TwoRow,
    build_model_space,
    make_symbol,
    rows_of,
)


@dataclass(frozen=True)
class GradedLieAlgebra:
    labels: tuple
    degrees2: tuple        # doubled degrees, one per basis vector
    table: tuple           # table[i][j] = coefficient tuple of [b_i, b_j]

    @property
    def dim(self):
        return len(self.labels)

    def basis_vector(self, i):
        return tuple(Fraction(1) if j == i else Fraction(0) for j in range(self.dim))

    def bracket(self, u, v):
        n = self.dim
        out = list(zero_vector(n))
        for i in range(n):
            ui = u[i]
            if ui == 0:
                continue
            for j in range(n):
                vj = v[j]
                if vj == 0 or i == j:
                    continue
                t = self.table[i][j]
                c = ui * vj
                for k in range(n):
                    if t[k]:
                        out[k] += c * t[k]
        return tuple(out)

    def ad(self, u):
        """Matrix of ad(u) = [u, .] acting on coefficient vectors."""
        n = self.dim
        cols = [self.bracket(u, self.basis_vector(j)) for j in range(n)]
        return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))

    def degree_indices(self, d2):
        return tuple(i for i, d in enumerate(self.degrees2) if d == d2)

    def check_graded(self):
        for i in range(self.dim):
            for j in range(self.dim):
                t = self.table[i][j]
                for k, c in enumerate(t):
                    if c != 0 and self.degrees2[k] != self.degrees2[i] + self.degrees2[j]:
                        raise JacobiViolation(
                            f"bracket [{self.labels[i]},{self.labels[j]}] leaves the grading"
                        )

    def check_jacobi(self):
        n = self.dim
        for i in range(n):
            bi = self.basis_vector(i)
            for j in range(i + 1, n):
                bj = self.basis_vector(j)
                bij = self.table[i][j]
                for k in range(j + 1, n):
                    bk = self.basis_vector(k)
                    s = vec_add(
                        vec_add(
                            self.bracket(bij, bk),
                            self.bracket(self.table[j][k], bi),
                        ),
                        self.bracket(self.bracket(bk, bi), bj),
                    )
                    if not is_zero_vector(s):
                        raise JacobiViolation(
                            f"Jacobi fails on ({self.labels[i]}, {self.labels[j]}, {self.labels[k]})"
                        )


def algebra_from_entries(labels, degrees2, entries):
    """Build an algebra from sparse entries {(i, j): {k: coeff}} given for i < j."""
    n = len(labels)
    table = [[zero_vector(n) for _ in range(n)] for _ in range(n)]
    for (i, j), comp in entries.items():
        v = [Fraction(0)] * n
        for k, c in comp.items():
            v[k] = frac(c)
        table[i][j] = tuple(v)
        table[j][i] = tuple(-x for x in v)
    return GradedLieAlgebra(tuple(labels), tuple(degrees2), tuple(tuple(r) for r in table))


# ---------------------------------------------------------------------------
# Heisenberg models

@dataclass(frozen=True)
class HeisenbergModel:
    algebra: GradedLieAlgebra
    space: GradedSymplecticSpace
    z_index: int


def heisenberg_from_space(x: GradedSymplecticSpace) -> HeisenbergModel:
    """Two-step algebra on x plus a center: [v, w] = sigma(v, w) z."""
    n = x.dim
    labels = x.labels + ("z",)
    degrees2 = (-2,) * n + (-4,)
    entries = {}
    for i in range(n):
        for j in range(i + 1, n):
            if x.sigma[i][j] != 0:
                entries[(i, j)] = {n: x.sigma[i][j]}
    return HeisenbergModel(algebra_from_entries(labels, degrees2, entries), x, n)


def heisenberg(dim_x: int) -> HeisenbergModel:
    """Heisenberg algebra of dimension dim_x + 1 with the standard model pairing."""
    if dim_x <= 0 or dim_x % 2:
        raise ValueError("the symplectic generator space needs positive even dimension")
    space = build_model_space(make_symbol([OneRow(dim_x - 1)]))
    return heisenberg_from_space(space)


# ---------------------------------------------------------------------------
# flat models

@dataclass(frozen=True)
class FlatModel:
    algebra: GradedLieAlgebra
    space: GradedSymplecticSpace
    x_index: int               # the shift generator
    z_index: int
    box_index: tuple           # algebra index -> model-space index (None for x, z)
    distribution: tuple        # algebra indices spanning the distribution


def flat_model(sym: FlagSymbol) -> FlatModel:
    """The flat graded model: a shift generator, the low half of the boxes, and
    a center.

    Basis order is the shift generator, then the boxes of weight <= 1/2 in
    model-space order, then the center.  The shift generator moves boxes down
    by one (dropping off at row bottoms).  Each component contributes central
    brackets from its middle boxes: [e_0, f_0] = z on integer pairs,
    [e_{1/2}, f_{-1/2}] = z and [e_{-1/2}, f_{1/2}] = -z on half-odd pairs
    (the sign alternation is forced by Jacobi against the shift generator),
    and [v_{1/2}, v_{-1/2}] = z on a centered row.
    """
    space = build_model_space(sym)
    rows = rows_of(sym)
    kept = [i for i, w in enumerate(space.weights) if w <= HALF]
    pos_of = {model_i: 1 + k for k, model_i in enumerate(kept)}
    nb = len(kept)
    labels = ("x",) + tuple(space.labels[i] for i in kept) + ("z",)
    degrees2 = (-2,) + tuple(int(2 * space.weights[i]) for i in kept) + (0,)
    z_pos = nb + 1
    entries = {}

    box_at = {}  # (row id, weight) -> kept model index
    for model_i in kept:
        box_at[(space.row_index[model_i], space.weights[model_i])] = model_i

    for model_i in kept:
        below = box_at.get((space.row_index[model_i], space.weights[model_i] - 1))
        if below is not None:
            entries[(0, pos_of[model_i])] = {pos_of[below]: 1}

    def add_central(i_model, j_model, coeff):
        a, b = pos_of[i_model], pos_of[j_model]
        if a > b:
            a, b, coeff = b, a, -coeff
        entries[(a, b)] = {z_pos: coeff}

    for ci, c in enumerate(sym.components):
        if isinstance(c, TwoRow):
            e_row = next(k for k, r in enumerate(rows) if r.component == ci and r.kind == "E")
            f_row = next(k for k, r in enumerate(rows) if r.component == ci and r.kind == "F")
            middles = (Fraction(0),) if c.s.denominator == 1 else (HALF, -HALF)
            for w in middles:
                e_box = box_at.get((e_row, w))
                f_box = box_at.get((f_row, -w))
                if e_box is not None and f_box is not None:
                    add_central(e_box, f_box, 1 if w >= 0 else -1)
        else:
            c_row = next(k for k, r in enumerate(rows) if r.component == ci)
            plus = box_at.get((c_row, HALF))
            minus = box_at.get((c_row, -HALF))
            if plus is not None and minus is not None:
                add_central(plus, minus, 1)

    alg = algebra_from_entries(labels, degrees2, entries)
    box_index = (None,) + tuple(kept) + (None,)
    distribution = (0,) + tuple(
        pos_of[i] for i in kept if space.weights[i] == 0 or space.weights[i] == HALF
    )
    return FlatModel(alg, space, 0, z_pos, box_index, distribution)


def generated_subalgebra(alg: GradedLieAlgebra, generators):
    """Span closure of the generators under the bracket."""
    basis = [vec(g) for g in generators]
    basis = list(rref(basis)[0]) if basis else []
    changed = True
    while changed:
        changed = False
        for u in list(basis):
            for v in list(basis):
                w = alg.bracket(u, v)
                if not is_zero_vector(w) and not span_contains(basis, w):
                    basis = list(rref(basis + [w])[0])
                    changed = True
    return tuple(basis)


# ---------------------------------------------------------------------------
# Killing form and exact signatures

def killing_matrix(alg: GradedLieAlgebra):
    n = alg.dim
    ads = [alg.ad(alg.basis_vector(i)) for i in range(n)]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            # trace of ads[i] @ ads[j] without forming the product
            t = Fraction(0)
            for a in range(n):
                for b in range(n):
                    t += ads[i][a][b] * ads[j][b][a]
            row.append(t)
        out.append(tuple(row))
    return tuple(out)


def symmetric_signature(b):
    """Exact signature of a symmetric rational matrix by congruence.

    Returns a dict with rank, positive and negative inertia counts.
    """
    n = len(b)
    m = [list(vec(row)) for row in b]
    for i in range(n):
        for j in range(n):
            if m[i][j] != m[j][i]:
                raise ValueError("matrix is not symmetric")
    pos = neg = 0
    start = 0
    while start < n:
        piv = None
        for k in range(start, n):
            if m[k][k] != 0:
                piv = k
                break
        if piv is None:
            off = None
            for k in range(start, n):
                for l in range(k + 1, n):
                    if m[k][l] != 0:
                        off = (k, l)
                        break
                if off:
                    break
            if off is None:
                break  # remaining block is zero
            k, l = off
            # row/col addition makes a nonzero diagonal entry (2 * m[k][l])
            for j in range(n):
                m[k][j] += m[l][j]
            for i in range(n):
                m[i][k] += m[i][l]
            piv = k
        if piv != start:
            m[start], m[piv] = m[piv], m[start]
            for i in range(n):
                m[i][start], m[i][piv] = m[i][piv], m[i][start]
        d = m[start][start]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for i in range(start + 1, n):
            if m[i][start] != 0:
                c = m[i][start] / d
                for j in range(n):
                    m[i][j] -= c * m[start][j]
        for j in range(start + 1, n):
            if m[start][j] != 0:
                c = m[start][j] / d
                for i in range(n):
                    m[i][j] -= c * m[i][start]
        start += 1
    return {"rank": pos + neg, "positive": pos, "negative": neg}
