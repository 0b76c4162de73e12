"""Exact linear algebra over the rationals, Pfaffians, and sparse polynomials.

Everything here is exact: scalars are ``fractions.Fraction``, elimination is
fraction-free (Bareiss) on integer-scaled rows, and polynomial arithmetic is
sparse with rational coefficients.  No floating point anywhere.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple

from .errors import DegenerateBranch, NonSkew

Rational = Fraction


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


# ---------------------------------------------------------------------------
# vectors and matrices (tuples of Fractions)

def vec(entries):
    return tuple(frac(x) for x in entries)


def mat(rows):
    return tuple(vec(r) for r in rows)


def zero_vector(n):
    return (Fraction(0),) * n


def zero_matrix(m, n):
    return tuple(zero_vector(n) for _ in range(m))


def identity_matrix(n):
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def transpose(a):
    return tuple(zip(*a)) if a else ()


def vec_add(u, v):
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u, v):
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(c, u):
    return tuple(c * x for x in u)


def dot(u, v):
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def is_zero_vector(u):
    return all(x == 0 for x in u)


def mat_add(a, b):
    return tuple(vec_add(r, s) for r, s in zip(a, b))


def mat_sub(a, b):
    return tuple(vec_sub(r, s) for r, s in zip(a, b))


def mat_scale(c, a):
    return tuple(vec_scale(c, r) for r in a)


def mat_vec(a, v):
    return tuple(dot(row, v) for row in a)


def mat_mul(a, b):
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def is_zero_matrix(a):
    return all(is_zero_vector(r) for r in a)


def bilinear(sigma, u, v):
    """Evaluate the bilinear form given by matrix ``sigma`` on (u, v)."""
    return dot(mat_vec(sigma, v), u)


# ---------------------------------------------------------------------------
# fraction-free elimination

def _int_rows(a):
    """Scale each row by the lcm of its denominators; kernel and rank survive."""
    out = []
    for row in a:
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        if den == 1:
            out.append([x.numerator for x in row])
        else:
            out.append([int(x * den) for x in row])
    return out


def _bareiss(rows):
    """In-place Bareiss echelon on integer rows; returns pivot column list.

    Division by the previous pivot is exact by the Sylvester identity, so all
    intermediate entries stay integers (they are minors of the input).
    """
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        if pivot_row != r:
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pc = rows[r][c]
        for i in range(r + 1, nrows):
            ric = rows[i][c]
            row_i = rows[i]
            row_r = rows[r]
            # the update applies to zero-lead rows too, Bareiss needs the rescale
            for j in range(c, ncols):
                if row_i[j] or (ric and row_r[j]):
                    row_i[j] = (pc * row_i[j] - ric * row_r[j]) // prev
        prev = pc
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def rank(a):
    if not a or not a[0]:
        return 0
    rows = _int_rows(a)
    return len(_bareiss(rows))


def kernel_basis(a):
    """Deterministic basis of the right kernel {v : a v = 0}."""
    if not a:
        return ()
    ncols = len(a[0])
    rows = _int_rows(a)
    pivots = _bareiss(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        support = [f]
        # back-substitute through the echelon rows; only the free column and
        # later pivots can be nonzero, so the sums stay sparse
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            row = rows[r]
            s = Fraction(0)
            for j in support:
                if j > pc and row[j] and v[j]:
                    s += Fraction(row[j]) * v[j]
            if s:
                v[pc] = -s / row[pc]
                support.append(pc)
        basis.append(tuple(v))
    return tuple(basis)


def rref(a):
    """Reduced row echelon form over the rationals: (rows, pivot columns).

    Canonical for a given row space, so two spans are equal iff their rrefs are.
    """
    rows = [list(vec(r)) for r in a]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        if pv != 1:
            rows[r] = [x / pv if x else x for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                ci = rows[i][c]
                rows[i] = [x - ci * y if y else x for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def row_space_basis(a):
    return rref(a)[0]


def spans_equal(basis_a, basis_b):
    """True iff the two lists of vectors span the same subspace."""
    if not basis_a and not basis_b:
        return True
    if not basis_a or not basis_b:
        return not basis_a and all(is_zero_vector(v) for v in basis_b) or \
            not basis_b and all(is_zero_vector(v) for v in basis_a)
    if len(basis_a[0]) != len(basis_b[0]):
        return False
    return rref(basis_a)[0] == rref(basis_b)[0]


def span_contains(basis, v):
    if is_zero_vector(v):
        return True
    if not basis:
        return False
    return rank(tuple(basis)) == rank(tuple(basis) + (tuple(v),))


def span_contains_all(basis, vectors):
    return all(span_contains(basis, v) for v in vectors)


def solve_linear(a, b):
    """One solution of a x = b (free variables set to 0), or None."""
    if not a:
        return None if any(x != 0 for x in b) else ()
    ncols = len(a[0])
    aug = tuple(tuple(row) + (bi,) for row, bi in zip(mat(a), vec(b)))
    rows, pivots = rref(aug)
    if ncols in pivots:
        return None
    # with free variables at zero the rref rows give pivot values directly
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = rows[r][ncols]
    return tuple(x)


def det(a):
    """Determinant via Bareiss on a row-scaled integer matrix."""
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(r) != n for r in a):
        raise ValueError("determinant needs a square matrix")
    scale = Fraction(1)
    rows = []
    for row in mat(a):
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        scale /= den
        rows.append([int(x * den) for x in row])
    sign = 1
    prev = 1
    for c in range(n - 1):
        pivot_row = None
        for i in range(c, n):
            if rows[i][c]:
                pivot_row = i
                break
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
            sign = -sign
        pc = rows[c][c]
        for i in range(c + 1, n):
            ric = rows[i][c]
            for j in range(c, n):
                rows[i][j] = (pc * rows[i][j] - ric * rows[c][j]) // prev
        prev = pc
    return sign * scale * rows[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Pfaffians

def check_skew(a):
    n = len(a)
    for i in range(n):
        if len(a[i]) != n:
            raise NonSkew("matrix is not square")
        if a[i][i] != 0:
            raise NonSkew(f"nonzero diagonal entry at {i}")
        for j in range(i + 1, n):
            if a[i][j] != -a[j][i]:
                raise NonSkew(f"entries ({i},{j}) and ({j},{i}) are not opposite")


def pfaffian(a):
    """Pfaffian of a skew matrix, by first-row cofactor recursion.

    Generic over the entry type: works for Fraction entries and for MultiPoly
    entries (anything supporting +, -, * with int identities 0 and 1).  The
    caller is responsible for skewness; use check_skew for validation.
    """
    n = len(a)
    if n % 2:
        return 0
    memo = {}

    def pf(idx):
        if not idx:
            return 1
        if idx in memo:
            return memo[idx]
        s0 = idx[0]
        rest = idx[1:]
        total = 0
        for pos, k in enumerate(rest):
            sub = tuple(x for x in rest if x != k)
            term = a[s0][k] * pf(sub)
            total = total + term if pos % 2 == 0 else total - term
        memo[idx] = total
        return total

    return pf(tuple(range(n)))


def sub_pfaffians(a):
    """Pfaffian cofactors by plain row/column deletion.

    For odd n returns the vector (A_0, ..., A_{n-1}) with A_i the Pfaffian of a
    with row and column i removed.  For even n returns the skew matrix (A_ij)
    with, for i < j, A_ij the Pfaffian of a with rows and columns i and j
    removed, A_ji = -A_ij, and zero diagonal.  No extra sign factors: for a 2x2
    input the single cofactor A_01 is 1.
    """
    n = len(a)

    def deleted(drop):
        keep = [k for k in range(n) if k not in drop]
        return [[a[i][j] for j in keep] for i in keep]

    if n % 2:
        return tuple(pfaffian(deleted({i})) for i in range(n))
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            p = pfaffian(deleted({i, j}))
            out[i][j] = p
            out[j][i] = -p
    return tuple(tuple(r) for r in out)


class SkewKernelResult(NamedTuple):
    basis: tuple
    closed_form: bool


def skew_kernel(a, require_closed_form=False):
    """Kernel of a rational skew matrix via Pfaffian cofactor formulas.

    Closed forms cover corank 1 (odd size) and corank 0 or 2 (even size); in
    those cases closed_form is True and the basis comes from cofactors.  When
    every relevant cofactor vanishes the corank is higher and there is no
    closed form: by default we fall back to kernel_basis (closed_form False),
    with require_closed_form=True we raise DegenerateBranch instead.
    """
    check_skew(a)
    n = len(a)
    if n == 0:
        return SkewKernelResult((), True)
    if n % 2:
        cof = sub_pfaffians(a)
        v = tuple(cof[i] if i % 2 == 0 else -cof[i] for i in range(n))
        if not is_zero_vector(v):
            return SkewKernelResult((v,), True)
    else:
        pf = pfaffian(a)
        if pf != 0:
            return SkewKernelResult((), True)
        cof = sub_pfaffians(a)
        pivot = None
        for i in range(n):
            for j in range(i + 1, n):
                if cof[i][j] != 0:
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is not None:
            i0, j0 = pivot

            def cof_vector(i):
                return tuple(-cof[i][j] if j % 2 == 0 else cof[i][j] for j in range(n))

            return SkewKernelResult((cof_vector(i0), cof_vector(j0)), True)
    if require_closed_form:
        raise DegenerateBranch("all Pfaffian cofactors vanish; corank too high")
    return SkewKernelResult(kernel_basis(a), False)


# ---------------------------------------------------------------------------
# sparse polynomials with rational coefficients

def _grlex_key(exp):
    return (sum(exp), exp)


class MultiPoly:
    """Sparse polynomial in named variables over the rationals.

    terms maps exponent tuples to nonzero Fraction coefficients.  Arithmetic
    only combines polynomials over the same variable tuple; scalars (int or
    Fraction) are accepted on either side.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables, terms=None):
        self.variables = tuple(variables)
        clean = {}
        if terms:
            for exp, c in terms.items():
                c = frac(c)
                if c != 0:
                    clean[tuple(exp)] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, variables, c):
        c = frac(c)
        if c == 0:
            return cls(variables)
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def variable(cls, variables, name):
        variables = tuple(variables)
        i = variables.index(name)
        exp = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls(variables, {exp: Fraction(1)})

    # -- predicates ---------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def degree(self):
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.variables, other)
        return NotImplemented

    __hash__ = None

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError("polynomials over different variables")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPoly.constant(self.variables, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            terms[exp] = terms.get(exp, Fraction(0)) + c
        return MultiPoly(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = frac(other)
            return MultiPoly(self.variables, {e: c * v for e, v in self.terms.items()})
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = MultiPoly.constant(self.variables, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- calculus and evaluation -------------------------------------------
    def derivative(self, name):
        i = self.variables.index(name)
        terms = {}
        for exp, c in self.terms.items():
            if exp[i] == 0:
                continue
            e = list(exp)
            e[i] -= 1
            terms[tuple(e)] = terms.get(tuple(e), Fraction(0)) + c * exp[i]
        return MultiPoly(self.variables, terms)

    def subs(self, assignment):
        """Substitute values (Fraction or MultiPoly) for some or all variables.

        Variables not mentioned keep themselves.  Result is a MultiPoly over
        the variables of the substituted values (which must all agree), or a
        Fraction when everything is substituted by scalars.
        """
        values = []
        target_vars = None
        all_scalar = True
        for name in self.variables:
            if name in assignment:
                v = assignment[name]
                if isinstance(v, MultiPoly):
                    all_scalar = False
                    target_vars = v.variables
                values.append(v)
            else:
                values.append(None)
                all_scalar = False
        if target_vars is None:
            target_vars = self.variables
        if all_scalar:
            total = Fraction(0)
            for exp, c in self.terms.items():
                term = c
                for v, e in zip(values, exp):
                    term *= frac(v) ** e
                total += term
            return total
        poly_values = []
        for name, v in zip(self.variables, values):
            if v is None:
                poly_values.append(MultiPoly.variable(target_vars, name))
            elif isinstance(v, MultiPoly):
                poly_values.append(v)
            else:
                poly_values.append(MultiPoly.constant(target_vars, v))
        total = MultiPoly(target_vars)
        for exp, c in self.terms.items():
            term = MultiPoly.constant(target_vars, c)
            for v, e in zip(poly_values, exp):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    def coefficient_of(self, exp):
        return self.terms.get(tuple(exp), Fraction(0))

    def homogeneous_part(self, d):
        return MultiPoly(self.variables, {e: c for e, c in self.terms.items() if sum(e) == d})

    def canonical_terms(self):
        """Terms sorted by graded lex, highest first; canonical for equality."""
        return tuple(sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True))

    def coefficient_vector(self, monomial_list):
        return tuple(self.terms.get(m, Fraction(0)) for m in monomial_list)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for exp, c in self.canonical_terms():
            factors = []
            for name, e in zip(self.variables, exp):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


def monomials_of_degree(nvars, d):
    """All exponent tuples of total degree d, graded-lex descending."""
    if nvars == 0:
        return ((),) if d == 0 else ()
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + (e,), remaining - e, slots - 1)

    rec((), d, nvars)
    return tuple(out)


def det_generic(a):
    """Cofactor determinant for matrices with generic (e.g. MultiPoly) entries."""
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    total = 0
    for j in range(n):
        entry = a[0][j]
        minor = [[a[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = entry * det_generic(minor)
        total = total + term if j % 2 == 0 else total - term
    return total
