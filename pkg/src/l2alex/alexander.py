"""Classical Alexander polynomial via the abelianized Fox minor.

The determinant of the row-deleted Fox matrix, with every group element sent
to t^(abelianization weight), is computed by fraction-free (Bareiss)
elimination over integer polynomials.  Mahler measure doubles as the exact
Fuglede-Kadison oracle for the infinite cyclic group.
"""

from __future__ import annotations

import numpy as np

from .fox import fox_matrix
from .words import AbelianizationMap, Presentation, abelianization


class LaurentPolynomial:
    """Sparse Laurent polynomial in one variable t."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {}
        if coeffs:
            for e, c in dict(coeffs).items():
                if c != 0:
                    self.coeffs[int(e)] = c

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def t_power(cls, e, coeff=1):
        return cls({e: coeff})

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return LaurentPolynomial(out)

    def __neg__(self):
        return LaurentPolynomial({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPolynomial):
            out = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    e = e1 + e2
                    s = out.get(e, 0) + c1 * c2
                    if s == 0:
                        out.pop(e, None)
                    else:
                        out[e] = s
            return LaurentPolynomial(out)
        return LaurentPolynomial({e: c * other for e, c in self.coeffs.items()})

    __rmul__ = __mul__

    def min_exponent(self):
        return min(self.coeffs) if self.coeffs else 0

    def max_exponent(self):
        return max(self.coeffs) if self.coeffs else 0

    def shift(self, k):
        return LaurentPolynomial({e + k: c for e, c in self.coeffs.items()})

    def substitute_inverse(self):
        return LaurentPolynomial({-e: c for e, c in self.coeffs.items()})

    def __call__(self, t):
        return sum(c * t ** e for e, c in self.coeffs.items())

    def normalized(self):
        """Shift to minimum exponent 0 and make the leading coefficient positive."""
        if not self.coeffs:
            return LaurentPolynomial()
        p = self.shift(-self.min_exponent())
        lead = p.coeffs[p.max_exponent()]
        if isinstance(lead, (int, float)) and lead < 0:
            p = -p
        return p

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if e == 0:
                head = f"{c}"
            else:
                body = "t" if e == 1 else f"t^{e}"
                if c == 1:
                    head = body
                elif c == -1:
                    head = f"-{body}"
                else:
                    head = f"{c} {body}"
            parts.append(head)
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def parse_laurent(text: str) -> LaurentPolynomial:
    """Parse strings like ``1 - t + t^2`` or ``3 t^-1 + 2``."""
    import re

    coeffs = {}
    for sign, coeff, has_t, exp in re.findall(
        r"([+-]?)\s*(\d*)\s*(t?)(?:\^(-?\d+))?", text
    ):
        if not coeff and not has_t:
            continue
        c = int(coeff) if coeff else 1
        if sign == "-":
            c = -c
        e = int(exp) if exp else (1 if has_t else 0)
        coeffs[e] = coeffs.get(e, 0) + c
    return LaurentPolynomial(coeffs)


# ---------------------------------------------------------------------------
# abelianized Fox matrix and determinant


def abelianize_entry(entry, alpha: AbelianizationMap) -> LaurentPolynomial:
    coeffs = {}
    for w, c in entry.terms.items():
        e = alpha.weight(w)
        coeffs[e] = coeffs.get(e, 0) + c
    return LaurentPolynomial(coeffs)


def alexander_matrix(p: Presentation, alpha=None):
    """Abelianized Fox matrix: entry (i,j) is d(r_j)/d(g_i) at g -> t^alpha(g)."""
    if alpha is None:
        alpha = abelianization(p)
    m = fox_matrix(p)
    return [
        [abelianize_entry(e, alpha) for e in row] for row in m.entries
    ]


def alexander_polynomial(p: Presentation, deleted_row: int = None) -> LaurentPolynomial:
    """Normalized determinant of the row-deleted abelianized Fox matrix.

    Requires a deficiency-one presentation.  The raw minor determinant
    equals the Alexander polynomial times (t^|w| - 1)/(t - 1) where w is the
    abelianization of the deleted generator (the factor is 1 exactly for
    meridional generators, e.g. any Wirtinger presentation); that factor is
    divided out.  Deleting a weight-zero generator row makes the minor
    singular, so the default row is the first generator of nonzero weight.
    The result is independent of the (admissible) deleted_row up to a unit,
    which normalization removes.
    """
    if p.deficiency != 1:
        raise ValueError(
            f"presentation has deficiency {p.deficiency}, expected 1"
        )
    alpha = abelianization(p)
    if deleted_row is None:
        deleted_row = next(
            i + 1 for i, v in enumerate(alpha.values) if v != 0
        )
    elif alpha.values[deleted_row - 1] == 0:
        raise ValueError(
            f"generator {deleted_row} abelianizes to 0: its minor is singular"
        )
    full = alexander_matrix(p, alpha)
    minor = [row for i, row in enumerate(full) if i != deleted_row - 1]
    n = len(minor)
    if n and len(minor[0]) != n:
        raise ValueError("row-deleted Fox matrix is not square")
    det = laurent_determinant(minor)
    if not det:
        raise ValueError("zero Alexander determinant: defective presentation")
    w = abs(alpha.values[deleted_row - 1])
    if w > 1:
        divisor = LaurentPolynomial({e: 1 for e in range(w)})
        det = _exact_div(det.shift(-det.min_exponent()), divisor)
    return det.normalized()


def laurent_determinant(matrix) -> LaurentPolynomial:
    """Exact determinant by Bareiss fraction-free elimination.

    Laurent entries are cleared to ordinary polynomials first; the stripped
    powers of t are restored at the end.
    """
    n = len(matrix)
    if n == 0:
        return LaurentPolynomial.one()
    shift_total = 0
    rows = []
    for row in matrix:
        m = min((e.min_exponent() for e in row if e), default=0)
        shift_total += m
        rows.append([e.shift(-m) for e in row])
    det = _bareiss(rows)
    return det.shift(shift_total)


def _bareiss(a):
    n = len(a)
    one = LaurentPolynomial.one()
    prev = one
    a = [row[:] for row in a]
    sign = 1
    for k in range(n - 1):
        if not a[k][k]:
            pivot = next((i for i in range(k + 1, n) if a[i][k]), None)
            if pivot is None:
                return LaurentPolynomial.zero()
            a[k], a[pivot] = a[pivot], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = _exact_div(num, prev)
            a[i][k] = LaurentPolynomial.zero()
        prev = a[k][k]
    result = a[n - 1][n - 1]
    return -result if sign < 0 else result


def _exact_div(num: LaurentPolynomial, den: LaurentPolynomial) -> LaurentPolynomial:
    """Polynomial division known to be exact (Bareiss guarantees it)."""
    if not num:
        return LaurentPolynomial.zero()
    if den.coeffs == {0: 1}:
        return num
    out = {}
    num_c = dict(num.coeffs)
    dmax = den.max_exponent()
    dlead = den.coeffs[dmax]
    while num_c:
        nmax = max(num_c)
        e = nmax - dmax
        c = num_c[nmax]
        q, r = divmod(c, dlead) if isinstance(c, int) and isinstance(dlead, int) else (c / dlead, 0)
        if r != 0:
            raise ArithmeticError("non-exact division in Bareiss elimination")
        out[e] = q
        for de, dc in den.coeffs.items():
            key = de + e
            s = num_c.get(key, 0) - dc * q
            if s == 0:
                num_c.pop(key, None)
            else:
                num_c[key] = s
    return LaurentPolynomial(out)


# ---------------------------------------------------------------------------
# Mahler measure


def mahler_measure(f: LaurentPolynomial) -> float:
    """|leading| * prod max(1, |root|) over the complex roots of f.

    Equals exp of the average of log|f| around the unit circle; units t^k
    contribute nothing.  Roots come from the balanced companion matrix with
    a Newton polish.
    """
    if not f:
        raise ValueError("Mahler measure of the zero polynomial")
    p = f.shift(-f.min_exponent())
    deg = p.max_exponent()
    coeffs = np.array([p.coeffs.get(e, 0) for e in range(deg + 1)], dtype=complex)
    if deg == 0:
        return float(abs(coeffs[0]))
    roots = np.roots(coeffs[::-1])
    roots = _polish_roots(coeffs, roots)
    lead = abs(coeffs[-1])
    mods = np.abs(roots)
    return float(lead * np.prod(np.where(mods > 1, mods, 1.0)))


def _polish_roots(coeffs, roots, iterations=3, tol=1e-12):
    deriv = coeffs[1:] * np.arange(1, len(coeffs))
    for _ in range(iterations):
        val = np.polyval(coeffs[::-1], roots)
        if np.all(np.abs(val) < tol):
            break
        dval = np.polyval(deriv[::-1], roots)
        step = np.where(np.abs(dval) > 1e-300, val / dval, 0)
        roots = roots - step
    return roots
