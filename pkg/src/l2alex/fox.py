"""Fox differential calculus over the free-group ring.

Elements of the free ring are finite maps word -> coefficient, with words
freely reduced.  Derivatives are computed here exactly; passing to a quotient
group happens later, in groupalg, with an explicit normal-form oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import (
    AbelianizationMap,
    Presentation,
    Word,
    concat,
    format_word,
    free_reduce,
    inverse,
)


class FreeRingElement:
    """Finite formal sum of free-group words with numeric coefficients.

    Coefficients stay exact (int / Fraction) until a float or complex value
    enters; zero coefficients are never stored.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for w, c in dict(terms).items():
                if c != 0:
                    self.terms[tuple(w)] = c

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({(): 1})

    @classmethod
    def monomial(cls, w: Word, coeff=1):
        return cls({free_reduce(w): coeff})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, FreeRingElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, 0) + c
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
        return FreeRingElement(out)

    def __neg__(self):
        return FreeRingElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FreeRingElement):
            out = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = concat(w1, w2)
                    s = out.get(w, 0) + c1 * c2
                    if s == 0:
                        out.pop(w, None)
                    else:
                        out[w] = s
            return FreeRingElement(out)
        return FreeRingElement({w: c * other for w, c in self.terms.items()})

    __rmul__ = __mul__

    def left_mul_word(self, w: Word):
        return FreeRingElement({concat(w, u): c for u, c in self.terms.items()})

    def star(self):
        return FreeRingElement(
            {inverse(w): _conj(c) for w, c in self.terms.items()}
        )

    def format(self, generators) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda u: (len(u), u)):
            c = self.terms[w]
            body = format_word(w, generators)
            if w == ():
                parts.append(f"{c}")
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c} {body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"FreeRingElement({self.terms!r})"


def _conj(c):
    return c.conjugate() if isinstance(c, complex) else c


def fox_derivative(w: Word, gen: int) -> FreeRingElement:
    """d(w)/d(g_gen) by the product rule.

    Defining rules: d(1)=0, d(g_j)/d(g_i)=delta_ij,
    d(g_j^-1)/d(g_i) = -delta_ij g_j^-1, d(uv) = d(u) + u d(v).
    """
    terms = {}
    prefix = ()
    for l in w:
        if l == gen:
            key = prefix
            terms[key] = terms.get(key, 0) + 1
        elif l == -gen:
            key = concat(prefix, (l,))
            terms[key] = terms.get(key, 0) - 1
        prefix = concat(prefix, (l,))
    return FreeRingElement(terms)


@dataclass(frozen=True)
class FoxMatrix:
    """Jacobian of the relators: rows are generators, columns relators."""

    entries: tuple  # k rows of l FreeRingElements
    row_labels: tuple
    col_labels: tuple

    @property
    def shape(self):
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def fox_matrix(p: Presentation) -> FoxMatrix:
    k = len(p.generators)
    entries = tuple(
        tuple(fox_derivative(r, i + 1) for r in p.relators) for i in range(k)
    )
    return FoxMatrix(
        entries=entries,
        row_labels=tuple(p.generators),
        col_labels=tuple(f"r{j + 1}" for j in range(len(p.relators))),
    )


def delete_row(m: FoxMatrix, i: int) -> FoxMatrix:
    """Remove the i-th row (1-based), keeping the remaining labels."""
    k = len(m.entries)
    if not 1 <= i <= k:
        raise IndexError(f"row index {i} out of range 1..{k}")
    return FoxMatrix(
        entries=tuple(row for r, row in enumerate(m.entries) if r != i - 1),
        row_labels=tuple(l for r, l in enumerate(m.row_labels) if r != i - 1),
        col_labels=m.col_labels,
    )


def twist(x: FreeRingElement, alpha: AbelianizationMap, t) -> FreeRingElement:
    """Scale each term c[w] to c * t^alpha(w) * [w]; t must be positive.

    With an int or Fraction t the result stays exact.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t!r}")
    return FreeRingElement(
        {w: c * t ** alpha.weight(w) for w, c in x.terms.items()}
    )


def twist_matrix(m: FoxMatrix, alpha: AbelianizationMap, t) -> FoxMatrix:
    return FoxMatrix(
        entries=tuple(
            tuple(twist(e, alpha, t) for e in row) for row in m.entries
        ),
        row_labels=m.row_labels,
        col_labels=m.col_labels,
    )


def fundamental_formula_residual(p: Presentation, oracle, embed=None):
    """sum_i d(r_j)/d(g_i) (g_i - 1), reduced by the oracle, per relator.

    The sum telescopes to r_j - 1 in the free ring, so the reduced residual
    is zero exactly when the oracle proves the relator trivial.  embed
    optionally maps presentation generators to oracle words.  Returns a
    list of (residual GroupRingElement, certified flag); a partial oracle
    reduces soundly but may fail to reach zero, so its results carry
    certified=False.
    """
    from .groupalg import GroupRingElement

    results = []
    certified = getattr(oracle, "certified", True)
    for r in p.relators:
        acc = FreeRingElement()
        for i in range(1, len(p.generators) + 1):
            d = fox_derivative(r, i)
            acc = acc + d * FreeRingElement({(i,): 1, (): -1})
        residual = GroupRingElement.from_free(acc, oracle, embed)
        results.append((residual, certified))
    return results
