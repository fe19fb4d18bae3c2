"""Normal-form oracles, Knuth-Bendix completion, and group-ring arithmetic.

An oracle decides the word problem for a fixed group by mapping every word
to a canonical form; two words are provably equal iff their normal forms
coincide.  Exact oracles exist for free groups, free abelian groups, and the
torus-knot amalgams < x, y | x^p = y^q >.  Everything else goes through
string rewriting: Knuth-Bendix completion yields a decision procedure when
it terminates, and a flagged partial oracle when the budget runs out.

Group-ring elements are finite maps normal-form-word -> coefficient over a
shared oracle; they model the dense subalgebra of the group von Neumann
algebra on which traces are literal coefficient lookups.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Word, free_reduce, inverse, syllables


# ---------------------------------------------------------------------------
# oracles


class NormalFormOracle:
    """Base class; subclasses define normal_form over their alphabet."""

    kind = "abstract"
    certified = True  # False when reductions are not proven confluent

    def __init__(self, num_generators: int):
        self.num_generators = num_generators

    def normal_form(self, w: Word) -> Word:
        raise NotImplementedError

    def multiply(self, u: Word, v: Word) -> Word:
        return self.normal_form(u + v)

    def letters(self):
        for g in range(1, self.num_generators + 1):
            yield (g,)
            yield (-g,)

    def identity(self) -> Word:
        return ()


class FreeGroupOracle(NormalFormOracle):
    """Free group: normal form is free reduction."""

    kind = "Free"

    def normal_form(self, w: Word) -> Word:
        return free_reduce(w)


class FreeAbelianOracle(NormalFormOracle):
    """Free abelian group: exponents sorted by generator."""

    kind = "FreeAbelian"

    def normal_form(self, w: Word) -> Word:
        exps = [0] * self.num_generators
        for l in w:
            exps[abs(l) - 1] += 1 if l > 0 else -1
        out = []
        for g, e in enumerate(exps, start=1):
            out.extend([g if e > 0 else -g] * abs(e))
        return tuple(out)

    def multiply(self, u: Word, v: Word) -> Word:
        # fast path for rank 1 with normal-form inputs (homogeneous words)
        if self.num_generators == 1:
            e = (len(u) if not u or u[0] > 0 else -len(u)) + (
                len(v) if not v or v[0] > 0 else -len(v)
            )
            return (1,) * e if e >= 0 else (-1,) * (-e)
        return self.normal_form(u + v)


class TorusAmalgamOracle(NormalFormOracle):
    """The group < x, y | x^p = y^q > with gcd(p,q)=1 and p,q >= 2.

    Normal form is the amalgamated-free-product form z^m s_1 ... s_r with
    z = x^p = y^q central and the s alternating between x^a (0 < a < p) and
    y^b (0 < b < q).  Spelled as the word x^(p*m) followed by the syllables.
    Generator 1 is x, generator 2 is y.
    """

    kind = "TorusAmalgam"

    def __init__(self, p: int, q: int):
        from math import gcd

        if gcd(p, q) != 1:
            raise ValueError(f"gcd({p},{q}) must be 1")
        if p < 2 or q < 2:
            raise ValueError("amalgam normal form needs p, q >= 2")
        super().__init__(2)
        self.p = p
        self.q = q

    def normal_form(self, w: Word) -> Word:
        m = 0
        stack = []
        for g, e in syllables(free_reduce(w)):
            while True:
                if stack and stack[-1][0] == g:
                    e += stack.pop()[1]
                n = self.p if g == 1 else self.q
                k = e // n
                a = e - n * k
                m += k
                if a != 0:
                    stack.append((g, a))
                    break
                if not stack:
                    break
                # syllable vanished; the exposed top has the other generator,
                # so nothing further merges here
                break
        letters = []
        if m:
            letters.extend([1 if m > 0 else -1] * (abs(m) * self.p))
        for g, e in stack:
            letters.extend([g if e > 0 else -g] * abs(e))
        return free_reduce(letters)


# ---------------------------------------------------------------------------
# string rewriting and Knuth-Bendix completion
#
# Rewriting treats inverse letters as ordinary alphabet symbols, so the rule
# set always contains the cancellations (g, -g) -> () and (-g, g) -> ().
# Orders are shortlex with an optional per-symbol weight: rules must strictly
# decrease (total weight, length, lexicographic rank).


def _default_ranks(k):
    # precedence g1 < g1^-1 < g2 < g2^-1 < ...
    ranks = {}
    for g in range(1, k + 1):
        ranks[g] = 2 * g - 2
        ranks[-g] = 2 * g - 1
    return ranks


@dataclass
class ShortlexOrder:
    """Weighted shortlex order seed: symbol precedence and optional weights."""

    num_generators: int
    ranks: dict = None
    weights: dict = None

    def __post_init__(self):
        if self.ranks is None:
            self.ranks = _default_ranks(self.num_generators)
        if self.weights is None:
            self.weights = {s: 1 for s in self.ranks}

    def key(self, w: Word):
        return (
            sum(self.weights[l] for l in w),
            len(w),
            tuple(self.ranks[l] for l in w),
        )

    def greater(self, a: Word, b: Word) -> bool:
        return self.key(a) > self.key(b)


class RewritingSystemOracle(NormalFormOracle):
    """Oracle backed by a rewriting rule set.

    certified is True only when completion resolved every critical pair, in
    which case normal_form is a genuine decision procedure.
    """

    kind = "RewritingSystem"

    def __init__(self, num_generators, rules, order, certified):
        super().__init__(num_generators)
        self.rules = list(rules)
        self.order = order
        self.certified = certified

    def normal_form(self, w: Word) -> Word:
        return _rewrite(tuple(w), self.rules)


def _rewrite(w, rules):
    changed = True
    while changed:
        changed = False
        for lhs, rhs in rules:
            i = _find(w, lhs, 0)
            if i >= 0:
                w = w[:i] + rhs + w[i + len(lhs):]
                changed = True
                break
    return w


def _find(w, sub, start):
    n = len(sub)
    for i in range(start, len(w) - n + 1):
        if w[i:i + n] == sub:
            return i
    return -1


@dataclass
class KBResult:
    oracle: RewritingSystemOracle
    completed: bool
    rules_examined: int
    message: str = ""


def kb_complete(
    presentation,
    order: ShortlexOrder = None,
    max_rules: int = 200,
    max_len: int = 20,
) -> KBResult:
    """Knuth-Bendix completion of a presentation under (weighted) shortlex.

    Pass-based: each round interreduces the rule set, then resolves every
    critical pair; a round with nothing to add certifies local confluence
    (and hence, with termination from the order, a decision procedure).
    On budget exhaustion the partial rule set is returned, certified=False.
    """
    k = len(presentation.generators)
    if order is None:
        order = ShortlexOrder(k)
    rules = []
    for g in range(1, k + 1):
        rules.append(((g, -g), ()))
        rules.append(((-g, g), ()))

    def orient(a, b):
        if a == b:
            return None
        return (a, b) if order.greater(a, b) else (b, a)

    for r in presentation.relators:
        rule = orient(_rewrite(tuple(r), rules), ())
        if rule:
            rules.append(rule)

    examined = 0
    while True:
        rules = _interreduce(rules, order)
        fresh = []
        seen = set(rules)
        for l1, r1 in rules:
            for l2, r2 in rules:
                for a, b in _critical_pairs(l1, r1, l2, r2):
                    examined += 1
                    a = _rewrite(a, rules)
                    b = _rewrite(b, rules)
                    rule = orient(a, b)
                    if rule is None or rule in seen:
                        continue
                    if len(rule[0]) > max_len:
                        return KBResult(
                            RewritingSystemOracle(k, rules + fresh, order, False),
                            completed=False,
                            rules_examined=examined,
                            message=f"rule length budget {max_len} exceeded",
                        )
                    seen.add(rule)
                    fresh.append(rule)
                    if len(rules) + len(fresh) > max_rules:
                        return KBResult(
                            RewritingSystemOracle(k, rules + fresh, order, False),
                            completed=False,
                            rules_examined=examined,
                            message=f"rule budget {max_rules} exceeded",
                        )
        if not fresh:
            return KBResult(
                RewritingSystemOracle(k, rules, order, certified=True),
                completed=True,
                rules_examined=examined,
            )
        rules.extend(fresh)


def _interreduce(rules, order):
    """Mutually reduce the rule set; preserves the generated congruence."""
    rules = list(dict.fromkeys(rules))
    changed = True
    while changed:
        changed = False
        for i, (lhs, rhs) in enumerate(rules):
            others = rules[:i] + rules[i + 1:]
            new_lhs = _rewrite(lhs, others)
            new_rhs = _rewrite(rhs, others)
            if new_lhs == lhs and new_rhs == rhs:
                continue
            changed = True
            if new_lhs == new_rhs:
                rules.pop(i)
            elif order.greater(new_lhs, new_rhs):
                rules[i] = (new_lhs, new_rhs)
            else:
                rules[i] = (new_rhs, new_lhs)
            rules = list(dict.fromkeys(rules))
            break
    return rules


def _critical_pairs(l1, r1, l2, r2):
    """Overlap words of two left-hand sides, reduced both ways."""
    # suffix of l1 = prefix of l2 (proper, nonempty)
    for n in range(1, min(len(l1), len(l2))):
        if l1[len(l1) - n:] == l2[:n]:
            # word l1[:len-n] + l2
            yield (r1 + l2[n:], l1[:len(l1) - n] + r2)
    # l2 inside l1
    if len(l2) <= len(l1):
        i = 0
        while True:
            i = _find(l1, l2, i)
            if i < 0:
                break
            yield (r1, l1[:i] + r2 + l1[i + len(l2):])
            i += 1


# ---------------------------------------------------------------------------
# group-ring arithmetic


class GroupRingElement:
    """Finite sum of group elements (normal-form words) with coefficients."""

    __slots__ = ("terms", "oracle")

    def __init__(self, terms, oracle):
        self.oracle = oracle
        self.terms = {}
        for w, c in dict(terms).items():
            if c != 0:
                nf = oracle.normal_form(tuple(w))
                s = self.terms.get(nf, 0) + c
                if s == 0:
                    self.terms.pop(nf, None)
                else:
                    self.terms[nf] = s

    @classmethod
    def from_free(cls, elem, oracle, embed=None):
        """Project a FreeRingElement into the group ring.

        embed optionally maps each presentation generator (1-based) to a word
        over the oracle's alphabet.
        """
        terms = {}
        for w, c in elem.terms.items():
            img = _embed_word(w, embed) if embed else w
            nf = oracle.normal_form(img)
            terms[nf] = terms.get(nf, 0) + c
        return cls(terms, oracle)

    @classmethod
    def zero(cls, oracle):
        return cls({}, oracle)

    @classmethod
    def one(cls, oracle, coeff=1):
        return cls({(): coeff}, oracle)

    def _check(self, other):
        if self.oracle is not other.oracle:
            raise ValueError("group-ring elements use different oracles")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.oracle is other.oracle and self.terms == other.terms

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w, 0) + c
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
        e = GroupRingElement.zero(self.oracle)
        e.terms = out
        return e

    def __neg__(self):
        e = GroupRingElement.zero(self.oracle)
        e.terms = {w: -c for w, c in self.terms.items()}
        return e

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            self._check(other)
            out = {}
            o = self.oracle
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = o.multiply(w1, w2)
                    s = out.get(w, 0) + c1 * c2
                    if s == 0:
                        out.pop(w, None)
                    else:
                        out[w] = s
            e = GroupRingElement.zero(o)
            e.terms = out
            return e
        e = GroupRingElement.zero(self.oracle)
        e.terms = {w: c * other for w, c in self.terms.items()} if other != 0 else {}
        return e

    __rmul__ = __mul__

    def star(self):
        """Adjoint: conjugate coefficients on inverted group elements."""
        terms = {}
        for w, c in self.terms.items():
            nf = self.oracle.normal_form(inverse(w))
            terms[nf] = terms.get(nf, 0) + _conj(c)
        e = GroupRingElement.zero(self.oracle)
        e.terms = {w: c for w, c in terms.items() if c != 0}
        return e

    def trace(self):
        """Coefficient of the identity: the von Neumann trace."""
        return self.terms.get(self.oracle.identity(), 0)

    def one_norm(self):
        return sum(abs(c) for c in self.terms.values())

    def __repr__(self):
        return f"GroupRingElement({self.terms!r})"


def _conj(c):
    return c.conjugate() if isinstance(c, complex) else c


def _embed_word(w, embed):
    out = []
    for l in w:
        img = embed[abs(l)]
        out.extend(img if l > 0 else inverse(img))
    return tuple(out)


def gr_mul(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    return x * y


def gr_star(x: GroupRingElement) -> GroupRingElement:
    return x.star()


class GroupRingMatrix:
    """Rectangular matrix of GroupRingElements over one shared oracle."""

    def __init__(self, entries, oracle):
        self.entries = [list(row) for row in entries]
        self.oracle = oracle
        width = {len(row) for row in self.entries}
        if len(width) > 1:
            raise ValueError("ragged matrix")
        for row in self.entries:
            for e in row:
                if e.oracle is not oracle:
                    raise ValueError("matrix entries use different oracles")

    @classmethod
    def identity(cls, n, oracle):
        return cls(
            [
                [
                    GroupRingElement.one(oracle) if i == j else GroupRingElement.zero(oracle)
                    for j in range(n)
                ]
                for i in range(n)
            ],
            oracle,
        )

    @property
    def shape(self):
        return (len(self.entries), len(self.entries[0]) if self.entries else 0)

    def __getitem__(self, ij):
        return self.entries[ij[0]][ij[1]]

    def __mul__(self, other):
        if isinstance(other, GroupRingMatrix):
            n, m = self.shape
            m2, p = other.shape
            if m != m2:
                raise ValueError("shape mismatch")
            out = []
            for i in range(n):
                row = []
                for j in range(p):
                    acc = GroupRingElement.zero(self.oracle)
                    for l in range(m):
                        acc = acc + self.entries[i][l] * other.entries[l][j]
                    row.append(acc)
                out.append(row)
            return GroupRingMatrix(out, self.oracle)
        return GroupRingMatrix(
            [[e * other for e in row] for row in self.entries], self.oracle
        )

    __rmul__ = __mul__

    def __add__(self, other):
        n, m = self.shape
        if other.shape != (n, m):
            raise ValueError("shape mismatch")
        return GroupRingMatrix(
            [
                [self.entries[i][j] + other.entries[i][j] for j in range(m)]
                for i in range(n)
            ],
            self.oracle,
        )

    def __sub__(self, other):
        return self + (-1) * other

    def star(self):
        n, m = self.shape
        return GroupRingMatrix(
            [[self.entries[i][j].star() for i in range(n)] for j in range(m)],
            self.oracle,
        )

    def trace(self):
        n, m = self.shape
        if n != m:
            raise ValueError("trace needs a square matrix")
        return sum((self.entries[i][i].trace() for i in range(n)), 0)


def trace(x):
    """Von Neumann trace of an element or a square matrix."""
    return x.trace()


def normal_form(w: Word, oracle: NormalFormOracle) -> Word:
    return oracle.normal_form(tuple(w))


def ball(oracle: NormalFormOracle, radius: int):
    """All distinct normal forms of words of length <= radius, sorted.

    Breadth-first search over normal forms; for a partial oracle the result
    may identify too few words and is only an over-approximation of the ball.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    seen = {oracle.identity()}
    frontier = [oracle.identity()]
    for _ in range(radius):
        new = []
        for u in frontier:
            for g in oracle.letters():
                v = oracle.multiply(u, g)
                if v not in seen:
                    seen.add(v)
                    new.append(v)
        frontier = new
    return sorted(seen, key=lambda w: (len(w), w))
