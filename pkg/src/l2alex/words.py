"""Free-group words, finite presentations, Tietze moves, and abelianization.

A word is a freely reduced tuple of nonzero integers: letter ``+i`` is the
``i``-th generator (1-based), ``-i`` its inverse.  Words are plain tuples so
they can serve as dictionary keys in group-ring elements.

All values in this module are immutable after construction and every
operation is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

Word = tuple  # tuple of nonzero ints, freely reduced


# ---------------------------------------------------------------------------
# word combinatorics


def free_reduce(letters) -> Word:
    """Cancel adjacent inverse pairs until none remain."""
    out = []
    for l in letters:
        if l == 0:
            raise ValueError("letter 0 is not a generator")
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def inverse(w: Word) -> Word:
    return tuple(-l for l in reversed(w))


def concat(*words) -> Word:
    """Product in the free group (freely reduced)."""
    out = []
    for w in words:
        for l in w:
            if out and out[-1] == -l:
                out.pop()
            else:
                out.append(l)
    return tuple(out)


def conjugate(w: Word, by: Word) -> Word:
    return concat(by, w, inverse(by))


def power(w: Word, n: int) -> Word:
    if n < 0:
        return power(inverse(w), -n)
    return concat(*([w] * n))


def syllables(w: Word):
    """Group a word into maximal runs [(generator, exponent), ...]."""
    out = []
    for l in w:
        g, e = abs(l), (1 if l > 0 else -1)
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return [(g, e) for g, e in out]


def exponent_sum(w: Word, gen: int) -> int:
    return sum(1 if l == gen else -1 if l == -gen else 0 for l in w)


def cyclic_rotations(w: Word):
    for i in range(max(1, len(w))):
        yield w[i:] + w[:i]


# ---------------------------------------------------------------------------
# text format: lowercase name = generator, uppercase letter or `^-1` = inverse

_TOKEN = re.compile(r"\S+")


def parse_word(text: str, generators) -> Word:
    """Parse a whitespace-separated word over declared generator names.

    ``A`` means the inverse of generator ``a``; ``name^-1`` is also accepted.
    A token that is no declared name but spells out single-letter generators
    (e.g. ``abA``) is expanded letter by letter.
    """
    index = {name: i + 1 for i, name in enumerate(generators)}
    letters = []
    for tok in _TOKEN.findall(text):
        letters.extend(_parse_token(tok, index))
    return free_reduce(letters)


def _parse_token(tok: str, index):
    if tok == "1":
        return []
    if tok.endswith("^-1"):
        name = tok[:-3]
        if name in index:
            return [-index[name]]
        raise ValueError(f"unknown generator {name!r}")
    if tok in index:
        return [index[tok]]
    low = tok.lower()
    if low in index and tok != low:
        return [-index[low]]
    # compact form: each character one generator or inverse
    if len(tok) > 1:
        out = []
        for ch in tok:
            if ch in index:
                out.append(index[ch])
            elif ch.lower() in index and ch != ch.lower():
                out.append(-index[ch.lower()])
            else:
                raise ValueError(f"unknown generator {ch!r} in token {tok!r}")
        return out
    raise ValueError(f"unknown generator {tok!r}")


def format_word(w: Word, generators) -> str:
    """Inverse of parse_word; single-letter names use the case convention."""
    if not w:
        return "1"
    parts = []
    for l in w:
        name = generators[abs(l) - 1]
        if l > 0:
            parts.append(name)
        elif len(name) == 1:
            parts.append(name.upper())
        else:
            parts.append(name + "^-1")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class Presentation:
    """A finite group presentation with optional marked elements.

    marks maps a role name ("meridian", "longitude", "core") to a word; it
    carries meridian-longitude data through constructions.  Generator names
    are the correspondence tracked across transformations: a generator keeps
    its name under every move that does not delete it.
    """

    generators: tuple
    relators: tuple
    wirtinger: bool = False
    marks: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(tuple(r) for r in self.relators))
        seen = set()
        for name in self.generators:
            if not name or not isinstance(name, str):
                raise ValueError(f"bad generator name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate generator {name!r}")
            seen.add(name)
        k = len(self.generators)
        for r in self.relators:
            if r != free_reduce(r):
                raise ValueError("relator is not freely reduced")
            for l in r:
                if not 1 <= abs(l) <= k:
                    raise ValueError(f"relator letter {l} outside alphabet")
        for role, w in self.marks.items():
            for l in w:
                if not 1 <= abs(l) <= k:
                    raise ValueError(f"mark {role!r} letter {l} outside alphabet")

    @property
    def deficiency(self) -> int:
        return len(self.generators) - len(self.relators)

    def word(self, text: str) -> Word:
        return parse_word(text, self.generators)

    def format(self, w: Word) -> str:
        return format_word(w, self.generators)

    def __str__(self):
        gens = " ".join(self.generators)
        rels = ", ".join(self.format(r) for r in self.relators)
        return f"< {gens} | {rels} >"


def presentation_from_text(text: str) -> Presentation:
    """Parse the presentation file format.

    ::

        gens: a b c
        rels: a b A C, b c B A
        mark meridian: a
    """
    gens = None
    rels = []
    marks = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip().lower()
        if key == "gens":
            gens = tuple(rest.split())
        elif key == "rels":
            if gens is None:
                raise ValueError("rels line before gens line")
            for chunk in rest.split(","):
                if chunk.strip():
                    rels.append(parse_word(chunk, gens))
        elif key.startswith("mark"):
            role = key.split(None, 1)[1]
            if gens is None:
                raise ValueError("mark line before gens line")
            marks[role] = parse_word(rest, gens)
        else:
            raise ValueError(f"unrecognized line {raw!r}")
    if gens is None:
        raise ValueError("missing gens line")
    p = Presentation(gens, tuple(rels), marks=marks)
    report = validate_wirtinger(p)
    if report.passed:
        p = Presentation(gens, tuple(rels), wirtinger=True, marks=marks)
    return p


def presentation_to_text(p: Presentation) -> str:
    lines = ["gens: " + " ".join(p.generators)]
    if p.relators:
        lines.append("rels: " + ", ".join(p.format(r) for r in p.relators))
    for role in sorted(p.marks):
        lines.append(f"mark {role}: " + p.format(p.marks[role]))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# abelianization


@dataclass(frozen=True)
class AbelianizationMap:
    """Generator weights for the surjection onto the infinite cyclic group."""

    values: tuple

    def weight(self, w: Word) -> int:
        return sum(self.values[abs(l) - 1] * (1 if l > 0 else -1) for l in w)


def abelianization(p: Presentation) -> AbelianizationMap:
    """Integer kernel of the relator exponent-sum matrix, normalized.

    Requires the kernel to have rank 1 (knot-group-like presentation).  The
    gcd of the values is 1 and the first nonzero value is positive.
    """
    k = len(p.generators)
    rows = [
        [Fraction(exponent_sum(r, i + 1)) for i in range(k)] for r in p.relators
    ]
    basis = _rational_nullspace(rows, k)
    if len(basis) != 1:
        raise ValueError(
            f"abelianization kernel has rank {len(basis)}, expected 1"
        )
    vec = basis[0]
    denom = 1
    for v in vec:
        denom = denom * v.denominator // gcd(denom, v.denominator)
    ints = [int(v * denom) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    first = next(v for v in ints if v != 0)
    if first < 0:
        ints = [-v for v in ints]
    return AbelianizationMap(tuple(ints))


def _rational_nullspace(rows, k):
    """Gaussian elimination over the rationals; returns a nullspace basis."""
    mat = [row[:] for row in rows]
    pivots = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(k) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * k
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# Wirtinger shape report


@dataclass(frozen=True)
class WirtingerReport:
    deficiency: int
    relator_shapes: tuple  # bool per relator
    all_conjugate: bool
    degenerate_relators: tuple  # indices of empty or single-generator relators

    @property
    def passed(self) -> bool:
        return (
            self.deficiency == 1
            and all(self.relator_shapes)
            and self.all_conjugate
            and not self.degenerate_relators
        )


def conjugation_shaped(r: Word) -> bool:
    """True if r is g_a g_b g_a^-1 g_c^-1 up to inversion and rotation.

    Length-2 relators g_a g_b^-1 count as the degenerate case where the
    conjugating letter cancels (diagram kinks produce them).
    """
    if len(r) == 2:
        a, b = r
        return a != b and (a > 0) != (b > 0) and abs(a) != abs(b)
    if len(r) != 4:
        return False
    for w in list(cyclic_rotations(r)) + list(cyclic_rotations(inverse(r))):
        p, q, s, t = w
        if p > 0 and s == -p and q > 0 and t < 0:
            return True
    return False


def validate_wirtinger(p: Presentation) -> WirtingerReport:
    shapes = tuple(conjugation_shaped(r) for r in p.relators)
    degenerate = tuple(
        i for i, r in enumerate(p.relators) if len(r) <= 1
    )
    # conjugacy graph: relator w g_a w^-1 g_c^-1 links a and c
    k = len(p.generators)
    parent = list(range(k + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    for r, ok in zip(p.relators, shapes):
        if not ok:
            continue
        if len(r) == 2:
            union(abs(r[0]), abs(r[1]))
        else:
            for w in list(cyclic_rotations(r)) + list(cyclic_rotations(inverse(r))):
                pp, q, s, t = w
                if pp > 0 and s == -pp and q > 0 and t < 0:
                    union(q, -t)
                    break
    roots = {find(i + 1) for i in range(k)}
    return WirtingerReport(
        deficiency=p.deficiency,
        relator_shapes=shapes,
        all_conjugate=len(roots) <= 1,
        degenerate_relators=degenerate,
    )


# ---------------------------------------------------------------------------
# Tietze transformations


@dataclass(frozen=True)
class TietzeMove:
    """One of the five move kinds.

    kind: Ia (invert relator j), Ib (conjugate relator j by word),
    Ic (replace r_j by r_j r_l), IIW (add generator name with defining word
    of shape g_j g_i g_j^-1 or g_j^-1 g_i g_j), IIWinv (remove such a pair),
    III (permute generators; perm[i] is the new position of generator i).
    """

    kind: str
    relator: int = 0
    other: int = 0
    word: Word = ()
    name: str = ""
    perm: tuple = ()


def _iiw_shaped(w: Word) -> bool:
    if len(w) != 3:
        return False
    a, b, c = w
    return abs(a) == abs(c) and a == -c and b > 0 and abs(b) != abs(a)


def tietze_apply(p: Presentation, move: TietzeMove) -> Presentation:
    """Apply one Tietze move; the result presents an isomorphic group.

    The Wirtinger flag survives only when the new relator set still has the
    conjugation shape (always for III).
    """
    rels = list(p.relators)
    gens = list(p.generators)
    marks = dict(p.marks)
    kind = move.kind
    if kind in ("Ia", "Ib", "Ic"):
        j = move.relator
        if not 1 <= j <= len(rels):
            raise IndexError(f"relator index {j} out of range")
    if kind == "Ia":
        rels[move.relator - 1] = inverse(rels[move.relator - 1])
    elif kind == "Ib":
        rels[move.relator - 1] = conjugate(rels[move.relator - 1], move.word)
    elif kind == "Ic":
        l = move.other
        if not 1 <= l <= len(rels) or l == move.relator:
            raise IndexError(f"second relator index {l} invalid")
        rels[move.relator - 1] = concat(rels[move.relator - 1], rels[l - 1])
    elif kind == "IIW":
        if not _iiw_shaped(move.word):
            raise ValueError("IIW word must be g_j g_i g_j^-1 or g_j^-1 g_i g_j")
        if move.name in gens:
            raise ValueError(f"generator {move.name!r} already exists")
        gens.append(move.name)
        x = len(gens)
        rels.append(concat((x,), inverse(move.word)))
    elif kind == "IIWinv":
        if move.name not in gens:
            raise ValueError(f"no generator named {move.name!r}")
        x = gens.index(move.name) + 1
        defining = [
            i
            for i, r in enumerate(rels)
            if len(r) == 4 and r[0] == x and _iiw_shaped(inverse(r[1:]))
        ]
        if not defining:
            raise ValueError(f"{move.name!r} has no defining relator x w^-1")
        i = defining[0]
        others = [r for j2, r in enumerate(rels) if j2 != i]
        if any(x in (abs(l) for l in r) for r in others):
            raise ValueError(f"{move.name!r} occurs outside its defining relator")
        if any(x in (abs(l) for l in w) for w in marks.values()):
            raise ValueError(f"{move.name!r} occurs in a mark")
        del rels[i]
        del gens[x - 1]
        relabel = {g: (g if g < x else g - 1) for g in range(1, len(gens) + 2)}
        rels = [tuple((1 if l > 0 else -1) * relabel[abs(l)] for l in r) for r in rels]
        marks = {
            role: tuple((1 if l > 0 else -1) * relabel[abs(l)] for l in w)
            for role, w in marks.items()
        }
    elif kind == "III":
        perm = move.perm
        if sorted(perm) != list(range(1, len(gens) + 1)):
            raise ValueError("III move needs a permutation of 1..k")
        # generator old i moves to position perm[i-1]
        new_gens = [None] * len(gens)
        for i, name in enumerate(gens):
            new_gens[perm[i] - 1] = name
        gens = new_gens
        rels = [
            tuple((1 if l > 0 else -1) * perm[abs(l) - 1] for l in r) for r in rels
        ]
        marks = {
            role: tuple((1 if l > 0 else -1) * perm[abs(l) - 1] for l in w)
            for role, w in marks.items()
        }
    else:
        raise ValueError(f"unknown Tietze move kind {kind!r}")
    q = Presentation(tuple(gens), tuple(rels), marks=marks)
    if p.wirtinger:
        report = validate_wirtinger(q)
        if kind == "III" or report.passed:
            q = Presentation(tuple(gens), tuple(rels), wirtinger=True, marks=marks)
    return q
