"""Presentation-level knot operations: connected sum, torus patterns,
cables, satellites, and the two-component pattern presentation.

Conventions carried through every construction:

* the marked meridian of a Wirtinger presentation plays the role of the
  distinguished generator spliced into sum and cable relators (diagram-built
  presentations mark generator 1; it pairs with longitude_word, which reads
  the longitude from that arc);
* every constructed relator has abelianization weight zero;
* cable output marks:  core -> x,  meridian -> a1^u x^v with u p + v q = 1
  (the homology-level meridian class of the cable), longitude ->
  x^p meridian^(-p q),  enabling iterated cabling.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .words import (
    Presentation,
    Word,
    concat,
    free_reduce,
    inverse,
    power,
)


@dataclass(frozen=True)
class CableSpec:
    """Winding numbers of a torus pattern: p longitudinal, q meridional."""

    p: int
    q: int

    def __post_init__(self):
        if self.p == 0:
            raise ValueError("p must be nonzero")
        if gcd(self.p, self.q) != 1:
            raise ValueError(f"gcd({self.p},{self.q}) must be 1")


def _shift_word(w: Word, offset: int) -> Word:
    return tuple((l + offset) if l > 0 else (l - offset) for l in w)


def _marked_meridian_index(p: Presentation) -> int:
    """Generator index of the marked meridian, defaulting to the last one."""
    mark = p.marks.get("meridian")
    if mark is not None and len(mark) == 1 and mark[0] > 0:
        return mark[0]
    return len(p.generators)


def _meridian_word(p: Presentation) -> Word:
    """Marked meridian as a word (constructed presentations mark words)."""
    mark = p.marks.get("meridian")
    if mark:
        return mark
    return (len(p.generators),)


def _fresh_names(base_names, taken):
    out = []
    taken = set(taken)
    for name in base_names:
        candidate = name
        n = 1
        while candidate in taken:
            n += 1
            candidate = f"{name}{n}"
        taken.add(candidate)
        out.append(candidate)
    return tuple(out)


def sum_presentation(p1: Presentation, p2: Presentation) -> Presentation:
    """Wirtinger presentation of the connected sum.

    Generators and relators are concatenated and the two marked meridians
    are identified by one extra relator.  Second-factor generators are
    renamed when they collide with first-factor names.
    """
    if not (p1.wirtinger and p2.wirtinger):
        raise ValueError("sum_presentation needs Wirtinger inputs")
    k = len(p1.generators)
    names2 = _fresh_names(p2.generators, p1.generators)
    gens = p1.generators + names2
    rels = list(p1.relators)
    rels.extend(_shift_word(r, k) for r in p2.relators)
    m1 = _marked_meridian_index(p1)
    m2 = _marked_meridian_index(p2) + k
    rels.append((m1, -m2))
    marks = {"meridian": (m1,)}
    return Presentation(gens, tuple(rels), wirtinger=True, marks=marks)


def torus_pattern_presentation(spec: CableSpec) -> Presentation:
    """Group of the (p,q)-torus pattern in its ambient solid torus:
    < x, y, lambda | x^p y^-q lambda^-p , lambda y lambda^-1 y^-1 >
    (relator form x^p = lambda^p y^q; the q-th and p-th powers commute by
    the second relator) with marks core -> x, meridian -> y,
    longitude -> lambda.
    """
    x, y, lam = 1, 2, 3
    r1 = free_reduce(
        power((x,), spec.p) + power((-y,), spec.q) + power((-lam,), spec.p)
    )
    r2 = (lam, y, -lam, -y)
    return Presentation(
        ("x", "y", "lam"),
        (r1, r2),
        marks={"core": (x,), "meridian": (y,), "longitude": (lam,)},
    )


def cable_presentation(p_c: Presentation, spec: CableSpec, w: Word) -> Presentation:
    """Deficiency-one presentation of the (p,q)-cable with companion p_c.

    w is the companion's longitude word in its generators (weight zero under
    the companion's abelianization); the splice relators are
    x^p m^-q lambda^-p  and  lambda^-1 w,  with m the marked meridian word.
    """
    from .words import abelianization

    weight = abelianization(p_c).weight(w)
    if weight != 0:
        raise ValueError(f"longitude word has abelianization weight {weight}")
    k = len(p_c.generators)
    mu_c = _meridian_word(p_c)
    x_name, lam_name = _fresh_names(("x", "lam"), p_c.generators)
    gens = p_c.generators + (x_name, lam_name)
    x, lam = k + 1, k + 2
    r_cable = free_reduce(
        power((x,), spec.p) + power(inverse(mu_c), spec.q) + power((-lam,), spec.p)
    )
    r_long = concat((-lam,), w)
    rels = p_c.relators + (r_cable, r_long)
    u, v = _bezout(spec.p, spec.q)
    meridian = free_reduce(power(mu_c, u) + power((x,), v))
    longitude = free_reduce(power((x,), spec.p) + power(inverse(meridian), spec.p * spec.q))
    marks = {"core": (x,), "meridian": meridian, "longitude": longitude}
    return Presentation(gens, rels, marks=marks)


def _bezout(p, q):
    """u, v with u*p + v*q = 1."""
    old_r, r = p, q
    old_u, u = 1, 0
    old_v, v = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_u, u = u, old_u - quo * u
        old_v, v = v, old_v - quo * v
    if old_r < 0:
        old_u, old_v = -old_u, -old_v
    return old_u, old_v


def satellite_presentation(p_c: Presentation, p_pat: Presentation) -> Presentation:
    """Splice a pattern presentation onto a companion.

    p_pat must mark meridian and longitude among its generators.  The
    companion's marked meridian a_k is substituted for the pattern meridian
    mu everywhere, the pattern's lambda-mu commutation relator is dropped
    (it becomes the peripheral commutation a_k W = W a_k, already true in
    the companion group), and the pattern longitude is equated with the
    companion's longitude word.  The result has deficiency one.
    """
    mer = p_pat.marks.get("meridian")
    lon = p_pat.marks.get("longitude")
    if mer is None or lon is None:
        raise ValueError("pattern needs meridian and longitude marks")
    if len(mer) != 1 or mer[0] < 0 or len(lon) != 1 or lon[0] < 0:
        raise ValueError("pattern marks must be single generators")
    mu, lam_pat = mer[0], lon[0]
    if mu == lam_pat:
        raise ValueError("pattern meridian and longitude marks coincide")
    w = p_c.marks.get("longitude")
    if w is None:
        raise ValueError("companion needs a longitude mark (its word W)")
    k = len(p_c.generators)
    mu_c = _meridian_word(p_c)

    # reindex pattern generators, dropping mu (substituted by the
    # companion's meridian word)
    kept = [g for g in range(1, len(p_pat.generators) + 1) if g != mu]
    names = _fresh_names(
        tuple(p_pat.generators[g - 1] for g in kept), p_c.generators
    )
    new_index = {g: k + i + 1 for i, g in enumerate(kept)}

    def translate(word):
        out = []
        for l in word:
            g, s = abs(l), (1 if l > 0 else -1)
            if g == mu:
                out.extend(mu_c if s > 0 else inverse(mu_c))
            else:
                out.append(s * new_index[g])
        return free_reduce(out)

    commutator = frozenset(
        (
            free_reduce((lam_pat, mu, -lam_pat, -mu)),
            free_reduce((mu, lam_pat, -mu, -lam_pat)),
        )
    )
    dropped = False
    pattern_rels = []
    for r in p_pat.relators:
        if not dropped and r in commutator:
            dropped = True
            continue
        pattern_rels.append(translate(r))
    if not dropped:
        raise ValueError("pattern has no lambda-mu commutation relator to drop")
    gens = p_c.generators + names
    rels = list(p_c.relators) + [r for r in pattern_rels if r]
    lam = new_index[lam_pat]
    rels.append(concat((-lam,), w))
    # a meridian of the satellite is a strand meridian of the pattern, which
    # a general pattern presentation does not single out; only the core mark
    # survives (cable_presentation pins meridian and longitude words itself)
    marks = {}
    if "core" in p_pat.marks:
        marks["core"] = translate(p_pat.marks["core"])
    return Presentation(gens, tuple(rels), marks=marks)


def pattern_presentation_q3(d, meridian_component: int) -> Presentation:
    """Pattern presentation read off a 2-component diagram of P and a round
    meridian curve M crossing the m pattern strands.

    Output: < a_i, a'_i, b_j, lam, mu | tangle relators,
    a'_i = lam^(s_i) a_i lam^(-s_i), lam mu = mu lam,
    mu = a_m^(e_m) ... a_1^(e_1) > with marks meridian -> mu,
    longitude -> lam; the auxiliary arcs of M created by its
    under-passages are eliminated by substitution.  s_i and e_i are the
    crossing signs where M passes over, resp. under, strand i.
    """
    from .diagram import arc_classes

    if len(d.components) != 2:
        raise ValueError(f"need a 2-component diagram, got {len(d.components)}")
    if not 0 <= meridian_component < 2:
        raise ValueError("meridian_component must be 0 or 1")
    m_edges = set(d.components[meridian_component])
    p_edges = set(d.components[1 - meridian_component])

    over_cr, under_cr, tangle_cr = [], [], []
    for c in d.crossings:
        over_m = c.over_in in m_edges
        under_m = c.under_in in m_edges
        if over_m and under_m:
            raise ValueError("meridian component crosses itself")
        if over_m:
            over_cr.append(c)
        elif under_m:
            under_cr.append(c)
        else:
            tangle_cr.append(c)
    m = len(over_cr)
    if m == 0 or len(under_cr) != m:
        raise ValueError(
            "meridian curve must pass over then under each strand once"
        )

    # M's arcs break only at its under-passages; require a single over-arc,
    # i.e. all over-passages happen on one arc of M
    edge_to_arc, _ = arc_classes(d)
    lam_arcs = {edge_to_arc[c.over_in] for c in over_cr}
    if len(lam_arcs) != 1:
        raise ValueError(
            "meridian over-passages are not consecutive on one arc"
        )

    # order strands by position along the meridian over-arc
    succ = d.successor()
    lam_arc_edges = [e for e in m_edges if edge_to_arc[e] == edge_to_arc[over_cr[0].over_in]]
    start = min(lam_arc_edges)
    order = []
    e = start
    for _ in range(len(m_edges)):
        for c in over_cr:
            if c.over_in == e:
                order.append(c)
        e = succ[e]
        if e == start:
            break
    if len(order) != m:
        raise ValueError("could not order the meridian over-passages")
    over_cr = order

    # strand i: under-in/out arcs at the i-th over-passage
    a = [edge_to_arc[c.under_in] for c in over_cr]
    a_prime = [edge_to_arc[c.under_out] for c in over_cr]
    strand_arcs = [set((a[i], a_prime[i])) for i in range(m)]

    # map each under-passage of M to its strand
    e_sign = {}
    for c in under_cr:
        o = edge_to_arc[c.over_in]
        hits = [i for i in range(m) if o in strand_arcs[i]]
        if len(hits) != 1:
            raise ValueError(
                "an under-passage of the meridian is not on a unique strand"
            )
        i = hits[0]
        if i in e_sign:
            raise ValueError(f"meridian passes under strand {i + 1} twice")
        e_sign[i] = (c.sign, o)

    # presentation generators: re-index P-arcs as a_i, a'_i, b_j
    p_arcs = sorted({edge_to_arc[e] for e in p_edges})
    new_index = {}
    names = []
    for i in range(m):
        new_index[a[i]] = len(names) + 1
        names.append(f"a{i + 1}")
    for i in range(m):
        if a_prime[i] not in new_index:
            new_index[a_prime[i]] = len(names) + 1
            names.append(f"ap{i + 1}")
    bcount = 0
    for arc in p_arcs:
        if arc not in new_index:
            bcount += 1
            new_index[arc] = len(names) + 1
            names.append(f"b{bcount}")
    lam = len(names) + 1
    mu = len(names) + 2
    names.extend(["lam", "mu"])

    rels = []
    if tangle_cr:
        # a connected link diagram has one redundant Wirtinger relator;
        # dropping the last tangle relator keeps the output deficiency one
        for c in tangle_cr[:-1]:
            o = new_index[edge_to_arc[c.over_in]]
            u = new_index[edge_to_arc[c.under_in]]
            v = new_index[edge_to_arc[c.under_out]]
            r = (o, u, -o, -v) if c.sign > 0 else (-o, u, o, -v)
            r = free_reduce(r)
            if r:
                rels.append(r)
    for i, c in enumerate(over_cr):
        u = new_index[a[i]]
        v = new_index[a_prime[i]]
        r = (lam, u, -lam, -v) if c.sign > 0 else (-lam, u, lam, -v)
        r = free_reduce(r)
        if r:
            rels.append(r)
    rels.append((lam, mu, -lam, -mu))
    mu_word = []
    for i in range(m - 1, -1, -1):
        if i not in e_sign:
            raise ValueError(f"meridian never passes under strand {i + 1}")
        sign, over_arc = e_sign[i]
        mu_word.append(sign * new_index[over_arc])
    rels.append(free_reduce((mu,) + inverse(tuple(mu_word))))
    return Presentation(
        tuple(names),
        tuple(rels),
        marks={"meridian": (mu,), "longitude": (lam,)},
    )


def whitehead_pattern_presentation() -> Presentation:
    """The Whitehead double pattern's simplified two-generator form:
    < b, lam, mu | lam mu lam^-1 mu^-1, b lam b lam^-1 b^-1 lam mu b^-1 lam^-1 >
    with marks meridian -> mu, longitude -> lam.
    """
    b, lam, mu = 1, 2, 3
    r1 = (lam, mu, -lam, -mu)
    r2 = free_reduce((b, lam, b, -lam, -b, lam, mu, -b, -lam))
    return Presentation(
        ("b", "lam", "mu"),
        (r1, r2),
        marks={"meridian": (mu,), "longitude": (lam,)},
    )
