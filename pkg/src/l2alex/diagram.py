"""Knot diagrams from PD codes: Wirtinger presentations and longitudes.

PD conventions (pinned so fixtures are stable):

* A crossing line ``X a b c d`` lists the four edge labels counterclockwise
  starting from the incoming under-strand: the under-strand enters at ``a``
  and leaves at ``c``; the over-strand occupies ``b`` and ``d``.
* Edge labels run 1..2n along the orientation, so exactly one of
  ``d = b + 1`` and ``b = d + 1`` holds (mod 2n):  ``b = d + 1`` means the
  over-strand runs d -> b and the crossing is positive; ``d = b + 1`` means
  it runs b -> d and the crossing is negative.
* At a positive crossing with over-arc o, incoming under-arc u, outgoing
  under-arc v, the Wirtinger relator is  o u o^-1 v^-1;  a negative crossing
  gives  o^-1 u o v^-1.

Wirtinger arcs are the maximal over-paths: edges merged across the two
over-strand slots of every crossing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import Presentation, Word, concat, exponent_sum, free_reduce, inverse


@dataclass(frozen=True)
class Crossing:
    sign: int
    edges: tuple  # (a, b, c, d) counterclockwise from incoming under-strand

    @property
    def under_in(self):
        return self.edges[0]

    @property
    def under_out(self):
        return self.edges[2]

    @property
    def over_in(self):
        return self.edges[3] if self.sign > 0 else self.edges[1]

    @property
    def over_out(self):
        return self.edges[1] if self.sign > 0 else self.edges[3]


@dataclass(frozen=True)
class Diagram:
    crossings: tuple
    edge_labels: tuple  # sorted distinct labels; each appears exactly twice
    components: tuple = ()  # label tuples, one per link component

    @property
    def arc_count(self):
        return len(self.edge_labels)

    @property
    def writhe(self):
        return sum(c.sign for c in self.crossings)

    def successor(self):
        """Next edge label along the orientation, per component."""
        succ = {}
        for comp in self.components:
            for i, e in enumerate(comp):
                succ[e] = comp[(i + 1) % len(comp)]
        return succ


def parse_pd(text: str) -> Diagram:
    """Parse PD lines ``X a b c d`` separated by '/' or newlines.

    '#' starts a comment.  Edge labels run consecutively along each
    component; a multi-component link needs a ``components: 1-6, 7-10``
    line declaring the label ranges (a knot is the single full range).
    """
    tuples = []
    ranges = None
    for raw in text.replace("/", "\n").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("components:"):
            ranges = []
            for chunk in line.split(":", 1)[1].split(","):
                lo, _, hi = chunk.strip().partition("-")
                ranges.append((int(lo), int(hi)))
            continue
        parts = line.split()
        if parts[0].upper() != "X":
            raise ValueError(f"expected 'X a b c d', got {raw!r}")
        if len(parts) != 5:
            raise ValueError(f"crossing needs 4 edge labels: {raw!r}")
        try:
            abcd = tuple(int(p) for p in parts[1:])
        except ValueError:
            raise ValueError(f"non-integer edge label in {raw!r}") from None
        if any(x < 1 for x in abcd):
            raise ValueError(f"edge labels must be >= 1: {raw!r}")
        tuples.append(abcd)
    if not tuples:
        raise ValueError("empty PD code")
    counts = {}
    for abcd in tuples:
        for x in abcd:
            counts[x] = counts.get(x, 0) + 1
    bad = sorted(x for x, c in counts.items() if c != 2)
    if bad:
        raise ValueError(f"edge labels {bad} do not appear exactly twice")
    labels = tuple(sorted(counts))
    if ranges is None:
        components = (labels,)
    else:
        components = tuple(
            tuple(range(lo, hi + 1)) for lo, hi in ranges
        )
        declared = [e for comp in components for e in comp]
        if sorted(declared) != list(labels):
            raise ValueError("components line does not cover the edge labels")
    succ = {}
    for comp in components:
        for i, e in enumerate(comp):
            succ[e] = comp[(i + 1) % len(comp)]
    crossings = tuple(
        Crossing(sign=_crossing_sign(abcd, succ), edges=abcd) for abcd in tuples
    )
    return Diagram(crossings=crossings, edge_labels=labels, components=components)


def _crossing_sign(abcd, succ):
    a, b, c, d = abcd
    if succ[d] == b and succ[b] != d:
        return 1
    if succ[b] == d and succ[d] != b:
        return -1
    # both hold only on a 2-edge component; break the tie without the wrap
    if d == b + 1:
        return -1
    if b == d + 1:
        return 1
    raise ValueError(
        f"over-strand labels {b},{d} are not consecutive: bad PD code"
    )


def arc_classes(d: Diagram):
    """Union-find of edges across over-passages; returns edge -> arc index.

    Arcs are numbered 1..n in order of their smallest edge label.
    """
    parent = {e: e for e in d.edge_labels}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in d.crossings:
        a, b = find(c.over_in), find(c.over_out)
        if a != b:
            parent[a] = b
    reps = {}
    for e in d.edge_labels:
        reps.setdefault(find(e), []).append(e)
    ordered = sorted(reps.values(), key=min)
    edge_to_arc = {}
    for i, edges in enumerate(ordered, start=1):
        for e in edges:
            edge_to_arc[e] = i
    return edge_to_arc, len(ordered)


def _gen_names(n):
    if n <= 26:
        return tuple(chr(ord("a") + i) for i in range(n))
    return tuple(f"g{i + 1}" for i in range(n))


def wirtinger(d: Diagram) -> Presentation:
    """Wirtinger presentation: one generator per arc, one relator per
    crossing with the last crossing's relator dropped.  Marks: meridian on
    generator 1 and the preferred longitude word read from the diagram.
    """
    if len(d.components) != 1:
        raise ValueError("Wirtinger presentation needs a knot diagram")
    edge_to_arc, n_arcs = arc_classes(d)
    if n_arcs != len(d.crossings):
        raise ValueError(
            f"{n_arcs} arcs for {len(d.crossings)} crossings: disconnected "
            "or malformed diagram"
        )
    relators = []
    for c in d.crossings:
        o = edge_to_arc[c.over_in]
        u = edge_to_arc[c.under_in]
        v = edge_to_arc[c.under_out]
        if c.sign > 0:
            r = free_reduce((o, u, -o, -v))
        else:
            r = free_reduce((-o, u, o, -v))
        relators.append(r)
    relators = relators[:-1]
    gens = _gen_names(n_arcs)
    return Presentation(
        gens,
        tuple(relators),
        wirtinger=True,
        marks={"meridian": (1,), "longitude": longitude_word(d)},
    )


def wirtinger_all_relators(d: Diagram) -> Presentation:
    """Every crossing relator kept (deficiency zero); for consistency checks."""
    p = wirtinger(d)
    c = d.crossings[-1]
    edge_to_arc, _ = arc_classes(d)
    o, u, v = (edge_to_arc[c.over_in], edge_to_arc[c.under_in], edge_to_arc[c.under_out])
    last = free_reduce((o, u, -o, -v) if c.sign > 0 else (-o, u, o, -v))
    return Presentation(
        p.generators, p.relators + (last,), wirtinger=False, marks=dict(p.marks)
    )


def mirror_presentation(p: Presentation) -> Presentation:
    """Presentation of the mirror knot with the recorded correspondence.

    The mirrored diagram's negatively-oriented meridians satisfy relators
    with the same letter pattern, so the combinatorial data is unchanged;
    the generator named g here denotes the mirror meridian correspondent of
    the input's g.  What flips is the preferred orientation convention: the
    positively-oriented meridian of the mirror is the inverse loop, recorded
    by inverting the meridian and longitude marks.  Chirality re-enters the
    invariants only through t <-> 1/t.
    """
    if not p.wirtinger:
        raise ValueError("mirror_presentation needs a Wirtinger presentation")
    marks = dict(p.marks)
    for role in ("meridian", "longitude"):
        if role in marks:
            marks[role] = inverse(marks[role])
    return Presentation(p.generators, p.relators, wirtinger=True, marks=marks)


def longitude_word(d: Diagram) -> Word:
    """Preferred longitude in Wirtinger generators.

    Reads the over-arc, with the negated crossing sign as exponent, at
    every under-passage along the knot starting from the marked meridian's
    arc (generator 1), then appends meridian^(+writhe); the result has
    abelianization weight zero and commutes with the marked meridian in the
    knot group (the exponent and correction signs are pinned by that
    commutation, given the crossing-sign and relator conventions above).
    """
    edge_to_arc, n_arcs = arc_classes(d)
    under_in_to_crossing = {c.under_in: c for c in d.crossings}
    successor = {c.under_in: c.under_out for c in d.crossings}
    for c in d.crossings:
        successor[c.over_in] = c.over_out

    # walk the knot once, recording the under-passages in order
    start = min(e for e in d.edge_labels if edge_to_arc[e] == 1)
    letters = []
    edge = start
    for _ in range(2 * len(d.crossings)):
        c = under_in_to_crossing.get(edge)
        if c is not None:
            o = edge_to_arc[c.over_in]
            letters.append(-o if c.sign > 0 else o)
        edge = successor[edge]
        if edge == start:
            break
    else:
        raise ValueError("diagram traversal did not close up")
    w = free_reduce(letters)
    correction = (1,) * d.writhe if d.writhe > 0 else (-1,) * (-d.writhe)
    out = concat(w, correction)
    assert exponent_sum_all_ones(out) == 0
    return out


def exponent_sum_all_ones(w: Word) -> int:
    return sum(1 if l > 0 else -1 for l in w)


# standard table fixtures, usable from tests and docs
TREFOIL_PD = "X 1 4 2 5 / X 3 6 4 1 / X 5 2 6 3"
FIGURE_EIGHT_PD = "X 4 2 5 1 / X 8 6 1 5 / X 6 3 7 4 / X 2 7 3 8"
UNKNOT_ONE_CROSSING_PD = "X 2 2 1 1"
# two over-first kinks: the doubly twisted band, Wirtinger group < g h | g h^-1 >
UNKNOT_TWISTED_BAND_PD = "X 2 2 3 1 / X 4 4 1 3"
