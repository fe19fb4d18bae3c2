import pytest

from l2alex.diagram import (
    FIGURE_EIGHT_PD,
    TREFOIL_PD,
    UNKNOT_ONE_CROSSING_PD,
    UNKNOT_TWISTED_BAND_PD,
    parse_pd,
    wirtinger,
)
from l2alex.groupalg import TorusAmalgamOracle
from l2alex.words import Presentation, parse_word


@pytest.fixture(scope="session")
def trefoil_2gen():
    """The braid-relator presentation of the trefoil group."""
    gens = ("a", "b")
    return Presentation(gens, (parse_word("a b a B A B", gens),))


@pytest.fixture(scope="session")
def unknot_band():
    """< g h | g h^-1 >, read off the doubly twisted band diagram."""
    return wirtinger(parse_pd(UNKNOT_TWISTED_BAND_PD))


@pytest.fixture(scope="session")
def trefoil_wirtinger():
    return wirtinger(parse_pd(TREFOIL_PD))


@pytest.fixture(scope="session")
def fig8_wirtinger():
    return wirtinger(parse_pd(FIGURE_EIGHT_PD))


@pytest.fixture(scope="session")
def unknot_kink():
    return wirtinger(parse_pd(UNKNOT_ONE_CROSSING_PD))


@pytest.fixture(scope="session")
def trefoil_amalgam():
    """Oracle for the trefoil group plus embeddings of the standard
    presentations, certified by killing the relators (see test_groupalg)."""
    from l2alex.words import free_reduce, inverse

    oracle = TorusAmalgamOracle(2, 3)
    a = (-2, 1)        # y^-1 x
    b = (-1, 2, 2)     # x^-1 y^2
    c = free_reduce(inverse(a) + b + a)  # image of a^-1 b a
    embed_2gen = {1: a, 2: b}
    embed_3gen = {1: a, 2: b, 3: c}
    return oracle, embed_2gen, embed_3gen


def propagate_meridian_images(pres, seeds, oracle):
    """Derive generator images from conjugation relators and seed images.

    Each Wirtinger relator o u o^-1 v^-1 determines v from (o, u) and u
    from (o, v); starting from the seed images this propagates around the
    diagram.  Returns a full embedding dict or None if underdetermined, and
    raises if the propagated images contradict a relator (checked by the
    oracle).
    """
    from l2alex.words import cyclic_rotations, free_reduce, inverse

    def conj_form(r):
        # rewrite r as (o, u, v) with relator o u o^-1 v^-1
        if len(r) == 2:
            x, y = r
            if x > 0 and y < 0:
                return (None, x, -y)
            if x < 0 and y > 0:
                return (None, y, -x)
            return None
        for w in list(cyclic_rotations(r)) + list(cyclic_rotations(inverse(r))):
            p, q, s, t = w
            if p > 0 and s == -p and q > 0 and t < 0:
                return (p, q, -t)
        return None

    images = dict(seeds)
    changed = True
    while changed:
        changed = False
        for r in pres.relators:
            form = conj_form(r)
            if form is None:
                continue
            o, u, v = form
            if o is None:
                if u in images and v not in images:
                    images[v] = images[u]
                    changed = True
                elif v in images and u not in images:
                    images[u] = images[v]
                    changed = True
                continue
            if o in images and u in images and v not in images:
                images[v] = free_reduce(
                    images[o] + images[u] + inverse(images[o])
                )
                changed = True
            elif o in images and v in images and u not in images:
                images[u] = free_reduce(
                    inverse(images[o]) + images[v] + images[o]
                )
                changed = True
    if len(images) < len(pres.generators):
        return None
    # verify: every relator must die under the embedding
    from l2alex.fox import FreeRingElement
    from l2alex.groupalg import GroupRingElement

    for r in pres.relators:
        elem = GroupRingElement.from_free(FreeRingElement({r: 1}), oracle, images)
        if list(elem.terms) != [oracle.identity()]:
            raise AssertionError(f"embedding does not kill relator {r}")
    return images


# two-component fixtures for the pattern builder
HOPF_PATTERN_PD = """
X 2 4 1 3
X 4 2 3 1
components: 1-2, 3-4
"""

WHITEHEAD_PATTERN_PD = """
# pattern strands 1-8, round meridian curve 9-12
X 1 10 2 9
X 12 3 9 2
X 6 4 7 3
X 4 6 5 5
X 11 7 12 8
X 8 10 1 11
components: 1-8, 9-12
"""
