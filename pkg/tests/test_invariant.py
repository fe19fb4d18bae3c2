import math
import random

import pytest

from l2alex.constructions import CableSpec, cable_presentation
from l2alex.groupalg import FreeAbelianOracle
from l2alex.invariant import (
    Cable,
    Inverse,
    Mirror,
    Sum,
    Torus,
    Unknot,
    detect_unknot,
    exact_exponent,
    exact_value,
    l2_from_presentation,
    mirror_inverse_laws,
    parse_knot_expr,
    trivializes,
)
from l2alex.words import Presentation


def random_tree(rng, depth=4):
    roll = rng.random()
    if depth == 0 or roll < 0.25:
        return Unknot()
    if roll < 0.5:
        p = rng.choice([1, -1]) * rng.randrange(1, 4)
        q = rng.choice([q for q in range(-5, 6) if math.gcd(p, q) == 1])
        return Torus(p, q)
    if roll < 0.7:
        return Sum(random_tree(rng, depth - 1), random_tree(rng, depth - 1))
    if roll < 0.9:
        p = rng.choice([1, -1]) * rng.randrange(1, 4)
        q = rng.choice([q for q in range(-5, 6) if math.gcd(p, q) == 1])
        return Cable(p, q, random_tree(rng, depth - 1))
    node = Mirror if rng.random() < 0.5 else Inverse
    return node(random_tree(rng, depth - 1))


def fold_exponent(tree):
    """Independent iterative computation of the exponent (explicit stack)."""
    total = 0
    stack = [(tree, 1)]
    while stack:
        node, multiplier = stack.pop()
        if isinstance(node, Unknot):
            continue
        if isinstance(node, Torus):
            total += multiplier * (abs(node.p) - 1) * (abs(node.q) - 1)
        elif isinstance(node, Sum):
            stack.append((node.left, multiplier))
            stack.append((node.right, multiplier))
        elif isinstance(node, Cable):
            total += multiplier * (abs(node.p) - 1) * (abs(node.q) - 1)
            stack.append((node.companion, multiplier * abs(node.p)))
        else:
            stack.append((node.child, multiplier))
    return total


# ---------------------------------------------------------------------------
# expression grammar


def test_parse_expressions():
    assert parse_knot_expr("unknot") == Unknot()
    assert parse_knot_expr("torus(2,3)") == Torus(2, 3)
    assert parse_knot_expr("torus(2,-1)") == Torus(2, -1)
    assert parse_knot_expr("sum(unknot,torus(2,3))") == Sum(Unknot(), Torus(2, 3))
    assert parse_knot_expr("cable(2,3,unknot)") == Cable(2, 3, Unknot())
    assert parse_knot_expr("mirror(inverse(unknot))") == Mirror(Inverse(Unknot()))
    assert parse_knot_expr(" sum( torus(2,3) , unknot ) ") == Sum(
        Torus(2, 3), Unknot()
    )


def test_parse_errors():
    for bad in ("", "torus(2,4)", "torus(0,1)", "sum(unknot)", "cable(2,3)",
                "unknot extra", "knot"):
        with pytest.raises(ValueError):
            parse_knot_expr(bad)


# ---------------------------------------------------------------------------
# exact evaluation


def test_exponent_torus_values():
    assert exact_exponent(Torus(2, 7)) == 6
    assert exact_exponent(Torus(3, 4)) == 6
    assert exact_exponent(Torus(2, 3)) == 2
    assert exact_exponent(Torus(2, -1)) == 0
    assert exact_exponent(Unknot()) == 0


def test_exponent_sum_and_cable():
    assert exact_exponent(Sum(Torus(2, 3), Torus(2, 3))) == 4
    assert exact_exponent(Cable(2, 3, Torus(2, 3))) == 2 * 2 + 1 * 2
    assert exact_exponent(Mirror(Torus(2, 5))) == 4
    assert exact_exponent(Inverse(Torus(2, 5))) == 4


def test_exponent_against_fold_200_trees():
    rng = random.Random(41)
    for _ in range(200):
        tree = random_tree(rng)
        assert exact_exponent(tree) == fold_exponent(tree)


def test_exact_values():
    assert exact_value(Unknot(), 17.0).value == 1.0
    assert exact_value(Torus(2, 3), 2.0).value == 4.0
    assert exact_value(Torus(2, 3), 0.5).value == 1.0
    v = exact_value(Sum(Torus(2, 3), Torus(2, 5)), 3.0)
    assert v.exponent == 6
    assert v.value == 3.0 ** 6
    with pytest.raises(ValueError):
        exact_value(Unknot(), 0)


def test_unit_class_canonicalization():
    # values differing by integer powers of t share a representative
    t = 2.0
    v1 = exact_value(Torus(2, 3), t)              # 4 = t^2
    v2 = exact_value(Mirror(Torus(2, 3)), 1 / t)  # 1 = 4 / t^2
    from l2alex.invariant import L2Value

    w2 = L2Value(t=t, value=v2.value, exponent=v2.exponent)
    assert math.isclose(v1.unit_class_log(), w2.unit_class_log(), abs_tol=1e-12)


def test_exact_value_at_one_always_trivial():
    rng = random.Random(42)
    for _ in range(50):
        assert exact_value(random_tree(rng), 1.0).value == 1.0


def test_detect_unknot_examples():
    assert detect_unknot(Unknot())
    assert detect_unknot(Cable(-1, 5, Unknot()))
    assert detect_unknot(Cable(1, 7, Sum(Unknot(), Unknot())))
    assert not detect_unknot(Sum(Unknot(), Torus(2, 3)))
    assert not detect_unknot(Cable(2, 3, Unknot()))
    assert detect_unknot(Mirror(Inverse(Unknot())))


def test_detect_unknot_matches_rewrite_200_trees():
    rng = random.Random(43)
    for _ in range(200):
        tree = random_tree(rng)
        assert detect_unknot(tree) == trivializes(tree)


def test_mirror_inverse_laws_trefoil():
    out = mirror_inverse_laws(Torus(2, 3), 2.0)
    assert out["mirror"]["unit_exponent"] == 2
    assert out["mirror"]["matches_unit_class"]
    assert out["inverse"]["matches_unit_class"]


def test_mirror_inverse_laws_unknot():
    out = mirror_inverse_laws(Unknot(), 3.0)
    assert out["mirror"]["unit_exponent"] == 0
    assert out["inverse"]["unit_exponent"] == 0


def test_mirror_inverse_laws_sum():
    out = mirror_inverse_laws(Sum(Torus(2, 3), Torus(2, 5)), 3.0)
    assert out["mirror"]["unit_exponent"] == 6
    assert out["mirror"]["matches_unit_class"]


# ---------------------------------------------------------------------------
# numeric path


def test_numeric_unknot_exact_one():
    unk = Presentation(("g", "h"), ((1, -2),), wirtinger=True)
    oracle = FreeAbelianOracle(1)
    embed = {1: (1,), 2: (1,)}
    for t in (0.5, 1.0, 2.0, 5.0):
        v = l2_from_presentation(
            unk, t, oracle, embed=embed, method="series", order=16
        )
        assert math.isclose(v.value, 1.0, rel_tol=1e-9)
        assert v.probe.verdict == "no-evidence-of-kernel"


def test_numeric_trefoil_against_closed_form(trefoil_2gen, trefoil_amalgam):
    oracle, embed, _ = trefoil_amalgam
    v = l2_from_presentation(
        trefoil_2gen, 2.0, oracle, embed=embed, method="ball", radius=10
    )
    assert abs(v.value - 4.0) / 4.0 <= 0.15
    assert v.normalized


def test_numeric_cable_against_closed_form(unknot_band, trefoil_amalgam):
    oracle, _, _ = trefoil_amalgam
    cab = cable_presentation(
        unknot_band, CableSpec(2, 3), unknot_band.marks["longitude"]
    )
    embed = {1: (2,), 2: (2,), 3: (1,), 4: ()}
    v = l2_from_presentation(cab, 2.0, oracle, embed=embed, method="ball", radius=8)
    assert abs(v.value - 4.0) / 4.0 <= 0.15


def test_numeric_t25_against_closed_form(unknot_band):
    # a second torus knot on a different amalgam: exponent (2-1)(5-1) = 4
    from l2alex.groupalg import TorusAmalgamOracle

    cab = cable_presentation(
        unknot_band, CableSpec(2, 5), unknot_band.marks["longitude"]
    )
    oracle = TorusAmalgamOracle(2, 5)
    embed = {1: (2,), 2: (2,), 3: (1,), 4: ()}
    v = l2_from_presentation(cab, 2.0, oracle, embed=embed, method="ball", radius=7)
    assert abs(v.value - 16.0) / 16.0 <= 0.15


def test_numeric_rejects_bad_inputs(trefoil_2gen, trefoil_amalgam):
    oracle, embed, _ = trefoil_amalgam
    with pytest.raises(ValueError):
        l2_from_presentation(trefoil_2gen, -1.0, oracle, embed=embed)
    with pytest.raises(ValueError):
        l2_from_presentation(
            Presentation(("a",), ()), 2.0, FreeAbelianOracle(1)
        )
    # oracle that does not kill the relators is rejected
    with pytest.raises(ValueError, match="does not kill"):
        l2_from_presentation(
            trefoil_2gen, 2.0, FreeAbelianOracle(2), method="series", order=8
        )


def test_numeric_unit_class_under_row_scaling(trefoil_2gen, trefoil_amalgam):
    # evaluating with a different deleted row changes the value by t^Z only
    oracle, embed, _ = trefoil_amalgam
    v1 = l2_from_presentation(
        trefoil_2gen, 2.0, oracle, embed=embed, method="ball", radius=9, deleted_row=1
    )
    v2 = l2_from_presentation(
        trefoil_2gen, 2.0, oracle, embed=embed, method="ball", radius=9, deleted_row=2
    )
    ratio = v1.value / v2.value
    m = round(math.log(ratio) / math.log(2.0))
    assert abs(ratio - 2.0 ** m) <= 0.1 * 2.0 ** m


def test_probe_twisted_trefoil_minor_at_one(trefoil_2gen, trefoil_amalgam):
    # at t=1 the twisted minor is injective (determinant one); the probe
    # finds no kernel evidence at desk radii
    from l2alex.fk import property_i_probe
    from l2alex.invariant import twisted_minor

    oracle, embed, _ = trefoil_amalgam
    m, _ = twisted_minor(trefoil_2gen, 1.0, oracle, embed)
    rep = property_i_probe(m, radii=(4, 6, 8))
    assert rep.verdict == "no-evidence-of-kernel"
    assert all(mass == 0.0 for mass in rep.kernel_masses)


def test_numeric_unit_class_under_tietze(trefoil_2gen, trefoil_amalgam):
    # relator moves change the estimate by an integer power of t only
    from l2alex.words import TietzeMove, tietze_apply

    oracle, embed, _ = trefoil_amalgam
    t = 2.0
    base = l2_from_presentation(
        trefoil_2gen, t, oracle, embed=embed, method="ball", radius=9
    )
    moved = trefoil_2gen
    for move in (
        TietzeMove(kind="Ia", relator=1),
        TietzeMove(kind="Ib", relator=1, word=(1, 2)),
    ):
        moved = tietze_apply(moved, move)
    v = l2_from_presentation(moved, t, oracle, embed=embed, method="ball", radius=9)
    ratio = v.value / base.value
    m = round(math.log(ratio) / math.log(t))
    assert abs(ratio - t ** m) <= 0.1 * t ** m
