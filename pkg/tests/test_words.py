import random

import pytest

from l2alex.words import (
    Presentation,
    TietzeMove,
    abelianization,
    conjugation_shaped,
    exponent_sum,
    format_word,
    free_reduce,
    inverse,
    parse_word,
    presentation_from_text,
    presentation_to_text,
    tietze_apply,
    validate_wirtinger,
)

GENS = ("a", "b")


def random_word(rng, k, length):
    return free_reduce(
        rng.choice([1, -1]) * rng.randrange(1, k + 1) for _ in range(length)
    )


def test_parse_word_basics():
    assert parse_word("a A b", GENS) == (2,)
    assert parse_word("a b A", GENS) == (1, 2, -1)  # freely reduced already
    assert parse_word("a b a B A B", GENS) == (1, 2, 1, -2, -1, -2)
    assert parse_word("", GENS) == ()
    assert parse_word("aAb", GENS) == (2,)
    assert parse_word("abA", GENS) == (1, 2, -1)
    assert parse_word("1", GENS) == ()
    assert parse_word("b^-1 a", GENS) == (-2, 1)
    with pytest.raises(ValueError):
        parse_word("z", GENS)
    with pytest.raises(ValueError):
        parse_word("ab^-1", GENS)  # unknown multi-letter name


def test_format_word_roundtrip():
    rng = random.Random(1)
    for _ in range(50):
        w = random_word(rng, 2, rng.randrange(0, 10))
        assert parse_word(format_word(w, GENS), GENS) == w


def test_free_reduce():
    assert free_reduce((1, 2, -2, -1)) == ()
    assert free_reduce((1, 1, -1)) == (1,)
    trefoil_relator = (1, 2, 1, -2, -1, -2)
    assert free_reduce(trefoil_relator) == trefoil_relator


def test_free_reduce_idempotent_and_nonincreasing():
    rng = random.Random(2)
    for _ in range(200):
        raw = [rng.choice([1, -1]) * rng.randrange(1, 4) for _ in range(20)]
        w = free_reduce(raw)
        assert free_reduce(w) == w
        assert len(w) <= len(raw)


def test_abelianization_trefoil(trefoil_2gen):
    assert abelianization(trefoil_2gen).values == (1, 1)


def test_abelianization_two_generator_unknot():
    p = Presentation(("g", "h"), ((1, -2),))
    assert abelianization(p).values == (1, 1)


def test_abelianization_relators_have_weight_zero(trefoil_wirtinger, fig8_wirtinger):
    for p in (trefoil_wirtinger, fig8_wirtinger):
        alpha = abelianization(p)
        for r in p.relators:
            assert alpha.weight(r) == 0


def test_abelianization_rank_error():
    # free group of rank 2: kernel has rank 2
    p = Presentation(("a", "b"), ())
    with pytest.raises(ValueError, match="rank 2"):
        abelianization(p)


def test_abelianization_sign_and_gcd_convention():
    # relator a^2 b^-4 forces (2, 1) after gcd normalization
    p = Presentation(("a", "b"), ((1, 1, -2, -2, -2, -2),))
    assert abelianization(p).values == (2, 1)


def test_validate_wirtinger_shapes(trefoil_wirtinger, trefoil_2gen):
    assert validate_wirtinger(trefoil_wirtinger).passed
    rep = validate_wirtinger(trefoil_2gen)
    assert rep.relator_shapes == (False,)
    assert not rep.passed
    unk = Presentation(("g", "h"), ((1, -2),), wirtinger=True)
    assert validate_wirtinger(unk).passed


def test_conjugation_shape_cases():
    assert conjugation_shaped((1, 2, -1, -3))
    assert conjugation_shaped((-1, 2, 1, -3))  # inverse/rotation of the shape
    assert conjugation_shaped((2, -3))
    assert not conjugation_shaped((1, 2, 1, -2))
    assert not conjugation_shaped((1,))


def test_presentation_text_roundtrip(trefoil_wirtinger):
    text = presentation_to_text(trefoil_wirtinger)
    p = presentation_from_text(text)
    assert p.generators == trefoil_wirtinger.generators
    assert p.relators == trefoil_wirtinger.relators
    assert p.marks == trefoil_wirtinger.marks
    assert p.wirtinger


def test_presentation_validation_errors():
    with pytest.raises(ValueError):
        Presentation(("a", "a"), ())
    with pytest.raises(ValueError):
        Presentation(("a",), ((1, -1),))  # not freely reduced
    with pytest.raises(ValueError):
        Presentation(("a",), ((2,),))  # letter outside alphabet


# ---------------------------------------------------------------------------
# Tietze moves


def test_tietze_ia_involution(trefoil_2gen):
    move = TietzeMove(kind="Ia", relator=1)
    q = tietze_apply(trefoil_2gen, move)
    assert q.relators[0] == inverse(trefoil_2gen.relators[0])
    assert tietze_apply(q, move).relators == trefoil_2gen.relators


def test_tietze_iii_relabels(trefoil_2gen):
    move = TietzeMove(kind="III", perm=(2, 1))
    q = tietze_apply(trefoil_2gen, move)
    assert q.generators == ("b", "a")
    assert tietze_apply(q, move).relators == trefoil_2gen.relators


def test_tietze_iiw_and_inverse(trefoil_2gen):
    move = TietzeMove(kind="IIW", name="c", word=(1, 2, -1))
    q = tietze_apply(trefoil_2gen, move)
    assert len(q.generators) == 3
    assert len(q.relators) == 2
    assert q.relators[1] == (3, 1, -2, -1)
    back = tietze_apply(q, TietzeMove(kind="IIWinv", name="c"))
    assert back.generators == trefoil_2gen.generators
    assert back.relators == trefoil_2gen.relators


def test_tietze_iiw_shape_enforced(trefoil_2gen):
    with pytest.raises(ValueError):
        tietze_apply(
            trefoil_2gen, TietzeMove(kind="IIW", name="c", word=(1, 2, 2))
        )


def test_tietze_iiwinv_occupied(trefoil_wirtinger):
    # every generator occurs in some other relator: removal must fail
    with pytest.raises(ValueError):
        tietze_apply(trefoil_wirtinger, TietzeMove(kind="IIWinv", name="a"))


def test_tietze_index_errors(trefoil_2gen):
    with pytest.raises(IndexError):
        tietze_apply(trefoil_2gen, TietzeMove(kind="Ia", relator=9))
    with pytest.raises(IndexError):
        tietze_apply(trefoil_2gen, TietzeMove(kind="Ic", relator=1, other=1))


def test_tietze_preserves_abelianization(trefoil_wirtinger):
    from l2alex.cli import random_tietze_moves

    rng = random.Random(5)
    for _ in range(20):
        p = trefoil_wirtinger
        for move in random_tietze_moves(p, 6, rng):
            q = tietze_apply(p, move)
            alpha_p = abelianization(p)
            alpha_q = abelianization(q)
            # surviving generators keep their value (matched by name)
            for i, name in enumerate(p.generators):
                if name in q.generators:
                    j = q.generators.index(name)
                    assert alpha_q.values[j] == alpha_p.values[i]
            p = q


def test_tietze_wirtinger_flag(trefoil_wirtinger):
    # conjugating a relator by a word breaks the Wirtinger shape
    q = tietze_apply(
        trefoil_wirtinger, TietzeMove(kind="Ib", relator=1, word=(1, 2))
    )
    assert not q.wirtinger
    # permutation keeps it
    q = tietze_apply(trefoil_wirtinger, TietzeMove(kind="III", perm=(3, 1, 2)))
    assert q.wirtinger


def test_exponent_sum():
    w = parse_word("a b a B A B", GENS)
    assert exponent_sum(w, 1) == 1
    assert exponent_sum(w, 2) == -1
