"""Command-line interface: one dispatcher over all subcommands.

Every command prints a human-readable summary to stdout and, with
``--json PATH``, writes a machine-readable report.  Reports carry
``schema: 1``, echo the command, digest the input files, and collect the
warnings raised below; floats are serialized with 15 significant digits so
identical inputs give byte-identical files.  Wall time goes to the text
output only.  Exit codes: 0 success, 2 input error, 3 resource or oracle
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
import time

from . import alexander as alexander_mod
from . import constructions, diagram, fk, fox, groupalg, invariant, words


class InputError(Exception):
    pass


class ResourceError(Exception):
    pass


# ---------------------------------------------------------------------------
# report plumbing


def _clean_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, dict):
        return {k: _clean_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean_floats(v) for v in obj]
    return obj


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as f:
        h.update(f.read())
    return h.hexdigest()[:16]


class RunReport:
    def __init__(self, argv):
        self.report = {
            "schema": 1,
            "command": list(argv),
            "inputs": {},
            "outputs": {},
            "warnings": [],
        }

    def add_input(self, path):
        try:
            self.report["inputs"][path] = _digest(path)
        except OSError as e:
            raise InputError(f"cannot read {path}: {e}") from None

    def warn(self, message):
        self.report["warnings"].append(message)

    def set_outputs(self, **kw):
        self.report["outputs"].update(kw)

    def write_json(self, path):
        with open(path, "w") as f:
            json.dump(_clean_floats(self.report), f, indent=2, sort_keys=True)
            f.write("\n")


def _read(path, report):
    report.add_input(path)
    with open(path) as f:
        return f.read()


def _load_presentation(path, report):
    text = _read(path, report)
    try:
        return words.presentation_from_text(text)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None


def _load_pd_or_presentation(path, report):
    text = _read(path, report)
    stripped = [
        l.split("#", 1)[0].strip() for l in text.replace("/", "\n").splitlines()
    ]
    stripped = [l for l in stripped if l]
    try:
        if stripped and stripped[0].split()[0].upper() == "X":
            return diagram.wirtinger(diagram.parse_pd(text))
        return words.presentation_from_text(text)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from None


# ---------------------------------------------------------------------------
# fk matrix files


_ORACLES = {
    "free": lambda args: groupalg.FreeGroupOracle(args[0] if args else 1),
    "abelian": lambda args: groupalg.FreeAbelianOracle(args[0] if args else 1),
    "torus": lambda args: groupalg.TorusAmalgamOracle(args[0], args[1]),
}


def _default_names(oracle):
    if oracle.kind == "TorusAmalgam":
        return ("x", "y")
    if oracle.num_generators == 1:
        return ("g",)
    return tuple(chr(ord("a") + i) for i in range(oracle.num_generators))


def parse_matrix_file(text):
    """Matrix of group-ring expressions.

    ::

        oracle: abelian 1
        size: 1 1
        gens: g            # optional names for the oracle alphabet
        1 1: 1 - 2 g

    Inverses use the uppercase convention; missing entries are zero.
    """
    oracle = None
    size = None
    names = None
    entries = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip().lower()
        rest = rest.strip()
        if key == "oracle":
            parts = rest.split()
            kind = parts[0].lower()
            if kind not in _ORACLES:
                raise ValueError(f"unknown oracle kind {kind!r}")
            oracle = _ORACLES[kind]([int(x) for x in parts[1:]])
        elif key == "size":
            r, c = rest.split()
            size = (int(r), int(c))
        elif key == "gens":
            names = tuple(rest.split())
        else:
            i, j = key.split()
            entries[(int(i), int(j))] = rest
    if oracle is None or size is None:
        raise ValueError("matrix file needs oracle and size lines")
    if names is None:
        names = _default_names(oracle)
    if len(names) != oracle.num_generators:
        raise ValueError("gens line does not match the oracle alphabet size")
    rows = []
    for i in range(1, size[0] + 1):
        row = []
        for j in range(1, size[1] + 1):
            row.append(
                _parse_group_ring(entries.get((i, j), "0"), names, oracle)
            )
        rows.append(row)
    return groupalg.GroupRingMatrix(rows, oracle), names


def _parse_group_ring(text, names, oracle):
    tokens = text.split()
    terms = []
    sign = 1
    coeff = None
    word_tokens = []

    def flush():
        nonlocal sign, coeff, word_tokens
        if coeff is None and not word_tokens:
            return
        c = sign * (1.0 if coeff is None else coeff)
        w = words.parse_word(" ".join(word_tokens), names)
        terms.append((w, c))
        sign, coeff, word_tokens = 1, None, []

    for tok in tokens:
        if tok == "+":
            flush()
        elif tok == "-":
            flush()
            sign = -1
        else:
            try:
                value = float(tok)
            except ValueError:
                word_tokens.append(tok)
            else:
                if coeff is not None or word_tokens:
                    flush()
                coeff = value
    flush()
    accum = {}
    for w, c in terms:
        accum[w] = accum.get(w, 0) + c
    return groupalg.GroupRingElement(accum, oracle)


def _parse_embedding(text, pres, oracle_names):
    """``a = Y x ; b = X y y`` mapping presentation generators to oracle
    words."""
    embed = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, _, image = chunk.partition("=")
        name = name.strip()
        if name not in pres.generators:
            raise ValueError(f"embedding names unknown generator {name!r}")
        embed[pres.generators.index(name) + 1] = words.parse_word(
            image, oracle_names
        )
    missing = [
        g for i, g in enumerate(pres.generators) if i + 1 not in embed
    ]
    if missing:
        raise ValueError(f"embedding misses generators {missing}")
    return embed


# ---------------------------------------------------------------------------
# subcommands


def _cmd_wirtinger(args, report):
    text = _read(args.pd_file, report)
    d = diagram.parse_pd(text)
    p = (
        diagram.wirtinger_all_relators(d)
        if args.keep_all_relators
        else diagram.wirtinger(d)
    )
    print(words.presentation_to_text(p), end="")
    report.set_outputs(
        presentation=words.presentation_to_text(p),
        generators=list(p.generators),
        relators=[p.format(r) for r in p.relators],
        crossings=len(d.crossings),
        writhe=d.writhe,
    )
    if args.out:
        with open(args.out, "w") as f:
            f.write(words.presentation_to_text(p))


def _cmd_fox(args, report):
    p = _load_presentation(args.pres_file, report)
    m = fox.fox_matrix(p)
    if args.delete_row:
        m = fox.delete_row(m, args.delete_row)
    if args.twist is not None:
        if args.twist <= 0:
            raise InputError("--twist must be positive")
        alpha = words.abelianization(p)
        m = fox.twist_matrix(m, alpha, args.twist)
    cells = {}
    for i, row_label in enumerate(m.row_labels):
        for j, col_label in enumerate(m.col_labels):
            text = m.entries[i][j].format(p.generators)
            print(f"d({col_label})/d({row_label}) = {text}")
            cells[f"{row_label},{col_label}"] = text
    report.set_outputs(rows=list(m.row_labels), cols=list(m.col_labels), entries=cells)


def _cmd_alexander(args, report):
    p = _load_pd_or_presentation(args.input_file, report)
    poly = alexander_mod.alexander_polynomial(p)
    print(poly)
    report.set_outputs(polynomial=str(poly), coefficients={
        str(e): c for e, c in sorted(poly.coeffs.items())
    })


def _cmd_kb(args, report):
    p = _load_presentation(args.pres_file, report)
    result = groupalg.kb_complete(
        p, max_rules=args.max_rules, max_len=args.max_len
    )
    show = p.generators

    def spell(w):
        return words.format_word(w, show) if w else "1"

    for lhs, rhs in result.oracle.rules:
        print(f"{spell(lhs)} -> {spell(rhs)}")
    status = "confluent" if result.completed else f"partial ({result.message})"
    print(f"# {status}; {len(result.oracle.rules)} rules")
    if not result.completed:
        report.warn(f"kb incomplete: {result.message}")
    report.set_outputs(
        completed=result.completed,
        rules=[[spell(l), spell(r)] for l, r in result.oracle.rules],
        rules_examined=result.rules_examined,
        message=result.message,
    )
    if not result.completed:
        raise ResourceError(f"completion failed: {result.message}")


def _cmd_fk(args, report):
    text = _read(args.matrix_file, report)
    try:
        matrix, _ = parse_matrix_file(text)
    except ValueError as e:
        raise InputError(f"{args.matrix_file}: {e}") from None
    if args.method == "series":
        est = fk.fk_det_series(matrix, order=args.order)
    else:
        try:
            est = fk.fk_det_ball(matrix, radius=args.radius, cutoff=args.cutoff)
        except fk.BallResourceError as e:
            raise ResourceError(str(e)) from None
    if est.partial_oracle:
        report.warn("partial-oracle: estimate built on uncertified reductions")
    print(f"value = {est.value:.12g}   (log {est.log_value:.12g})")
    print(f"tail_proxy = {est.tail_proxy:.3g}")
    if est.sigma_min is not None:
        print(f"sigma_min = {est.sigma_min:.3g}")
        if est.sigma_min <= args.cutoff:
            report.warn("kernel-suspected: smallest singular value at cutoff")
    report.set_outputs(**est.as_dict())


def _cmd_construct(args, report):
    if args.what == "sum":
        p1 = _load_presentation(args.inputs[0], report)
        p2 = _load_presentation(args.inputs[1], report)
        out = constructions.sum_presentation(p1, p2)
    elif args.what == "cable":
        if len(args.inputs) != 1:
            raise InputError("cable needs one companion presentation file")
        companion = _load_presentation(args.inputs[0], report)
        w = companion.marks.get("longitude")
        if w is None:
            raise InputError("companion file has no longitude mark")
        out = constructions.cable_presentation(
            companion, constructions.CableSpec(args.p, args.q), w
        )
    elif args.what == "torus-pattern":
        out = constructions.torus_pattern_presentation(
            constructions.CableSpec(args.p, args.q)
        )
    else:
        raise InputError(f"unknown construction {args.what!r}")
    print(words.presentation_to_text(out), end="")
    report.set_outputs(presentation=words.presentation_to_text(out))
    if args.out:
        with open(args.out, "w") as f:
            f.write(words.presentation_to_text(out))


def _make_oracle_and_embed(args, pres, report):
    if args.oracle == "kb":
        result = groupalg.kb_complete(
            pres, max_rules=args.max_rules, max_len=args.max_len
        )
        if not result.completed:
            raise ResourceError(
                "Knuth-Bendix did not complete on this presentation; "
                "provide --oracle torus/abelian/free with --embed, or use "
                "the exact path (l2 exact) for sums and cables"
            )
        return result.oracle, None
    kind = args.oracle
    if kind == "torus":
        oracle = groupalg.TorusAmalgamOracle(args.p, args.q)
    elif kind == "abelian":
        oracle = groupalg.FreeAbelianOracle(args.rank)
    elif kind == "free":
        oracle = groupalg.FreeGroupOracle(args.rank)
    else:
        raise InputError(f"unknown oracle {kind!r}")
    embed = None
    if args.embed:
        embed = _parse_embedding(args.embed, pres, _default_names(oracle))
    elif len(pres.generators) != oracle.num_generators:
        raise InputError(
            "presentation and oracle alphabets differ; provide --embed"
        )
    return oracle, embed


def _cmd_l2(args, report):
    if args.mode == "exact":
        expr = invariant.parse_knot_expr(args.expr)
        value = invariant.exact_value(expr, args.t)
        print(
            f"value = {value.value:.12g}   exponent = {value.exponent}"
            f"   (max(1,t)^{value.exponent} at t = {args.t:g})"
        )
        report.set_outputs(
            input=str(expr),
            t=args.t,
            exponent=value.exponent,
            value=value.value,
            method="exact",
            diagnostics={},
        )
        return
    pres = _load_presentation(args.pres_file, report)
    oracle, embed = _make_oracle_and_embed(args, pres, report)
    try:
        value = invariant.l2_from_presentation(
            pres,
            args.t,
            oracle,
            embed=embed,
            method=args.method,
            order=args.order,
            radius=args.radius,
            cutoff=args.cutoff,
        )
    except fk.BallResourceError as e:
        raise ResourceError(str(e)) from None
    est = value.estimate
    probe = value.probe
    if est.partial_oracle:
        report.warn("partial-oracle: estimate built on uncertified reductions")
    if probe.verdict == "kernel-suspected":
        report.warn("kernel-suspected: injectivity probe found near-kernel mass")
    print(f"value = {value.value:.12g}   (t = {args.t:g}, method = {est.method})")
    print(f"probe = {probe.verdict}")
    report.set_outputs(
        input=args.pres_file,
        t=args.t,
        value=value.value,
        method=est.method,
        diagnostics={
            "estimate": est.as_dict(),
            "probe": probe.as_dict(),
        },
    )


def _cmd_detect_unknot(args, report):
    expr = invariant.parse_knot_expr(args.expr)
    result = invariant.detect_unknot(expr)
    print("true" if result else "false")
    report.set_outputs(
        input=str(expr),
        trivial=result,
        exponent=invariant.exact_exponent(expr),
    )


def _parse_tietze_line(line, pres):
    parts = line.split()
    kind = parts[0]
    if kind == "Ia":
        return words.TietzeMove(kind="Ia", relator=int(parts[1]))
    if kind == "Ib":
        return words.TietzeMove(
            kind="Ib",
            relator=int(parts[1]),
            word=words.parse_word(" ".join(parts[2:]), pres.generators),
        )
    if kind == "Ic":
        return words.TietzeMove(kind="Ic", relator=int(parts[1]), other=int(parts[2]))
    if kind == "IIW":
        return words.TietzeMove(
            kind="IIW",
            name=parts[1],
            word=words.parse_word(" ".join(parts[2:]), pres.generators),
        )
    if kind == "IIWinv":
        return words.TietzeMove(kind="IIWinv", name=parts[1])
    if kind == "III":
        perm_names = parts[1:]
        if sorted(perm_names) != sorted(pres.generators):
            raise ValueError(f"III needs a permutation of the generators")
        # perm[i] = new position of generator i
        perm = tuple(perm_names.index(g) + 1 for g in pres.generators)
        return words.TietzeMove(kind="III", perm=perm)
    raise ValueError(f"unknown move {kind!r}")


def random_tietze_moves(pres, count, rng):
    """Random valid move sequence; used by the tietze command and tests."""
    moves = []
    p = pres
    fresh = 0
    added = []
    for _ in range(count):
        kinds = ["Ia", "Ib", "III"]
        if len(p.relators) >= 2:
            kinds.append("Ic")
        if len(p.generators) >= 2:
            kinds.append("IIW")
        removable = [name for name in added if _iiwinv_ok(p, name)]
        if removable:
            kinds.append("IIWinv")
        kind = rng.choice(kinds)
        k = len(p.generators)
        if kind == "Ia":
            move = words.TietzeMove(kind="Ia", relator=rng.randrange(1, len(p.relators) + 1))
        elif kind == "Ib":
            w = tuple(
                rng.choice([1, -1]) * rng.randrange(1, k + 1)
                for _ in range(rng.randrange(1, 4))
            )
            move = words.TietzeMove(
                kind="Ib",
                relator=rng.randrange(1, len(p.relators) + 1),
                word=words.free_reduce(w),
            )
        elif kind == "Ic":
            j = rng.randrange(1, len(p.relators) + 1)
            l = rng.randrange(1, len(p.relators) + 1)
            while l == j:
                l = rng.randrange(1, len(p.relators) + 1)
            move = words.TietzeMove(kind="Ic", relator=j, other=l)
        elif kind == "IIW":
            fresh += 1
            i = rng.randrange(1, k + 1)
            j = rng.randrange(1, k + 1)
            while j == i:
                j = rng.randrange(1, k + 1)
            shape = (j, i, -j) if rng.random() < 0.5 else (-j, i, j)
            move = words.TietzeMove(kind="IIW", name=f"t{fresh}", word=shape)
            added.append(f"t{fresh}")
        elif kind == "IIWinv":
            name = rng.choice(removable)
            move = words.TietzeMove(kind="IIWinv", name=name)
            added.remove(name)
        else:
            perm = list(range(1, k + 1))
            rng.shuffle(perm)
            move = words.TietzeMove(kind="III", perm=tuple(perm))
        moves.append(move)
        p = words.tietze_apply(p, move)
    return moves


def _iiwinv_ok(p, name):
    try:
        words.tietze_apply(p, words.TietzeMove(kind="IIWinv", name=name))
    except (ValueError, IndexError):
        return False
    return True


def _cmd_tietze(args, report):
    pres = _load_presentation(args.pres_file, report)
    if args.script:
        lines = [
            l.split("#", 1)[0].strip()
            for l in _read(args.script, report).splitlines()
        ]
        lines = [l for l in lines if l]
    else:
        lines = None
    before_raw = _raw_alexander(pres)
    before = alexander_mod.alexander_polynomial(pres)
    p = pres
    applied = []
    if lines is not None:
        for line in lines:
            try:
                move = _parse_tietze_line(line, p)
                p = words.tietze_apply(p, move)
            except (ValueError, IndexError) as e:
                raise InputError(f"bad move {line!r}: {e}") from None
            applied.append(line)
    else:
        rng = random.Random(args.seed)
        for move in random_tietze_moves(pres, args.random, rng):
            p = words.tietze_apply(p, move)
            applied.append(move.kind)
    after_raw = _raw_alexander(p)
    after = alexander_mod.alexander_polynomial(p)
    unit = after_raw.min_exponent() - before_raw.min_exponent()
    same = before == after
    print(words.presentation_to_text(p), end="")
    print(f"# alexander before: {before}")
    print(f"# alexander after:  {after}")
    print(f"# normalized equal: {same}; raw determinants differ by t^{unit} up to sign")
    if not same:
        report.warn("alexander polynomial changed under tietze moves")
    report.set_outputs(
        presentation=words.presentation_to_text(p),
        moves=applied,
        alexander_before=str(before),
        alexander_after=str(after),
        normalized_equal=same,
        unit_exponent=unit,
    )
    if args.out:
        with open(args.out, "w") as f:
            f.write(words.presentation_to_text(p))


def _raw_alexander(pres):
    alpha = words.abelianization(pres)
    full = alexander_mod.alexander_matrix(pres, alpha)
    minor = [row for i, row in enumerate(full) if i != 0]
    return alexander_mod.laurent_determinant(minor)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="l2alex",
        description="Knot groups, Fox calculus, Alexander and L2-Alexander invariants",
    )
    parser.add_argument("--json", metavar="PATH", help="write a JSON run report")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    s = sub.add_parser("wirtinger", help="Wirtinger presentation from a PD file")
    s.add_argument("pd_file")
    s.add_argument("--keep-all-relators", action="store_true")
    s.add_argument("--out", help="write the presentation to a file")
    s.set_defaults(func=_cmd_wirtinger)

    s = sub.add_parser("fox", help="Fox matrix of a presentation")
    s.add_argument("pres_file")
    s.add_argument("--delete-row", type=int, default=0)
    s.add_argument("--twist", type=float, default=None)
    s.set_defaults(func=_cmd_fox)

    s = sub.add_parser("alexander", help="Alexander polynomial from PD or presentation")
    s.add_argument("input_file")
    s.set_defaults(func=_cmd_alexander)

    s = sub.add_parser("kb", help="Knuth-Bendix completion")
    s.add_argument("pres_file")
    s.add_argument("--max-rules", type=int, default=200)
    s.add_argument("--max-len", type=int, default=20)
    s.set_defaults(func=_cmd_kb)

    s = sub.add_parser("fk", help="Fuglede-Kadison determinant of a matrix file")
    s.add_argument("matrix_file")
    s.add_argument("--method", choices=("series", "ball"), required=True)
    s.add_argument("--order", type=int, default=64)
    s.add_argument("--radius", type=int, default=10)
    s.add_argument("--cutoff", type=float, default=fk.BALL_CUTOFF)
    s.set_defaults(func=_cmd_fk)

    s = sub.add_parser("construct", help="sum / cable / torus-pattern presentations")
    s.add_argument("what", choices=("sum", "cable", "torus-pattern"))
    s.add_argument("inputs", nargs="*")
    s.add_argument("--p", type=int, default=2)
    s.add_argument("--q", type=int, default=3)
    s.add_argument("--out", help="write the presentation to a file")
    s.set_defaults(func=_cmd_construct)

    s = sub.add_parser("l2", help="L2-Alexander invariant, exact or numeric")
    mode = s.add_subparsers(dest="mode", required=True)
    e = mode.add_parser("exact", help="exact value of a knot expression")
    e.add_argument("expr")
    e.add_argument("--t", type=float, required=True)
    e.set_defaults(func=_cmd_l2)
    a = mode.add_parser("approx", help="numeric value from a presentation")
    a.add_argument("pres_file")
    a.add_argument("--t", type=float, required=True)
    a.add_argument("--method", choices=("series", "ball"), default="ball")
    a.add_argument("--order", type=int, default=64)
    a.add_argument("--radius", type=int, default=10)
    a.add_argument("--cutoff", type=float, default=fk.BALL_CUTOFF)
    a.add_argument(
        "--oracle", choices=("kb", "free", "abelian", "torus"), default="kb"
    )
    a.add_argument("--rank", type=int, default=1, help="free/abelian oracle rank")
    a.add_argument("--p", type=int, default=2, help="torus oracle p")
    a.add_argument("--q", type=int, default=3, help="torus oracle q")
    a.add_argument("--embed", help="generator images, e.g. 'a = Y x; b = X y y'")
    a.add_argument("--max-rules", type=int, default=200)
    a.add_argument("--max-len", type=int, default=20)
    a.set_defaults(func=_cmd_l2)

    s = sub.add_parser("detect-unknot", help="unknot detection on knot expressions")
    s.add_argument("expr")
    s.set_defaults(func=_cmd_detect_unknot)

    s = sub.add_parser("tietze", help="apply Tietze moves and check invariance")
    s.add_argument("pres_file")
    s.add_argument("--script", help="file of move lines")
    s.add_argument("--random", type=int, default=0, metavar="N")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="write the presentation to a file")
    s.set_defaults(func=_cmd_tietze)

    return parser


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        # argparse will not refill a trailing nargs="*" positional once
        # options intervene (the documented `construct cable --p 2 --q 3
        # C.pres` form); reclaim bare trailing arguments for it
        if extra:
            if getattr(args, "subcommand", None) == "construct" and all(
                not e.startswith("-") for e in extra
            ):
                args.inputs = list(args.inputs) + list(extra)
            else:
                print(f"error: unrecognized arguments: {' '.join(extra)}", file=sys.stderr)
                return 2
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    report = RunReport(argv)
    start = time.perf_counter()
    try:
        args.func(args, report)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, IndexError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ResourceError as e:
        print(f"error: {e}", file=sys.stderr)
        if args.json:
            report.warn(str(e))
            report.write_json(args.json)
        return 3
    elapsed = time.perf_counter() - start
    print(f"# wall-time {elapsed:.3f}s", file=sys.stderr)
    if args.json:
        report.write_json(args.json)
    return 0


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
