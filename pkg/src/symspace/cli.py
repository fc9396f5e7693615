"""Command-line interface.  JSON goes to stdout, logs to stderr.

Exit codes: 0 ok, 2 input error, 3 precision exhausted, 4 search exhausted,
5 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
from fractions import Fraction

from . import acceptance
from . import galois as gl
from . import lattice as la
from . import matrix as mx
from . import orthsym
from . import tree
from .padic import PrecisionError, PrimeConfig, SquareClass
from .qforms import DiagonalForm, invariants, j_representatives

log = logging.getLogger("symspace")

EXIT_OK, EXIT_INPUT, EXIT_PRECISION, EXIT_SEARCH, EXIT_SELFTEST = 0, 2, 3, 4, 5

EXTENSIONS = {
    "unramified": SquareClass.Xi,
    "ramified-pi": SquareClass.Pi,
    "ramified-xipi": SquareClass.XiPi,
}


class InputError(ValueError):
    pass


# -- matrix literals ----------------------------------------------------------------

_ROOT = re.compile(r"\*?(?:√δ|sqrt\(delta\))$")
_RAT = r"\d+(?:/\d+)?"
_HEAD = re.compile(rf"(?:([+-]?{_RAT})(?=[+-]))?([+-]?)({_RAT})?")


def _rational(s: str) -> Fraction:
    if not re.fullmatch(rf"[+-]?{_RAT}", s):
        raise InputError(f"not an exact rational: {s!r}")
    try:
        return Fraction(s)
    except ZeroDivisionError:
        raise InputError(f"zero denominator: {s!r}") from None


def parse_entry(text: str) -> tuple[Fraction, Fraction]:
    """``"a/b"``, ``"a+b√δ"``, ``"√δ"`` or ``"-3/2√δ"`` as a pair ``(a, b)``."""
    s = str(text).replace(" ", "")
    root = _ROOT.search(s)
    if root is None:
        return _rational(s), Fraction(0)
    m = _HEAD.fullmatch(s[: root.start()])
    if m is None:
        raise InputError(f"cannot parse matrix entry {text!r}")
    a = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    b = Fraction(m.group(3)) if m.group(3) else Fraction(1)
    return a, -b if m.group(2) == "-" else b


def parse_matrix(text: str) -> list[list[tuple[Fraction, Fraction]]]:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"matrix literal is not JSON: {e}") from None
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise InputError("matrix literal must be a JSON array of rows")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError("matrix must be square")
    return [[parse_entry(x if isinstance(x, str) else str(x)) for x in r] for r in rows]


def _exact_det(rows) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def rational_matrix(entries, cfg: PrimeConfig):
    if any(b != 0 for row in entries for _, b in row):
        raise InputError("orthogonal factorization needs rational entries")
    rows = [[a for a, _ in row] for row in entries]
    if _exact_det(rows) == 0:
        raise InputError("matrix is not invertible")
    return mx.from_entries(rows, cfg)


def extension_matrix(entries, ext: gl.QuadExt):
    if len(entries) != 2:
        raise InputError("factor-galois handles 2x2 matrices only")
    d = ext.delta_int

    def mul(u, v):
        return u[0] * v[0] + d * u[1] * v[1], u[0] * v[1] + u[1] * v[0]

    (a, b), (c, e) = entries
    ae, bc = mul(a, e), mul(b, c)
    if ae == bc:
        raise InputError("matrix is not invertible")
    return mx.from_entries([[ext(x) for x in row] for row in entries], ext)


# -- output ---------------------------------------------------------------------


def fmt(x) -> str:
    """Balanced rational lift, ``a`` or ``a+b√δ``; parseable as input."""
    if isinstance(x, gl.ExtElement):
        a, b = x.lift(balanced=True)
        if b == 0:
            return str(a)
        root = "√δ" if abs(b) == 1 else f"{abs(b)}√δ"
        if a == 0:
            return root if b > 0 else "-" + root
        return f"{a}{'+' if b > 0 else '-'}{root}"
    return str(x.lift(balanced=True))


def fmt_matrix(m) -> dict:
    absprec = mx.min_absprec(m)
    return {
        "entries": [[fmt(x) for x in row] for row in m],
        "padic": mx.to_strings(m),
        "absprec": None if absprec == float("inf") else int(absprec),
    }


def emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


# -- commands -------------------------------------------------------------------


def cmd_factor_orth(args) -> int:
    cfg = PrimeConfig(args.p, args.precision)
    g = rational_matrix(parse_matrix(args.g), cfg)
    log.info("factoring %dx%d matrix at p=%d", g.shape[0], g.shape[0], cfg.p)
    fac = orthsym.cartan_factor(g)
    checks = orthsym.verify(fac, g)
    if not all(checks.values()):
        bad = [k for k, v in checks.items() if not v]
        raise PrecisionError(f"verification stage failed: {', '.join(bad)}")
    emit({
        "p": cfg.p,
        "precision": cfg.precision,
        "h": fmt_matrix(fac.h),
        "y": fmt_matrix(fac.y),
        "s": fmt_matrix(fac.s),
        "kappa": fmt_matrix(fac.kappa),
        "class": orthsym.class_labels(fac.cls),
        "class_source": "Jordan-normalized orthogonal basis of the columns of g",
        "valuations": list(fac.valuation_vector()),
        "checks": checks,
        "verified": True,
    })
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = PrimeConfig(args.p, args.precision)
    if args.list_J:
        if args.n is None or args.n < 1:
            raise InputError("--list-J needs --n >= 1")
        reps = j_representatives(args.n, cfg)
        emit({
            "p": cfg.p,
            "n": args.n,
            "xi": cfg.xi,
            "classes": [orthsym.class_labels(c) for c in reps],
            "count": len(reps),
        })
        return EXIT_OK
    if args.g is None:
        raise InputError("classify needs --g or --list-J")
    g = rational_matrix(parse_matrix(args.g), cfg)
    cls = orthsym.classify(g)
    _, D = la.diagonalize(g.T.dot(g))
    inv = invariants(DiagonalForm.of(cfg, [D[i, i] for i in range(D.shape[0])]))
    if inv != invariants(DiagonalForm.from_classes(cfg, cls)):
        raise PrecisionError("classification disagrees with the invariants of t(g) g")
    emit({
        "p": cfg.p,
        "class": orthsym.class_labels(cls),
        "gram_discriminant": inv.disc.label(),
        "gram_hasse": inv.hasse,
        "rank": inv.rank,
    })
    return EXIT_OK


def cmd_factor_galois(args) -> int:
    if args.extension is None or args.extension == "none":
        raise InputError("factor-galois needs --extension")
    if args.radius < 1:
        raise InputError("radius must be at least 1")
    ext = gl.QuadExt(PrimeConfig(args.p, args.precision), EXTENSIONS[args.extension])
    g = extension_matrix(parse_matrix(args.g), ext)
    fac = gl.factor_n2(g, radius=args.radius)
    checks = gl.verify_factorization(fac, g)
    if not all(checks.values()):
        bad = [k for k, v in checks.items() if not v]
        raise PrecisionError(f"verification stage failed: {', '.join(bad)}")
    emit({
        "p": ext.p,
        "extension": args.extension,
        "delta": str(ext.delta_int),
        "h": fmt_matrix(fac.h),
        "i": fac.i,
        "u": fmt_matrix(fac.u),
        "z": fmt_matrix(fac.z),
        "kappa": fmt_matrix(fac.kappa),
        "apartment": fac.apartment.to_dict() if fac.apartment is not None else None,
        "radius": args.radius,
        "checks": checks,
        "verified": True,
    })
    return EXIT_OK


def _tree_field(args):
    base = PrimeConfig(args.p, args.precision)
    if args.extension in (None, "none"):
        return base
    return gl.QuadExt(base, EXTENSIONS[args.extension])


def cmd_tree(args) -> int:
    F = _tree_field(args)
    if args.radius < 1:
        raise InputError("radius must be at least 1")
    if args.what in ("census", "counterexample") and not getattr(F, "ramified", False):
        raise InputError(f"{args.what} needs a ramified --extension")
    if args.what == "census":
        rep = tree.fixed_point_census(args.radius, F)
        emit({"summary": rep.summary(), "records": [r.to_dict() for r in rep.records]})
        return EXIT_OK
    if args.what == "counterexample":
        if args.radius < 2:
            raise InputError("counterexample needs radius >= 2")
        emit(tree.counterexample_check(args.radius, F).to_dict())
        return EXIT_OK
    which = tree.TRANSPOSE if isinstance(F, PrimeConfig) else tree.GALOIS
    rows = []
    for v, d in tree.ball(tree.base_vertex(F), args.radius):
        A = tree.find_sigma_stable_apartment(v, which, args.depth)
        found = A is not None and tree.is_sigma_stable(A, which) and A.contains(v)
        row = {"vertex": v.to_dict(), "distance": d, "result": "found" if found else "not found"}
        if found:
            row["apartment"] = A.to_dict()
            row["anti_invariant_rank"] = tree.anti_invariant_rank(A, which)
        rows.append(row)
    emit({
        "field": F.label() if hasattr(F, "label") else f"Q_{F.p}",
        "involution": which,
        "radius": args.radius,
        "search_depth": args.depth,
        "all_found": all(r["result"] == "found" for r in rows),
        "vertices": rows,
    })
    missed = sum(r["result"] != "found" for r in rows)
    if missed:
        log.error("search exhausted at depth %d for %d vertices", args.depth, missed)
        return EXIT_SEARCH
    return EXIT_OK


def cmd_selftest(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise InputError("trials must be at least 1")
    results = acceptance.run_all(args.seed, args.trials, log=log.info)
    emit({
        "seed": args.seed,
        "trials": args.trials,
        "criteria": [r.to_dict() for r in results],
        "all_passed": all(r.passed for r in results),
    })
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST


# -- argument parsing ---------------------------------------------------------


def _default_seed() -> int:
    env = os.environ.get("SYMSPACE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InputError(f"SYMSPACE_SEED must be an integer, got {env!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=3, help="odd prime (default 3)")
    common.add_argument("--precision", type=int, default=40, help="p-adic digits, at least 4")
    common.add_argument("--seed", type=int, default=None, help="random seed (default $SYMSPACE_SEED or 0)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    ap = argparse.ArgumentParser(prog="symspace", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("factor-orth", parents=[common], help="g = h y s kappa over Q_p")
    p.add_argument("--g", required=True, help='JSON matrix, e.g. "[[\\"1\\",\\"2\\"],[\\"2\\",\\"-1\\"]]"')
    p.set_defaults(func=cmd_factor_orth)

    p = sub.add_parser("classify", parents=[common], help="double coset class of g")
    p.add_argument("--g")
    p.add_argument("--list-J", dest="list_J", action="store_true", help="list realizable classes")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("factor-galois", parents=[common], help="g = h u_i z kappa over a quadratic extension")
    p.add_argument("--g", required=True)
    p.add_argument("--extension", choices=sorted(EXTENSIONS), required=True)
    p.add_argument("--radius", type=int, default=4, help="apartment search depth")
    p.set_defaults(func=cmd_factor_galois)

    p = sub.add_parser("tree", parents=[common], help="tree experiments")
    p.add_argument("what", choices=("census", "raince", "counterexample"))
    p.add_argument("--extension", choices=["none", *sorted(EXTENSIONS)], default="none")
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--depth", type=int, default=3, help="apartment search depth for the stable-apartment sweep (raince)")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    p.add_argument("--trials", type=int, default=None, help="cap random trials (smoke mode)")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        PrimeConfig(args.p, args.precision)  # rejects even p and precision < 4
        if args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except (InputError, ValueError) as e:
        log.error("input: %s", e)
        return EXIT_INPUT
    except PrecisionError as e:
        log.error("precision exhausted: %s", e)
        return EXIT_PRECISION
    except tree.SearchExhausted as e:
        log.error("search exhausted at radius %s: %s", e.radius, e)
        return EXIT_SEARCH
    except ArithmeticError as e:
        log.error("precision exhausted: %s", e)
        return EXIT_PRECISION


if __name__ == "__main__":
    sys.exit(main())
