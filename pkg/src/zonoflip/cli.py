"""Command-line front end.

Exit codes: 0 success, 1 negative finding, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .core import SpecError, ZonotopeSpec
from .space import (
    BudgetExceeded,
    SpecMismatch,
    census_csv,
    deficiency_certificate,
    enumerate_space,
    flip_distance,
    greedy_path,
    hamming_distance,
    search_deficient_pairs,
)
from .tiling import (
    Tiling,
    TilingError,
    dumps_placements,
    loads_placements,
    signs_from_placements,
    validate,
)

OK, NEGATIVE, INPUT_ERROR, BUDGET = 0, 1, 2, 3

log = logging.getLogger("zonoflip")


class InputError(Exception):
    pass


def _spec(text: str) -> ZonotopeSpec:
    return ZonotopeSpec.parse(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_tiling(path: str, index: int = 0) -> Tiling:
    """A tiling file, or line ``index`` of a space dump, or a placement list with a spec header."""
    text = _read(path)
    rows = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not rows:
        raise InputError(f"{path} is empty")
    if rows[0].startswith("zonotope:"):
        spec = ZonotopeSpec.parse(rows[0].split(":", 1)[1])
        signs = rows[1:]
        if not 0 <= index < len(signs):
            raise InputError(f"{path} has {len(signs)} tilings; index {index} out of range")
        return Tiling.from_sign_string(spec, signs[index])
    if rows[0].startswith("# zonotope:"):
        spec = ZonotopeSpec.parse(rows[0].split(":", 1)[1])
        return signs_from_placements(spec, loads_placements(text))
    raise InputError(f"{path}: expected a 'zonotope:' header")


# ---------------------------------------------------------------------------
# subcommands


def cmd_count(args) -> int:
    space = enumerate_space(_spec(args.spec), node_limit=args.node_limit)
    print(len(space))
    return OK


def cmd_enum(args) -> int:
    space = enumerate_space(_spec(args.spec), node_limit=args.node_limit)
    _write(args.output, space.dumps())
    return OK


def cmd_dist(args) -> int:
    a, b = _load_tiling(args.a, args.index_a), _load_tiling(args.b, args.index_b)
    if args.method == "greedy":
        path, reached = greedy_path(a, b)
        h = hamming_distance(a, b)
        flip = len(path) if reached else None
    else:
        rep = flip_distance(a, b, args.method, args.budget)
        h, flip, path = rep.hamming, rep.flip, rep.path
    if args.csv:
        print("hamming,flip,parity_ok,deficient")
        if flip is None:
            print(f"{h},,,")
        else:
            print(f"{h},{flip},{int((flip - h) % 2 == 0)},{int(flip > h)}")
        return OK
    print(f"hamming {h}")
    if flip is None:
        print("flip unknown (greedy reduction got stuck)")
        return NEGATIVE
    print(f"flip {flip}")
    print(f"parity {'ok' if (flip - h) % 2 == 0 else 'MISMATCH'}")
    print(f"deficient {'yes' if flip > h else 'no'}")
    if args.witness:
        from .core import triangle_table

        table = triangle_table(a.spec)
        for k in path:
            print(f"flip {table.triangle_ref(k)}")
    return OK


def cmd_certify(args) -> int:
    a, b = _load_tiling(args.a, args.index_a), _load_tiling(args.b, args.index_b)
    if a == b:
        print("no certificate: the tilings are equal")
        return NEGATIVE
    cert = deficiency_certificate(a, b)
    if cert is None:
        print("no certificate")
        return NEGATIVE
    print(f"certificate: tiling {cert.side} has no inverted inclusion-minimal triangle")
    print(f"hamming {cert.hamming}, so flip >= {cert.lower_bound}")
    print(cert.table())
    return OK


def cmd_search(args) -> int:
    spec = _spec(args.spec)
    entries = search_deficient_pairs(spec, mode=args.mode, samples=args.samples, seed=args.seed)
    files = None
    if args.dump_dir:
        out = Path(args.dump_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = []
        for k, e in enumerate(entries):
            fa, fb = out / f"pair{k}_a.tiling", out / f"pair{k}_b.tiling"
            fa.write_text(e.a.dumps())
            fb.write_text(e.b.dumps())
            files.append((str(fa), str(fb)))
    _write(args.output, census_csv(entries, files))
    log.info("%d deficient ordered pairs, %d isometry classes", len(entries), len({e.isometry_class for e in entries}))
    return OK


def _weights(text: str | None):
    from .proof_search import Weights

    if not text:
        return Weights()
    try:
        w = [float(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"--weights needs three numbers, got {text!r}") from None
    if len(w) != 3:
        raise InputError(f"--weights needs three numbers, got {text!r}")
    return Weights(*w)


def cmd_prove(args) -> int:
    from .proof_search import dumps_candidates, dumps_proof, search, validate_proof

    result = search(
        args.bundles,
        budget=args.budget,
        weights=_weights(args.weights),
        max_lines=args.max_lines,
        floor=not args.no_floor,
    )
    stats = result.stats()
    print(f"status {result.status}")
    for k, v in stats.items():
        print(f"{k} {v}")
    if args.candidates and result.candidates:
        _write(args.candidates, dumps_candidates(result))
    if result.status == "budget":
        return BUDGET
    if not result.proved:
        return NEGATIVE
    text = dumps_proof(result)
    _write(args.output, text)
    problems = validate_proof(text)
    print(f"validator {'ok' if not problems else 'FAILED'}")
    for p in problems[:20]:
        print(f"  {p}")
    return OK if not problems else NEGATIVE


def cmd_render(args) -> int:
    from .render import to_svg

    t = _load_tiling(args.file, args.index)
    _write(args.output, to_svg(t, unit=args.unit, pseudolines=not args.no_pseudolines))
    return OK


def cmd_validate(args) -> int:
    text = _read(args.file)
    from .proof_search import HEADER, validate_proof

    if text.startswith(HEADER):
        problems = validate_proof(text)
        for p in problems[:50]:
            print(p)
        print("valid proof" if not problems else f"invalid proof ({len(problems)} problems)")
        return OK if not problems else NEGATIVE
    rows = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not rows or not rows[0].startswith("zonotope:"):
        raise InputError(f"{args.file}: expected a 'zonotope:' header or a proof file")
    spec = ZonotopeSpec.parse(rows[0].split(":", 1)[1])
    bad = 0
    for k, row in enumerate(rows[1:]):
        try:
            ok = validate(Tiling.from_sign_string(spec, row))
        except TilingError:
            ok = False
        if not ok:
            bad += 1
            print(f"line {k + 2}: not a tiling")
    print("valid" if not bad else f"{bad} invalid")
    return OK if not bad else NEGATIVE


def cmd_convert(args) -> int:
    text = _read(args.file)
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.startswith("zonotope:"):
        t = Tiling.loads(text)
        _write(args.output, f"# zonotope: {t.spec}\n" + dumps_placements(t))
    elif first.startswith("# zonotope:") or args.spec:
        spec = _spec(args.spec) if args.spec else ZonotopeSpec.parse(first.split(":", 1)[1])
        _write(args.output, signs_from_placements(spec, loads_placements(text)).dumps())
    else:
        raise InputError(f"{args.file}: unknown format (give --spec for a bare placement list)")
    return OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="zonoflip", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"zonoflip {__version__}")
    p.add_argument("--seed", type=int, default=0, help="seed for every sampled mode (default 0)")
    p.add_argument("--threads", type=int, default=None, help="cap on worker threads")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def positive(text):
        v = int(text)
        if v <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v

    s = sub.add_parser("count", help="number of tilings")
    s.add_argument("spec")
    s.add_argument("--node-limit", type=positive, default=None)
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("enum", help="dump every tiling as a sign string")
    s.add_argument("spec")
    s.add_argument("-o", "--output")
    s.add_argument("--node-limit", type=positive, default=None)
    s.set_defaults(func=cmd_enum)

    for name, func, helptext in (
        ("dist", cmd_dist, "Hamming and flip distance of two tilings"),
        ("certify", cmd_certify, "deficiency certificate for two tilings"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("a")
        s.add_argument("b")
        s.add_argument("--index-a", type=int, default=0, help="line of a space dump")
        s.add_argument("--index-b", type=int, default=0)
        if name == "dist":
            s.add_argument("--method", choices=("astar", "bfs", "bidirectional", "greedy"), default="astar")
            s.add_argument("--budget", type=positive, default=10**7, help="node budget of the search")
            s.add_argument("--witness", action="store_true", help="print the flip sequence")
            s.add_argument("--csv", action="store_true")
        s.set_defaults(func=func)

    s = sub.add_parser("search", help="census of deficient pairs")
    s.add_argument("spec")
    s.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    s.add_argument("--samples", type=positive, default=1000)
    s.add_argument("-o", "--output")
    s.add_argument("--dump-dir", help="write each pair as two tiling files here")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("prove", help="AND/OR proof search")
    s.add_argument("--bundles", default="4", help="3, 4, 5, 5-size1 or 5-le2")
    s.add_argument("--budget", type=positive, default=10**5, help="node expansions")
    s.add_argument("--max-lines", type=positive, default=12)
    s.add_argument("--weights", help="w_blocked,w_freedom,w_depth (default 4,1,0.25)")
    s.add_argument("--no-floor", action="store_true", help="drop the minimal-root hypothesis")
    s.add_argument("-o", "--output", help="proof-subtree file")
    s.add_argument("--candidates", help="write FALSE OR-leaves here")
    s.set_defaults(func=cmd_prove)

    s = sub.add_parser("render", help="SVG of a tiling")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.add_argument("--index", type=int, default=0)
    s.add_argument("--unit", type=float, default=40.0)
    s.add_argument("--no-pseudolines", action="store_true")
    s.set_defaults(func=cmd_render)

    s = sub.add_parser("validate", help="check a tiling file, space dump or proof file")
    s.add_argument("file")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("convert", help="sign strings <-> tile placements")
    s.add_argument("file")
    s.add_argument("--spec", help="spec of a bare placement list")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_convert)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(message)s")
    if args.threads:
        import numba

        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    try:
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET
    except (InputError, SpecError, TilingError, SpecMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
