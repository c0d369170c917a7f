import argparse
import logging
import os
import sys

import yaml
from pydantic import BaseModel, ValidationError
from tqdm.contrib.logging import logging_redirect_tqdm

from .config import TubularConfig
from .equitable import EquitableSet, check_all, load_set
from .errors import CertificationError, InputError, MaterializationLimitError
from .fixtures import fixture_graph, fixture_set, fixture_walls, parse_gpq_name
from .gpq import (GpqSpec, classify, cq_quotient, finite_quotient_search, is_residually_finite, make_gpq,
                  non_hopf_witness, rf_obstruction_witness)
from .graph import TubularGraph, dumps, load_graph
from .treebuild import certify_virtually_special
from .walls import (WallGraph, build_walls, check_propdil, check_undilated, components, load_walls,
                    serialize_walls, validate_walls)
from .words import HnnPresentation, britton_reduce, format_word, parse_word, presentation_from_graph

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def _add_common(parser: argparse.ArgumentParser, default):
    parser.add_argument("--format", choices=["json", "text"], default=default,
                        help="Output format; text is YAML.")
    parser.add_argument("--expand-limit", type=int, default=default,
                        help="Maximum wall vertices plus wall edges to materialize.")
    parser.add_argument("--config", default=default, help="JSON config file.")
    parser.add_argument("--log-level", default=default, help="Logging level, e.g. INFO.")


def make_parser():
    parser = argparse.ArgumentParser(
        prog="tubular-tools",
        description="Verify and construct immersed walls for tubular groups, and analyze the G_{p,q} family.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    _add_common(parser, None)
    common = argparse.ArgumentParser(add_help=False)
    _add_common(common, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="Check an equitable set on a graph.")
    p.add_argument("--graph", required=True, help="Graph JSON path or fixture name.")
    p.add_argument("--set", required=True, dest="set_", help="Equitable set JSON path or fixture name.")

    p = sub.add_parser("walls-build", parents=[common], help="Build the wall graph of an equitable set.")
    p.add_argument("--graph", required=True, help="Graph JSON path or fixture name.")
    p.add_argument("--set", required=True, dest="set_", help="Equitable set JSON path or fixture name.")
    p.add_argument("--output", help="Write the wall graph here instead of standard output.")

    p = sub.add_parser("walls-check", parents=[common], help="Check a wall graph for dilation.")
    p.add_argument("--graph", required=True, help="Graph JSON path or fixture name.")
    p.add_argument("--walls", required=True, help="Wall graph JSON path or fixture name.")
    p.add_argument("--no-bijection", action="store_false", dest="require_bijection",
                   help="Do not require every intersection point to be paired.")

    p = sub.add_parser("tree-certify", parents=[common], help="Certify virtual specialness of a tree of tori.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="Graph JSON path.")
    src.add_argument("--fixture", help="Shipped graph fixture name.")

    for name, help_text in (("word-reduce", "Britton-reduce a word."), ("word-trivial", "Decide if a word is trivial.")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--group", required=True, help="gpq:P,Q, fixture:NAME or a single-vertex graph JSON path.")
        p.add_argument("--word", required=True, help='Word such as "[s^-1 a s, a b^-1]".')

    p = sub.add_parser("gpq-analyze", parents=[common], help="Classify G_{p,q}.")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)

    p = sub.add_parser("gpq-quotients", parents=[common], help="Search finite quotients of G_{p,q}.")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n-max", type=int, help="Largest symmetric group degree (config default 4).")
    p.add_argument("--workers", type=int, help="Worker processes (config default 1).")
    p.add_argument("--up-to-conjugacy", action="store_true", default=None,
                   help="One image of a per cycle type.")
    return parser


def _graph(ref: str) -> TubularGraph:
    return load_graph(ref) if os.path.isfile(ref) else fixture_graph(ref)


def _set(ref: str) -> EquitableSet:
    return load_set(ref) if os.path.isfile(ref) else fixture_set(ref)


def _walls(ref: str) -> WallGraph:
    return load_walls(ref) if os.path.isfile(ref) else fixture_walls(ref)


def _presentation(ref: str) -> HnnPresentation:
    if ref.startswith("gpq:"):
        return make_gpq(parse_gpq_name(ref))[1]
    if ref.startswith("fixture:"):
        return presentation_from_graph(fixture_graph(ref.removeprefix("fixture:")))
    return presentation_from_graph(load_graph(ref))


def _dump(obj):
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json", by_alias=True)
    if isinstance(obj, dict):
        return {k: _dump(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_dump(v) for v in obj]
    return obj


def emit(data: dict, fmt: str, out=None):
    out = out or sys.stdout
    data = _dump(data)
    if fmt == "text":
        out.write(yaml.safe_dump(data, sort_keys=True))
    else:
        out.write(dumps(data))


def cmd_verify(args, cfg: TubularConfig) -> tuple[dict, bool]:
    reports = check_all(_graph(args.graph), _set(args.set_))
    ok = all(r.ok for r in reports.values())
    return {"ok": ok, "checks": reports}, ok


def cmd_walls_build(args, cfg: TubularConfig) -> tuple[dict, bool]:
    g = _graph(args.graph)
    w = build_walls(g, _set(args.set_), limit=cfg.expand_limit)
    summary = {"wall_vertices": len(w.vertices), "wall_edges": len(w.edges), "components": len(components(w))}
    if args.output:
        with open(args.output, "w") as f:
            f.write(serialize_walls(w))
        return {**summary, "output": args.output}, True
    return {**summary, "walls": w}, True


def cmd_walls_check(args, cfg: TubularConfig) -> tuple[dict, bool]:
    g = _graph(args.graph)
    w = _walls(args.walls)
    valid = validate_walls(g, w, require_bijection=args.require_bijection)
    undilated = check_undilated(w)
    propdil = check_propdil(w)
    ok = valid.ok and undilated.ok and propdil
    return {
        "ok": ok,
        "valid": valid,
        "undilated": undilated.ok,
        "propdil": propdil,
        "components": len(components(w)),
        "witness": undilated.witness,
    }, ok


def cmd_tree_certify(args, cfg: TubularConfig) -> tuple[dict, bool]:
    g = load_graph(args.input) if args.input else fixture_graph(args.fixture)
    cert = certify_virtually_special(g, expand_limit=cfg.expand_limit)
    return cert.model_dump(mode="json"), cert.status == "certified"


def cmd_word(args, cfg: TubularConfig) -> tuple[dict, bool]:
    pres = _presentation(args.group)
    w = parse_word(args.word, pres)
    reduced = britton_reduce(w, pres)
    trivial = len(reduced) == 0
    data = {"word": format_word(w, pres), "reduced": format_word(reduced, pres), "trivial": trivial}
    if args.command == "word-trivial":
        data["verdict"] = "trivial" if trivial else "nontrivial"
        return data, trivial
    return data, True


def cmd_gpq_analyze(args, cfg: TubularConfig) -> tuple[dict, bool]:
    spec = GpqSpec.of(args.p, args.q)
    _, pres = make_gpq(spec)
    data: dict = {"classification": classify(spec)}
    if is_residually_finite(spec):
        data["witness"] = None
        data["cq_quotient"] = cq_quotient(spec)
    else:
        data["witness"] = format_word(rf_obstruction_witness(spec), pres)
    if spec.p == 1 and spec.q >= 3 and spec.q % 2 == 1:
        data["non_hopf"] = non_hopf_witness(spec)
    return data, True


def cmd_gpq_quotients(args, cfg: TubularConfig) -> tuple[dict, bool]:
    spec = GpqSpec.of(args.p, args.q)
    with logging_redirect_tqdm():
        reports = finite_quotient_search(
            spec,
            n_max=cfg.quotient_n_max,
            workers=cfg.workers,
            up_to_conjugacy=cfg.up_to_conjugacy,
            progress=sys.stderr.isatty(),
        )
    ok = all(r.witness_identity is not False for r in reports)
    _, pres = make_gpq(spec)
    witness = None if is_residually_finite(spec) else format_word(rf_obstruction_witness(spec), pres)
    return {"p": spec.p, "q": spec.q, "witness": witness, "count": len(reports), "quotients": reports}, ok


COMMANDS = {
    "verify": cmd_verify,
    "walls-build": cmd_walls_build,
    "walls-check": cmd_walls_check,
    "tree-certify": cmd_tree_certify,
    "word-reduce": cmd_word,
    "word-trivial": cmd_word,
    "gpq-analyze": cmd_gpq_analyze,
    "gpq-quotients": cmd_gpq_quotients,
}


def resolve_config(args) -> TubularConfig:
    cfg = TubularConfig.load(args.config)
    updates = {
        "expand_limit": args.expand_limit,
        "log_level": args.log_level,
        "quotient_n_max": getattr(args, "n_max", None),
        "workers": getattr(args, "workers", None),
        "up_to_conjugacy": getattr(args, "up_to_conjugacy", None),
    }
    return TubularConfig.model_validate({**cfg.model_dump(), **{k: v for k, v in updates.items() if v is not None}})


def main(argv=sys.argv[1:]) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    fmt = args.format or "json"
    try:
        cfg = resolve_config(args)
        logging.basicConfig(level=cfg.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
        data, ok = COMMANDS[args.command](args, cfg)
    except (InputError, ValidationError, MaterializationLimitError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as err:
        print(f"error: {err.strerror}: {err.filename}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except CertificationError as err:
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    emit(data, fmt)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
