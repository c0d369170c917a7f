import argparse
import sys

from tqdm import tqdm

from tubular_tools.gpq import (GpqSpec, cq_quotient, finite_quotient_search, is_residually_finite, make_gpq,
                               rf_obstruction_witness)
from tubular_tools.words import format_word


def make_parser():
    parser = argparse.ArgumentParser(
        description="Residual finiteness of G_{p,q} over a parameter grid, with witnesses and finite quotient checks.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--max", type=int, default=6, help="Grid is 1..max for both p and q.")
    parser.add_argument("--n-max", type=int, default=3, help="Symmetric group degree for the quotient check.")
    parser.add_argument("--up-to-conjugacy", action="store_true")
    return parser


def main(argv=sys.argv[1:]):
    args = make_parser().parse_args(argv)
    rows = []
    bad = 0
    pairs = [(p, q) for p in range(1, args.max + 1) for q in range(1, args.max + 1)]
    for p, q in tqdm(pairs, desc="Grid"):
        spec = GpqSpec(p=p, q=q)
        _, pres = make_gpq(spec)
        if is_residually_finite(spec):
            ok = cq_quotient(spec).ok
            rows.append(f"G_{{{p},{q}}}: rf, C_{q} kernel inclusions primitive: {ok}")
        else:
            reports = finite_quotient_search(spec, args.n_max, up_to_conjugacy=args.up_to_conjugacy)
            ok = all(r.witness_identity for r in reports)
            witness = format_word(rf_obstruction_witness(spec), pres)
            rows.append(f"G_{{{p},{q}}}: not rf, witness {witness} dies in all {len(reports)} quotients: {ok}")
        bad += not ok
    print("\n".join(rows))
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
