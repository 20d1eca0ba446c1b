#!/usr/bin/env python3
"""Classify every catalog net and print/save the full regularity evidence.

For each requested net this runs the whole verdict stack on the reference
compacts — seminorm exponents, the G-infinity and rate-class tests, the
sublinear scan, log-convexity margins and the growth-characterisation cross
check — and prints one block per net.  With --out, the same material is
written as one JSON document per net (stable key order, so diffs are clean).

Typical use:

    python scripts/run_catalog_report.py                 # whole catalog
    python scripts/run_catalog_report.py --net osc --net multiscale(4)
    python scripts/run_catalog_report.py --kmax 4 --count 14 --out reports/
"""

import argparse
import math
import os
import sys

from colombeau.catalog import CATALOG, REFERENCE_COMPACTS, catalog_net, parse_catalog_spec
from colombeau.regularity import build_report
from colombeau.runner import write_json
from colombeau.scale import EpsGrid


def _f(x, width=7):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "-".rjust(width)
    if x == math.inf:
        return "inf".rjust(width)
    if x == -math.inf:
        return "-inf".rjust(width)
    return f"{x:{width}.3f}"


def _print_block(name: str, rep) -> None:
    bar = "=" * max(8, 64 - len(name))
    print(f"== {name} {bar}")
    print(f"   net: {rep.net.get('expression', rep.net.get('terms'))}")
    print(f"   ln P_k on {rep.K[0]} (k = 0..{rep.k_max}):")
    print("     " + " ".join(_f(v) for v in rep.ln_p))
    g = rep.ginfty
    print(
        f"   ginfty:    {g.verdict:22s} bound={g.bound_verdict} "
        f"decreasing={g.decreasing_verdict} agree={g.agree}"
    )
    for v in rep.gla:
        extra = ""
        if v.verdict == "yes-evidence":
            extra = f"  witness a'={_f(v.a_prime).strip()} b={_f(v.b).strip()}"
        label = f"G^(L,{v.a:g}):"
        print(f"   {label:11s}{v.verdict:22s} s_hat={_f(v.s_hat).strip()}{extra}")
    slopes = ", ".join(_f(r.s_full).strip() for r in rep.sublinear.per_compact)
    print(f"   sublinear: {rep.sublinear.verdict:22s} tail slopes per K: {slopes}")
    margins = [e.margin for e in rep.landau.entries if e.verdict == "satisfied"]
    worst = min(margins) if margins else math.nan
    verdicts = ",".join(e.verdict for e in rep.landau.entries)
    print(f"   landau:    all_ok={rep.landau.all_ok} worst margin={_f(worst).strip()} [{verdicts}]")
    gc = " ".join(f"base={g.base:g}:{'agree' if g.agree else 'DISAGREE'}" for g in rep.growth_char)
    print(f"   growth:    {gc}")
    print()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument(
        "--net",
        action="append",
        metavar="SPEC",
        help="catalog spec like 'osc' or 'multiscale(4)'; repeatable (default: all)",
    )
    ap.add_argument("--kmax", type=int, default=6, help="largest derivative order (default 6)")
    ap.add_argument("--count", type=int, default=20, help="eps-grid depth (default 20)")
    ap.add_argument("--tol", type=float, default=0.1, help="ln-domain verdict tolerance")
    ap.add_argument("--out", metavar="DIR", help="also write one JSON report per net here")
    args = ap.parse_args(argv)

    specs = args.net if args.net else list(CATALOG)
    grid = EpsGrid(0.5, 0.5, args.count)
    if args.out:
        os.makedirs(args.out, exist_ok=True)

    for spec in specs:
        try:
            name, parameter = parse_catalog_spec(spec)
            net = catalog_net(name, parameter)
            rep = build_report(net, REFERENCE_COMPACTS, grid, k_max=args.kmax, tol=args.tol)
        except Exception as exc:  # noqa: BLE001 - report and keep going
            print(f"error: {spec}: {exc}", file=sys.stderr)
            return 1
        _print_block(spec, rep)
        if args.out:
            path = os.path.join(args.out, f"report-{name}{parameter or ''}.json")
            write_json(path, rep.to_json_dict())
            print(f"   wrote {path}\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
