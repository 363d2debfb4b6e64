"""forge: batch front door.

    forge embed <discrete.json>      construct an embedding surrogate
    forge extract <polyhedral.json>  recover the embedded discrete loss
    forge link <polyhedral.json>     validate an epsilon ladder, emit a link
    forge calibrate <surrogate> <link> <discrete>   audit calibration
    forge plot <loss.json>           SVG diagrams
    forge zoo <name>                 write spec files for built-in losses

Exit codes: 0 pass, 1 input error, 2 certified violation.  All outputs are
deterministic given the flags (the seed is recorded in reports); re-runs are
byte-identical.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import zoo
from .discrete import check_non_redundant
from .embedding import (
    GridTooCoarseError,
    bayes_risk_gap,
    extract_embedded_loss,
    extraction_certificate,
)
from .embedding import conjugate_surrogate
from .geometry import Norm
from .link import build_link, calibration_scan, checked_subfamilies, max_valid_epsilon
from .polyhedral import enumerate_optimal_sets
from .rational import format_rational, parse_rational
from . import specio


def _parse_ladder(text):
    return [parse_rational(tok) for tok in text.split(",") if tok.strip()]


def _parse_box(text):
    parts = [parse_rational(tok) for tok in text.split(",")]
    if len(parts) != 2 or parts[0] >= parts[1]:
        raise ValueError("u-box must be 'lo,hi' with lo < hi")
    return (parts[0], parts[1])


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_embed(args) -> int:
    kind, loss, _ = specio.load_loss_file(args.spec)
    if kind != "discrete":
        raise ValueError("embed needs a discrete-loss spec")
    report = check_non_redundant(loss)
    if not report.ok:
        print("redundant loss; reports without uniqueness witness: %s"
              % ", ".join(report.failures), file=sys.stderr)
        return 1
    surrogate, emb = conjugate_surrogate(loss)
    gap = bayes_risk_gap(surrogate, loss, args.grid_m)
    out = _outdir(args)
    specio.save_json(out / "surrogate.json", specio.polyhedral_loss_to_obj(surrogate))
    specio.save_json(out / "embedding.json", {
        "kind": "embedding",
        "embedding": {r: [format_rational(v) for v in u] for r, u in emb.points},
    })
    specio.save_json(out / "embed-report.json", {
        "bayes_risk_gap": format_rational(gap),
        "grid_m": args.grid_m,
        "ok": gap == 0,
        "seed": args.seed,
    })
    if gap != 0:
        print("nonzero Bayes-risk gap %s" % format_rational(gap), file=sys.stderr)
        return 2
    print("embed: d=%d surrogate, gap 0 on grid m=%d" % (surrogate.d, args.grid_m))
    return 0


def cmd_extract(args) -> int:
    kind, surrogate, _ = specio.load_loss_file(args.spec)
    if kind != "polyhedral":
        raise ValueError("extract needs a polyhedral-loss spec")
    if args.no_doubling:
        loss, emb = extract_embedded_loss(surrogate, args.grid_m)
        stable = None
    else:
        loss, emb, stable = extraction_certificate(surrogate, args.grid_m)
        if not stable:
            print("grid-doubling certificate failed: tables differ between "
                  "m=%d and m=%d" % (args.grid_m, 2 * args.grid_m), file=sys.stderr)
            return 1
    out = _outdir(args)
    specio.save_json(out / "extracted.json", specio.discrete_loss_to_obj(loss, emb))
    specio.save_json(out / "extract-report.json", {
        "grid_m": args.grid_m,
        "doubling_stable": stable,
        "reports": list(loss.reports),
        "seed": args.seed,
    })
    print("extract: %d reports at grid m=%d" % (len(loss.reports), args.grid_m))
    return 0


def cmd_link(args) -> int:
    kind, surrogate, _ = specio.load_loss_file(args.spec)
    if kind != "polyhedral":
        raise ValueError("link needs a polyhedral-loss spec")
    norm = Norm.parse(args.norm)
    ladder = _parse_ladder(args.eps_ladder)
    _, emb = extract_embedded_loss(surrogate, args.grid_m)
    family = enumerate_optimal_sets(surrogate, args.grid_m)
    eps = max_valid_epsilon(family, emb, norm, ladder)
    out = _outdir(args)
    specio.save_json(out / "link.json",
                     specio.link_spec_to_obj(norm.value, eps, args.tie_break or (), args.grid_m))
    specio.save_json(out / "link-certificate.json", {
        "epsilon": format_rational(eps),
        "ladder": [format_rational(v) for v in ladder],
        "norm": norm.value,
        "family_size": len(family),
        "checked_subfamilies": [list(c) for c in checked_subfamilies(family)],
        "grid_m": args.grid_m,
        "seed": args.seed,
    })
    print("link: validated epsilon %s under %s" % (format_rational(eps), norm.value))
    return 0


def _load_link(obj, surrogate, grid_m):
    if obj.get("kind") != "link":
        raise ValueError("not a link spec")
    if obj.get("link_type") == "builtin":
        name = obj.get("name")
        if name == "abstain-linf":
            return zoo.abstain_link_linf(int(obj["n"]))
        if name == "abstain-l1":
            return zoo.abstain_link_l1(int(obj["n"]))
        if name == "sgn":
            return zoo.sign_link(int(obj.get("zero_sign", 1)))
        if name == "top-k":
            return zoo.top_k_link(int(obj["k"]))
        raise ValueError("unknown builtin link %r" % name)
    norm = Norm.parse(obj["norm"])
    eps = parse_rational(obj["epsilon"])
    m = int(obj.get("grid_m", grid_m))
    _, emb = extract_embedded_loss(surrogate, m)
    family = enumerate_optimal_sets(surrogate, m)
    return build_link(family, emb, norm, eps, tie_break=tuple(obj.get("tie_break", ())))


def cmd_calibrate(args) -> int:
    kind, surrogate, _ = specio.load_loss_file(args.surrogate)
    if kind != "polyhedral":
        raise ValueError("calibrate needs a polyhedral surrogate")
    kind, loss, _ = specio.load_loss_file(args.discrete)
    if kind != "discrete":
        raise ValueError("calibrate needs a discrete target loss")
    link = _load_link(specio.load_json(args.link), surrogate, args.grid_m)
    audit = calibration_scan(surrogate, link, loss, args.grid_m,
                             u_box=_parse_box(args.u_box), u_res=parse_rational(args.u_res))
    out = _outdir(args)
    specio.write_audit_csv(out / "audit.csv", audit)
    specio.save_json(out / "verdict.json", {
        "violations": len(audit.violations),
        "min_gap": None if audit.min_gap is None else format_rational(audit.min_gap),
        "grid_m": args.grid_m,
        "u_box": args.u_box,
        "u_res": args.u_res,
        "seed": args.seed,
    })
    if audit.violations:
        first = audit.violations[0]
        print("calibration violation at p=%s, u=%s"
              % (specio.vector_str(first.p), specio.vector_str(first.witness)), file=sys.stderr)
        return 2
    print("calibrate: no violation; min gap %s"
          % (None if audit.min_gap is None else format_rational(audit.min_gap)))
    return 0


def cmd_plot(args) -> int:
    from . import plotting

    kind, loss, emb = specio.load_loss_file(args.spec)
    out = _outdir(args)
    if kind == "discrete":
        if loss.space.n != 3:
            raise ValueError("simplex plots need n = 3")
        path = out / (Path(args.spec).stem + "-cells.svg")
        plotting.simplex_cells_svg(loss, path)
    else:
        if loss.d != 2:
            raise ValueError("envelope plots need d = 2")
        if not args.link:
            raise ValueError("envelope plots need --link")
        link = _load_link(specio.load_json(args.link), loss, args.grid_m)
        _, emb = extract_embedded_loss(loss, args.grid_m)
        path = out / (Path(args.spec).stem + "-envelope.svg")
        plotting.link_envelope_svg(link, emb, path,
                                  box=_parse_box(args.u_box), res=parse_rational(args.u_res))
    print("plot: wrote %s" % path)
    return 0


def cmd_zoo(args) -> int:
    out = _outdir(args)
    name = args.name
    wrote = []

    def w(fname, obj):
        specio.save_json(out / fname, obj)
        wrote.append(fname)

    if name == "zero-one":
        w("zero-one.json", specio.discrete_loss_to_obj(zoo.zero_one(args.n)))
    elif name == "hinge":
        w("hinge.json", specio.polyhedral_loss_to_obj(zoo.hinge()))
    elif name == "abstain":
        w("abstain.json", specio.discrete_loss_to_obj(zoo.abstain_loss(args.n, parse_rational(args.alpha))))
    elif name == "abstain-surrogate":
        w("abstain-surrogate.json", specio.polyhedral_loss_to_obj(zoo.abstain_surrogate(args.n)))
        w("abstain-link-linf.json", specio.builtin_link_to_obj("abstain-linf", n=args.n))
        w("abstain-link-l1.json", specio.builtin_link_to_obj("abstain-l1", n=args.n))
    elif name == "lovasz-hinge":
        if not args.set_function:
            raise ValueError("lovasz-hinge needs --set-function FILE")
        f = specio.set_function_from_obj(specio.load_json(args.set_function))
        w("lovasz-hinge.json", specio.polyhedral_loss_to_obj(zoo.lovasz_hinge(f)))
        w("set-loss.json", specio.discrete_loss_to_obj(zoo.set_loss(f)))
        w("restricted-loss.json", specio.discrete_loss_to_obj(zoo.restricted_lovasz_loss(f)))
        w("sgn-link.json", specio.builtin_link_to_obj("sgn", zero_sign=1))
    elif name == "top-k":
        w("top-k-loss.json", specio.discrete_loss_to_obj(zoo.top_k_loss(args.n, args.k)))
        w("top-k-surrogate.json", specio.polyhedral_loss_to_obj(zoo.top_k_surrogate(args.n, args.k)))
        w("top-k-link.json", specio.builtin_link_to_obj("top-k", k=args.k))
    elif name == "embedded-top2":
        w("embedded-top2.json", specio.discrete_loss_to_obj(zoo.embedded_top2_loss()))
    else:
        raise ValueError("unknown zoo entry %r (have: %s)" % (name, ", ".join(zoo.REGISTRY)))
    print("zoo: wrote %s" % ", ".join(wrote))
    return 0


def _add_common(sub, grid_m=8):
    sub.add_argument("--grid-m", type=int, default=grid_m, dest="grid_m")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", default="out")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="forge", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sp = ap.add_subparsers(dest="command", required=True)

    s = sp.add_parser("embed", help="construct an embedding surrogate")
    s.add_argument("spec")
    _add_common(s, grid_m=12)
    s.set_defaults(fn=cmd_embed)

    s = sp.add_parser("extract", help="recover the embedded discrete loss")
    s.add_argument("spec")
    s.add_argument("--no-doubling", action="store_true")
    _add_common(s)
    s.set_defaults(fn=cmd_extract)

    s = sp.add_parser("link", help="validate epsilon and emit a link spec")
    s.add_argument("spec")
    s.add_argument("--norm", default="linf", choices=["l1", "linf"])
    s.add_argument("--eps-ladder", default="1,1/2,1/4,1/8,1/16,1/32,1/64", dest="eps_ladder")
    s.add_argument("--tie-break", nargs="*", dest="tie_break")
    _add_common(s)
    s.set_defaults(fn=cmd_link)

    s = sp.add_parser("calibrate", help="audit calibration of (surrogate, link, loss)")
    s.add_argument("surrogate")
    s.add_argument("link")
    s.add_argument("discrete")
    s.add_argument("--u-box", default="-2,2", dest="u_box")
    s.add_argument("--u-res", default="1/4", dest="u_res")
    _add_common(s)
    s.set_defaults(fn=cmd_calibrate)

    s = sp.add_parser("plot", help="SVG diagrams")
    s.add_argument("spec")
    s.add_argument("--link")
    s.add_argument("--u-box", default="-2,2", dest="u_box")
    s.add_argument("--u-res", default="1/16", dest="u_res")
    _add_common(s)
    s.set_defaults(fn=cmd_plot)

    s = sp.add_parser("zoo", help="write spec files for built-in losses")
    s.add_argument("name")
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--alpha", default="1/2")
    s.add_argument("--set-function", dest="set_function")
    _add_common(s)
    s.set_defaults(fn=cmd_zoo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError, GridTooCoarseError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
