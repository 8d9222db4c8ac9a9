"""``praag`` command-line entry point.

Exit codes: 0 success, 1 validation failure (JSON witness on stderr), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from pathlib import Path

from . import dehn_lab
from .complex_core import flag_complex, load_graph
from .fans import (DESCENDING, ASCENDING, FanError, build_fan, closed_form_f, rim_sequence)
from .homology import homology
from .log_engine import (LogError, asc_desc_are_trees, classify_curvature, emit_group_presentation,
                         load_log, preset, preset_poly, search_exp_log, vertex_link)
from .praag import (MarkingError, assemble_perturbed_link, emit_praag_presentation, load_marking,
                    perturbed_morse_links)
from .words import Word


class ValidationFailure(Exception):
    def __init__(self, witness: dict):
        super().__init__(witness.get("invariant", "validation failure"))
        self.witness = witness


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


_POWER = re.compile(r"^(.+)\^(-?\d+)$")


def parse_word(text: str) -> Word:
    """Space-separated letters; ``g^k`` expands to ``|k|`` copies of ``g`` or ``g^-1``."""
    letters = []
    for tok in text.replace(",", " ").split():
        m = _POWER.match(tok)
        if m:
            k = int(m.group(2))
            letters += [(m.group(1), 1 if k > 0 else -1)] * abs(k)
        else:
            letters.append((tok, 1))
    return Word(letters)


def _load_log_arg(args):
    if args.preset:
        return preset(args.preset)
    return load_log(args.file)


# --- subcommands ------------------------------------------------------------

def cmd_log_check(args, out) -> int:
    p = _load_log_arg(args)
    link = vertex_link(p)
    asc, desc = asc_desc_are_trees(link)
    girth = link.girth()
    report = {"girth": None if girth == float("inf") else int(girth),
              "verdict": classify_curvature(link), "asc_tree": asc, "desc_tree": desc}
    out.write(_dump(report) + "\n")
    if report["verdict"] == "fail":
        raise ValidationFailure({"invariant": "link girth >= 4", "girth": report["girth"]})
    return 0


def cmd_log_search(args, out) -> int:
    cand = search_exp_log(args.vertices, min_girth=args.min_girth)
    if cand is None:
        raise ValidationFailure({"invariant": "exp LOG exists", "vertices": args.vertices,
                                 "min_girth": args.min_girth})
    out.write(_dump({"log": cand.presentation.to_dict(), "src": cand.src, "dst": cand.dst}) + "\n")
    return 0


def cmd_fan(args, out) -> int:
    p = preset(args.preset)
    fan = build_fan(p, parse_word(args.u), parse_word(args.v), args.direction)
    if args.emit == "rim":
        out.write(str(fan.vrim) + "\n")
    elif args.emit == "erim":
        out.write(str(fan.erim) + "\n")
    else:
        out.write(_dump(fan.stats()) + "\n")
    return 0


def cmd_rims(args, out) -> int:
    if not args.preset.startswith("poly:"):
        raise argparse.ArgumentTypeError("rims needs a poly:<d> preset")
    d = int(args.preset.split(":", 1)[1])
    p = preset_poly(d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "n", "f_constructed", "f_closed_form", "match"])
    bad = []
    for i in range(d + 1):
        for j in range(i + 1, d + 1):
            built = rim_sequence(p, f"a{i}", f"a{j}", args.max_n)
            for n in range(args.max_n + 1):
                cf = closed_form_f(i, j, n)
                ok = built[n] == cf
                if not ok:
                    bad.append({"i": i, "j": j, "n": n, "constructed": built[n], "closed_form": cf})
                w.writerow([i, j, n, built[n], cf, "true" if ok else "false"])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        out.write(buf.getvalue())
    if bad:
        raise ValidationFailure({"invariant": "constructed rim equals closed form", "first": bad[0]})
    return 0


def _marking(args):
    g = load_graph(args.graph)
    return g, load_marking(g, args.marking)


def cmd_build(args, out) -> int:
    _, m = _marking(args)
    if args.report == "link":
        out.write(_dump(assemble_perturbed_link(m).report()) + "\n")
    elif args.report == "morse":
        ml = perturbed_morse_links(m)
        prof = ml.profiles()
        out.write(_dump({
            "desc": {"f_vector": ml.descending.f_vector(), **prof["desc"].to_dict(),
                     "matches_explicit": ml.descending == ml.explicit_descending},
            "asc": {"f_vector": ml.ascending.f_vector(), **prof["asc"].to_dict(),
                    "matches_explicit": ml.ascending == ml.explicit_ascending},
            "collapses_verified": ml.certificates_verified(),
        }) + "\n")
    else:
        out.write(emit_praag_presentation(m))
    return 0


def cmd_homology(args, out) -> int:
    g, m = _marking(args)
    if args.which == "flag":
        k = flag_complex(g)
    else:
        ml = perturbed_morse_links(m)
        k = ml.descending if args.which == "desc" else ml.ascending
    prof = homology(k, args.max_dim)
    out.write(_dump({"which": args.which, "f_vector": k.f_vector(), **prof.to_dict()}) + "\n")
    return 0


def cmd_present(args, out) -> int:
    if args.preset or args.file:
        out.write(emit_group_presentation(_load_log_arg(args)))
    elif args.graph and args.marking:
        _, m = _marking(args)
        out.write(emit_praag_presentation(m))
    else:
        raise argparse.ArgumentTypeError("present needs --preset, --file, or --graph with --marking")
    return 0


def cmd_dehn(args, out) -> int:
    d = None if args.diagram == "T" else dehn_lab.parse_d(args.d)
    stats = dehn_lab.family_sequence(args.diagram, d, args.max_n)
    fit = dehn_lab.fit_growth(stats, args.fit) if args.fit else None
    text = dehn_lab.to_csv(stats)
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    if args.svg:
        Path(args.svg).write_text(dehn_lab.to_svg(stats, fit))
    if fit is not None:
        out.write(_dump(fit.to_dict()) + "\n")
    if args.diagram == "R":
        cert = dehn_lab.separation_certificate(args.max_n - args.max_n % 2)
        if not cert.ok:
            raise ValidationFailure({"invariant": "separation tags distinct", "pairs": cert.pairs,
                                     "tags": cert.tags})
    return 0


# --- parser -------------------------------------------------------------------

def _preset_or_file(sp, required: bool = True) -> None:
    g = sp.add_mutually_exclusive_group(required=required)
    g.add_argument("--preset", help="poly:<d> or exp")
    g.add_argument("--file", help="LOG JSON file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="praag")
    sub = ap.add_subparsers(dest="command", required=True)

    log = sub.add_parser("log").add_subparsers(dest="log_command", required=True)
    chk = log.add_parser("check")
    _preset_or_file(chk)
    chk.set_defaults(func=cmd_log_check)
    srch = log.add_parser("search-exp")
    srch.add_argument("--vertices", type=int, required=True)
    srch.add_argument("--min-girth", type=int, default=5)
    srch.set_defaults(func=cmd_log_search)

    fan = sub.add_parser("fan")
    fan.add_argument("--preset", required=True)
    fan.add_argument("--u", required=True)
    fan.add_argument("--v", required=True)
    fan.add_argument("--direction", choices=(DESCENDING, ASCENDING), default=DESCENDING)
    fan.add_argument("--emit", choices=("rim", "erim", "stats"), default="stats")
    fan.set_defaults(func=cmd_fan)

    rims = sub.add_parser("rims")
    rims.add_argument("--preset", required=True)
    rims.add_argument("--max-n", type=int, required=True)
    rims.add_argument("--out")
    rims.set_defaults(func=cmd_rims)

    for name, func in (("build", cmd_build), ("homology", cmd_homology)):
        sp = sub.add_parser(name)
        sp.add_argument("--graph", required=True)
        sp.add_argument("--marking", required=True)
        if name == "build":
            sp.add_argument("--report", choices=("link", "morse", "presentation"), default="link")
        else:
            sp.add_argument("--which", choices=("desc", "asc", "flag"), default="desc")
            sp.add_argument("--max-dim", type=int, default=None)
        sp.set_defaults(func=func)

    pres = sub.add_parser("present")
    _preset_or_file(pres, required=False)
    pres.add_argument("--graph")
    pres.add_argument("--marking")
    pres.set_defaults(func=cmd_present)

    dehn = sub.add_parser("dehn")
    dehn.add_argument("--d", default="2", help="integer > 1 or inf")
    dehn.add_argument("--max-n", type=int, required=True)
    dehn.add_argument("--diagram", choices=("P", "Q", "R", "T"), required=True)
    dehn.add_argument("--out")
    dehn.add_argument("--svg")
    dehn.add_argument("--fit", choices=("power", "exp"))
    dehn.set_defaults(func=cmd_dehn)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except ValidationFailure as exc:
        err.write(_dump(exc.witness) + "\n")
        return 1
    except MarkingError as exc:
        err.write(_dump({"invariant": str(exc), "witness": exc.witness}) + "\n")
        return 1
    except (argparse.ArgumentTypeError, LogError, FanError, dehn_lab.DehnError,
            FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as exc:
        err.write(f"praag: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
