"""Command-line workbench: analyze posets and forms, verify the block
catalog, build scripts, glue single steps, sweep small posets, export
Hasse diagrams.

Exit codes: 0 all verdicts as expected, 1 verification failure, 2 input
error. Every human-readable line has a machine-readable JSON mirror.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebras import build_g, build_gA
from .forms import (
    FormError,
    NotFrobeniusError,
    OneForm,
    index,
    is_contact_form,
    kernel,
    spectrum,
)
from .posets import Poset, PosetError
from .sweep import conjecture_sweep
from .toral import (
    ConstructionScript,
    GlueError,
    ScriptError,
    block,
    catalog,
    ext_hasse_has_cycle,
    glue,
    is_contact_sequence,
    run_script,
    verify_contact_toral_pair,
    verify_toral_pair,
)
from .toral.blocks import (
    BlockError,
    derive_small_frobenius_form,
    search_contact_form,
    verify_block,
)

SEARCH_SIZE_CAP = 8


class InputError(ValueError):
    pass


def _load_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {what} from {path}: {exc}") from exc


def _load_poset(path):
    try:
        return Poset.from_json(_load_json(path, "poset"))
    except PosetError as exc:
        raise InputError(f"{path}: {exc}") from exc


def analyze(poset, form=None, seed=0, trials=5, search_forms=True):
    """Full analysis report as a JSON-ready dict; no bare verdicts."""
    ext = poset.extremal_data()
    g = build_g(poset)
    gA = build_gA(poset)
    report = {
        "poset": {
            "n": poset.n,
            "height": poset.height,
            "relations": len(poset.relations),
            "covers": [list(c) for c in sorted(poset.covers)],
            "ext": sorted(ext.ext),
            "rel_e": [list(r) for r in sorted(ext.rel_e)],
            "connected": poset.is_connected(),
            "components": len(poset.connected_components()),
        },
        "algebra": {"dim_g": g.dim, "dim_gA": gA.dim},
        "index": {
            "value": index(gA, trials=trials, seed=seed),
            "trials": trials,
            "seed": seed,
        },
    }
    ind = report["index"]["value"]
    if not poset.is_connected():
        comps = poset.connected_components()
        verdict = len(comps) == 2 and all(
            index(build_gA(poset.induced_subposet(sorted(c))), trials=trials, seed=seed) == 0
            for c in comps
        )
        report["contact"] = {
            "verdict": verdict,
            "certificate": {
                "criterion": "disjoint sum of exactly two Frobenius components",
                "components": len(comps),
            },
        }
    elif ext_hasse_has_cycle(poset):
        report["contact"] = {
            "verdict": False,
            "certificate": {"reason": "extremal Hasse diagram contains a cycle"},
        }
    if form is not None:
        rep = kernel(gA, form)
        frobenius = rep.dimension == 0
        report["form"] = form.to_json()
        report["kernel"] = rep.to_json()
        report["frobenius_form"] = {
            "verdict": frobenius,
            "certificate": rep.to_json(),
        }
        contact_res = is_contact_form(gA, form, trials=trials, seed=seed)
        report["contact_form"] = {
            "verdict": contact_res.is_contact,
            "certificate": {
                "reason": contact_res.reason,
                "reeb": None
                if contact_res.reeb is None
                else {
                    f"{p},{q}": str(v)
                    for (p, q), v in sorted(contact_res.reeb.matrix_coords.items())
                },
            },
        }
        if frobenius:
            report["spectrum"] = [str(c) for c in spectrum(gA, form)]
        report["toral_pair_check"] = verify_toral_pair(poset, form).to_json()
        report["contact_pair_check"] = verify_contact_toral_pair(
            poset, form, seed=seed
        ).to_json()
    elif search_forms and poset.n > SEARCH_SIZE_CAP:
        report["note"] = (
            f"form search skipped: poset has more than {SEARCH_SIZE_CAP} elements"
        )
    elif search_forms:
        if gA.dim % 2 == 0 and ind == 0:
            found = derive_small_frobenius_form(poset)
            report["frobenius_search"] = {
                "verdict": found is not None,
                "certificate": None if found is None else found.to_json(),
            }
        elif gA.dim % 2 == 1 and ind == 1 and "contact" not in report:
            found = search_contact_form(poset, seed=seed)
            report["contact"] = {
                "verdict": found is not None,
                "certificate": {
                    "criterion": "spanning-tree contact form search",
                    "form": None if found is None else found.to_json(),
                },
            }
    return report


def _print_report(report, out=None):
    out = out if out is not None else sys.stdout
    p = report["poset"]
    print(
        f"poset: n={p['n']} height={p['height']} |Rel|={p['relations']} "
        f"Ext={p['ext']} connected={p['connected']}",
        file=out,
    )
    a = report["algebra"]
    print(f"algebra: dim g={a['dim_g']} dim gA={a['dim_gA']}", file=out)
    print(f"index: {report['index']['value']} (sampled)", file=out)
    for key in ("frobenius_form", "contact_form", "contact", "frobenius_search"):
        if key in report:
            entry = report[key]
            print(f"{key}: {entry['verdict']}", file=out)


def cmd_analyze(args):
    poset = _load_poset(args.poset)
    form = None
    if args.form:
        try:
            form = OneForm.from_json(poset, _load_json(args.form, "one-form"))
        except FormError as exc:
            raise InputError(f"{args.form}: {exc}") from exc
    report = analyze(poset, form, seed=args.seed, trials=args.trials)
    _print_report(report)
    _emit_json(args, report)
    return 0


def cmd_verify_catalog(args):
    lo, hi = args.n_range
    results = []
    failed = []
    for fam in catalog():
        if fam.parametric:
            flo, fhi = fam.n_range
            ns = [n for n in range(max(lo, flo), min(hi, fhi) + 1)]
        else:
            ns = [None]
        for n in ns:
            blk = block(fam.id, n)
            rep = verify_block(blk, seed=args.seed)
            entry = {
                "block": fam.id,
                "n": n,
                "kind": fam.kind,
                "all_pass": rep.all_pass,
                "failed": rep.failed(),
            }
            results.append(entry)
            if not rep.all_pass:
                failed.append(entry)
            tag = "ok" if rep.all_pass else "FAIL " + ",".join(rep.failed())
            label = fam.id if n is None else f"{fam.id}(n={n})"
            print(f"{label}: {tag}")
    summary = {
        "checked": len(results),
        "failed": len(failed),
        "results": results,
    }
    _emit_json(args, summary)
    print(f"catalog: {len(results)} pairs checked, {len(failed)} failures")
    return 0 if not failed else 1


def cmd_build(args):
    script = ConstructionScript.from_json(_load_json(args.script, "script"))
    contact_seq = is_contact_sequence(script)
    build_form = all(
        step.block().kind != "contact" for step in script.steps[1:]
    )
    result = run_script(script, build_form=build_form)
    out = {
        "poset": result.poset.to_json(),
        "form": result.form.to_json() if result.form else None,
        "contact_sequence": contact_seq,
    }
    if args.audit:
        out["audit"] = result.audit_json()
    exit_code = 0
    if args.check_contact:
        gA = build_gA(result.poset)
        if not contact_seq:
            print(
                "warning: not a contact sequence; analysis proceeds on the raw output"
            )
            ind = index(gA, seed=args.seed, trials=args.trials)
            out["index"] = ind
            print(f"index: {ind}")
        else:
            res = is_contact_form(gA, result.form, seed=args.seed, trials=args.trials)
            out["contact"] = {
                "verdict": res.is_contact,
                "reason": res.reason,
                "reeb": None
                if res.reeb is None
                else {
                    f"{p},{q}": str(v)
                    for (p, q), v in sorted(res.reeb.matrix_coords.items())
                },
            }
            print(f"contact: {res.is_contact} ({res.reason})")
            if res.reeb is not None:
                print(f"reeb: {out['contact']['reeb']}")
            if not res.is_contact:
                exit_code = 1
    print(f"built poset with {result.poset.n} elements")
    if result.form:
        print(f"built form with {len(result.form.support)} summands")
    _emit_json(args, out)
    if args.dot_out:
        with open(args.dot_out, "w") as fh:
            fh.write(result.poset.to_dot())
    return exit_code


def cmd_glue(args):
    poset = _load_poset(args.poset)
    identify = {}
    if args.identify:
        for item in args.identify.split(","):
            role, _, label = item.partition("=")
            if not label:
                raise InputError(f"bad identify entry {item!r}; use role=label")
            identify[role.strip()] = int(label)
    blk = block(args.block, args.n)
    result = glue(poset, blk, args.rule, identify)
    out = {
        "poset": result.poset.to_json(),
        "q_map": {str(k): v for k, v in sorted(result.q_map.items())},
        "block_map": {str(k): v for k, v in sorted(result.s_map.items())},
    }
    print(f"glued {args.block} via {args.rule}: {result.poset.n} elements")
    _emit_json(args, out)
    return 0


def cmd_sweep(args):
    if args.max_n > 8:
        raise InputError("sweep supports max-n up to 8")
    report = conjecture_sweep(args.max_n, seed=args.seed, trials=args.trials)
    print(
        f"sweep: {report['connected_posets_checked']} connected posets up to "
        f"n={args.max_n}, {report['contact_found']} contact (empirical)"
    )
    for entry in report["contact"]:
        print(f"  contact: {entry['poset']['covers']} ({entry['reason']})")
    if report["unreachable_by_scripts"]:
        print(f"unreachable by scripts: {len(report['unreachable_by_scripts'])}")
    else:
        print("all contact posets found are reachable by contact sequences")
    _emit_json(args, report)
    return 0


def cmd_export_dot(args):
    poset = _load_poset(args.poset)
    text = poset.to_dot()
    if args.dot_out:
        with open(args.dot_out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def _emit_json(args, payload):
    if getattr(args, "json_out", None):
        with open(args.json_out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="index sampling seed")
    parser.add_argument("--trials", type=int, default=5, help="index sampling trials")
    parser.add_argument("--json-out", metavar="PATH", help="write the JSON mirror here")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lieposet",
        description="Exact analysis of type-A Lie poset algebras and toral constructions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a poset (and optional one-form)")
    p.add_argument("poset", help="poset JSON file")
    p.add_argument("--form", help="one-form JSON file")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify-catalog", help="run every catalog block verifier")
    p.add_argument(
        "--n-range",
        nargs=2,
        type=int,
        default=(5, 14),
        metavar=("LO", "HI"),
        help="size range for parametric families",
    )
    _add_common(p)
    p.set_defaults(func=cmd_verify_catalog)

    p = sub.add_parser("build", help="run a construction script")
    p.add_argument("script", help="script JSON file")
    p.add_argument("--check-contact", action="store_true")
    p.add_argument("--audit", action="store_true", help="include the step audit")
    p.add_argument("--dot-out", metavar="PATH", help="write the Hasse diagram DOT here")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("glue", help="apply one gluing step to a poset")
    p.add_argument("poset", help="accumulated poset JSON file")
    p.add_argument("--block", required=True, help="catalog block id")
    p.add_argument("--n", type=int, help="parametric block size")
    p.add_argument("--rule", required=True, help="gluing rule name")
    p.add_argument("--identify", help="role=label pairs, comma separated")
    _add_common(p)
    p.set_defaults(func=cmd_glue)

    p = sub.add_parser("sweep", help="empirical conjecture sweep over small posets")
    p.add_argument("--max-n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-dot", help="write a Hasse diagram in DOT format")
    p.add_argument("poset", help="poset JSON file")
    p.add_argument("--dot-out", metavar="PATH")
    _add_common(p)
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, PosetError, FormError, BlockError, GlueError, ScriptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NotFrobeniusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
