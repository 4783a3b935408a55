"""Command-line front end.

Exit codes: 0 verified or complete, 1 verified negative, 2 partial (budget
reached), 3 input error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import serialize as ser
from .conditions import ab_feasibility_search, build_L0, exponent_bound_report, lambda_matrix, power_coeffs
from .galois import make_field, paley_gshds
from .incidence import build_A, verify_A_square
from .pgroup import parse_group
from .qrs import alpha_of, character_dichotomy, exhaustive_search, is_gshds, qrs_encode

OK, NEGATIVE, PARTIAL, INPUT_ERROR = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    group: str | None = None
    format: str = "json"
    seed: int | None = None
    budget: int | None = None
    jobs: int = 1


@dataclass
class Output:
    doc: dict
    code: int
    csv: str | None = None
    figures: tuple = ()          # (suffix, callable(path)) pairs


# -- commands -------------------------------------------------------------------------------


def _group(args):
    try:
        return parse_group(args.group)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_group(args) -> Output:
    from .pgroup import orbit_tables
    G = _group(args)
    T = orbit_tables(G)
    doc = {"group": ser.group_json(G), "table": ser.table_json(T), "alpha": alpha_of(G)}
    rows = [[str(g), n] for g, n in zip(T.reps, T.orbit_sizes)]
    return Output(doc, OK, ser.rows_csv(["rep", "orbit_size"], rows))


def cmd_amatrix(args) -> Output:
    from .plots import matrix_heatmap
    G = _group(args)
    A = build_A(G)
    chk = verify_A_square(A)
    doc = {"group": ser.group_json(G), "table": ser.table_json(A.table), "pairing": A.pairing_tag,
           "A": A.entries, "verdict": chk}
    csv = ser.matrix_csv(A.entries, A.col_labels, A.col_labels)
    csv += ser.rows_csv(["verdict", chk.name, "pass" if chk.ok else "FAIL"], [])
    figs = (("amatrix", lambda path: matrix_heatmap(A.entries, path, f"A for {G}", "g_j", "theta(g_i)")),)
    return Output(doc, OK if chk.ok else NEGATIVE, csv, figs)


def cmd_verify_paley(args) -> Output:
    from .plots import histogram
    if args.m % 2 == 0:
        raise InputError("m must be odd")
    try:
        F = make_field(args.p, args.m, args.index)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    D = paley_gshds(args.p, args.m, args.index)
    A = build_A(F.group)
    d = qrs_encode(D, A.table)
    verdict = is_gshds(d, A, oracle=True)
    cert = verdict.certificate
    dich = character_dichotomy(D)
    doc = {
        "field": str(F), "group": ser.group_json(F.group),
        "certificate": ser.certificate_json(cert, verdict.verified_by),
        "divisibility": {"reason": verdict.reason, "diff_coeffs": list(verdict.diff.values),
                         "nu_p": verdict.diff.nu_p},
        "characters": {"values": list(dich.values), "diff_coeffs": list(dich.coeffs),
                       "checks": ser.checks_json(dich.checks)},
    }
    ok = verdict.ok and cert.ok and dich.ok
    csv = ser.rows_csv(["kind", "v", "k", "k0", "lambda", "verified_by"],
                       [[cert.kind, cert.v, cert.k, cert.k0, cert.lambda_, "+".join(verdict.verified_by)]])
    counts = {}
    for c in verdict.diff.values:
        counts[c] = counts.get(c, 0) + 1
    figs = (("diffcoeffs", lambda path: histogram(counts, path, f"difference coefficients, F_{F.q}", "d")),)
    return Output(doc, OK if ok else NEGATIVE, csv, figs)


def cmd_search(args) -> Output:
    from .plots import histogram
    G = _group(args)
    if G.v > 3 ** 9 * 9:
        raise InputError("group too large for orbit enumeration")
    res = exhaustive_search(G, budget=args.budget, seed=args.seed, jobs=args.jobs,
                            prune_level=args.prune_level, sample=args.sample, start=args.start)
    hits = [{"index": t, "signs": d, "diff_coeffs": df,
             "certificate": ser.certificate_json(cert, ("divisibility", "convolution"))}
            for t, d, df, cert in res.hits]
    doc = {"group": ser.group_json(G), "mode": res.mode, "r": res.r, "total": res.total,
           "examined": res.examined, "exhaustive": res.exhaustive, "pruned": res.pruned,
           "hit_count": len(res.hits), "hits": hits,
           "nu_hist": {str(k): v for k, v in sorted(res.nu_hist.items(), key=lambda kv: kv[0])},
           "next_index": res.next_index}
    if res.mode == "sample" or not res.exhaustive:
        code = PARTIAL
    else:
        code = OK if res.hits else NEGATIVE
    csv = ser.rows_csv(["index", "signs", "kind"],
                       [[t, " ".join(map(str, d.tolist())), c.kind] for t, d, _, c in res.hits])
    figs = ()
    if res.nu_hist:
        figs = (("nu_hist", lambda path: histogram(res.nu_hist, path, f"nu_p over QRSs of {G}", "nu_p")),)
    return Output(doc, code, csv, figs)


def cmd_l0(args) -> Output:
    from .plots import element_plane, matrix_heatmap
    if args.alpha < 1:
        raise InputError("alpha must be at least 1")
    try:
        lm = lambda_matrix(args.p, args.alpha, args.index)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    lz = build_L0(lm)
    prov = lz.provenance()
    doc = {"p": lm.p, "alpha": lm.alpha, "eps0": lm.eps0, "modulus": prov["modulus"],
           "l_reps": prov["l_reps"], "lprime_reps": prov["lprime_reps"], "k_labels": prov["k_labels"],
           "lambda_row0": lm.L[0], "L": lm.L, "provenance": prov,
           "identities": ser.checks_json(lm.checks + lz.checks)}
    ok = lm.ok and lz.ok
    labels = ["".join(map(str, k)) for k in prov["k_labels"]]
    csv = ser.matrix_csv(lm.L, labels, labels)
    figs = [("lambda", lambda path: matrix_heatmap(lm.L, path, f"lambda matrix, p={lm.p}, alpha={lm.alpha}",
                                                    "t", "s"))]
    if lm.alpha == 1:
        figs.append(("l0", lambda path: element_plane(lz.element.vec, (lm.p, lm.p), path, "L0 coefficients")))
    return Output(doc, OK if ok else NEGATIVE, csv, tuple(figs))


def cmd_power(args) -> Output:
    from .plots import matrix_heatmap
    if args.m % 2 == 0:
        raise InputError("m must be odd")
    try:
        pc = power_coeffs(paley_gshds(args.p, args.m, args.index), args.k)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    from .pgroup import valuation
    doc = {"p": args.p, "m": args.m, "k": pc.k, "c": pc.c, "a": pc.a, "b": pc.b,
           "a_minus_b": pc.a_minus_b, "closed_form": pc.closed_form,
           "v_p": valuation(pc.a_minus_b, args.p), "nu": pc.nu,
           "verified_by": ["convolution", "closed form"], "checks": ser.checks_json(pc.checks)}
    csv = ser.rows_csv(["k", "c", "a", "b", "a_minus_b", "closed_form", "v_p"],
                       [[pc.k, pc.c, pc.a, pc.b, pc.a_minus_b, pc.closed_form, doc["v_p"]]])
    figs = ()
    if pc.nu.size > 1 and int(round(pc.nu.size ** 0.5)) ** 2 == pc.nu.size:
        side = int(round(pc.nu.size ** 0.5))
        figs = (("nu", lambda path: matrix_heatmap(pc.nu.reshape(side, side), path, "nu_{G,L}")),)
    return Output(doc, OK if pc.ok else NEGATIVE, csv, figs)


def cmd_bounds(args) -> Output:
    G = _group(args)
    rep = exponent_bound_report(G)
    doc = {"group": ser.group_json(G), "excluded": rep.excluded, "excluded_by": rep.excluded_by,
           "rules": [asdict(r) for r in rep.rules]}
    csv = ser.rows_csv(["rule", "status", "detail"], [[r.rule, r.status, r.detail] for r in rep.rules])
    return Output(doc, NEGATIVE if rep.excluded else OK, csv)


def cmd_ab_search(args) -> Output:
    try:
        res = ab_feasibility_search(args.p, args.alpha, args.bound, budget=args.budget, resume=args.resume)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    wit = [{"A": w.A.vec, "B": w.B.vec, "a0": w.a0, "b0": w.b0, "eps0": w.eps0} for w in res.witnesses]
    doc = {"p": res.p, "alpha": res.alpha, "bound": res.bound, "box": res.box, "total": res.total,
           "examined": res.examined, "exhaustive": res.exhaustive, "resume": res.resume_token,
           "witness_count": len(wit), "witnesses": wit,
           "summary": res.box if wit else f"none in box: {res.box}"}
    csv = ser.rows_csv(["A", "B", "a0", "b0"],
                       [[" ".join(map(str, w.A.vec.tolist())), " ".join(map(str, w.B.vec.tolist())), w.a0, w.b0]
                        for w in res.witnesses])
    code = PARTIAL if res.resume_token else OK
    return Output(doc, code, csv)


# -- plumbing ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--budget", type=int, default=None)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
    common.add_argument("--plot", action="store_true", help="also write PNG figures next to --out")

    ap = _Parser(prog="gshds", description="Generalized skew Hadamard difference set toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grp(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--group", required=True, help="e.g. 'p=3;exps=2,2,1'")
        sp.set_defaults(fn=fn)
        return sp

    grp("group", cmd_group, "orbit table of (Z/p^s)^* acting on G")
    grp("amatrix", cmd_amatrix, "incidence matrix A and the A^2 identity")
    sp = grp("search", cmd_search, "enumerate quadratic residue slices")
    sp.add_argument("--prune-level", type=int, default=None)
    sp.add_argument("--sample", action="store_true", help="random sampling when the budget is below 2^r")
    sp.add_argument("--start", type=int, default=0, help="resume a partial scan at this index")
    grp("bounds", cmd_bounds, "exponent-bound exclusion report")

    sp = sub.add_parser("verify-paley", parents=[common], help="certify the Paley set of F_{p^m}")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--index", type=int, default=0, help="which primitive polynomial")
    sp.set_defaults(fn=cmd_verify_paley)

    sp = sub.add_parser("l0", parents=[common], help="lambda matrix and L0 with provenance")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--index", type=int, default=0)
    sp.set_defaults(fn=cmd_l0)

    sp = sub.add_parser("power", parents=[common], help="power coefficients of the Paley set")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--index", type=int, default=0)
    sp.set_defaults(fn=cmd_power)

    sp = sub.add_parser("ab-search", parents=[common], help="feasibility search for the A/B system")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--resume", default=None)
    sp.set_defaults(fn=cmd_ab_search)
    return ap


def render(out: Output, cfg: RunConfig) -> str:
    doc = {"command": cfg.command, "config": asdict(cfg), "exit_code": out.code}
    doc.update(out.doc)
    if cfg.format == "json":
        return ser.dumps(doc)
    if cfg.format == "csv":
        return out.csv if out.csv is not None else ser.dumps(doc)
    return ser.text_lines(ser._plain(doc))


def run(argv=None) -> tuple[int, str]:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = RunConfig(args.command, getattr(args, "group", None), args.format, args.seed, args.budget, args.jobs)
    try:
        out = args.fn(args)
    except InputError as exc:
        return INPUT_ERROR, f"error: {exc}\n"
    text = render(out, cfg)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    if args.plot:
        base = args.out.with_suffix("") if args.out is not None else Path(f"gshds-{args.command}")
        for suffix, draw in out.figures:
            draw(f"{base}_{suffix}.png")
    return out.code, (text if args.out is None else "")


def main(argv=None) -> int:
    code, text = run(argv)
    stream = sys.stderr if code == INPUT_ERROR else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
