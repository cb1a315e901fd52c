"""Command-line front end.

Exit codes: 0 on success (all checks passed, where applicable), 1 when a
verification fails, 2 on usage or configuration errors.  The default seed
comes from NCMOMENTS_SEED when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import combinatorics, corners, distribution, evenp, gadgets
from . import reconstruction as recon
from .algebra import word_trace
from .matrixio import parse_word, read_matrix_file, word_to_spec
from .suite import SuiteConfig, run_suite

PASS_EXIT = 0
FAIL_EXIT = 1
USAGE_EXIT = 2


def _env_seed() -> int | None:
    raw = os.environ.get("NCMOMENTS_SEED", "")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"NCMOMENTS_SEED must be an integer, got {raw!r}")


def _default_seed() -> int:
    seed = _env_seed()
    return 0 if seed is None else seed


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2, default=str)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_gadgets_verify(args) -> int:
    if args.kind == "full":
        fam = gadgets.full_cycle_family(args.n)
    else:
        fam = gadgets.compact_family(args.n)
    sample = args.sample
    if args.n > gadgets.EXHAUSTIVE_CAP and sample is None:
        sample = gadgets.DEFAULT_SAMPLE
    rep = gadgets.verify_cyclic_trace(fam, sample=sample, seed=args.seed)
    _emit(rep.to_dict(), args)
    return PASS_EXIT if rep.passed else FAIL_EXIT


def _cmd_coeff_table(args) -> int:
    lines = ["p,N,alpha,coefficient"]
    for n in range(1, args.max_n + 1):
        for alpha in range(0, n // 2 + 1):
            value = combinatorics.moment_coefficient(args.p, n, alpha)
            lines.append(f"{args.p},{n},{alpha},{value!r}")
    text = "\n".join(lines)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return PASS_EXIT


def _cmd_reconstruct(args) -> int:
    family = read_matrix_file(args.file)
    word = parse_word(args.word)
    n = len(word)
    gadget = (
        gadgets.compact_family(n)
        if args.gadget == "compact"
        else gadgets.full_cycle_family(n)
    )
    plan = None
    if args.radii:
        radii = tuple(float(tok) for tok in args.radii.split(","))
        plan = recon.ExtrapolationPlan(
            radii=radii, q=args.q or 2 * n + 3, richardson_order=args.order
        )
    est = recon.recover_moment(
        gadget, family, word, args.p, plan=plan, q=args.q
    )
    direct = word_trace(family, word)
    payload = {
        "word": word_to_spec(word),
        "p": args.p,
        "estimate_re": est.value.real,
        "estimate_im": est.value.imag,
        "direct_trace_re": direct.real,
        "direct_trace_im": direct.imag,
        "abs_error": abs(est.value - direct),
        "residual": est.residual,
    }
    _emit(payload, args)
    return PASS_EXIT


def _cmd_dist_table(args) -> int:
    family = read_matrix_file(args.file)
    table = distribution.star_moments(family, args.maxdeg)
    payload = {
        "maxdeg": table.maxdeg,
        "family_size": table.family_size,
        "entries": {
            word_to_spec(w) if w else "": [v.real, v.imag]
            for w, v in sorted(table.entries.items())
        },
    }
    _emit(payload, args)
    return PASS_EXIT


def _cmd_dist_compare(args) -> int:
    fam_a = read_matrix_file(args.file_a)
    fam_b = read_matrix_file(args.file_b)
    table_a = distribution.star_moments(fam_a, args.maxdeg)
    table_b = distribution.star_moments(fam_b, args.maxdeg)
    rep = distribution.distributions_match(table_a, table_b, args.tol)
    _emit(rep.to_dict(), args)
    return PASS_EXIT if rep.passed else FAIL_EXIT


def _cmd_probe_isometry(args) -> int:
    basis = read_matrix_file(args.file)
    images = read_matrix_file(args.images)
    u = distribution.SpanMap(basis, images, unital=args.unital)
    rep = distribution.complete_isometry_probe(
        u, level=args.level, p=args.p, trials=args.trials, seed=args.seed
    )
    _emit(rep.to_dict(), args)
    return PASS_EXIT


def _cmd_defect(args) -> int:
    basis = read_matrix_file(args.file)
    images = read_matrix_file(args.images)
    u = distribution.SpanMap(basis, images, unital=False)
    if args.which == "mult":
        value = distribution.multiplicativity_defect(
            u, args.a, args.b, args.p, use_oracle=args.oracle
        )
    else:
        value = distribution.adjoint_defect(u, args.x)
    _emit({"defect": value, "kind": args.which, "seed": args.seed}, args)
    return PASS_EXIT


def _cmd_psi_check(args) -> int:
    worst_ode = 0.0
    for t in np.geomspace(1e-3, 50.0, 80):
        res = corners.psi_ode_residual(t, args.p)
        worst_ode = max(worst_ode, abs(res) / (1.0 + corners.psi_eval(t, args.p)))
    worst_series = 0.0
    for t in np.linspace(0.0, 3.5, 50):
        worst_series = max(
            worst_series,
            abs(corners.psi_eval(t, args.p) - corners.psi_eval_series(t, args.p)),
        )
    payload = {
        "p": args.p,
        "ode_residual": worst_ode,
        "series_agreement": worst_series,
        "pass": worst_ode <= 1e-7 and worst_series <= 1e-10,
    }
    _emit(payload, args)
    return PASS_EXIT if payload["pass"] else FAIL_EXIT


def _cmd_fourterm(args) -> int:
    rng = np.random.default_rng(args.seed)
    worst = np.inf
    for _ in range(args.trials):
        a = rng.normal(size=(args.dim, args.dim)) + 1j * rng.normal(
            size=(args.dim, args.dim)
        )
        a /= max(np.linalg.norm(a, 2), 1e-12)
        worst = min(worst, corners.four_term_defect(a, args.p))
    payload = {
        "p": args.p,
        "dim": args.dim,
        "trials": args.trials,
        "seed": args.seed,
        "min_eigenvalue_defect": worst,
        "pass": bool(args.p < 1 or worst >= -1e-10),
    }
    _emit(payload, args)
    return PASS_EXIT if payload["pass"] else FAIL_EXIT


def _cmd_evennorm(args) -> int:
    family = read_matrix_file(args.file)
    x = family[0]
    a = corners.corner_embed(x)
    estimate, residual = corners.recover_even_norm_of(a, args.p, args.N)
    gram = a.conj().T @ a
    direct = float(
        np.real(np.trace(np.linalg.matrix_power(gram, args.N)) / a.shape[0])
    )
    payload = {
        "p": args.p,
        "N": args.N,
        "estimate": estimate,
        "direct": direct,
        "abs_error": abs(estimate - direct),
        "residual": residual,
    }
    _emit(payload, args)
    return PASS_EXIT


def _cmd_evenp_check(args) -> int:
    x_fam = read_matrix_file(args.file)
    if args.file_b:
        y_fam = read_matrix_file(args.file_b)
    else:
        rng = np.random.default_rng(args.seed)
        d = x_fam[0].shape[0]
        u_mat = np.linalg.qr(
            rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        )[0]
        y_fam = [u_mat @ x @ u_mat.conj().T for x in x_fam]
    levels = [int(tok) for tok in args.levels.split(",")]
    try:
        rep = evenp.even_p_transfer_check(
            x_fam, y_fam, args.m, levels, trials=args.trials, seed=args.seed
        )
    except evenp.PreconditionFailedError as exc:
        _emit(
            {
                "m": args.m,
                "precondition_failed": True,
                "word": word_to_spec(exc.word),
                "gap": exc.gap,
            },
            args,
        )
        return FAIL_EXIT
    _emit(rep.to_dict(), args)
    return PASS_EXIT if rep.passed else FAIL_EXIT


def _cmd_suite_run(args) -> int:
    import dataclasses

    try:
        if args.config:
            config = SuiteConfig.from_file(args.config)
        else:
            env_seed = _env_seed()
            config = SuiteConfig() if env_seed is None else SuiteConfig(seed=env_seed)
        if args.format:
            config = dataclasses.replace(config, output_format=args.format)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    report = run_suite(config)
    if config.output_format == "csv":
        text = report.to_csv()
    else:
        text = json.dumps(report.to_dict(), indent=2)
    target = args.output or config.output
    if target:
        with open(target, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)
    for record in report.records:
        if not record.passed:
            print(f"FAILED: {record.name} measured={record.measured:g} "
                  f"tolerance={record.tolerance:g}", file=sys.stderr)
    return PASS_EXIT if report.all_passed else FAIL_EXIT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncmoments",
        description="Moment recovery and verification toolkit for matrix "
        "algebras with normalized traces",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    seed = _default_seed()

    p_gadgets = sub.add_parser("gadgets", help="cyclic-trace families")
    g_sub = p_gadgets.add_subparsers(dest="subcommand", required=True)
    g_verify = g_sub.add_parser("verify", help="check the cyclic-trace property")
    g_verify.add_argument("--n", type=int, required=True)
    g_verify.add_argument("--kind", choices=("full", "compact"), default="compact")
    g_verify.add_argument("--sample", type=int, default=None)
    g_verify.add_argument("--seed", type=int, default=seed)
    g_verify.add_argument("--output", default=None)
    g_verify.set_defaults(fn=_cmd_gadgets_verify)

    p_coeff = sub.add_parser("coeff", help="moment coefficients")
    c_sub = p_coeff.add_subparsers(dest="subcommand", required=True)
    c_table = c_sub.add_parser("table", help="CSV table of coefficients")
    c_table.add_argument("--p", type=float, required=True)
    c_table.add_argument("--max-n", dest="max_n", type=int, required=True)
    c_table.add_argument("--output", default=None)
    c_table.set_defaults(fn=_cmd_coeff_table)

    p_rec = sub.add_parser("reconstruct", help="recover a word trace from p-norms")
    p_rec.add_argument("--file", required=True, help="JSON matrix family file")
    p_rec.add_argument("--word", required=True, help='e.g. "1*,2,1"')
    p_rec.add_argument("--p", type=float, required=True)
    p_rec.add_argument("--q", type=int, default=None)
    p_rec.add_argument("--radii", default=None, help="comma-separated ladder")
    p_rec.add_argument("--order", type=int, default=2)
    p_rec.add_argument("--gadget", choices=("compact", "full"), default="compact")
    p_rec.add_argument("--output", default=None)
    p_rec.set_defaults(fn=_cmd_reconstruct)

    p_dist = sub.add_parser("dist", help="star-moment tables")
    d_sub = p_dist.add_subparsers(dest="subcommand", required=True)
    d_table = d_sub.add_parser("table")
    d_table.add_argument("--file", required=True)
    d_table.add_argument("--maxdeg", type=int, default=3)
    d_table.add_argument("--output", default=None)
    d_table.set_defaults(fn=_cmd_dist_table)
    d_cmp = d_sub.add_parser("compare")
    d_cmp.add_argument("--file-a", dest="file_a", required=True)
    d_cmp.add_argument("--file-b", dest="file_b", required=True)
    d_cmp.add_argument("--maxdeg", type=int, default=3)
    d_cmp.add_argument("--tol", type=float, default=1e-10)
    d_cmp.add_argument("--output", default=None)
    d_cmp.set_defaults(fn=_cmd_dist_compare)

    p_probe = sub.add_parser("probe", help="isometry probes")
    pr_sub = p_probe.add_subparsers(dest="subcommand", required=True)
    pr_iso = pr_sub.add_parser("isometry")
    pr_iso.add_argument("--file", required=True, help="basis family file")
    pr_iso.add_argument("--images", required=True, help="image family file")
    pr_iso.add_argument("--level", type=int, required=True)
    pr_iso.add_argument("--p", type=float, required=True)
    pr_iso.add_argument("--trials", type=int, default=100)
    pr_iso.add_argument("--seed", type=int, default=seed)
    pr_iso.add_argument("--unital", action="store_true")
    pr_iso.add_argument("--output", default=None)
    pr_iso.set_defaults(fn=_cmd_probe_isometry)

    p_def = sub.add_parser("defect", help="defect functionals")
    df_sub = p_def.add_subparsers(dest="which", required=True)
    df_mult = df_sub.add_parser("mult")
    df_mult.add_argument("--file", required=True)
    df_mult.add_argument("--images", required=True)
    df_mult.add_argument("--a", type=int, required=True, help="0-based basis index")
    df_mult.add_argument("--b", type=int, required=True)
    df_mult.add_argument("--p", type=float, default=3.0)
    df_mult.add_argument("--oracle", action="store_true")
    df_mult.add_argument("--seed", type=int, default=seed)
    df_mult.add_argument("--output", default=None)
    df_mult.set_defaults(fn=_cmd_defect, which="mult")
    df_adj = df_sub.add_parser("adjoint")
    df_adj.add_argument("--file", required=True)
    df_adj.add_argument("--images", required=True)
    df_adj.add_argument("--x", type=int, required=True, help="0-based basis index")
    df_adj.add_argument("--seed", type=int, default=seed)
    df_adj.add_argument("--output", default=None)
    df_adj.set_defaults(fn=_cmd_defect, which="adjoint")

    p_psi = sub.add_parser("psi", help="scalar function checks")
    ps_sub = p_psi.add_subparsers(dest="subcommand", required=True)
    ps_check = ps_sub.add_parser("check")
    ps_check.add_argument("--p", type=float, required=True)
    ps_check.add_argument("--output", default=None)
    ps_check.set_defaults(fn=_cmd_psi_check)

    p_four = sub.add_parser("fourterm", help="four-term lower bound")
    p_four.add_argument("--p", type=float, required=True)
    p_four.add_argument("--dim", type=int, default=2)
    p_four.add_argument("--trials", type=int, default=100)
    p_four.add_argument("--seed", type=int, default=seed)
    p_four.add_argument("--output", default=None)
    p_four.set_defaults(fn=_cmd_fourterm)

    p_even = sub.add_parser("evennorm", help="even-norm recovery for corners")
    p_even.add_argument("--file", required=True)
    p_even.add_argument("--N", type=int, required=True)
    p_even.add_argument("--p", type=float, required=True)
    p_even.add_argument("--output", default=None)
    p_even.set_defaults(fn=_cmd_evennorm)

    p_evenp = sub.add_parser("evenp", help="even-p transfer checks")
    ep_sub = p_evenp.add_subparsers(dest="subcommand", required=True)
    ep_check = ep_sub.add_parser("check")
    ep_check.add_argument("--file", required=True, help="x family file")
    ep_check.add_argument("--file-b", dest="file_b", default=None)
    ep_check.add_argument("--m", type=int, required=True)
    ep_check.add_argument("--levels", default="1,2,3")
    ep_check.add_argument("--trials", type=int, default=5)
    ep_check.add_argument("--seed", type=int, default=seed)
    ep_check.add_argument("--output", default=None)
    ep_check.set_defaults(fn=_cmd_evenp_check)

    p_suite = sub.add_parser("suite", help="aggregated verification suite")
    s_sub = p_suite.add_subparsers(dest="subcommand", required=True)
    s_run = s_sub.add_parser("run")
    s_run.add_argument("--config", default=None)
    s_run.add_argument("--format", choices=("json", "csv"), default=None)
    s_run.add_argument("--output", default=None)
    s_run.set_defaults(fn=_cmd_suite_run)

    return parser


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0, None) else 0
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    try:
        return args.fn(args)
    except (ValueError, IndexError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
