"""Command-line surface: construction, verification, sweeps, and stability runs.

Subcommands: ``op build``, ``verify``, ``sweep``, ``power-bound``,
``resolvent``, ``kreiss``, ``stability``.  Global flags --seed, --threads,
--out, --format, --no-timestamp are accepted by every subcommand; the full
resolved configuration is echoed into the output metadata so a result file
is self-describing.

Exit codes: 0 all checks passed (Advisory counts as non-failing), 1 a
verification failed, 2 usage or precondition error, 3 numerical
non-convergence.  Logging verbosity follows TK_LOG={error,info,debug}.

Output is deterministic for fixed seed and flags: JSON keys are sorted,
CSV floats carry 17 significant digits (round-trip exact), and worker
thread counts do not influence any numeric value.  The timestamp is the
single non-reproducible field; --no-timestamp drops it for byte-exact
comparisons.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import math
import os
import sys
from typing import List, Optional, Sequence

import numpy as np

from .analysis import (
    GridEvaluationError,
    GridSpec,
    NonConvergenceError,
    SpectrumModel,
    hille_yosida_constant,
    kreiss_constant,
    power_bound,
    resolvent_condition,
)
from .operators import build_operator
from .stability import Forcing, SchemeRun, run_scheme, trajectory_csv_rows
from .symbols import Family, FamilyParams, LaurentSymbol, TruncatedOperator
from .theorems import (
    TheoremId,
    VerifyConfig,
    commutator_growth_check,
    sweep_growth,
    verify_er_bound,
    verify_prop_2_2,
    verify_thm_3_1,
    verify_thm_3_2,
    verify_thm_3_3,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3

_THEOREM_TOKENS = {
    "3.1": TheoremId.THM3_1,
    "3.2": TheoremId.THM3_2,
    "3.3": TheoremId.THM3_3,
    "prop2.2": TheoremId.PROP2_2,
    "er": TheoremId.ER_THM1_1,
    "lem6.1": TheoremId.LEM6_1_NORM,
}


# ---------------------------------------------------------------------------
# parsing helpers


def _parse_beta(text: str) -> complex:
    """--beta RE,IM (a bare RE means imaginary part zero)."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ValueError(f"--beta expects RE,IM with numeric parts, got {text!r}")


def _parse_symbol(text: str) -> LaurentSymbol:
    """Symbol grammar: semicolon-separated ``index:re,im`` entries."""
    coeffs = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            idx, val = chunk.split(":")
            re_s, im_s = val.split(",")
            coeffs[int(idx)] = complex(float(re_s), float(im_s))
        except ValueError:
            raise ValueError(f"bad symbol term {chunk!r}; grammar is 'index:re,im;...'")
    return LaurentSymbol(coeffs)


def _parse_points(text: str) -> tuple:
    """Point-set grammar: semicolon-separated ``re,im`` pairs."""
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ValueError(f"bad point {chunk!r}; grammar is 're,im;re,im;...'")
        pts.append(complex(float(parts[0]), float(parts[1])))
    if not pts:
        raise ValueError("point set is empty")
    return tuple(pts)


def _load_matrix(path: str) -> TruncatedOperator:
    with open(path, "r", encoding="utf-8") as fh:
        return TruncatedOperator.from_dict(json.load(fh))


def _load_vector(path: str) -> np.ndarray:
    """Vector JSON: list of numbers or of [re, im] pairs."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    out = []
    for item in raw:
        if isinstance(item, (list, tuple)):
            out.append(complex(item[0], item[1]))
        else:
            out.append(complex(item))
    return np.asarray(out, dtype=np.complex128)


def _family_params(args: argparse.Namespace) -> FamilyParams:
    family = Family(args.family)
    if family is Family.CUSTOM:
        if not getattr(args, "f", None) or not getattr(args, "g", None):
            raise ValueError("custom family requires --f and --g symbols")
        return FamilyParams(family=family, beta=0j,
                            f=_parse_symbol(args.f), g=_parse_symbol(args.g))
    if args.beta is None:
        raise ValueError("requires --beta RE,IM")
    return FamilyParams(family=family, beta=_parse_beta(args.beta))


def _grid_for(name: str) -> GridSpec:
    if name == "coarse":
        return GridSpec.coarse()
    if name == "default":
        return GridSpec.default()
    raise ValueError(f"unknown grid {name!r}; expected default or coarse")


def _config_from(args: argparse.Namespace) -> VerifyConfig:
    return VerifyConfig(
        dim=getattr(args, "dim", 512),
        n_max=getattr(args, "n_max", 64),
        grid=_grid_for(getattr(args, "grid", "default")),
        mode=getattr(args, "mode", "auto"),
        seed=args.seed,
        threads=args.threads,
    )


# ---------------------------------------------------------------------------
# output helpers


def _fmt17(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return f"{z.real:g}"
    if z.real == 0.0:
        return f"{z.imag:g}i"
    return f"{z.real:g}{z.imag:+g}i"


def _fmt_bracket(lo: Optional[float], hi: Optional[float]) -> str:
    lo_s = "-inf" if lo is None else f"{lo:.6g}"
    hi_s = "inf" if hi is None else f"{hi:.6g}"
    return f"[{lo_s},{hi_s}]"


def _check_line(prefix: str, rep, beta: Optional[complex] = None) -> str:
    beta_part = "" if beta is None else f" beta={_fmt_complex(beta)}"
    return (f"{prefix}[{rep.quantity}]{beta_part} value={rep.value:.6g} "
            f"in {_fmt_bracket(rep.lower, rep.upper)} {rep.verdict.upper()}")


def _jsonify(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def _metadata(args: argparse.Namespace, extra: Optional[dict] = None) -> dict:
    md = {
        "command": args.command,
        "seed": args.seed,
        "threads": args.threads,
        "format": args.format,
        "config": {k: v for k, v in sorted(vars(args).items())
                   if k not in ("func", "out", "no_timestamp") and not callable(v)},
    }
    if extra:
        md.update(extra)
    if not args.no_timestamp:
        md["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return md


def _write_out(args: argparse.Namespace, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _emit(args: argparse.Namespace, payload: dict, csv_lines: Optional[List[str]] = None,
          screen_lines: Optional[List[str]] = None) -> None:
    """Print human-readable lines, then write the machine artifact."""
    for line in screen_lines or []:
        print(line)
    if args.format == "csv" and csv_lines is not None:
        meta = payload.get("metadata", {})
        head = [f"# {k}={json.dumps(meta[k], sort_keys=True, default=_jsonify)}"
                for k in sorted(meta) if k != "config"]
        _write_out(args, "\n".join(head + csv_lines))
    else:
        _write_out(args, json.dumps(payload, sort_keys=True, indent=2, default=_jsonify))


def _exit_code(verdicts: Sequence[str]) -> int:
    return EXIT_FAIL if any(v == "Fail" for v in verdicts) else EXIT_OK


# ---------------------------------------------------------------------------
# subcommands


def _cmd_op_build(args: argparse.Namespace) -> int:
    params = _family_params(args)
    op = build_operator(params, args.dim, args.mode)
    doc = op.to_dict()
    doc["metadata"] = _metadata(args)
    _write_out(args, json.dumps(doc, sort_keys=True, default=_jsonify))
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    theorem = _THEOREM_TOKENS.get(args.theorem)
    if theorem is None:
        raise ValueError(f"unknown --theorem {args.theorem!r}; "
                         f"expected one of {sorted(_THEOREM_TOKENS)}")
    cfg = _config_from(args)
    beta = _parse_beta(args.beta) if args.beta is not None else None
    reports = []
    if theorem is TheoremId.LEM6_1_NORM:
        dim = args.dim if args.dim is not None else 256
        reports = [commutator_growth_check(args.n_max_commutator, dim=dim)]
        lines = [_check_line(theorem.prefix, reports[0])]
    else:
        if beta is None:
            raise ValueError("requires --beta RE,IM")
        if theorem is TheoremId.THM3_1:
            reports = list(verify_thm_3_1(beta, cfg))
        elif theorem is TheoremId.THM3_2:
            reports = list(verify_thm_3_2(beta, cfg))
        elif theorem is TheoremId.THM3_3:
            reports = list(verify_thm_3_3(beta, cfg))
        elif theorem is TheoremId.PROP2_2:
            reports = [verify_prop_2_2(beta, cfg, family=Family(args.family))]
        elif theorem is TheoremId.ER_THM1_1:
            family = Family(args.family) if args.family else Family.REAL_PART
            a = build_operator(FamilyParams(family=family, beta=beta), cfg.dim, cfg.mode)
            reports = [verify_er_bound(a, _parse_points(args.points), cfg)]
        lines = [_check_line(theorem.prefix, r, beta) for r in reports]
    payload = {"metadata": _metadata(args),
               "results": [r.to_dict() for r in reports]}
    _emit(args, payload, screen_lines=lines)
    return _exit_code([r.verdict for r in reports])


def _sweep_csv(report) -> List[str]:
    head = "beta_re,beta_im,dim,M,M_lower,M_upper,P,P_lower,P_upper,verdict"
    rows = [head]
    for r in report.rows:
        rows.append(",".join([
            _fmt17(r.beta.real), _fmt17(r.beta.imag), str(r.dim),
            _fmt17(r.m_hat), _fmt17(r.m_lower), _fmt17(r.m_upper),
            _fmt17(r.p_hat), _fmt17(r.p_lower), _fmt17(r.p_upper),
            r.verdict,
        ]))
    return rows


def _cmd_sweep(args: argparse.Namespace) -> int:
    family = Family.CONJ_SHIFT if args.cor == "3.1" else Family.REAL_PART
    try:
        k_lo, k_hi = (int(p) for p in args.k_range.split(".."))
    except ValueError:
        raise ValueError(f"--k-range expects LO..HI, got {args.k_range!r}")
    from .theorems import cor_beta_grid
    betas = cor_beta_grid(k_lo, k_hi, phase=args.phase)
    cfg = VerifyConfig(grid=_grid_for(args.grid), n_max=args.n_max,
                       seed=args.seed, threads=args.threads)
    report = sweep_growth(family, betas, cfg)
    lines = []
    for q in ("M", "P"):
        slope, half = report.fitted_slope[q]
        lo, hi = report.expected_slope_range[q]
        ok = lo <= slope <= hi
        lines.append(f"slope[{q}]={slope:.6g}±{half:.3g} expected=[{lo:g},{hi:g}] "
                     f"{'PASS' if ok else 'FAIL'}")
    for w in report.warnings:
        lines.append(f"warning: {w}")
    payload = {"metadata": _metadata(args), "results": report.to_dict()}
    _emit(args, payload, csv_lines=_sweep_csv(report), screen_lines=lines)
    return _exit_code([report.verdict])


def _operator_from(args: argparse.Namespace) -> TruncatedOperator:
    if getattr(args, "matrix", None):
        return _load_matrix(args.matrix)
    return build_operator(_family_params(args), args.dim, args.mode)


def _cmd_power_bound(args: argparse.Namespace) -> int:
    a = _operator_from(args)
    rep = power_bound(a, args.n_max, seed=args.seed)
    payload = {"metadata": _metadata(args), "results": [rep.to_dict()]}
    _emit(args, payload, screen_lines=[f"M={rep.value:.17g} ({rep.verdict})"])
    return _exit_code([rep.verdict])


_MODELS = {"disk": SpectrumModel.unit_disk, "interval": SpectrumModel.interval}


def _cmd_resolvent(args: argparse.Namespace) -> int:
    a = _operator_from(args)
    if args.model == "points":
        model = SpectrumModel.finite_points(_parse_points(args.points))
    else:
        model = _MODELS[args.model]()
    rep = resolvent_condition(a, model, _grid_for(args.grid),
                              seed=args.seed, threads=args.threads)
    payload = {"metadata": _metadata(args), "results": [rep.to_dict()]}
    _emit(args, payload, screen_lines=[f"P={rep.value:.17g} ({rep.verdict})"])
    return _exit_code([rep.verdict])


def _cmd_kreiss(args: argparse.Namespace) -> int:
    a = _operator_from(args)
    grid = _grid_for(args.grid)
    reps = [kreiss_constant(a, grid, seed=args.seed, threads=args.threads)]
    lines = [f"K={reps[0].value:.17g} ({reps[0].verdict})"]
    if args.hy_n_max is not None:
        hy = hille_yosida_constant(a, args.hy_n_max, grid,
                                   seed=args.seed, threads=args.threads)
        reps.append(hy)
        lines.append(f"HY={hy.value:.17g} ({hy.verdict})")
    payload = {"metadata": _metadata(args), "results": [r.to_dict() for r in reps]}
    _emit(args, payload, screen_lines=lines)
    return _exit_code([r.verdict for r in reps])


def _cmd_stability(args: argparse.Namespace) -> int:
    a = _load_matrix(args.matrix)
    if args.v0:
        v0 = _load_vector(args.v0)
    elif args.perturb is not None:
        v0 = np.zeros(a.dim, dtype=np.complex128)
        v0[0] = args.perturb
    else:
        raise ValueError("requires --v0 FILE or --perturb EPS")
    u0 = _load_vector(args.u0) if args.u0 else None
    forcing = (Forcing.generator(args.seed) if args.forcing == "generator"
               else Forcing.zero())
    run = SchemeRun(matrix=a, forcing=forcing, u0=u0, v0=v0, steps=args.steps)
    u_traj, err = run_scheme(run)
    csv_lines = ["n,u_norm,v_norm,envelope"]
    for n, un, vn, env in trajectory_csv_rows(u_traj, err):
        csv_lines.append(f"{n},{_fmt17(un)},{_fmt17(vn)},{_fmt17(env)}")
    payload = {"metadata": _metadata(args), "results": err.to_dict()}
    _emit(args, payload, csv_lines=csv_lines,
          screen_lines=[f"verdict={err.verdict} envelope={err.bound_envelope:.17g}"])
    return EXIT_FAIL if err.verdict == "Fail" else EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    sp.add_argument("--threads", type=int, default=1, help="worker pool cap")
    sp.add_argument("--out", default=None, help="write the machine artifact to PATH")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--no-timestamp", action="store_true",
                    help="omit the timestamp field (byte-exact comparisons)")


def _add_operator_source(sp: argparse.ArgumentParser, with_matrix: bool = True) -> None:
    sp.add_argument("--family", choices=[f.value for f in Family], default="conj-shift")
    sp.add_argument("--beta", default=None, help="RE,IM")
    sp.add_argument("--dim", type=int, default=512)
    sp.add_argument("--mode", choices=("auto", "finite-section", "closed-form"),
                    default="auto")
    sp.add_argument("--f", default=None, help="custom symbol, grammar 'index:re,im;...'")
    sp.add_argument("--g", default=None, help="custom conjugator, same grammar")
    if with_matrix:
        sp.add_argument("--matrix", default=None, help="operator JSON file (overrides --family)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toepbound",
        description="Power bounds and resolvent conditions for conjugated Toeplitz sections.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_op = sub.add_parser("op", help="operator construction")
    op_sub = p_op.add_subparsers(dest="op_command", required=True)
    p_build = op_sub.add_parser("build", help="build one operator section, write JSON")
    _add_common(p_build)
    _add_operator_source(p_build, with_matrix=False)
    p_build.set_defaults(func=_cmd_op_build, command="op build")

    p_verify = sub.add_parser("verify", help="run one named check")
    _add_common(p_verify)
    p_verify.add_argument("--theorem", required=True,
                          help="one of " + ", ".join(sorted(_THEOREM_TOKENS)))
    p_verify.add_argument("--beta", default=None, help="RE,IM")
    p_verify.add_argument("--dim", type=int, default=None)
    p_verify.add_argument("--n-max", dest="n_max", type=int, default=64)
    p_verify.add_argument("--grid", choices=("default", "coarse"), default="default")
    p_verify.add_argument("--mode", choices=("auto", "finite-section", "closed-form"),
                          default="auto")
    p_verify.add_argument("--family", default="conj-shift",
                          choices=[f.value for f in Family],
                          help="family for prop2.2 / er (defaults: conj-shift / real-part)")
    p_verify.add_argument("--points", default="-1,0;1,0",
                          help="finite point set for er, grammar 're,im;...'")
    p_verify.add_argument("--n-max-commutator", dest="n_max_commutator", type=int,
                          default=10, help="largest power for lem6.1")
    p_verify.set_defaults(func=_cmd_verify, command="verify")

    p_sweep = sub.add_parser("sweep", help="growth sweep along beta -> 1")
    _add_common(p_sweep)
    p_sweep.add_argument("--cor", choices=("3.1", "3.2"), required=True)
    p_sweep.add_argument("--k-range", dest="k_range", default="2..8")
    p_sweep.add_argument("--phase", type=float, default=0.0)
    p_sweep.add_argument("--n-max", dest="n_max", type=int, default=64)
    p_sweep.add_argument("--grid", choices=("default", "coarse"), default="coarse")
    p_sweep.set_defaults(func=_cmd_sweep, command="sweep")

    p_pb = sub.add_parser("power-bound", help="max_n ||A^n||")
    _add_common(p_pb)
    _add_operator_source(p_pb)
    p_pb.add_argument("--n-max", dest="n_max", type=int, default=64)
    p_pb.set_defaults(func=_cmd_power_bound, command="power-bound")

    p_res = sub.add_parser("resolvent", help="resolvent condition sup")
    _add_common(p_res)
    _add_operator_source(p_res)
    p_res.add_argument("--model", choices=("disk", "interval", "points"), default="disk")
    p_res.add_argument("--points", default="-1,0;1,0")
    p_res.add_argument("--grid", choices=("default", "coarse"), default="default")
    p_res.set_defaults(func=_cmd_resolvent, command="resolvent")

    p_kr = sub.add_parser("kreiss", help="Kreiss constant (and optional HY sweep)")
    _add_common(p_kr)
    _add_operator_source(p_kr)
    p_kr.add_argument("--hy-n-max", dest="hy_n_max", type=int, default=None)
    p_kr.add_argument("--grid", choices=("default", "coarse"), default="default")
    p_kr.set_defaults(func=_cmd_kreiss, command="kreiss")

    p_st = sub.add_parser("stability", help="propagated-error run")
    _add_common(p_st)
    p_st.add_argument("--matrix", required=True, help="operator JSON file")
    p_st.add_argument("--v0", default=None, help="perturbation vector JSON file")
    p_st.add_argument("--perturb", type=float, default=None,
                      help="scalar eps; v0 = eps * e_0")
    p_st.add_argument("--u0", default=None, help="start vector JSON file (default zero)")
    p_st.add_argument("--steps", type=int, required=True)
    p_st.add_argument("--forcing", choices=("zero", "generator"), default="zero")
    p_st.set_defaults(func=_cmd_stability, command="stability")

    return parser


def _setup_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO,
             "debug": logging.DEBUG}.get(os.environ.get("TK_LOG", "error"), logging.ERROR)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NonConvergenceError, GridEvaluationError) as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
