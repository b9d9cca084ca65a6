"""Command-line front end: constant tables, stability scans, weak-norm checks.

Subcommands: constants | eigenvalues | deficit-scan | alpha-estimate |
verify-theorem2 | export-function.  Every command accepts a key=value
config file (values overridden by flags), honors --seed whenever
randomness is involved, prints floats with 12 significant digits, and
uses the exit codes 0 (success), 2 (usage), 3 (numerical refusal:
truncation too coarse), 4 (invariant violation detected).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Optional

from ._util import fmt12, round_floats
from .conformal import PROFILE_GRAMMAR, parse_profile, pullback_to_sphere
from .deficit import OptConfig, ScanConfig, run_scan
from .specfun import SobolevParams, eigenvalue, local_constant, multiplicity, sharp_constant
from .weaknorm import (
    TruncationError,
    compute_constants,
    unit_ball_radius,
    verify_theorem2,
)
from .zonal import gauss_jacobi_rule, to_json_dict

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_REFUSAL = 3
EXIT_INVARIANT = 4

_SANDWICH_SLACK = 1e-9
_DEFAULT_VERIFY_K = 384


def _write_output(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(round_floats(obj), indent=2) + "\n"


def _jsonl_line(obj) -> str:
    return json.dumps(round_floats(obj), separators=(", ", ": ")) + "\n"


def _params(args) -> SobolevParams:
    if args.N is None or args.s is None:
        raise _UsageError("--N and --s are required (flags or config file)")
    try:
        return SobolevParams(args.N, args.s)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None


class _UsageError(Exception):
    pass


def _seed_note(args) -> None:
    if getattr(args, "seed", None) is not None:
        print("note: --seed ignored (command has no randomness)", file=sys.stderr)


def _floats_csv(text) -> tuple[float, ...]:
    if isinstance(text, (int, float)):
        return (float(text),)
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise _UsageError(f"bad numeric list {text!r}: {exc}") from None


def _ints_csv(text) -> tuple[int, ...]:
    if isinstance(text, int):
        return (text,)
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise _UsageError(f"bad integer list {text!r}: {exc}") from None


# --- subcommand implementations ---


def cmd_constants(args) -> int:
    _seed_note(args)
    p = _params(args)
    wc = compute_constants(p)
    kmax = args.kmax
    doc = {
        "N": p.N,
        "s": p.s,
        "q": p.q,
        "sharp_constant": sharp_constant(p),
        "local_constant": local_constant(p),
        "eigenvalues": [
            {"k": k, "lambda": eigenvalue(p, k), "multiplicity": multiplicity(p.N, k)}
            for k in range(kmax + 1)
        ],
        "weak_norm_constants": wc.to_json_dict(),
    }
    if args.format == "json":
        _write_output(_json_text(doc), args.out)
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "value"])
        writer.writerow(["N", p.N])
        writer.writerow(["s", fmt12(p.s)])
        writer.writerow(["q", fmt12(p.q)])
        writer.writerow(["sharp_constant", fmt12(doc["sharp_constant"])])
        writer.writerow(["local_constant", fmt12(doc["local_constant"])])
        for row in doc["eigenvalues"]:
            writer.writerow([f"lambda_{row['k']}", fmt12(row["lambda"])])
            writer.writerow([f"multiplicity_{row['k']}", row["multiplicity"]])
        for name, value in wc.to_json_dict().items():
            writer.writerow([name, fmt12(value)])
        _write_output(buf.getvalue(), args.out)
    else:
        lines = [
            f"N                {p.N}",
            f"s                {fmt12(p.s)}",
            f"q                {fmt12(p.q)}",
            f"sharp_constant   {fmt12(doc['sharp_constant'])}",
            f"local_constant   {fmt12(doc['local_constant'])}",
        ]
        for row in doc["eigenvalues"]:
            lines.append(f"lambda_{row['k']:<2d}        {fmt12(row['lambda'])}"
                         f"  (multiplicity {row['multiplicity']})")
        for name, value in wc.to_json_dict().items():
            lines.append(f"{name:<16s} {fmt12(value)}")
        _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_eigenvalues(args) -> int:
    _seed_note(args)
    p = _params(args)
    rows = [{"k": k, "lambda": eigenvalue(p, k), "multiplicity": multiplicity(p.N, k)}
            for k in range(args.kmax + 1)]
    if args.format == "json":
        _write_output(_json_text({"N": p.N, "s": p.s, "eigenvalues": rows}), args.out)
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "lambda", "multiplicity"])
        for row in rows:
            writer.writerow([row["k"], fmt12(row["lambda"]), row["multiplicity"]])
        _write_output(buf.getvalue(), args.out)
    else:
        lines = [f"{row['k']:<4d} {fmt12(row['lambda']):<20s} {row['multiplicity']}"
                 for row in rows]
        _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _scan_config(args) -> ScanConfig:
    if args.seed is None:
        raise _UsageError("a --seed is required for scan commands")
    cfg = ScanConfig(
        seed=args.seed,
        K=args.K,
        M=args.M,
        n_normal=args.n_normal,
        n_random=args.n_random,
        eps_grid=_floats_csv(args.eps),
        normal_modes=_ints_csv(args.modes),
        bubble_t0=_floats_csv(args.bubbles),
        random_max_degree=args.max_degree,
    )
    if cfg.n_members == 0:
        raise _UsageError("scan configuration selects zero members")
    return cfg


def _scan_jsonl(p: SobolevParams, cfg: ScanConfig) -> tuple[str, bool]:
    opt = OptConfig()
    result = run_scan(p, cfg, opt)
    violation = False
    lines = []
    for index, family, label, report in result.entries:
        record = {"index": index, "family": family, "label": label,
                  "skipped": report is None}
        if report is not None:
            record.update(report.to_json_dict())
            slack = _SANDWICH_SLACK * report.norm_star_sq
            if report.deficit < -slack or report.deficit > report.distance**2 + slack:
                violation = True
        lines.append(_jsonl_line(record))
    summary = result.summary_dict()
    summary.update({
        "families": {"local": len(cfg.eps_grid) * (len(cfg.normal_modes) + cfg.n_normal),
                     "random": cfg.n_random,
                     "bubble": len(cfg.bubble_t0)},
        "K": cfg.K,
        "M": cfg.rule_size,
        "t0_cap": opt.t0_cap,
    })
    lines.append(_jsonl_line(summary))
    return "".join(lines), violation


def cmd_deficit_scan(args) -> int:
    p = _params(args)
    cfg = _scan_config(args)
    text, violation = _scan_jsonl(p, cfg)
    _write_output(text, args.out)
    return EXIT_INVARIANT if violation else EXIT_OK


def cmd_alpha_estimate(args) -> int:
    p = _params(args)
    cfg = _scan_config(args)
    result = run_scan(p, cfg, OptConfig())
    _write_output(_json_text(result.summary_dict()), args.out)
    return EXIT_OK


def cmd_verify_theorem2(args) -> int:
    _seed_note(args)
    p = _params(args)
    wc = compute_constants(p)
    if args.profiles:
        profile_specs = [s.strip() for s in args.profiles.split(";") if s.strip()]
    else:
        r0 = unit_ball_radius(p.N)
        profile_specs = [f"bump:{r0!r},{sharp}" for sharp in (1.0, 2.0, 4.0)]
    if not profile_specs:
        raise _UsageError("no profiles selected")
    rule = gauss_jacobi_rule(p.N, 2 * args.K + 2)
    cases = []
    violation = False
    for spec_text in profile_specs:
        profile = parse_profile(spec_text, p)
        case = verify_theorem2(profile, rule, args.K, constants=wc, n_cells=args.cells)
        cases.append(case)
        if case.margin < -1e-6 * case.lhs:
            violation = True
    doc = {
        "N": p.N,
        "s": p.s,
        "rho": wc.rho,
        "C1": wc.C1,
        "C2": wc.C2,
        "C0": wc.C0,
        "C": wc.C,
        "cases": [c.to_json_dict() for c in cases],
    }
    _write_output(_json_text(doc), args.out)
    return EXIT_INVARIANT if violation else EXIT_OK


def cmd_export_function(args) -> int:
    _seed_note(args)
    p = _params(args)
    profile = parse_profile(args.profile, p)
    rule = gauss_jacobi_rule(p.N, args.M if args.M else 2 * args.K + 2)
    u = pullback_to_sphere(profile, rule, args.K)
    _write_output(_json_text(to_json_dict(u)), args.out)
    return EXIT_OK


# --- parser / config plumbing ---


def _add_common(sub: argparse.ArgumentParser, *, seed: bool = True) -> None:
    # not argparse-required so they may come from a --config file instead
    sub.add_argument("--N", type=int, default=None, help="dimension (integer >= 1)")
    sub.add_argument("--s", type=float, default=None, help="order, 0 < s < N")
    sub.add_argument("--config", type=str, default=None,
                     help="key=value config file; flags override")
    sub.add_argument("--out", type=str, default=None, help="output path (default stdout)")
    if seed:
        sub.add_argument("--seed", type=int, default=None, help="RNG seed")


def _add_scan_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--K", type=int, default=64, help="truncation degree")
    sub.add_argument("--M", type=int, default=None, help="quadrature nodes (default 2K+2)")
    sub.add_argument("--n-normal", dest="n_normal", type=int, default=60,
                     help="random normal-space members per epsilon")
    sub.add_argument("--n-random", dest="n_random", type=int, default=60,
                     help="random coefficient-vector members")
    sub.add_argument("--eps", type=str, default="0.1,0.01,0.001",
                     help="epsilon grid for near-manifold members")
    sub.add_argument("--modes", type=str, default="2,3,4",
                     help="deterministic pure normal modes")
    sub.add_argument("--bubbles", type=str, default="0.2,0.35,0.5,0.65,0.8",
                     help="two-bubble separation parameters t0")
    sub.add_argument("--max-degree", dest="max_degree", type=int, default=16,
                     help="highest random coefficient degree")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sobstab",
        description="Sharp fractional Sobolev constants, deficit scans, and "
                    "weak-norm remainder checks.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("constants", help="table of all closed-form constants")
    _add_common(sub)
    sub.add_argument("--kmax", type=int, default=10, help="highest eigenvalue index")
    sub.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sub.set_defaults(func=cmd_constants)

    sub = subs.add_parser("eigenvalues", help="operator eigenvalues and multiplicities")
    _add_common(sub)
    sub.add_argument("--kmax", type=int, default=10)
    sub.add_argument("--format", choices=("text", "json", "csv"), default="text")
    sub.set_defaults(func=cmd_eigenvalues)

    sub = subs.add_parser("deficit-scan", help="seeded stability scan (JSON lines)")
    _add_common(sub)
    _add_scan_options(sub)
    sub.set_defaults(func=cmd_deficit_scan)

    sub = subs.add_parser("alpha-estimate", help="summary record of a stability scan")
    _add_common(sub)
    _add_scan_options(sub)
    sub.set_defaults(func=cmd_alpha_estimate)

    sub = subs.add_parser("verify-theorem2", help="weak-norm remainder bound harness")
    _add_common(sub)
    sub.add_argument("--K", type=int, default=_DEFAULT_VERIFY_K, help="truncation degree")
    sub.add_argument("--profiles", type=str, default=None,
                     help=f"semicolon-separated profiles ({PROFILE_GRAMMAR}); "
                          "default: bump family on the unit-measure ball")
    sub.add_argument("--cells", type=int, default=2048, help="radial cells for the weak norm")
    sub.set_defaults(func=cmd_verify_theorem2)

    sub = subs.add_parser("export-function", help="zonal expansion of a radial profile as JSON")
    _add_common(sub)
    sub.add_argument("--profile", type=str, required=True, help=PROFILE_GRAMMAR)
    sub.add_argument("--K", type=int, default=64)
    sub.add_argument("--M", type=int, default=None)
    sub.set_defaults(func=cmd_export_function)

    return parser


def _coerce(text: str):
    low = text.strip()
    if low.lower() in ("true", "false"):
        return low.lower() == "true"
    for cast in (int, float):
        try:
            return cast(low)
        except ValueError:
            pass
    return low


def _load_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise _UsageError(f"{path}:{lineno}: expected key=value, got {raw.rstrip()!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = _coerce(value)
    return values


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        # apply config-file defaults to the chosen subcommand before parsing
        if "--config" in argv and argv.index("--config") + 1 < len(argv):
            cfg_path = argv[argv.index("--config") + 1]
            command = argv[0] if argv and not argv[0].startswith("-") else None
            for action in parser._subparsers._group_actions:
                sub = action.choices.get(command)
                if sub is not None:
                    sub.set_defaults(**_load_config(cfg_path))
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
