"""Command-line entry point.

Subcommands:

* ``simulate``   -- one game from a JSON spec; writes transcript.csv.
* ``montecarlo`` -- the trial harness; writes montecarlo.csv, summary.json,
                    and summary.png.
* ``verify``     -- inequality sweeps; writes/prints a JSON report.
* ``table``      -- (alpha, lambda, upper_bound) CSV over a log-spaced grid,
                    plus lambda_table.png.

Exit codes: 0 success, 1 bound/lemma violations, 2 configuration errors.
All randomness flows from seeds in the spec; the CLI never reads entropy
from the environment.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import specfun, verifier
from .engine import (
    ExperimentSpec,
    SpecError,
    monte_carlo,
    run_continuous_game,
    run_discrete_game,
    write_summary_csv,
    write_summary_json,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_CONFIG = 2


def _apply_override(doc: dict, key: str, raw: str) -> None:
    """Set a dotted-path key in a nested dict; values parse as JSON literals
    with a plain-string fallback; last occurrence wins."""
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = doc
    parts = key.split(".")
    for part in parts[:-1]:
        nxt = node.get(part)
        if not isinstance(nxt, dict):
            nxt = {}
            node[part] = nxt
        node = nxt
    node[parts[-1]] = value


def _load_spec(args) -> ExperimentSpec:
    if not args.spec:
        raise SpecError("--spec is required for this subcommand")
    try:
        with open(args.spec, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise SpecError(f"cannot read spec: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecError(f"{args.spec}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    for item in args.set or []:
        if "=" not in item:
            raise SpecError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        _apply_override(doc, key.strip(), raw)
    return ExperimentSpec.from_dict(doc)


def _out_dir(args) -> str:
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_simulate(args) -> int:
    spec = _load_spec(args)
    if spec.continuous:
        path = spec.path.with_seed(spec.trial_seed(0))
        transcript = run_continuous_game(spec.learner, path, spec.stride)
    else:
        adv = spec.adversary.with_seed(spec.trial_seed(0))
        transcript = run_discrete_game(spec.learner, adv, spec.horizon, spec.stride)
    out = _out_dir(args)
    dest = os.path.join(out, "transcript.csv")
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,regret,player_gain\n")
        for state in transcript.states:
            fh.write(f"{_fmt(state.t)},{_fmt(state.regret.max())},{_fmt(state.player_gain)}\n")
    print(f"wrote {dest} ({len(transcript.states)} sampled states, "
          f"max |<p,r>| = {transcript.max_abs_p_dot_r:.3e})")
    if transcript.note:
        print(f"note: {transcript.note}")
    return EXIT_OK


def cmd_montecarlo(args) -> int:
    spec = _load_spec(args)
    summary = monte_carlo(spec, threads=args.threads)
    out = _out_dir(args)
    csv_path = os.path.join(out, "montecarlo.csv")
    json_path = os.path.join(out, "summary.json")
    write_summary_csv(summary, csv_path)
    write_summary_json(summary, json_path)
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if not args.no_figures:
        from . import figures

        png_path = os.path.join(out, "summary.png")
        figures.render_summary_figure(summary, png_path)
        print(f"wrote {png_path}")
    if summary.violation_count:
        print(f"{summary.violation_count} bound violation(s); see {json_path}",
              file=sys.stderr)
        return EXIT_VIOLATIONS
    print("no bound violations")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = None
    if args.lemma:
        names = [s.strip() for s in args.lemma.split(",") if s.strip()]
    try:
        reports = verifier.run_sweeps(names, threads=args.threads)
    except ValueError as exc:
        raise SpecError(str(exc)) from None
    doc = {r.lemma_id: r.to_dict() for r in reports}
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.out:
        out = _out_dir(args)
        dest = os.path.join(out, "verify.json")
        with open(dest, "w", encoding="utf-8", newline="") as fh:
            fh.write(text + "\n")
        print(f"wrote {dest}")
    else:
        print(text)
    failed = [r.lemma_id for r in reports if not r.passed]
    for r in reports:
        status = "PASS" if r.passed else f"FAIL ({len(r.violations)} violations)"
        print(f"{r.lemma_id}: {status}  points={r.points_checked}  "
              f"worst_margin={r.worst_margin:.3e}", file=sys.stderr)
    return EXIT_VIOLATIONS if failed else EXIT_OK


def cmd_table(args) -> int:
    alpha_max = args.alpha_max
    if alpha_max <= 0:
        raise SpecError("--alpha-max must be positive")
    alphas = np.concatenate([[0.0], np.geomspace(1e-4, alpha_max, 256)])
    lams = specfun.lambda_inv(alphas, tolerance=1e-8)
    upper = specfun.lambda_upper_bound(alphas)
    out = _out_dir(args)
    dest = os.path.join(out, "lambda_table.csv")
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        fh.write("alpha,lambda,upper_bound\n")
        for a, l, u in zip(alphas, lams, upper):
            fh.write(f"{_fmt(a)},{_fmt(l)},{_fmt(u)}\n")
    print(f"wrote {dest}")
    if not args.no_figures:
        from . import figures

        png = os.path.join(out, "lambda_table.png")
        figures.render_lambda_figure(alphas, lams, upper, png)
        print(f"wrote {png}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regretlab",
        description="Expert-prediction games: simulation, Monte Carlo bounds, "
                    "and inequality verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--spec", help="JSON experiment spec")
        p.add_argument("--out", help="output directory (default: cwd)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker pool size (results are thread-count independent)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="dotted-path override applied onto the spec; repeatable")
        p.add_argument("--no-figures", action="store_true",
                       help="skip rendering PNG figures")

    p_sim = sub.add_parser("simulate", help="run one game and write the transcript")
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_mc = sub.add_parser("montecarlo", help="run seeded trials and write CSV/JSON/PNG")
    common(p_mc)
    p_mc.set_defaults(func=cmd_montecarlo)

    p_ver = sub.add_parser("verify", help="run inequality sweeps")
    common(p_ver)
    p_ver.add_argument("--lemma", help="comma-separated sweep ids "
                       f"(default: all of {','.join(sorted(verifier.SWEEPS))})")
    p_ver.set_defaults(func=cmd_verify)

    p_tab = sub.add_parser("table", help="dump the alpha -> lambda(alpha) table")
    common(p_tab)
    p_tab.add_argument("--alpha-max", type=float, default=1e6,
                       help="largest alpha in the log-spaced grid")
    p_tab.set_defaults(func=cmd_table)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
