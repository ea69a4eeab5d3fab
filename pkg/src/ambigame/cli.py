"""Command-line front end.

Exit codes: 0 success, 1 validation or check failure, 2 no equilibrium found,
3 internal error. Reports are JSON with sorted keys, so identical inputs and
seeds give byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import DEFAULT
from .equilibrium import (
    CapExceededError,
    DEFAULT_CAP,
    NoConvergence,
    best_response_iteration,
    pure_equilibrium_indices,
    verify_profile,
)
from .game import GameSpec, StrategyProfile, ValidationError
from .gamefile import SCHEMA_VERSION, load_document, game_from_dict, family_from_dict
from .monotone import (
    AssumptionError,
    OscillationError,
    check_monotone_assumptions,
    check_parametric_pair,
    comparative_statics_sweep,
    tarski_iterate,
)
from .satisfaction import check_shape

EXIT_OK, EXIT_INVALID, EXIT_NONE, EXIT_INTERNAL = 0, 1, 2, 3
JOBS_ENV = "AMBIGAME_JOBS"


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def _clean(obj):
    """Make numpy scalars, tuples and dict keys JSON friendly."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _emit(report: dict, output: str | None, echo: bool = True):
    text = json.dumps(_clean({"schema_version": SCHEMA_VERSION, **report}), indent=2, sort_keys=True) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif echo:
        sys.stdout.write(text)


def _table(rows, headers):
    widths = [max(len(str(x)) for x in col) for col in zip(headers, *rows)]
    line = lambda r: "  ".join(str(x).ljust(w) for x, w in zip(r, widths))
    out = [line(headers), line(["-" * w for w in widths])] + [line(r) for r in rows]
    sys.stdout.write("\n".join(out) + "\n")


def _entry(game: GameSpec, profile: StrategyProfile, mode: str, eps: float) -> dict:
    rep = verify_profile(game, profile, mode, eps)
    return {
        "profile": profile.to_json(),
        "pure_actions": profile.pure_indices(),
        "verification": rep.to_json(),
    }


# -- commands -------------------------------------------------------------------


def cmd_validate(args) -> int:
    doc = load_document(args.path)
    game = game_from_dict(doc)
    kind = "structured" if game.structured else "general"
    sys.stderr.write(
        f"ok: {game.n_players} players, types {list(game.type_counts)}, {kind} states, "
        f"{len(game.agents)} player-types\n"
    )
    return EXIT_OK


def cmd_solve(args) -> int:
    game = game_from_dict(load_document(args.path))
    eps = args.tolerance
    report = {"command": "solve", "game": game.name, "mode": args.mode, "method": args.method, "tolerance": eps}
    if args.method == "enumerate":
        found = [StrategyProfile.from_agent_indices(game, idx)
                 for idx in pure_equilibrium_indices(game, args.mode, eps, args.cap)]
        report["equilibria"] = [_entry(game, p, args.mode, eps) for p in found]
    elif args.method == "iterate":
        try:
            res = best_response_iteration(
                game, args.mode, damping=args.damping, max_iter=args.max_iter, tol=args.iter_tol, eps=eps
            )
        except NoConvergence as exc:
            report.update(equilibria=[], failure=str(exc), trajectory_tail=exc.tail)
            _emit(report, args.output)
            return EXIT_NONE
        report["iterations"] = res.iterations
        report["equilibria"] = [_entry(game, res.profile, args.mode, 10 * args.iter_tol)]
    else:
        results = {}
        for d in ("bottom", "top"):
            results[d] = tarski_iterate(game, d, eps, force=args.force)
        report["extremal"] = {
            d: {**r.profile.to_json(), "sweeps": r.sweeps} for d, r in results.items()
        }
        report["equilibria"] = [
            _entry(game, r.profile.to_strategy(game), "action", eps) for r in results.values()
        ]
    report["count"] = len(report["equilibria"])
    _emit(report, args.output)
    return EXIT_OK if report["equilibria"] else EXIT_NONE


def _theorem_suite(game: GameSpec, eps: float, samples: int, seed: int) -> dict:
    from .randomgames import random_profile

    act = set(pure_equilibrium_indices(game, "action", eps))
    dis = set(pure_equilibrium_indices(game, "distribution", eps))
    kinds = {game.attitude(n, tn).kind for n, tn in game.agents}
    out = {
        "pure_action": sorted(act),
        "pure_distribution": sorted(dis),
        "distribution_subset_of_action": dis <= act,
    }
    if kinds == {"enterprising"}:
        out["pure_sets_equal"] = dis == act
    rng = np.random.default_rng(seed)
    agree = prominent = True
    for _ in range(samples):
        prof = random_profile(rng, game, sparsity=0.5)
        a = verify_profile(game, prof, "action", eps).verdict
        d = verify_profile(game, prof, "distribution", eps).verdict
        agree &= a == d
        prominent &= (not d) or a
    if kinds == {"traditional"}:
        out["mode_verdicts_agree"] = agree
    if kinds == {"enterprising"}:
        out["distribution_implies_action"] = prominent
    return out


def cmd_check(args) -> int:
    doc = load_document(args.path)
    if args.suite == "parametric":
        fam = family_from_dict(doc, _param_list(args.param_list))
        games = fam.games()
        pairs = []
        for (l1, g1), (l2, g2) in zip(zip(fam.lambdas, games), zip(fam.lambdas[1:], games[1:])):
            rep = check_parametric_pair(g1, g2)
            pairs.append({"lambdas": [l1, l2], "checks": rep.to_json(), "passed": rep.passed})
        _table([(f"{p['lambdas'][0]}->{p['lambdas'][1]}", name, c["status"])
                for p in pairs for name, c in p["checks"].items()], ["pair", "check", "status"])
        _emit({"command": "check", "suite": "parametric", "pairs": pairs}, args.output, echo=False)
        return EXIT_OK if all(p["passed"] for p in pairs) else EXIT_INVALID
    game = game_from_dict(doc)
    if args.suite == "monotone":
        rep = check_monotone_assumptions(game)
        _table([(k, c.status, len(c.violations)) for k, c in rep.checks.items()], ["check", "status", "violations"])
        _emit({"command": "check", "suite": "monotone", "checks": rep.to_json(), "passed": rep.passed}, args.output, echo=False)
        return EXIT_OK if rep.passed else EXIT_INVALID
    if args.suite == "shape":
        rows, data = [], {}
        for n, tn in game.agents:
            att = game.attitude(n, tn)
            if att.kind == "custom":
                continue
            r = check_shape(att, args.samples, args.seed)
            data[f"{n},{tn}"] = {"kind": att.kind, **r.as_dict()}
            rows.append((f"{n},{tn}", att.kind, r.concave, r.convex, r.quasi_concave, r.strongly_concave, r.strongly_convex))
        _table(rows, ["agent", "kind", "concave", "convex", "quasi_concave", "strongly_concave", "strongly_convex"])
        _emit({"command": "check", "suite": "shape", "agents": data}, args.output, echo=False)
        return EXIT_OK
    res = _theorem_suite(game, args.tolerance, args.samples, args.seed)
    verdicts = {k: v for k, v in res.items() if isinstance(v, bool)}
    _table([(k, v) for k, v in verdicts.items()], ["property", "holds"])
    _emit({"command": "check", "suite": "theorems", **res}, args.output, echo=False)
    return EXIT_OK if all(verdicts.values()) else EXIT_INVALID


def _param_list(text):
    if text is None:
        return None
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_sweep(args) -> int:
    fam = family_from_dict(load_document(args.path), _param_list(args.param_list))
    rep = comparative_statics_sweep(fam, args.tolerance, jobs=args.jobs, force=args.force)
    flagged = [
        {"lambdas": [a, b], "failed": [k for k, c in r.checks.items() if c.status != "pass"]}
        for a, b, r in zip(fam.lambdas, fam.lambdas[1:], rep.pair_reports)
        if not r.passed
    ]
    flagged += [
        {"lambda": lam, "failed": [k for k, c in r.checks.items() if c.status != "pass"]}
        for lam, r in zip(fam.lambdas, rep.assumption_reports)
        if not r.passed
    ]
    _emit({"command": "sweep", **rep.to_json(), "flagged": flagged}, args.output)
    return EXIT_OK if rep.increasing and not flagged else EXIT_INVALID


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ambigame", description="Equilibria of games with set-valued priors.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("path", help="game or family JSON file")
        p.add_argument("--tolerance", type=float, default=DEFAULT.regret, help="regret tolerance epsilon")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=_default_jobs(), help=f"worker count (default from ${JOBS_ENV})")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="pure-profile enumeration cap")
        p.add_argument("--output", "-o", help="write the JSON report here")

    p = sub.add_parser("validate", help="check a game file")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="find and verify equilibria")
    common(p)
    p.add_argument("--mode", choices=("action", "distribution"), default="action")
    p.add_argument("--method", choices=("enumerate", "iterate", "tarski"), default="enumerate")
    p.add_argument("--damping", type=float, default=0.5)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--iter-tol", type=float, default=1e-8)
    p.add_argument("--force", action="store_true", help="skip structural checks before lattice iteration")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="run a property suite")
    common(p)
    p.add_argument("--suite", choices=("monotone", "parametric", "shape", "theorems"), default="monotone")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--param-list", help="comma-separated parameter values (parametric suite)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sweep", help="comparative statics over a parametric family")
    common(p)
    p.add_argument("--param-list", help="comma-separated parameter values overriding the file")
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, AssumptionError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (CapExceededError, OscillationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - top-level guard
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
