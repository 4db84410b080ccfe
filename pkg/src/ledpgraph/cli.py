"""Command-line entry point.

Every command prints one JSON document on stdout (or to ``--output``) and a
short human-readable summary on stderr. Exit codes: 0 ok, 2 invariant
violation under ``--check``, 3 usage or input error, 4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from . import coloring, densest, kcore, ordering
from .graph import (
    DENSEST_CAP,
    CapExceeded,
    Graph,
    GraphFormatError,
    density_of,
    exact_core_numbers,
    exact_densest_subset,
    format_edge_list,
    graph_stats,
    load_edge_list,
    log_n,
    parse_generator,
)
from .noise import NoiseSource

EXIT_OK, EXIT_INVARIANT, EXIT_USAGE, EXIT_CAP = 0, 2, 3, 4

COMMANDS = ("kcore-exact", "kcore-dp", "kcore-levels", "densest", "densest-1round", "ordering", "coloring", "eval", "generate")
EVAL_TARGETS = (
    "kcore-dp", "kcore-levels", "densest", "densest-1round",
    "ordering", "ordering-low-rounds", "coloring", "coloring-low-rounds",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ledpgraph", description="Locally edge-private graph algorithms built on multidimensional AboveThreshold.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--input", "-i", help="edge-list file")
    src.add_argument("--generate", "-g", help="generator spec, e.g. gnp:300:0.05:1 or union:clique:5,path:5")
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zero-noise", action="store_true", help="replace every noise draw by its zero-noise value")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--step", type=float, default=None, help="additive peeling step (default 60 ln n / eps)")
    p.add_argument("--schedule", choices=("additive", "multiplicative"), default="additive")
    p.add_argument("--fast", action="store_true", help="geometric-sampling peel phases (multiplicative schedule)")
    p.add_argument("--low-rounds", action="store_true", help="level-based variant for densest, ordering and coloring")
    p.add_argument("--alpha", type=float, default=None, help="densest cutoff (default 120 ln n / eps)")
    p.add_argument("--threshold-override", type=float, default=None)
    p.add_argument("--literal-loop", action="store_true", help="coloring: re-check every (vertex, color) pair each step")
    p.add_argument("--target", choices=EVAL_TARGETS, default="kcore-dp", help="algorithm evaluated by 'eval'")
    p.add_argument("--transcript", action="store_true", help="include the MAT transcript in the output")
    p.add_argument("--timing", action="store_true", help="include wall-clock times (output is then not reproducible)")
    p.add_argument("--check", action="store_true", help="verify structural invariants; exit 2 on a violation")
    p.add_argument("--output", "-o", help="write the result here instead of stdout")
    return p


# ------------------------------------------------------------------ plumbing


def _load(args) -> Graph:
    if args.input:
        return load_edge_list(args.input)
    if args.generate:
        return parse_generator(args.generate)
    raise UsageError("one of --input or --generate is required")


def _source(args) -> NoiseSource:
    return NoiseSource.zero() if args.zero_noise else NoiseSource(args.seed)


def _trial_source(args, t: int) -> NoiseSource:
    return NoiseSource.zero() if args.zero_noise else NoiseSource(args.seed).derive(t)


def _check_private(args) -> None:
    if not args.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    if args.command in ("kcore-levels", "eval") or args.low_rounds or args.schedule == "multiplicative":
        if not args.eta > 0:
            raise UsageError("--eta must be positive")


def _peel_config(args) -> kcore.PeelConfig:
    if args.fast and args.schedule != "multiplicative":
        raise UsageError("--fast needs --schedule multiplicative")
    return kcore.PeelConfig(args.epsilon, step=args.schedule, eta=args.eta, step_size=args.step, fast_inner_loop=args.fast)


def _run_kcore_dp(g, args, src):
    cfg = _peel_config(args)
    if cfg.step == "additive":
        return kcore.dp_core_additive(g, cfg, src, check=args.check)
    return kcore.dp_core_multiplicative(g, cfg, src, check=args.check)


def _band(exact, labels, phi, zeta):
    return np.count_nonzero((labels < exact / phi - zeta) | (labels > phi * exact + zeta))


# ------------------------------------------------------------------ commands


def cmd_kcore_exact(g, args):
    core = exact_core_numbers(g)
    return {"algorithm": "kcore-exact", "labels": core.tolist(), "degeneracy": int(core.max()) if g.n else 0}, []


def cmd_kcore_dp(g, args):
    _check_private(args)
    est = _run_kcore_dp(g, args, _source(args))
    out = est.to_dict()
    problems = []
    if args.check:
        ks = set(_peel_config(args).schedule(g.n)) | {0.0}
        if any(x not in ks for x in est.labels.tolist()):
            problems.append("labels outside the threshold schedule")
        if est.rounds > g.n * max(1, len(ks)) + len(ks):
            problems.append("round count exceeds the pass bound")
    if args.transcript:
        out["transcript"] = est.transcript.to_dict()
    return out, problems


def cmd_kcore_levels(g, args):
    _check_private(args)
    est = kcore.dp_core_levels(g, args.epsilon, args.eta, _source(args))
    out = est.to_dict()
    out["levels"] = est.levels.tolist()
    problems = []
    if args.check:
        if est.rounds > kcore.round_bound(g.n):
            problems.append("round count exceeds ceil(4 log2^2 n)")
        bad = kcore.level_invariant_violations(g, est.levels, args.epsilon, args.eta)
        if bad:
            problems.append(f"level invariants violated at {len(bad)} vertices")
    if args.transcript:
        out["transcript"] = est.transcript.to_dict()
    return out, problems


def _rho_lower(g: Graph) -> float:
    """rho* when enumeration is possible, else the lower bound d/2 from the densest core."""
    if g.n <= DENSEST_CAP:
        return float(exact_densest_subset(g).density)
    return graph_stats(g).degeneracy / 2.0


def _densest(g, args, src):
    if args.low_rounds:
        cores = kcore.dp_core_levels(g, args.epsilon, args.eta, src)
        gamma = 2.0 + args.eta
    else:
        cfg = kcore.PeelConfig(args.epsilon, step_size=args.step)
        cores = kcore.dp_core_additive(g, cfg, src)
        gamma = 1.0
    subset = densest.densest_from_cores(cores, gamma=gamma, alpha=args.alpha)
    return cores, subset, gamma


def cmd_densest(g, args):
    _check_private(args)
    if g.n == 0:
        raise UsageError("graph has no vertices")
    cores, subset, gamma = _densest(g, args, _source(args))
    rep = density_of(g, subset)
    bound = _rho_lower(g) / (2 * gamma) - 240.0 * log_n(g.n) / args.epsilon
    out = {
        "algorithm": "densest-levels" if args.low_rounds else "densest-additive",
        "subset": list(rep.subset),
        "estimated_density": None,
        "true_density": float(rep.density),
        "bound_rhs": bound,
        "rounds": cores.rounds,
    }
    return out, []


def cmd_densest_1round(g, args):
    _check_private(args)
    if g.n > DENSEST_CAP:
        raise CapExceeded(f"densest-1round enumerates subsets and is capped at n <= {DENSEST_CAP}, got n={g.n}")
    if g.n == 0:
        raise UsageError("graph has no vertices")
    eps = math.inf if args.zero_noise else args.epsilon
    rr = densest.randomize_response(g, eps, _source(args))
    res = densest.one_round_densest(rr)
    problems = []
    if args.check:
        e = densest.estimate_edges(rr, res.subset)
        if e.raw_count != res.raw_count or not math.isclose(e.estimate, res.estimated_edges):
            problems.append("estimator does not match its affine formula")
    rho_star = float(exact_densest_subset(g).density)
    bound = rho_star if rr.p >= 1 else rho_star - densest.one_round_bound(g.n, args.epsilon)
    out = {
        "algorithm": "densest-1round",
        "subset": list(res.subset),
        "estimated_density": res.estimated_density,
        "true_density": float(density_of(g, res.subset).density),
        "bound_rhs": bound,
        "rounds": 1,
    }
    return out, problems


def _ordering(g, args, src):
    if args.low_rounds:
        return ordering.dp_ordering_low_rounds(g, args.epsilon, args.eta, src)
    return ordering.dp_ordering(g, args.epsilon, src, step_size=args.step)


def cmd_ordering(g, args):
    _check_private(args)
    o = _ordering(g, args, _source(args))
    out = ordering.ordering_report(g, o)
    out["rounds"] = o.transcript.round_count
    problems = []
    if args.check:
        if not o.is_permutation(g.n):
            problems.append("ordering is not a permutation")
        if not args.low_rounds and ordering.removal_consistency_violations(g, o):
            problems.append("out-degree differs from induced degree at removal")
        if args.low_rounds and o.transcript.round_count > kcore.round_bound(g.n):
            problems.append("round count exceeds ceil(4 log2^2 n)")
    if args.transcript:
        out["transcript"] = o.transcript.to_dict()
    return out, problems


def _coloring(g, args, src):
    if args.low_rounds:
        return coloring.dp_color_low_rounds(
            g, args.epsilon, args.eta, src, args.threshold_override, args.literal_loop
        )
    return coloring.dp_color(g, args.epsilon, src, args.threshold_override, args.literal_loop)


def cmd_coloring(g, args):
    _check_private(args)
    if g.n == 0:
        raise UsageError("graph has no vertices")
    col = _coloring(g, args, _source(args))
    out = coloring.coloring_report(g, col, graph_stats(g).degeneracy, args.low_rounds)
    out["rounds"] = col.round_count
    problems = []
    if args.check:
        if coloring.color_choice_violations(g, col):
            problems.append("a vertex took a color its neighbor had banned")
        if np.any(coloring.defect_of(g, col).defect > g.degrees):
            problems.append("defect exceeds degree")
    if args.transcript:
        out["transcript"] = col.transcript.to_dict()
    return out, problems


def _eval_trial(g, args, src, exact, stats):
    """One trial of ``args.target``: (record, value inside bound?)."""
    eps, eta, ln = args.epsilon, args.eta, log_n(g.n)
    t = args.target
    if t in ("kcore-dp", "kcore-levels"):
        if t == "kcore-dp":
            est = _run_kcore_dp(g, args, src)
            phi = 1.0 if args.schedule == "additive" else 1.0 + eta
            zeta = 120.0 * ln / eps
        else:
            est = kcore.dp_core_levels(g, eps, eta, src)
            phi, zeta = 2.0 + eta, 240.0 * ln / eps
        err = np.abs(est.labels - exact)
        violations = int(_band(exact, est.labels, phi, zeta))
        rec = {
            "labels": est.labels.tolist(),
            "errors": err.tolist(),
            "max_error": float(err.max()) if g.n else 0.0,
            "mean_error": float(err.mean()) if g.n else 0.0,
            "band_violations": violations,
            "rounds": est.rounds,
        }
        return rec, violations == 0, {"phi": phi, "zeta": zeta}
    if t in ("ordering", "ordering-low-rounds"):
        low = t == "ordering-low-rounds"
        o = ordering.dp_ordering_low_rounds(g, eps, eta, src) if low else ordering.dp_ordering(g, eps, src, step_size=args.step)
        val = ordering.orientation_outdegrees(g, o).max_out_degree
        bound = ordering.out_degree_bound(g, eps, o.provenance, eta, stats.degeneracy)
        return {"max_out_degree": val, "rounds": o.transcript.round_count}, val <= bound, {"max_out_degree": bound}
    if t in ("coloring", "coloring-low-rounds"):
        low = t == "coloring-low-rounds"
        col = (coloring.dp_color_low_rounds(g, eps, eta, src, args.threshold_override, args.literal_loop) if low
               else coloring.dp_color(g, eps, src, args.threshold_override, args.literal_loop))
        val = coloring.defect_of(g, col).max_defect
        bound = coloring.defect_bound(g.n, eps)
        rec = {"max_defect": val, "distinct_colors": col.palette_bound, "rounds": col.round_count}
        return rec, val <= bound, {"max_defect": bound}
    if t == "densest":
        cores, subset, gamma = _densest(g, args, src)
        rho = float(density_of(g, subset).density)
        bound = _rho_lower(g) / (2 * gamma) - 240.0 * ln / eps
        return {"subset": subset, "density": rho, "rounds": cores.rounds}, rho >= bound, {"density": bound}
    if t == "densest-1round":
        if g.n > DENSEST_CAP:
            raise CapExceeded(f"densest-1round is capped at n <= {DENSEST_CAP}, got n={g.n}")
        res = densest.one_round_densest(densest.randomize_response(g, math.inf if args.zero_noise else eps, src))
        rho = float(density_of(g, res.subset).density)
        bound = float(exact_densest_subset(g).density) - densest.one_round_bound(g.n, eps)
        return {"subset": list(res.subset), "density": rho, "rounds": 1}, rho >= bound, {"density": bound}
    raise UsageError(f"unknown eval target {t!r}")


def cmd_eval(g, args):
    _check_private(args)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if g.n == 0:
        raise UsageError("graph has no vertices")
    stats = graph_stats(g)
    exact = exact_core_numbers(g).astype(np.float64)
    records, inside, bound = [], 0, {}
    for t in range(args.trials):
        start = time.perf_counter()
        rec, ok, bound = _eval_trial(g, args, _trial_source(args, t), exact, stats)
        rec = {"trial": t, "inside": bool(ok), **rec}
        if args.timing:
            rec["wall_time"] = time.perf_counter() - start
        records.append(rec)
        inside += ok
    out = {
        "target": args.target,
        "trials": args.trials,
        "n": g.n,
        "m": g.m,
        "epsilon": args.epsilon,
        "eta": args.eta,
        "seed": None if args.zero_noise else args.seed,
        "degeneracy": stats.degeneracy,
        "bound_rhs": bound,
        "fraction_inside": inside / args.trials,
        "per_trial": records,
    }
    for key in ("max_error", "max_out_degree", "max_defect", "density"):
        if key in records[0]:
            vals = [r[key] for r in records]
            out[f"worst_{key}"] = min(vals) if key == "density" else max(vals)
    problems = [] if inside == args.trials or not args.check else [f"{args.trials - inside} trial(s) outside the bound"]
    return out, problems


def cmd_generate(g, args):
    return format_edge_list(g), []


HANDLERS = {
    "kcore-exact": cmd_kcore_exact,
    "kcore-dp": cmd_kcore_dp,
    "kcore-levels": cmd_kcore_levels,
    "densest": cmd_densest,
    "densest-1round": cmd_densest_1round,
    "ordering": cmd_ordering,
    "coloring": cmd_coloring,
    "eval": cmd_eval,
    "generate": cmd_generate,
}


def _summary(command: str, result) -> str:
    if isinstance(result, str):
        return f"{command}: wrote {result.count(chr(10))} lines"
    keys = ("algorithm", "target", "rounds", "max_out_degree", "max_defect", "distinct_colors",
            "true_density", "fraction_inside", "degeneracy")
    parts = [f"{k}={result[k]}" for k in keys if k in result and result[k] is not None]
    return f"{command}: " + " ".join(parts)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        g = _load(args)
        result, problems = HANDLERS[args.command](g, args)
    except CapExceeded as exc:
        print(f"ledpgraph: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (UsageError, GraphFormatError, OSError, ValueError) as exc:
        print(f"ledpgraph: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = result if isinstance(result, str) else json.dumps(result, sort_keys=True) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(_summary(args.command, result), file=sys.stderr)
    for p in problems:
        print(f"ledpgraph: invariant violated: {p}", file=sys.stderr)
    return EXIT_INVARIANT if problems else EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
