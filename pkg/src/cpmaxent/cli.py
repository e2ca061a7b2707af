"""Batch command-line front end.

Every verification sweep and pmf computation is reachable as a subcommand;
reports are emitted as JSON (sorted keys, so identical configuration and
seed give byte-identical output), energy paths as two-column CSV.  Exit
status: 0 when all non-vacuous checks pass, 1 on a conclusion failure, 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import combinatorics as comb
from . import pmf as pm
from . import semigroup as sg
from . import verify
from .compound import (
    CompoundingDist,
    ParamVector,
    bernoulli_sum,
    compound,
    compound_bernoulli,
    compound_binomial,
    compound_poisson_mixture,
    compound_poisson_panjer,
)
from .errors import DomainError
from .infotools import Base, entropy, sample_ulc
from .pmf import Pmf


@dataclass
class RunConfig:
    command: str
    tol: float = 1e-9
    tail_eps: float = 1e-12
    base: str = "nat"
    seed: int | None = None
    grid: int = 21
    jobs: int = 1
    output: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tol <= 0 or self.tail_eps <= 0:
            raise DomainError("tol and tail-eps must be positive")


def _parse_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t != ""]


def _parse_floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t != ""]


def parse_q(spec: str, tail_eps: float) -> CompoundingDist:
    """Jump-law constructors: uniform:a,b geometric:p point:k file:path."""
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        a, b = _parse_ints(rest)
        return CompoundingDist.uniform(a, b)
    if kind == "geometric":
        return CompoundingDist.geometric(float(rest), tail_eps)
    if kind == "point":
        return CompoundingDist.point(int(rest))
    if kind == "file":
        with open(rest) as f:
            return CompoundingDist.from_pmf(Pmf.from_json(f.read()))
    raise DomainError(f"unknown jump law spec {spec!r}")


def parse_dist(spec: str, tail_eps: float) -> Pmf:
    """Count-law constructors used by --dist flags."""
    kind, _, rest = spec.partition(":")
    if kind == "poisson":
        return pm.poisson(float(rest), tail_eps)
    if kind == "geometric":
        return pm.geometric(float(rest), offset=0, tail_eps=tail_eps)
    if kind == "uniform":
        a, b = _parse_ints(rest)
        return pm.uniform(a, b)
    if kind == "binomial":
        n, p = rest.split(",")
        return pm.binomial(int(n), float(p))
    if kind == "bernoulli":
        return pm.bernoulli(float(rest))
    if kind == "point":
        return pm.delta(int(rest))
    if kind == "file":
        with open(rest) as f:
            return Pmf.from_json(f.read())
    raise DomainError(f"unknown distribution spec {spec!r}")


def _emit(config: RunConfig, text: str) -> None:
    if config.output:
        with open(config.output, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _report_json(report: verify.VerificationReport) -> str:
    d = report.to_dict()
    d["status"] = report.status
    return json.dumps(d, sort_keys=True, indent=2) + "\n"


def _exit_for(report: verify.VerificationReport) -> int:
    return 1 if report.status == "fail" else 0


def _build_pmf(config: RunConfig, args) -> Pmf:
    sources = [
        args.cpo is not None,
        args.cbin is not None,
        args.cbern is not None,
        args.bsum is not None,
        args.dist is not None,
    ]
    if sum(sources) != 1:
        raise DomainError("give exactly one of --cpo/--cbin/--cbern/--bsum/--dist")
    if args.dist is not None:
        return parse_dist(args.dist, config.tail_eps)
    q = parse_q(args.q, config.tail_eps) if args.q else None
    if q is None:
        raise DomainError("--q is required for compound constructions")
    if args.cpo is not None:
        if args.method == "mixture":
            return compound_poisson_mixture(args.cpo, q, config.tail_eps)
        return compound_poisson_panjer(args.cpo, q, tail_eps=config.tail_eps)
    if args.cbin is not None:
        n, p = args.cbin.split(",")
        return compound_binomial(int(n), float(p), q)
    if args.cbern is not None:
        return compound_bernoulli(args.cbern, q)
    return compound(q, bernoulli_sum(ParamVector(tuple(_parse_floats(args.bsum)))))


def _csv(rows, header: str) -> str:
    lines = [header]
    for a, e in rows:
        lines.append(f"{a!r},{e!r}")
    return "\n".join(lines) + "\n"


def _cmd_pmf(config: RunConfig, args) -> int:
    p = _build_pmf(config, args)
    _emit(config, json.dumps(p.to_dict(), sort_keys=True) + "\n")
    return 0


def _cmd_entropy(config: RunConfig, args) -> int:
    p = _build_pmf(config, args)
    h = entropy(p, Base(config.base))
    _emit(config, json.dumps({"base": config.base, "entropy": h.value}, sort_keys=True) + "\n")
    return 0


def _cmd_maxent_poisson(config: RunConfig, args) -> int:
    q = parse_q(args.q, config.tail_eps)
    report = verify.verify_maxent_poisson(
        q,
        args.lam,
        trials=args.trials,
        seed=config.seed,
        max_support=args.max_support,
        tol=config.tol,
        jobs=config.jobs,
    )
    _emit(config, _report_json(report))
    return _exit_for(report)


def _cmd_maxent_binomial(config: RunConfig, args) -> int:
    q = parse_q(args.q, config.tail_eps)
    report = verify.verify_maxent_binomial(
        q, args.n, args.lam, grid=config.grid, seed=config.seed, tol=config.tol,
        jobs=config.jobs,
    )
    _emit(config, _report_json(report))
    return _exit_for(report)


def _cmd_chi(config: RunConfig, args) -> int:
    report = verify.chi_counterexample()
    base = Base(config.base)
    q = CompoundingDist.uniform(1, 2)
    shown = {
        "compound_binomial": entropy(compound_binomial(2, 0.005, q), base).value,
        "bernoulli_sum": entropy(
            compound(q, bernoulli_sum((0.00125, 0.00875))), base
        ).value,
        "compound_poisson": entropy(compound_poisson_panjer(0.01, q), base).value,
    }
    d = report.to_dict()
    d["status"] = report.status
    d["entropies"] = shown
    d["base"] = config.base
    _emit(config, json.dumps(d, sort_keys=True, indent=2) + "\n")
    return _exit_for(report)


def _cmd_logconcave(config: RunConfig, args) -> int:
    if args.check == "necessary":
        q = parse_q(args.q, config.tail_eps)
        report = verify.check_necessary_condition(args.lam, q, config.tol)
    elif args.check == "bernoulli-sum":
        q = parse_q(args.q, config.tail_eps)
        report = verify.check_bernoulli_sum_lc(_parse_floats(args.p), q, config.tol)
    elif args.check == "q2pt":
        q = parse_q(args.q, config.tail_eps)
        report = verify.check_q2pt(parse_dist(args.dist, config.tail_eps), q, config.tol)
    elif args.check == "geometric":
        report = verify.check_geometric_compound(
            parse_dist(args.dist, config.tail_eps), args.a, config.tol, config.tail_eps
        )
    else:  # weak
        q = parse_q(args.q, config.tail_eps)
        verdict = verify.check_weak_condition(
            parse_dist(args.dist, config.tail_eps), q, config.tol
        )
        _emit(
            config,
            json.dumps(
                {
                    "holds": verdict.holds,
                    "worst_index": verdict.worst_index,
                    "worst_margin": verdict.worst_margin,
                },
                sort_keys=True,
            )
            + "\n",
        )
        return 0 if verdict.holds else 1
    _emit(config, _report_json(report))
    return _exit_for(report)


def _cmd_hansen(config: RunConfig, args) -> int:
    q = parse_q(args.q, config.tail_eps)
    report = verify.check_hansen(
        args.lam, q, n_scan=args.n_scan, m_identity=args.m_identity, tol=config.tol
    )
    _emit(config, _report_json(report))
    return _exit_for(report)


def _cmd_semigroup_path(config: RunConfig, args) -> int:
    q = parse_q(args.q, config.tail_eps)
    if args.dist is not None:
        p = parse_dist(args.dist, config.tail_eps)
    else:
        if config.seed is None:
            raise DomainError("--seed is required when sampling a count law")
        p = sample_ulc(args.max_support, args.lam, config.seed)
    alphas = np.linspace(0.0, 1.0, config.grid)
    path = sg.energy_poisson_path(p, q, alphas, config.tail_eps, slack=config.tol)
    _emit(config, _csv(zip(path.alphas, path.energies), "alpha_or_t,energy"))
    hyp_ok = (
        pm.is_ultra_log_concave(p, config.tol).holds
        and pm.is_log_concave(q.pmf, config.tol).holds
        and pm.is_log_concave(verify.cpo_scan_pmf(float(p.mean()), q), config.tol).holds
    )
    print(
        f"monotone_ok={path.monotone_ok} hypotheses_hold={hyp_ok}",
        file=sys.stderr,
    )
    return 0 if path.monotone_ok or not hyp_ok else 1


def _cmd_binomial_path(config: RunConfig, args) -> int:
    q = parse_q(args.q, config.tail_eps)
    params = ParamVector(tuple(_parse_floats(args.p)))
    ordered = tuple(sorted(params.p, reverse=True))
    t_hi = (ordered[0] - ordered[1]) / 2
    ts = [0.0] if t_hi == 0 else np.linspace(0.0, t_hi, config.grid)
    path = sg.energy_binomial_path(params, q, ts, slack=config.tol)
    _emit(config, _csv(zip(path.ts, path.energies), "alpha_or_t,energy"))
    hyp_ok = (
        pm.is_log_concave(q.pmf, config.tol).holds
        and pm.is_log_concave(path.reference, config.tol).holds
    )
    print(
        f"monotone_ok={path.monotone_ok} hypotheses_hold={hyp_ok}",
        file=sys.stderr,
    )
    return 0 if path.monotone_ok or not hyp_ok else 1


def parse_graph(spec: str) -> comb.SimpleGraph:
    kind, _, rest = spec.partition(":")
    if kind == "path":
        return comb.path_graph(int(rest))
    if kind == "cycle":
        return comb.cycle_graph(int(rest))
    if kind == "complete":
        return comb.complete_graph(int(rest))
    if kind == "star":
        return comb.star_graph(int(rest))
    if kind == "empty":
        return comb.empty_graph(int(rest))
    if kind == "line":
        return comb.line_graph(parse_graph(rest))
    if kind == "file":
        with open(rest) as f:
            return comb.parse_edge_list(f.read())
    raise DomainError(f"unknown graph spec {spec!r}")


def parse_matroid(spec: str) -> comb.SetSystem:
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        n, r = _parse_ints(rest)
        return comb.uniform_matroid(n, r)
    if kind == "free":
        return comb.free_matroid(int(rest))
    if kind == "graphic":
        return comb.graphic_matroid(parse_graph(rest))
    if kind == "file":
        with open(rest) as f:
            return comb.SetSystem.from_json(f.read())
    raise DomainError(f"unknown matroid spec {spec!r}")


def _cmd_graph(config: RunConfig, args) -> int:
    g = parse_graph(args.graph)
    q = parse_q(args.q, config.tail_eps)
    report = comb.graph_entropy_bound(g, q, config.tol)
    d = report.to_dict()
    d["status"] = report.status
    d["counts"] = comb.enumerate_independent_sets(g)
    _emit(config, json.dumps(d, sort_keys=True, indent=2) + "\n")
    return _exit_for(report)


def _cmd_matroid(config: RunConfig, args) -> int:
    m = parse_matroid(args.matroid)
    q = parse_q(args.q, config.tail_eps) if args.q else None
    counts, report = comb.matroid_sequence(m, q, config.tol)
    d = report.to_dict()
    d["status"] = report.status
    d["counts"] = counts
    _emit(config, json.dumps(d, sort_keys=True, indent=2) + "\n")
    return _exit_for(report)


_COMMANDS = {
    "pmf": _cmd_pmf,
    "entropy": _cmd_entropy,
    "maxent-poisson": _cmd_maxent_poisson,
    "maxent-binomial": _cmd_maxent_binomial,
    "chi": _cmd_chi,
    "logconcave": _cmd_logconcave,
    "hansen": _cmd_hansen,
    "semigroup-path": _cmd_semigroup_path,
    "binomial-path": _cmd_binomial_path,
    "graph": _cmd_graph,
    "matroid": _cmd_matroid,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--tail-eps", type=float, default=1e-12, dest="tail_eps")
    common.add_argument("--base", choices=["nat", "bit"], default="nat")
    common.add_argument("--seed", type=int)
    common.add_argument("--grid", type=int, default=21)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--output", help="write to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="cpmaxent",
        description="compound distributions, entropies, and shape/maximum-entropy checks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pmf", parents=[common], help="compute a pmf as JSON")
    p.add_argument("--cpo", type=float, help="compound Poisson rate")
    p.add_argument("--method", choices=["panjer", "mixture"], default="panjer")
    p.add_argument("--cbin", help="compound binomial as n,p")
    p.add_argument("--cbern", type=float, help="compound Bernoulli parameter")
    p.add_argument("--bsum", help="comma-separated Bernoulli parameters")
    p.add_argument("--dist", help="plain count law spec")
    p.add_argument("--q", help="jump law spec")

    p = sub.add_parser("entropy", parents=[common], help="entropy of a pmf")
    for flag, kw in (
        ("--cpo", {"type": float}),
        ("--method", {"choices": ["panjer", "mixture"], "default": "panjer"}),
        ("--cbin", {}),
        ("--cbern", {"type": float}),
        ("--bsum", {}),
        ("--dist", {}),
        ("--q", {}),
    ):
        p.add_argument(flag, **kw)

    p = sub.add_parser("maxent-poisson", parents=[common])
    p.add_argument("--q", required=True)
    p.add_argument("--lambda", type=float, required=True, dest="lam")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-support", type=int, default=30, dest="max_support")

    p = sub.add_parser("maxent-binomial", parents=[common])
    p.add_argument("--q", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--lambda", type=float, required=True, dest="lam")

    sub.add_parser("chi", parents=[common])

    p = sub.add_parser("logconcave", parents=[common])
    p.add_argument(
        "--check",
        choices=["necessary", "bernoulli-sum", "q2pt", "geometric", "weak"],
        required=True,
    )
    p.add_argument("--q")
    p.add_argument("--lambda", type=float, dest="lam")
    p.add_argument("--p", help="comma-separated Bernoulli parameters")
    p.add_argument("--a", type=float, help="geometric jump parameter")
    p.add_argument("--dist", help="count law spec")

    p = sub.add_parser("hansen", parents=[common])
    p.add_argument("--q", required=True)
    p.add_argument("--lambda", type=float, required=True, dest="lam")
    p.add_argument("--n-scan", type=int, default=200, dest="n_scan")
    p.add_argument("--m-identity", type=int, default=50, dest="m_identity")

    p = sub.add_parser("semigroup-path", parents=[common])
    p.add_argument("--q", required=True)
    p.add_argument("--dist", help="explicit count law instead of sampling")
    p.add_argument("--lambda", type=float, dest="lam", help="mean for sampled count law")
    p.add_argument("--max-support", type=int, default=30, dest="max_support")

    p = sub.add_parser("binomial-path", parents=[common])
    p.add_argument("--q", required=True)
    p.add_argument("--p", required=True, help="comma-separated Bernoulli parameters")

    p = sub.add_parser("graph", parents=[common])
    p.add_argument("--graph", required=True)
    p.add_argument("--q", default="point:1")

    p = sub.add_parser("matroid", parents=[common])
    p.add_argument("--matroid", required=True)
    p.add_argument("--q")

    return parser


def run(config: RunConfig, args) -> int:
    """Dispatch a parsed configuration; returns the process exit code."""
    try:
        return _COMMANDS[config.command](config, args)
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    if args.command in ("maxent-poisson", "maxent-binomial") and args.seed is None:
        print("error: --seed is required for stochastic sweeps", file=sys.stderr)
        return 2
    config = RunConfig(
        command=args.command,
        tol=args.tol,
        tail_eps=args.tail_eps,
        base=args.base,
        seed=args.seed,
        grid=args.grid,
        jobs=args.jobs,
        output=args.output,
    )
    return run(config, args)


if __name__ == "__main__":
    sys.exit(main())
