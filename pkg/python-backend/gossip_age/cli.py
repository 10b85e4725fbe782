"""
gossip-age command line.

    gossip-age ages line --m 7 --p 0.2 --pe 0.3 --beta 0.6 --L 10 --csv ages.csv
    gossip-age ages fc --n 10 --m 4 --L 1.6 --simulate
    gossip-age equilibrium fc --n 10 --L 1.6
    gossip-age compare line --m 7 --iters 2000 --seed 42
    gossip-age sweep line --over beta --range 0.1:1:0.1 --csv beta.csv
    gossip-age simulate graph --graph ring.txt --stability

Exit codes: 0 success, 2 usage or parameter error, 3 comparison failure.
Results go to stdout (or the --csv file); logs go to stderr.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from gossip_age import __version__
from gossip_age.core.config import settings
from gossip_age.core.exceptions import (
    AnalyticUnavailable,
    ComparisonFailed,
    ParameterDomainError,
    SearchCapExceeded,
)
from gossip_age.core.logging import log_run_event, logger
from gossip_age.schemas.results import EquilibriumMode
from gossip_age.schemas.run_spec import RunOutput, RunSpec
from gossip_age.schemas.simulation import SimConfig, SimMode
from gossip_age.schemas.topology import FullyConnected, LinePeriodic, SubscriptionProfile
from gossip_age.services import equilibrium, gossip_sim, validation
from gossip_age.services.core_model import ac_threshold, server_age, subscriber_age
from gossip_age.services.fc_analytics import solve_fc_set_ages
from gossip_age.services.reporting import Report, emit, finite_or_none
from gossip_age.services.topology_io import load_graph

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_COMPARISON_FAILED = 3

# swapped out by the harness self-test
analytic_hook = validation.analytic_node_ages


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_model_flags(parser: argparse.ArgumentParser, topologies: List[str]) -> None:
    parser.add_argument("topology", choices=topologies)
    parser.add_argument("--m", type=int, help="line period or fully-connected subscriber count")
    parser.add_argument("--n", type=int, help="users in the fully-connected network")
    parser.add_argument("--p", type=float, default=0.2, help="gossip success probability per edge")
    parser.add_argument("--pe", type=float, default=0.3, help="event update probability")
    parser.add_argument("--beta", type=float, default=0.6, help="server sampling rate")
    parser.add_argument("--L", type=float, default=10.0, help="age compatibility tolerance")
    output = parser.add_mutually_exclusive_group()
    output.add_argument("--json", action="store_true", help="print the JSON envelope")
    output.add_argument("--csv", metavar="PATH", help="write plot data to PATH")
    parser.add_argument("--config", metavar="FILE", help="JSON run spec overriding the flags")


def _add_cost_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--cost-a", type=float, help="defaults to $COST_A")
    parser.add_argument("--cost-q", type=float, help="defaults to $COST_Q")
    parser.add_argument(
        "--mode",
        choices=[mode.value for mode in EquilibriumMode],
        default=EquilibriumMode.SERVER_PREFERRED.value,
        help="AC-stable profile the server plans for",
    )


def _add_sim_flags(parser: argparse.ArgumentParser, mode_flag: str) -> None:
    group = parser.add_argument_group("simulation")
    group.add_argument("--slots", type=int)
    group.add_argument("--iters", type=int)
    group.add_argument("--seed", type=int, help="defaults to $GOSSIP_AGE_SEED")
    group.add_argument("--burn-in", type=int)
    group.add_argument(mode_flag, dest="sim_mode", choices=[mode.value for mode in SimMode])
    group.add_argument("--block-size", type=int)
    group.add_argument("--workers", type=int)
    group.add_argument("--progress", action="store_true")
    group.add_argument(
        "--full-scale",
        action="store_true",
        help=f"ensemble mode, {settings.FULL_SLOTS} slots, {settings.FULL_ITERATIONS} iterations",
    )


def _add_z_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--z", type=float, help="z-score threshold, defaults to $Z_THRESHOLD")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gossip-age",
        description="Version age and subscription equilibria of timely gossip networks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    ages = commands.add_parser("ages", help="analytical node ages and the AC threshold")
    _add_model_flags(ages, ["line", "fc"])
    ages.add_argument("--simulate", action="store_true", help="add simulated means")
    _add_sim_flags(ages, "--sim-mode")

    eq = commands.add_parser("equilibrium", help="Stackelberg sampling rate and subscription level")
    _add_model_flags(eq, ["line", "fc"])
    _add_cost_flags(eq)

    compare = commands.add_parser("compare", help="z-score the analytics against simulation")
    _add_model_flags(compare, ["line", "fc"])
    _add_sim_flags(compare, "--mode")
    _add_z_flag(compare)

    sweep = commands.add_parser("sweep", help="plot data over m or beta")
    _add_model_flags(sweep, ["line", "fc"])
    _add_cost_flags(sweep)
    sweep.add_argument("--over", choices=["m", "beta"], required=True)
    sweep.add_argument("--range", required=True, metavar="A:B:STEP")

    simulate = commands.add_parser("simulate", help="Monte Carlo ages on any topology")
    _add_model_flags(simulate, ["line", "fc", "graph"])
    simulate.add_argument("--cells", type=int, default=1, help="line cells closed into a ring")
    simulate.add_argument("--graph", metavar="FILE", help="edge-list graph file")
    simulate.add_argument("--stability", action="store_true", help="empirical AC-stability verdicts")
    _add_sim_flags(simulate, "--mode")
    _add_z_flag(simulate)

    commands.add_parser("schema", help="print the JSON schema of the output envelope")

    serve = commands.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=settings.PORT)
    return parser


# ---------------------------------------------------------------------------
# Run spec assembly
# ---------------------------------------------------------------------------


def _sim_section(args: argparse.Namespace) -> Dict[str, Any]:
    base = SimConfig.full_scale() if args.full_scale else SimConfig()
    section = base.model_dump(mode="json")
    overrides = {
        "slots": args.slots,
        "iterations": args.iters,
        "burn_in": args.burn_in,
        "seed": args.seed,
        "mode": args.sim_mode,
        "block_size": args.block_size,
        "workers": args.workers,
    }
    section.update({key: value for key, value in overrides.items() if value is not None})
    section["progress"] = args.progress
    return section


def _merge(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def build_run_spec(args: argparse.Namespace) -> RunSpec:
    # settings keys in the config file must land before any default is read
    document = settings.update_from_file(args.config) if args.config else {}
    raw: Dict[str, Any] = {
        "command": args.command,
        "topology": args.topology,
        "m": args.m,
        "n": args.n,
        "params": {"p_e": args.pe, "p": args.p, "beta": args.beta, "L": args.L},
        "output": "json" if args.json else ("csv" if args.csv else "table"),
        "csv_path": args.csv,
    }
    if hasattr(args, "cost_a"):
        raw["cost"] = {
            "a": settings.COST_A if args.cost_a is None else args.cost_a,
            "q": settings.COST_Q if args.cost_q is None else args.cost_q,
        }
        raw["mode"] = args.mode
    if args.command in ("compare", "simulate") or getattr(args, "simulate", False):
        raw["sim"] = _sim_section(args)
    for name in ("simulate", "stability", "cells", "graph", "over", "range"):
        if getattr(args, name, None) is not None:
            raw[name] = getattr(args, name)
    if hasattr(args, "z"):
        raw["z_threshold"] = settings.Z_THRESHOLD if args.z is None else args.z

    if document:
        # accepts a bare spec or a previous output envelope
        document = document.get("run_spec", document)
        overlay = {key: value for key, value in document.items() if not key.isupper()}
        raw = _merge(raw, overlay)
    return RunSpec.model_validate(raw)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _analytic_topology(spec: RunSpec):
    if spec.topology == "line":
        return LinePeriodic(m=spec.m)
    return FullyConnected(n=spec.n, m_sub=spec.m)


def cmd_ages(spec: RunSpec, out) -> None:
    params = spec.params
    topology = _analytic_topology(spec)
    ages = validation.analytic_node_ages(topology, params)
    threshold = ac_threshold(params)
    simulation = gossip_sim.run(topology, params, spec.sim) if spec.simulate else None

    rows: List[List[Any]] = []
    for node, age in enumerate(ages):
        estimate = simulation.nodes[node] if simulation else None
        rows.append([
            node,
            finite_or_none(float(age)),
            estimate.mean_age if estimate else None,
            estimate.stderr if estimate else None,
        ])
    rows.append(["threshold", threshold, None, None])

    result: Dict[str, Any] = {
        "node_ages": [finite_or_none(float(age)) for age in ages],
        "server_age": server_age(params),
        "subscriber_age": subscriber_age(params),
        "threshold": threshold,
        "simulation": simulation.model_dump(mode="json") if simulation else None,
    }
    if isinstance(topology, FullyConnected):
        table = solve_fc_set_ages(topology.n, topology.m_sub, params)
        if not table.empty:
            result["set_ages"] = [
                finite_or_none(table.x(k)) for k in range(1, topology.n - topology.m_sub + 1)
            ]
    nonsubscribers = [age for age, action in zip(ages, SubscriptionProfile(topology=topology).actions) if not action]
    if not nonsubscribers:
        verdict = "every user subscribes"
    elif max(nonsubscribers) < threshold:
        verdict = "every non-subscriber meets the AC constraint"
    else:
        verdict = "some non-subscriber violates the AC constraint"
    notes = [f"x_R = {server_age(params):.6f}  x_S = {subscriber_age(params):.6f}  L*x_S = {threshold:.6f}", verdict]
    report = Report(
        title=f"expected ages, {spec.topology} m={spec.m}" + (f" n={spec.n}" if spec.n else ""),
        columns=["node", "age", "sim_mean", "sim_stderr"],
        rows=rows,
        result=result,
        notes=notes,
    )
    emit(spec, report, out)


def cmd_equilibrium(spec: RunSpec, out) -> None:
    params = spec.params
    if spec.topology == "line":
        result = equilibrium.line_stackelberg(params.p, params.L, params.p_e, spec.cost, spec.mode)
    else:
        result = equilibrium.fc_stackelberg(spec.n, params.p, params.L, params.p_e, spec.cost, spec.mode)
    rows = [
        [entry.m, entry.beta_star.value, entry.beta_star.kind.value,
         entry.subscriber_fraction, entry.cost, entry.utility]
        for entry in result.audit
    ]
    if result.feasible:
        rate = "-> 0 (limit)" if result.beta_limit_zero else f"{result.beta_star:.6f}"
        notes = [
            f"equilibrium: m = {result.m}  beta* {rate}  F_S = {result.subscriber_fraction:.6f}"
            f"  cost = {result.cost:.6f}  utility = {result.utility:.6f}"
        ]
    else:
        notes = ["no subscription level is sustainable; the server does not sample"]
    report = Report(
        title=f"Stackelberg equilibrium, {spec.topology} ({spec.mode.value})",
        columns=["m", "beta_star", "beta_kind", "subscriber_fraction", "cost", "utility"],
        rows=rows,
        result=result.model_dump(mode="json"),
        notes=notes,
    )
    emit(spec, report, out)


def cmd_compare(spec: RunSpec, out) -> None:
    comparison = validation.compare(
        _analytic_topology(spec), spec.params, spec.sim, spec.z_threshold, analytic=analytic_hook
    )
    rows = [
        [row.node, row.analytic, row.simulated, row.stderr, row.z, row.relative_deviation]
        for row in comparison.rows
    ]
    verdict = "PASS" if comparison.passed else "FAIL"
    report = Report(
        title=f"analytic vs simulation, {spec.topology} m={spec.m}" + (f" n={spec.n}" if spec.n else ""),
        columns=["node", "analytic", "simulated", "stderr", "z", "relative_deviation"],
        rows=rows,
        result=comparison.model_dump(mode="json"),
        notes=[f"{verdict} at |z| <= {comparison.z_threshold} (worst |z| = {comparison.worst_z:.3f})"],
    )
    emit(spec, report, out)
    validation.assert_agreement(comparison)


def _parse_range(text: str, integer: bool) -> List[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ParameterDomainError(f"malformed range {text!r}; expected A:B:STEP")
    try:
        start, stop, step = (int(part) if integer else float(part) for part in parts)
    except ValueError:
        raise ParameterDomainError(f"malformed range {text!r}; expected A:B:STEP")
    if not step > 0 or not stop >= start:
        raise ParameterDomainError(f"malformed range {text!r}; need A <= B and STEP > 0")
    if integer:
        return list(range(start, stop + 1, step))
    count = int((stop - start) / step + 1e-9) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _sweep_over_m(spec: RunSpec) -> List[List[Any]]:
    params = spec.params
    rows = []
    for m in _parse_range(spec.range, integer=True):
        if spec.topology == "line":
            beta = equilibrium.line_beta_star(m, params.p, params.L, spec.mode)
            fraction = 1.0 / m
        else:
            beta = equilibrium.fc_beta_star(m, spec.n, params.p, params.L)
            fraction = m / spec.n
        if not beta.feasible:
            continue
        charge = spec.cost(beta.cost_argument)
        rows.append([m, beta.cost_argument, fraction, charge, fraction - charge])
    return rows


def _sweep_over_beta(spec: RunSpec) -> List[List[Any]]:
    rows = []
    for beta in _parse_range(spec.range, integer=False):
        params = spec.params.with_beta(beta)
        if spec.topology == "line":
            try:
                m_star = equilibrium.line_m_star(params)
                m_star_star = equilibrium.line_m_star_star(params)
            except SearchCapExceeded as exc:
                logger.warning(f"beta={beta}: {exc}")
                continue
            fraction = 1.0 / (m_star_star if spec.mode is EquilibriumMode.WORST_CASE else m_star)
        else:
            m_star = m_star_star = equilibrium.fc_m_star(spec.n, params)
            fraction = m_star / spec.n
        charge = spec.cost(beta)
        rows.append([beta, m_star, m_star_star, fraction, charge, fraction - charge])
    return rows


def cmd_sweep(spec: RunSpec, out) -> None:
    if spec.over == "m":
        columns = ["m", "beta_star", "subscriber_fraction", "cost", "utility"]
        rows = _sweep_over_m(spec)
    else:
        columns = ["beta", "m_star", "m_star_star", "subscriber_fraction", "cost", "utility"]
        rows = _sweep_over_beta(spec)
    if not rows:
        logger.warning(f"sweep over {spec.over} in {spec.range} has no feasible point")
    report = Report(
        title=f"sweep over {spec.over}, {spec.topology}",
        columns=columns,
        rows=rows,
        result={"columns": columns, "rows": rows},
    )
    emit(spec, report, out)


def cmd_simulate(spec: RunSpec, out) -> None:
    params = spec.params
    if spec.topology == "graph":
        profile_topology = load_graph(spec.graph)
        simulated = profile_topology
    elif spec.topology == "line":
        profile_topology = LinePeriodic(m=spec.m)
        simulated = gossip_sim.build_line_segment(spec.m, spec.cells)
    else:
        profile_topology = FullyConnected(n=spec.n, m_sub=spec.m)
        simulated = profile_topology
    simulation = gossip_sim.run(simulated, params, spec.sim)

    result: Dict[str, Any] = {"simulation": simulation.model_dump(mode="json")}
    notes = [f"server: mean age {simulation.server.mean_age:.6f} (x_R = {server_age(params):.6f})"]
    if spec.stability:
        stability = gossip_sim.empirical_stability(
            SubscriptionProfile(topology=profile_topology), params, spec.sim, spec.z_threshold
        )
        result["stability"] = stability.model_dump(mode="json")
        notes.append(f"AC threshold L*x_S = {stability.threshold:.6f}")
        notes.extend(f"node {user.node}: {user.verdict.value} (age {user.age:.6f})" for user in stability.users)
    report = Report(
        title=f"simulation, {simulation.topology_label}",
        columns=["node", "mean_age", "stderr", "samples"],
        rows=[[e.node, e.mean_age, e.stderr, e.samples] for e in simulation.nodes],
        result=result,
        notes=notes,
    )
    emit(spec, report, out)


COMMANDS = {
    "ages": cmd_ages,
    "equilibrium": cmd_equilibrium,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _validation_reason(exc: ValidationError) -> str:
    error = exc.errors()[0]
    message = error["msg"].removeprefix("Value error, ")
    location = ".".join(str(part) for part in error["loc"])
    return f"{location}: {message}" if location else message


def _usage_error(reason: str) -> int:
    print(f"gossip-age: error: {reason}", file=sys.stderr)
    return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(json.dumps(RunOutput.model_json_schema(), indent=2, sort_keys=True))
        return EXIT_OK
    if args.command == "serve":
        import uvicorn

        uvicorn.run("gossip_age.main:app", host=args.host, port=args.port)
        return EXIT_OK

    try:
        spec = build_run_spec(args)
        COMMANDS[spec.command](spec, sys.stdout)
    except ValidationError as exc:
        return _usage_error(_validation_reason(exc))
    except (ParameterDomainError, SearchCapExceeded, AnalyticUnavailable) as exc:
        return _usage_error(str(exc))
    except (OSError, ValueError) as exc:
        return _usage_error(str(exc))
    except ComparisonFailed as exc:
        logger.error(f"comparison failed: {exc}")
        return EXIT_COMPARISON_FAILED
    log_run_event(spec.command, {"topology": spec.topology, "output": spec.output})
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
