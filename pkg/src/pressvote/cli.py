"""Command-line front end.

A thin client over the HTTP service: every subcommand builds a request,
posts it to the application (in-process by default, or a remote server
via --server-url) and renders the response as printed values or CSV
files plus a run manifest.

Exit codes: 0 success, 2 usage/config error, 3 runtime error.
"""

import argparse
import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import httpx

from . import __version__

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _client(server_url: str | None) -> httpx.Client:
    if server_url:
        return httpx.Client(base_url=server_url, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import app
    return TestClient(app, raise_server_exceptions=False)


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    try:
        response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise CliError(f"transport failure talking to service: {exc}", EXIT_RUNTIME)
    if response.status_code in (400, 422):
        raise CliError(_detail(response), EXIT_CONFIG)
    if response.status_code != 200:
        raise CliError(_detail(response), EXIT_RUNTIME)
    return response.json()


def _detail(response: httpx.Response) -> str:
    try:
        detail = response.json().get("detail")
    except ValueError:
        return response.text
    if isinstance(detail, dict):
        return detail.get("message", str(detail))
    return str(detail)


def _fmt(value) -> str:
    """Stable scalar formatting: shortest float round-trip, ints as-is."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, columns: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_manifest(out_dir: Path, config: dict, seed: int, files: list[str],
                    started: str, extra: dict | None = None) -> None:
    manifest = {
        "tool_version": __version__,
        "config": config,
        "seed": seed,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "outputs": sorted(files),
    }
    if extra:
        manifest.update(extra)
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- subcommands ----------------------------------------------------------

def cmd_simulate(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CliError(f"config file not found: {args.config}", EXIT_CONFIG)
    except json.JSONDecodeError as exc:
        raise CliError(f"config {args.config} line {exc.lineno}: {exc.msg}", EXIT_CONFIG)
    if args.seed is not None:
        config["seed"] = args.seed
    started = datetime.now(timezone.utc).isoformat()
    with _client(args.server_url) as client:
        result = _post(client, "/simulate", config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stakes = result["stakes"]

    reward_rows = []
    for t, per_voter in enumerate(result["cumulative_rewards"]):
        for i, value in enumerate(per_voter):
            reward_rows.append([t + 1, i, stakes[i], float(value)])
    _write_csv(out_dir / "rewards.csv",
               ["round", "voter", "stake", "cumulative_reward"], reward_rows)

    election_rows = []
    for rnd in result["rounds"]:
        elected = set(rnd["elected"])
        unavailable = set(rnd["unavailable"])
        for j, score in enumerate(rnd["scores"]):
            election_rows.append([rnd["round"], j, float(score),
                                  j in elected, j in unavailable])
    _write_csv(out_dir / "elections.csv",
               ["round", "candidate", "score", "elected", "unavailable"], election_rows)

    trust_rows = []
    for t, matrix in enumerate(result["trust"]):
        for i, row in enumerate(matrix):
            for j, value in enumerate(row):
                trust_rows.append([t + 1, i, j, float(value)])
    _write_csv(out_dir / "trust.csv", ["round", "voter", "candidate", "t"], trust_rows)

    files = ["rewards.csv", "elections.csv", "trust.csv"]
    _write_manifest(out_dir, result["config"], result["config"]["seed"], files, started,
                    extra={"flags": result["flags"]})
    print(f"simulated {len(result['rounds'])} rounds -> {out_dir}")
    for flag in result["flags"]:
        print(f"flag: {flag}")
    return EXIT_OK


def cmd_ldp(args) -> int:
    with _client(args.server_url) as client:
        if args.ldp_cmd == "rate":
            out = _post(client, "/ldp/rate",
                        {"b": args.b, "lambda": getattr(args, "lam"),
                         "Lambda": args.Lam})
            print(f"I(b) = {_fmt(out['rate'])}")
            if out["small_b_regime"]:
                print("note: small-b regime (closed-form minimizer t < 2)")
        elif args.ldp_cmd == "valve":
            out = _post(client, "/ldp/valve",
                        {"epsilon": args.epsilon, "lambda": getattr(args, "lam"),
                         "Lambda": args.Lam})
            print(f"L* = {_fmt(out['L_star'])}")
        elif args.ldp_cmd == "merit":
            out = _post(client, "/ldp/merit",
                        {"epsilon": args.epsilon, "Lambda": args.Lam, "L": args.L})
            print(f"lambda* = {_fmt(out['lambda_star'])}")
        elif args.ldp_cmd == "mc":
            out = _post(client, "/ldp/mc",
                        {"lambda": getattr(args, "lam"), "Lambda": args.Lam,
                         "L": args.L, "horizon": args.horizon,
                         "replicas": args.replicas, "seed": args.seed,
                         "jobs": args.jobs})
            print(f"p = {_fmt(out['probability'])} +/- {_fmt(out['stderr'])} "
                  f"({out['replicas']} replicas, horizon {out['horizon']})")
        else:  # decay
            l_values = [float(v) for v in args.l_values.split(",")]
            out = _post(client, "/ldp/decay",
                        {"lambda": getattr(args, "lam"), "Lambda": args.Lam,
                         "b": args.b, "l_values": l_values,
                         "horizon": args.horizon, "replicas": args.replicas,
                         "seed": args.seed, "jobs": args.jobs})
            for point in out["points"]:
                print(f"l = {point['l']:g}: p = {_fmt(point['probability'])} "
                      f"+/- {_fmt(point['stderr'])}")
            print(f"slope = {_fmt(out['slope'])} (expected {_fmt(out['expected_rate'])})")
    return EXIT_OK


def cmd_ic_check(args) -> int:
    with _client(args.server_url) as client:
        out = _post(client, "/ic-check",
                    {"alpha": args.alpha, "form": args.form, "grid_step": args.grid})
    print(f"max argmax deviation = {_fmt(out['max_deviation'])} "
          f"over {len(out['cells'])} lattice points")
    if not out["passed"]:
        print("incentive compatibility check FAILED")
        return EXIT_RUNTIME
    print("incentive compatibility check passed")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    started = datetime.now(timezone.utc).isoformat()
    with _client(args.server_url) as client:
        out = _post(client, "/reproduce", {"target": args.target, "seed": args.seed})
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for name, table in out["tables"].items():
        path = out_dir / f"{name}.csv"
        _write_csv(path, table["columns"], table["rows"])
        files.append(path.name)
        print(f"wrote {path}")
    _write_manifest(out_dir, {"target": args.target}, args.seed, files, started,
                    extra={"summary": out["summary"]} if out["summary"] else None)
    for key, value in out["summary"].items():
        print(f"{key} = {value}")
    return EXIT_OK


# -- argument parsing -----------------------------------------------------

def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--server-url", default=None,
                        help="remote service URL; defaults to in-process execution")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pressvote",
                                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and export CSVs")
    sim.add_argument("--config", required=True, help="JSON scenario config")
    sim.add_argument("--seed", type=int, default=None, help="override config seed")
    sim.add_argument("--out-dir", default=".", help="output directory")
    _add_common(sim)
    sim.set_defaults(func=cmd_simulate)

    ldp_parser = sub.add_parser("ldp", help="large-deviation analysis")
    ldp_sub = ldp_parser.add_subparsers(dest="ldp_cmd", required=True)

    def rates(p):
        p.add_argument("--lambda", dest="lam", type=float, required=True)
        p.add_argument("--Lambda", dest="Lam", type=float, required=True)

    rate = ldp_sub.add_parser("rate", help="decay rate I(b)")
    rate.add_argument("--b", type=float, required=True)
    rates(rate)
    valve = ldp_sub.add_parser("valve", help="effective selection valve L*")
    valve.add_argument("--epsilon", type=float, required=True)
    rates(valve)
    merit = ldp_sub.add_parser("merit", help="effective merit expectation lambda*")
    merit.add_argument("--epsilon", type=float, required=True)
    merit.add_argument("--Lambda", dest="Lam", type=float, required=True)
    merit.add_argument("--L", type=float, required=True)
    mc = ldp_sub.add_parser("mc", help="Monte Carlo failure-rate estimate")
    rates(mc)
    mc.add_argument("--L", type=float, required=True)
    mc.add_argument("--horizon", type=int, default=2000)
    mc.add_argument("--replicas", type=int, default=100000)
    mc.add_argument("--seed", type=int, default=0)
    mc.add_argument("--jobs", type=int, default=1)
    decay = ldp_sub.add_parser("decay", help="fit the exponential decay slope")
    rates(decay)
    decay.add_argument("--b", type=float, required=True)
    decay.add_argument("--l-values", default="2,4,6,8",
                       help="comma-separated valve scales")
    decay.add_argument("--horizon", type=int, default=2000)
    decay.add_argument("--replicas", type=int, default=100000)
    decay.add_argument("--seed", type=int, default=0)
    decay.add_argument("--jobs", type=int, default=1)
    for p in (rate, valve, merit, mc, decay):
        _add_common(p)
        p.set_defaults(func=cmd_ldp)

    ic = sub.add_parser("ic-check", help="incentive compatibility sweep")
    ic.add_argument("--alpha", type=float, default=0.5)
    ic.add_argument("--form", default="logarithmic",
                    choices=["logarithmic", "quadratic"])
    ic.add_argument("--grid", type=float, default=0.01)
    _add_common(ic)
    ic.set_defaults(func=cmd_ic_check)

    rep = sub.add_parser("reproduce", help="emit figure/table data as CSV")
    rep.add_argument("target",
                     help="one of fig2, fig3, fig4, fig5, fig7, fig8, table1, table2")
    rep.add_argument("--seed", type=int, default=0)
    rep.add_argument("--out-dir", default=".")
    _add_common(rep)
    rep.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
