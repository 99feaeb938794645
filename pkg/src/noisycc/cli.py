"""Command-line client for the noisycc service.

All compute happens in the service (start it with ``noisycc serve``); the
CLI validates configs, posts requests, and writes records, CSVs, and
tables to local files. Exit codes: 0 on success, 2 on configuration
errors, 1 on transport failures.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx
from pydantic import ValidationError

from .experiment import final_fitnesses_from_csv, write_records
from .schemas import ComparisonTable, ExperimentConfig, RunRecord, RunResponse

DEFAULT_BASE_URL = "http://127.0.0.1:8749"
CONFIG_ERROR = 2


def make_client(base_url: str) -> httpx.Client:
    # long experiment runs keep the request open; no client-side timeout
    return httpx.Client(base_url=base_url, timeout=None)


def _fail_config(message: str) -> int:
    print(f"config error: {message}", file=sys.stderr)
    return CONFIG_ERROR


def _request(client: httpx.Client, method: str, url: str, **kwargs) -> httpx.Response | int:
    try:
        response = client.request(method, url, **kwargs)
    except httpx.HTTPError as exc:
        print(f"cannot reach the noisycc service ({exc}); start it with 'noisycc serve'",
              file=sys.stderr)
        return 1
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        return _fail_config(f"{detail}")
    return response


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("noisycc.service:app", host=args.host, port=args.port, log_level="info")
    return 0


def cmd_run(args) -> int:
    path = Path(args.config)
    if not path.exists():
        return _fail_config(f"config file not found: {path}")
    try:
        config = ExperimentConfig.model_validate_json(path.read_text())
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "config"
        return _fail_config(f"{field}: {first['msg']}")
    except ValueError as exc:
        return _fail_config(f"config is not valid JSON: {exc}")

    out_dir = Path(args.output or config.output_dir or f"runs/{config.algorithm}")
    with make_client(args.base_url) as client:
        response = _request(client, "POST", "/run", json=config.model_dump(mode="json"))
    if isinstance(response, int):
        return response
    payload = RunResponse.model_validate(response.json())
    paths = write_records(payload.records, out_dir)
    print(f"{len(payload.records)} run records in {out_dir} "
          f"({paths[-1].name} plus convergence.csv)")
    return 0


def cmd_compare(args) -> int:
    groups = []
    for directory in args.directories:
        csv_path = Path(directory) / "convergence.csv"
        if not csv_path.exists():
            return _fail_config(f"no convergence.csv in {directory}")
        for label, finals in final_fitnesses_from_csv(csv_path).items():
            groups.append({"label": label, "finals": finals})
    body = {"groups": groups, "alphas": args.alpha}
    with make_client(args.base_url) as client:
        response = _request(client, "POST", "/compare", json=body)
    if isinstance(response, int):
        return response
    table = ComparisonTable.model_validate(response.json())
    _print_table(table)
    if args.out:
        Path(args.out).write_text(table.model_dump_json(indent=2))
        print(f"table written to {args.out}")
    return 0


def _print_table(table: ComparisonTable) -> None:
    print(f"{'algorithm':<20} {'runs':>5} {'mean':>14} {'std':>14} {'median':>14}")
    for s in table.summaries:
        print(f"{s.label:<20} {s.runs:>5} {s.mean:>14.6g} {s.std:>14.6g} {s.median:>14.6g}")
    print(f"Kruskal-Wallis H = {table.kruskal_statistic:.6g}, p = {table.kruskal_p:.6g}")
    for pair in table.pairwise:
        marks = " ".join(f"alpha={a}:{pair.markers.get(repr(a), '') or '-'}"
                         for a in table.alphas)
        print(f"  {pair.first} vs {pair.second}: U = {pair.u_statistic:.6g}, "
              f"p = {pair.p_raw:.6g}, Holm p = {pair.p_holm:.6g}  [{marks}]")


def cmd_groupsim(args) -> int:
    body = {"dimension": args.dim, "runs": args.runs, "seed": args.seed}
    with make_client(args.base_url) as client:
        response = _request(client, "POST", "/groupsim", json=body)
    if isinstance(response, int):
        return response
    payload = response.json()
    lines = ["group_count,frequency"]
    for count in sorted(int(k) for k in payload["count_histogram"]):
        lines.append(f"{count},{payload['count_histogram'][str(count)]}")
    csv_text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(csv_text)
        print(f"histogram written to {args.out}")
    else:
        print(csv_text, end="")
    print(f"runs={payload['runs']} modal_count={payload['modal_count']} "
          f"mean_count={payload['mean_count']:.4f} size_mean={payload['size_mean']:.4f} "
          f"size_min={payload['size_min']} size_max={payload['size_max']}")
    return 0


def cmd_probcurve(args) -> int:
    params = {"cycles": args.cycles, "groups": args.groups}
    if args.k_max is not None:
        params["k_max"] = args.k_max
    with make_client(args.base_url) as client:
        response = _request(client, "GET", "/probcurve", params=params)
    if isinstance(response, int):
        return response
    payload = response.json()
    lines = ["k,probability"]
    for k, p in payload["points"]:
        lines.append(f"{k},{p!r}")
    csv_text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(csv_text)
        print(f"curve written to {args.out}")
    else:
        print(csv_text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisycc",
                                     description="Cooperative coevolution experiments "
                                                 "in noisy environments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="start the compute service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8749)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("run", help="execute the seeded runs of a config file")
    p.add_argument("config", help="path to a JSON experiment config")
    p.add_argument("--output", help="output directory (overrides config.output_dir)")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="statistical comparison of record directories")
    p.add_argument("directories", nargs="+")
    p.add_argument("--alpha", type=float, nargs="+", default=[0.05, 0.10])
    p.add_argument("--out", help="write the table as JSON to this path")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("groupsim", help="simulate the automatic random decomposer")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--runs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the histogram CSV to this path")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p.set_defaults(func=cmd_groupsim)

    p = sub.add_parser("probcurve", help="co-occurrence probability curve")
    p.add_argument("--cycles", type=int, required=True)
    p.add_argument("--groups", type=int, required=True)
    p.add_argument("--k-max", type=int)
    p.add_argument("--out", help="write the curve CSV to this path")
    p.add_argument("--base-url", default=DEFAULT_BASE_URL)
    p.set_defaults(func=cmd_probcurve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
