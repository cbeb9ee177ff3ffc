"""Command-line client.

Every verb is served by the HTTP layer: by default an in-process
instance of the service, or a remote one via --server. Results print as
JSON (curves as CSV) and map to exit codes: 0 success, 1 failed
verification, 2 infeasible or always-fail results, 3 invalid input,
4 input/output failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import httpx
import numpy as np

from . import states
from .errors import DomainError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _fail(code, message):
    print(f"error: {message}", file=sys.stderr)
    raise SystemExit(code)


def _default_seed():
    try:
        return int(os.environ.get("USD_SEED", "0"))
    except ValueError:
        return 0


def _client(server):
    if server:
        return httpx.Client(base_url=server, timeout=300.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app())


def _post(client, path, payload):
    try:
        resp = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        _fail(4, f"cannot reach the service: {exc}")
    if resp.status_code in (400, 422):
        body = resp.json()
        detail = body.get("detail", body)
        _fail(3, f"invalid input: {detail}")
    if resp.status_code != 200:
        _fail(1, f"service error {resp.status_code}: {resp.text}")
    return resp.json()


def _rad(args, value):
    if value is None:
        return None
    return float(np.radians(value)) if args.deg else float(value)


def _literal(text):
    try:
        vec = states.parse_state_literal(text)
    except DomainError as exc:
        _fail(3, str(exc))
    return [[z.real, z.imag] for z in vec]


def _pair_spec(args):
    explicit = bool(getattr(args, "state0", None) or getattr(args, "state1", None))
    if args.family and explicit:
        _fail(3, "give either --family or --state0/--state1, not both")
    spec = {"prior0": args.prior0}
    if args.family:
        spec["family"] = args.family
        for name in ("theta0", "theta1", "theta"):
            value = _rad(args, getattr(args, name, None))
            if value is not None:
                spec[name] = value
        return spec
    if not (args.state0 and args.state1):
        _fail(3, "need --family with angles, or both --state0 and --state1")
    spec["state0"] = _literal(args.state0)
    spec["state1"] = _literal(args.state1)
    return spec


def _print_json(payload):
    print(json.dumps(payload, indent=2, sort_keys=True))


def _csv_text(header, rows):
    lines = [header]
    for row in rows:
        lines.append(",".join("%.12g" % x for x in row))
    return "\n".join(lines) + "\n"


def _write_out(text, path):
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        _fail(4, f"cannot write {path}: {exc}")


def _add_global_args(parser, root=False):
    default = {} if root else {"default": argparse.SUPPRESS}
    parser.add_argument(
        "--server", help="base URL of a running service (default: in-process)", **default
    )
    parser.add_argument(
        "--deg", action="store_true", help="interpret angles in degrees", **default
    )


def _add_pair_args(parser, with_theta=True):
    parser.add_argument("--family", choices=["same-basis", "xz-mixed", "qss"])
    parser.add_argument("--theta0", type=float)
    parser.add_argument("--theta1", type=float)
    if with_theta:
        parser.add_argument("--theta", type=float)
    parser.add_argument("--prior0", type=float, default=0.5)
    parser.add_argument("--state0", help="amplitudes a00,a01,a10,a11 (use i for the imaginary unit)")
    parser.add_argument("--state1", help="amplitudes a00,a01,a10,a11")


def _build_parser():
    parser = _Parser(prog="usd", description=__doc__)
    _add_global_args(parser, root=True)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("schmidt", help="Schmidt-decompose one two-qubit state")
    p.add_argument("--state", required=True, help="amplitudes a00,a01,a10,a11")
    _add_global_args(p)
    p.set_defaults(func=_cmd_schmidt)

    p = sub.add_parser("idp", help="overlap and joint-measurement failure bound")
    _add_pair_args(p)
    _add_global_args(p)
    p.set_defaults(func=_cmd_idp)

    p = sub.add_parser("solve", help="solve a discrimination scheme")
    p.add_argument("mode", choices=["two-fail", "one-fail", "no-comm"])
    _add_pair_args(p)
    _add_global_args(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("curve", help="emit a failure-probability curve as CSV")
    p.add_argument("which", choices=["fig1", "fig2"])
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", default="-", help="output path ('-' for standard output)")
    _add_global_args(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("mc", help="Monte Carlo check of a solved scheme")
    _add_pair_args(p)
    p.add_argument("--scheme", choices=["two-fail", "one-fail"], default="two-fail")
    p.add_argument("--rounds", type=int, default=100000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--stream", type=int, default=0)
    _add_global_args(p)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("qss", help="simulate a secret-sharing session")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--q-check", type=float, default=0.25)
    p.add_argument("--rounds", type=int, default=10000)
    p.add_argument(
        "--adversary",
        choices=[
            "none",
            "eve-product-resend",
            "eve-subspace-resend",
            "bob-capture",
            "bob-capture-sequential",
        ],
        default="none",
    )
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--audit-fraction", type=float, default=0.10)
    p.add_argument("--round-log", help="write a per-round CSV log to this path")
    _add_global_args(p)
    p.set_defaults(func=_cmd_qss)

    p = sub.add_parser("verify", help="run the bundled self-checks")
    p.add_argument("--mc-rounds", type=int, default=20000)
    p.add_argument("--seed", type=int, default=max(_default_seed(), 1))
    p.add_argument("--only", help="run only checks whose name contains this")
    _add_global_args(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    _add_global_args(p)
    p.set_defaults(func=_cmd_serve)

    return parser


def _cmd_schmidt(client, args):
    resp = _post(client, "/schmidt", {"state": _literal(args.state)})
    _print_json(resp)
    return 0


def _cmd_idp(client, args):
    resp = _post(client, "/idp", _pair_spec(args))
    _print_json(resp)
    return 0


def _cmd_solve(client, args):
    resp = _post(client, f"/solve/{args.mode}", _pair_spec(args))
    _print_json(resp)
    if args.mode == "no-comm":
        return 2 if resp["case"] == "AlwaysFail" else 0
    return 0 if resp["feasible"] else 2


def _cmd_curve(client, args):
    resp = _post(client, f"/curve/{args.which}", {"steps": args.steps})
    if resp.get("note"):
        print(f"note: {resp['note']}", file=sys.stderr)
    _write_out(_csv_text(resp["header"], resp["rows"]), args.out)
    return 0


def _cmd_mc(client, args):
    payload = {
        "pair": _pair_spec(args),
        "scheme": args.scheme,
        "n": args.rounds,
        "seed": args.seed,
        "stream": args.stream,
    }
    _print_json(_post(client, "/mc", payload))
    return 0


def _cmd_qss(client, args):
    payload = {
        "theta": _rad(args, args.theta),
        "q_check": args.q_check,
        "n_rounds": args.rounds,
        "adversary": args.adversary,
        "seed": args.seed,
        "stream": args.stream,
        "audit_fraction": args.audit_fraction,
        "return_rounds": bool(args.round_log),
    }
    resp = _post(client, "/qss", payload)
    rounds = resp.pop("rounds", None)
    if args.round_log:
        lines = ["round,true_state,alice_basis,bob_basis,alice_outcome,bob_outcome,label"]
        for r in rounds or []:
            lines.append(
                f"{r['round']},{r['true_state']},{r['alice_basis']},{r['bob_basis']},"
                f"{r['alice_outcome']},{r['bob_outcome']},{r['label']}"
            )
        _write_out("\n".join(lines) + "\n", args.round_log)
    _print_json(resp)
    return 0


def _cmd_verify(client, args):
    payload = {"mc_rounds": args.mc_rounds, "seed": args.seed, "only": args.only}
    resp = _post(client, "/verify", payload)
    _print_json(resp)
    return 0 if resp["passed"] else 1


def _cmd_serve(client, args):
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        client = _client(args.server)
        try:
            return args.func(client, args)
        finally:
            client.close()
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0


if __name__ == "__main__":
    sys.exit(main())
