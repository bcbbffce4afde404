"""Command-line entry point: ``indpoly {eval,membership,threshold,lll,decay}``.

Results go to stdout (or ``--output``) as JSON, or CSV for ``decay``.  Any
library error exits with status 1 and prints ``{"error": {"kind", "message"}}``.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import io
from .decay import DEFAULT_NODE_BUDGET, eval_polynomial, fptas_eval
from .errors import IndPolyError, InvalidInputError
from .exact import breve_q_exact
from .lll import round_variables, round_variables_exact, verify_assignment
from .membership import estimate_lambda_G, test_membership
from .univariate import lambda_prime_c, scaling_fit


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="indpoly", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: all cores)")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", parents=[common], help="evaluate the alternating-sign polynomial")
    ev.add_argument("--graph", required=True)
    ev.add_argument("--activities", required=True)
    mode = ev.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="subset-recursion oracle")
    mode.add_argument("--decay", action="store_true", help="truncated correlation decay (default)")
    ev.add_argument("--alpha", type=float, help="slack assertion: (1+alpha)^2 |p| is in the region")
    ev.add_argument("--eps", type=float, default=0.1)
    ev.add_argument("--depth", type=int, help="fixed truncation depth (overrides alpha/eps)")
    ev.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    ev.add_argument("--order", help="JSON elimination order")

    mem = sub.add_parser("membership", parents=[common], help="test |p| against the Shearer region")
    mem.add_argument("--graph", required=True)
    mem.add_argument("--activities", required=True)
    mem.add_argument("--alpha", type=float, required=True)
    mem.add_argument("--exact", action="store_true")
    mem.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)

    thr = sub.add_parser("threshold", parents=[common], help="bracket the uniform threshold of a graph")
    thr.add_argument("--graph", required=True)
    thr.add_argument("--alpha", type=float, required=True)
    thr.add_argument("--exact", action="store_true")
    thr.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)

    lll = sub.add_parser("lll", parents=[common], help="round marginals to an assignment avoiding all events")
    src = lll.add_mutually_exclusive_group(required=True)
    src.add_argument("--cnf", help="DIMACS CNF; each clause is the event 'clause falsified'")
    src.add_argument("--model", help="variable-model JSON")
    lll.add_argument("--alpha", type=float)
    lll.add_argument("--exact", action="store_true", help="round with exact derivatives")
    lll.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)

    dec = sub.add_parser("decay", parents=[common], help="contraction rates of the tree recurrence")
    dec.add_argument("--d", type=int, required=True)
    dec.add_argument("--alphas", type=_floats, required=True, help="comma-separated, e.g. 1e-2,1e-3")
    dec.add_argument("--iters", type=int, default=1_000_000)
    dec.add_argument("--summary", help="write the fit summary JSON here (default: stderr)")
    return parser


def _eval(args, jobs) -> str:
    g = io.load_graph(args.graph)
    p = io.load_activities(args.activities, g.n)
    if args.exact:
        return io.dumps({"mode": "exact", "value": io.encode_complex(breve_q_exact(g, p))})
    order = io.load_order(args.order) if args.order else None
    if args.depth is not None:
        rep = eval_polynomial(g, p, args.depth, budget=args.budget, order=order, alpha=args.alpha, n_jobs=jobs)
    else:
        if args.alpha is None:
            raise InvalidInputError("decay mode needs --alpha or --depth")
        rep = fptas_eval(g, p, args.alpha, args.eps, budget=args.budget, order=order, n_jobs=jobs)
    out = rep.to_dict()
    out["mode"] = "decay"
    return io.dumps(out)


def _membership(args, jobs) -> str:
    g = io.load_graph(args.graph)
    p = np.abs(io.load_activities(args.activities, g.n))
    res = test_membership(g, p, args.alpha, exact=args.exact, budget=args.budget, n_jobs=jobs)
    return io.dumps(res.to_dict())


def _threshold(args, jobs) -> str:
    g = io.load_graph(args.graph)
    lo, hi = estimate_lambda_G(g, args.alpha, exact=args.exact, budget=args.budget, n_jobs=jobs)
    return io.dumps({"lo": lo, "hi": hi, "alpha": args.alpha, "lambda_prime_c": lambda_prime_c(max(g.max_degree, 1))})


def _lll(args, jobs) -> str:
    if args.cnf:
        m, clauses = io.load_dimacs(args.cnf)
        vm = io.cnf_to_model(m, clauses)
    else:
        vm = io.load_model(args.model)
    if args.exact:
        omega = round_variables_exact(vm)
        return io.dumps({"assignment": omega.tolist(), "verify": verify_assignment(vm, omega), "mode": "exact"})
    if args.alpha is None:
        raise InvalidInputError("lll needs --alpha unless --exact is given")
    omega, trace = round_variables(vm, args.alpha, budget=args.budget, n_jobs=jobs)
    return io.dumps({"assignment": omega.tolist(), "verify": trace.verified, "mode": "decay", "trace": trace.to_dict()})


def _decay(args, stderr) -> str:
    fit = scaling_fit(args.d, args.alphas, args.iters)
    rows = [[a, r, 1 - r] for a, r in zip(fit.alphas, fit.rates)]
    summary = io.dumps(fit.to_dict())
    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(summary + "\n")
    else:
        stderr.write(summary + "\n")
    return io.rows_to_csv(["alpha", "rho", "one_minus_rho"], rows).rstrip("\n")


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    jobs = args.threads if args.threads is not None else (os.cpu_count() or 1)
    try:
        if jobs < 1:
            raise InvalidInputError("--threads must be positive")
        handler = {
            "eval": lambda: _eval(args, jobs),
            "membership": lambda: _membership(args, jobs),
            "threshold": lambda: _threshold(args, jobs),
            "lll": lambda: _lll(args, jobs),
            "decay": lambda: _decay(args, stderr),
        }[args.command]
        text = handler()
    except IndPolyError as exc:
        stdout.write(io.dumps({"error": {"kind": exc.kind, "message": str(exc)}}) + "\n")
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        stdout.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
