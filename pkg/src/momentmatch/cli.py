"""Command-line front end.

    momentmatch fit       --model M --data D [--tol --max-iters --seed --init --out]
    momentmatch eval      --model M --data D [--theta]
    momentmatch check-mm  --model M --data D [--theta]
    momentmatch gradcheck --model M --data D [--theta --eps]
    momentmatch info      --model M

Machine-readable JSON goes to --out (default stdout); a one-line summary goes
to stderr.  Exit codes: 0 success, 1 validation error, 2 diverging fit.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import Role
from .errors import MomentMatchError
from .inference import log_prob_datum
from .learning import FitOptions, Init, Status, fit, gradient_check, log_likelihood, moment_report

EXIT_OK, EXIT_INVALID, EXIT_DIVERGING = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="momentmatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, data=True):
        p.add_argument("--model", required=True, type=Path, help="model file (JSON)")
        if data:
            p.add_argument("--data", required=True, type=Path, help="dataset file (CSV)")
        p.add_argument("--out", type=Path, help="write the JSON document here instead of stdout")

    def theta(p):
        p.add_argument("--theta", help="comma-separated parameter vector (default zeros)")

    p = sub.add_parser("fit", help="maximum-likelihood fit")
    common(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--init", choices=["zeros", "random"], default=None)

    p = sub.add_parser("eval", help="per-row and mean log-likelihood")
    common(p)
    theta(p)

    p = sub.add_parser("check-mm", help="data-side and model-side moments")
    common(p)
    theta(p)

    p = sub.add_parser("gradcheck", help="analytic vs central-difference gradient")
    common(p)
    theta(p)
    p.add_argument("--eps", type=float, default=1e-5)

    p = sub.add_parser("info", help="variant and dimensions of a model")
    common(p, data=False)
    return parser


def _parse_theta(text, d: int) -> np.ndarray:
    if text is None:
        return np.zeros(d)
    try:
        theta = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise UsageError(f"--theta: cannot parse {text!r} as comma-separated reals") from None
    if theta.shape != (d,) or not np.all(np.isfinite(theta)):
        raise UsageError(f"--theta: expected {d} finite values, got {text!r}")
    return theta


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"{path}: {e.strerror}") from None


def _run(args, err) -> tuple[int, dict]:
    spec = io.parse_model(_read(args.model))
    if args.command == "info":
        doc = {
            "name": spec.name,
            "variant": spec.variant().value,
            "stat_dim": spec.stat_dim,
            "num_configurations": spec.num_configs,
            "variables": [
                {"name": v.name, "role": v.role.value, "cardinality": v.cardinality}
                for v in spec.variables
            ],
        }
        print(f"{spec.variant().value}: {len(spec.variables)} variables, "
              f"{spec.num_configs} configurations, d={spec.stat_dim}", file=err)
        return EXIT_OK, doc

    data = io.parse_dataset(_read(args.data), spec)

    if args.command == "fit":
        if not args.tol > 0 or args.max_iters < 1:
            raise UsageError("--tol must be > 0 and --max-iters >= 1")
        init = None
        if args.init == "zeros":
            init = Init.zeros()
        elif args.init == "random" or spec.variant().has_hidden:
            init = Init.random(seed=args.seed)
        result = fit(spec, data, FitOptions(tol_grad_inf=args.tol, max_iters=args.max_iters, init=init))
        print(f"{result.status.value} after {result.iterations} iterations: "
              f"loglik={result.loglik_final:.10g} |grad|={result.grad_inf_final:.3g} "
              f"residual={result.mm_residual_inf:.3g}", file=err)
        code = EXIT_DIVERGING if result.status is Status.DIVERGING else EXIT_OK
        return code, io.fit_document(result)

    theta = _parse_theta(args.theta, spec.stat_dim)
    if args.command == "eval":
        names = spec.names_with_role(Role.COND, Role.OBS)
        rows = [
            {"row": spec.labels({n: r[n] for n in names}), "loglik": log_prob_datum(spec, r, theta)}
            for r in data.rows
        ]
        mean = log_likelihood(spec, data, theta)
        print(f"mean loglik {mean:.10g} over {data.n} rows", file=err)
        return EXIT_OK, {"theta": theta, "rows": rows, "mean_loglik": mean}

    if args.command == "check-mm":
        report = moment_report(spec, data, theta)
        print(f"moment residual {report.residual_inf:.3g}", file=err)
        doc = {"theta": theta}
        doc.update(io.moment_document(report))
        return EXIT_OK, doc

    if not args.eps > 0:
        raise UsageError("--eps must be > 0")
    worst = gradient_check(spec, data, theta, args.eps)
    print(f"max relative gradient error {worst:.3g}", file=err)
    return EXIT_OK, {"theta": theta, "eps": args.eps, "max_rel_error": worst}


def _glue_theta(argv):
    # argparse reads "-0.5,1" as an option flag; "--theta=-0.5,1" is unambiguous
    argv = list(sys.argv[1:] if argv is None else argv)
    glued = []
    i = 0
    while i < len(argv):
        if argv[i] == "--theta" and i + 1 < len(argv):
            glued.append(f"--theta={argv[i + 1]}")
            i += 2
        else:
            glued.append(argv[i])
            i += 1
    return glued


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(_glue_theta(argv))
        code, doc = _run(args, err)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_INVALID
    except (MomentMatchError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=err)
        return EXIT_INVALID
    text = io.dumps(doc)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
