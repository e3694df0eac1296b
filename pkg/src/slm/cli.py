"""Command-line entry point.

Subcommands: simulate, fit, predict, tune, benchmark, regret, bayes-risk,
illustrate, probe.  Exit codes: 0 success, 1 usage error, 2 data error,
3 numerical failure.  Output files are written atomically (temp file in
the target directory, then rename); every run echoes the resolved seed
and configuration to stderr.  SLM_THREADS caps internal parallelism.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile

import numpy as np

from .classifier import SlmModel, classify, load_model, save_model
from .data import (DataError, dataset_to_csv, load_dataset,
                   load_dataset_auto, parse_schema)
from .logistic import fit_logistic
from .simlab import (SimulationSpec, bayes_risk_mc, benchmark,
                     concentration_probe, illustration_example, regret_curve,
                     sample_dataset)
from .solver import SolverError
from .tuning import TuneGrid, default_grid, fit_slm, tune_beta

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _apply_thread_cap():
    cap = os.environ.get("SLM_THREADS")
    if not cap:
        return
    try:
        import numba
        numba.set_num_threads(max(1, min(int(cap), numba.config.NUMBA_NUM_THREADS)))
    except (ImportError, ValueError):
        pass


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".slm-tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_table(rows, path: str, header: list[str] | None = None):
    """Write rows as CSV: header line, LF endings, repr-style floats."""
    lines = []
    if header:
        lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(
            format(v, ".17g") if isinstance(v, float) else str(v)
            for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def _echo(args, resolved_seed=None):
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    if resolved_seed is not None:
        config["seed"] = resolved_seed
    print(f"slm config: {config}", file=sys.stderr)


def _spec_from_args(args) -> SimulationSpec:
    return SimulationSpec(model_id=args.model, d=args.d, p=args.p,
                          n1=getattr(args, "n1", 2), n2=getattr(args, "n2", 2),
                          seed=args.seed)


def _load_train(args):
    text = open(args.train).read()
    if args.auto_schema:
        return load_dataset_auto(text)
    if not args.schema:
        raise DataError("--schema or --auto-schema is required")
    return load_dataset(text, parse_schema(open(args.schema).read()))


def _grid_from_args(args, dataset) -> TuneGrid:
    base = default_grid(dataset)
    thetas = (tuple(float(t) for t in args.thetas.split(","))
              if getattr(args, "thetas", None) else base.thetas)
    lb = (tuple(float(t) for t in args.lambdas_beta.split(","))
          if getattr(args, "lambdas_beta", None) else base.lambdas_beta)
    le = (tuple(float(t) for t in args.lambdas_eta.split(","))
          if getattr(args, "lambdas_eta", None) else base.lambdas_eta)
    return TuneGrid(thetas=thetas, lambdas_beta=lb, lambdas_eta=le)


def _cmd_simulate(args):
    _echo(args)
    spec = _spec_from_args(args)
    train, test = sample_dataset(spec)
    _atomic_write(args.out, dataset_to_csv(train))
    if args.test_out:
        _atomic_write(args.test_out, dataset_to_csv(test))
    return EXIT_OK


def _cmd_fit(args):
    _echo(args)
    train = _load_train(args)
    result = fit_slm(train, grid=_grid_from_args(args, train),
                     kfold=args.kfold)
    _atomic_write(args.out, save_model(result.model))
    print(f"selected theta={result.theta} lambda_beta={result.lambda_beta} "
          f"lambda_eta={result.lambda_eta}", file=sys.stderr)
    return EXIT_OK


def _cmd_predict(args):
    _echo(args)
    model = load_model(open(args.model).read())
    text = open(args.test).read()
    loaded = load_dataset_auto(text, require_label=False)
    lines = ["label"]
    if isinstance(loaded, tuple):
        u, z = loaded
        for i in range(z.shape[0]):
            lines.append(str(classify(model, z[i], u[i])))
    else:
        wrong = total = 0
        for cls in (1, 2):
            z, u = loaded.class_arrays(cls)
            for i in range(z.shape[0]):
                predicted = classify(model, z[i], u[i])
                lines.append(str(predicted))
                wrong += predicted != cls
                total += 1
        print(f"test error: {wrong / total:.6f} ({wrong}/{total})",
              file=sys.stderr)
    out = "\n".join(lines) + "\n"
    if args.out:
        _atomic_write(args.out, out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def _cmd_tune(args):
    _echo(args)
    train = _load_train(args)
    grid = _grid_from_args(args, train)
    theta, lam, table = tune_beta(train, grid, kfold=args.kfold)
    if args.out:
        emit_table(table, args.out, header=["theta", "lambda_beta", "r0"])
    else:
        for row in table:
            print(",".join(str(v) for v in row))
    print(f"selected theta={theta} lambda_beta={lam}", file=sys.stderr)
    return EXIT_OK


def _cmd_benchmark(args):
    _echo(args)
    spec = _spec_from_args(args)
    reps = 100 if args.long else args.reps
    rows, failures = benchmark(spec, args.methods.split(","), reps,
                               kfold=args.kfold)
    out_rows = [(args.model, f"({args.d},{args.p})", m, mean, sd)
                for m, mean, sd in rows]
    for failure in failures:
        print(f"replication failure: {failure}", file=sys.stderr)
    if args.out:
        emit_table(out_rows, args.out,
                   header=["model", "dp", "method", "mean", "sd"])
    else:
        for row in out_rows:
            print(",".join(str(v) for v in row))
    return EXIT_OK


def _cmd_regret(args):
    _echo(args)
    spec = _spec_from_args(args)
    n_values = [int(v) for v in args.n_values.split(",")]
    rows = regret_curve(spec, n_values, args.methods.split(","), args.reps,
                        kfold=args.kfold)
    if args.out:
        emit_table(rows, args.out, header=["n", "method", "regret"])
    else:
        for row in rows:
            print(",".join(str(v) for v in row))
    return EXIT_OK


def _cmd_bayes_risk(args):
    _echo(args)
    spec = _spec_from_args(args)
    est, se = bayes_risk_mc(spec, args.draws, method=args.method)
    print(f"{est:.6f},{se:.6f}")
    return EXIT_OK


def _cmd_illustrate(args):
    _echo(args)
    bayes_mc, best_linear_mc = illustration_example(args.draws, seed=args.seed)
    print(f"{bayes_mc:.6f},{best_linear_mc:.6f}")
    return EXIT_OK


def _cmd_probe(args):
    _echo(args)
    spec = _spec_from_args(args)
    n_list = [int(v) for v in args.n_list.split(",")]
    rows = concentration_probe(spec, n_list, args.radius, args.probes,
                               theta=args.theta)
    if args.out:
        emit_table(rows, args.out, header=["n", "sup_error"])
    else:
        for row in rows:
            print(",".join(str(v) for v in row))
    return EXIT_OK


def _add_sim_args(sp, with_n=True):
    sp.add_argument("--model", type=int, required=True, choices=(1, 2, 3, 4))
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p", type=int, required=True)
    if with_n:
        sp.add_argument("--n1", type=int, required=True)
        sp.add_argument("--n2", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)


def _add_train_args(sp):
    sp.add_argument("--train", required=True)
    sp.add_argument("--schema")
    sp.add_argument("--auto-schema", action="store_true")
    sp.add_argument("--kfold", type=int, default=None)
    sp.add_argument("--thetas")
    sp.add_argument("--lambdas-beta")
    sp.add_argument("--lambdas-eta")


def build_parser() -> _Parser:
    parser = _Parser(prog="slm",
                     description="Sparse location-model discriminant "
                                 "analysis for mixed binary/continuous data")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    sp = sub.add_parser("simulate", help="generate a synthetic dataset")
    _add_sim_args(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--test-out")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("fit", help="tune and fit a classifier")
    _add_train_args(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=_cmd_fit)

    sp = sub.add_parser("predict", help="classify rows with a saved model")
    sp.add_argument("--model", required=True)
    sp.add_argument("--test", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_predict)

    sp = sub.add_parser("tune", help="emit the (theta, lambda_beta) r0 table")
    _add_train_args(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_tune)

    sp = sub.add_parser("benchmark", help="simulation benchmark table")
    _add_sim_args(sp)
    sp.add_argument("--methods", default="SLM,DSDA,PLG")
    sp.add_argument("--reps", type=int, default=20)
    sp.add_argument("--long", action="store_true",
                    help="run the full 100 replications")
    sp.add_argument("--kfold", type=int, default=None)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_benchmark)

    sp = sub.add_parser("regret", help="regret versus training size")
    _add_sim_args(sp, with_n=False)
    sp.add_argument("--n-values", required=True)
    sp.add_argument("--methods", default="SLM")
    sp.add_argument("--reps", type=int, default=20)
    sp.add_argument("--kfold", type=int, default=None)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_regret)

    sp = sub.add_parser("bayes-risk", help="Monte-Carlo Bayes risk")
    _add_sim_args(sp, with_n=False)
    sp.add_argument("--draws", type=int, default=100_000)
    sp.add_argument("--method", default="conditional",
                    choices=("conditional", "counting"))
    sp.set_defaults(func=_cmd_bayes_risk)

    sp = sub.add_parser("illustrate", help="two-variable appendix example")
    sp.add_argument("--draws", type=int, default=1_000_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=_cmd_illustrate)

    sp = sub.add_parser("probe", help="local-mean concentration probe")
    _add_sim_args(sp, with_n=False)
    sp.add_argument("--n-list", required=True)
    sp.add_argument("--radius", type=int, default=1)
    sp.add_argument("--probes", type=int, default=10)
    sp.add_argument("--theta", type=float, default=0.1)
    sp.add_argument("--out")
    sp.set_defaults(func=_cmd_probe)

    return parser


def run(argv=None) -> int:
    _apply_thread_cap()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (SolverError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
