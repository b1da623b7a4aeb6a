import argparse
import json
import sys

from errors import BoundViolation, WorkbenchError
from logger import LOGGER


def _add_selectors(parser: argparse.ArgumentParser):
    parser.add_argument("--dim", type=int, choices=[2, 3], required=True)
    parser.add_argument("--n", type=int, required=True, help="subdomains per direction")
    parser.add_argument("--hh", type=int, required=True, help="H/h, cells per subdomain edge")
    parser.add_argument("--method", type=int, choices=[0, 1, 2, 3, 4], required=True)
    parser.add_argument("--scaling", choices=["multiplicity", "deluxe"], default=None)
    parser.add_argument("--coeff", default="constant", help="constant[:C] | channels:K:P | random:SEED[:LO:HI] | fracture:P:SEED | file:PATH")
    parser.add_argument("--tol-face", default=None, help='literal, "1+log(H/h)" or "cH/h"')
    parser.add_argument("--tol-edge", default=None, help='literal, "1+log(H/h)" or "cH/h"')
    parser.add_argument("--out", default=None)


def _config(args, **overrides):
    from experiments.config import ExperimentConfig

    values = dict(
        dim=args.dim,
        N=args.n,
        m=args.hh,
        method=args.method,
        coeff=args.coeff,
        scaling=args.scaling,
        tol_face=args.tol_face,
        tol_edge=args.tol_edge,
        eta=args.eta,
        out=args.out,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def _db(args):
    from database.models import get_db_manager

    return get_db_manager(getattr(args, "db", None))


def run_command(args) -> int:
    from evaluators.bounds import BoundEvaluator
    from experiments.reports import emit_report, format_csv
    from experiments.runner import run_experiment

    config = _config(args, format=args.format, rtol=args.rtol, maxit=args.maxit, check_direct=args.check_direct)
    report = run_experiment(config, db_manager=_db(args))

    if args.out:
        emit_report(report, args.out, args.format)
        LOGGER.info(f"Report written to {args.out}")
    else:
        sys.stdout.write(format_csv(report) if args.format == "csv" else json.dumps(report.to_dict(), indent=2) + "\n")

    audit = BoundEvaluator().evaluate_report(report)
    if not (audit["kappa_ok"] and audit["lambda_min_ok"]):
        if audit["hard"]:
            raise BoundViolation(audit["message"], report)
        LOGGER.warning(f"Soft bound check failed: {audit['message']}")
    return 0


def spectra_command(args) -> int:
    from experiments.spectra import dump_spectra

    rows = dump_spectra(_config(args), args.out)
    if not args.out:
        for row in rows:
            sys.stdout.write(json.dumps(row) + "\n")
    return 0


def audit_command(args) -> int:
    from evaluators.bounds import BoundEvaluator

    result = BoundEvaluator(_db(args)).batch_evaluate_unevaluated(args.limit)
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return 0


def serve_command(args) -> int:
    from app import create_app

    create_app(_db(args)).run(debug=False, host=args.host, port=args.port, threaded=True)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bddc", description="Adaptive BDDC / FETI-DP experiment workbench")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="solve one configuration and report iterations and eigenvalue estimates")
    _add_selectors(run)
    run.add_argument("--eta", default="full", help="full | h | Kh | H | multiple of h")
    run.add_argument("--format", choices=["csv", "json"], default="csv")
    run.add_argument("--db", default=None, help="SQLAlchemy URL for storing the run")
    run.add_argument("--rtol", type=float, default=None)
    run.add_argument("--maxit", type=int, default=None)
    run.add_argument("--check-direct", action="store_true", help="compare with a direct solve of the global system")
    run.set_defaults(handler=run_command)

    spectra = commands.add_parser("spectra", help="dump face and edge eigenvalues")
    _add_selectors(spectra)
    spectra.add_argument("--eta", default="full", help="full | h | Kh | H | both")
    spectra.set_defaults(handler=spectra_command)

    audit = commands.add_parser("audit", help="audit stored runs against the condition number bound")
    audit.add_argument("--limit", type=int, default=50)
    audit.add_argument("--db", default=None)
    audit.set_defaults(handler=audit_command)

    serve = commands.add_parser("serve", help="serve stored runs over HTTP")
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--port", type=int, default=5000)
    serve.add_argument("--db", default=None)
    serve.set_defaults(handler=serve_command)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except BoundViolation as e:
        LOGGER.error(str(e))
        return 2
    except WorkbenchError as e:
        LOGGER.error(str(e))
        return 1


if __name__ == "__main__":
    sys.exit(main())
