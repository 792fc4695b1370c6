"""
Command line surface for mixedgraph. Every command that writes files also writes a
<output>.manifest.json next to each of them.
"""
import argparse
import logging
import pathlib
import sys
from typing import List, Optional

from . import construction, evaluation, formats, main as entry
from .assortativity import NacUndefinedError
from .method_register import RunSettings, builtin_register
from .validator import InvalidSpecError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_UNDEFINED = 2

gen_help = """\
Samples two Gaussian classes in d dimensions, shifted apart along the first axis to the given
Bayes error, and writes the features CSV and the labels TSV.
"""

split_help = """\
Turns a single graph into a mixed graph using the true labels: either moves P percent of the
opposite-label edges between unlabeled nodes into the dissimilar graph (extract), or adds that
many new dissimilar edges between random opposite-label unlabeled pairs (goldberg).
"""

run_help = """\
Runs a propagation method on a mixed graph and writes the posterior of every node. gamma is a
number in [0, 1], nac (estimated from the assortativity of both graphs over the labeled nodes,
with cross-validation as the fallback) or cv.
"""


def _sigma(value: str):
    if value == "auto":
        return value
    try:
        sigma = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"sigma must be 'auto' or a positive number, got {value!r}")
    if sigma <= 0:
        raise argparse.ArgumentTypeError(f"sigma must be positive, got {value}")
    return sigma


def _gamma(value: str):
    if value in ("nac", "cv"):
        return value
    try:
        gamma = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"gamma must be nac, cv or a number, got {value!r}")
    if not 0.0 <= gamma <= 1.0:
        raise argparse.ArgumentTypeError(f"gamma must lie in [0, 1], got {value}")
    return gamma


def _output(parser):
    parser.add_argument(
        "-o", "--output",
        action="append",
        required=True,
        type=pathlib.Path,
        help="A path to write the result to"
    )


def _labels(parser):
    parser.add_argument("--labels", required=True, type=pathlib.Path, help="A labels TSV file")
    parser.add_argument(
        "--positive",
        type=int,
        default=None,
        help="Accept any integer labels and treat this one as +1, all others as -1"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mixedgraph",
        description="Transductive binary classification on graphs with similar and dissimilar edges"
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", required=True)

    gen = subparsers.add_parser("gen-g50c", help=gen_help)
    gen.add_argument("--n", type=int, default=550, help="Number of points")
    gen.add_argument("--d", type=int, default=50, help="Number of dimensions")
    gen.add_argument("--bayes-error", type=float, default=0.05)
    gen.add_argument("--balance", type=float, default=0.5, help="Fraction of points in class +1")
    gen.add_argument("--seed", type=int, default=0)
    _output(gen)
    gen.set_defaults(handler=_gen_g50c, inputs=(), outputs=2)

    knn = subparsers.add_parser("build-knn", help="Builds a kNN graph with Gaussian weights")
    knn.add_argument("--features", required=True, type=pathlib.Path, help="A features CSV file")
    knn.add_argument("--k", required=True, type=int, help="Number of neighbours")
    knn.add_argument("--sigma", type=_sigma, default="auto", help="Gaussian width, or auto")
    _output(knn)
    knn.set_defaults(handler=_build_knn, inputs=("features",), outputs=1)

    split = subparsers.add_parser("split-mixed", help=split_help)
    split.add_argument("--edges", required=True, type=pathlib.Path, help="An edges TSV file")
    _labels(split)
    split.add_argument("--labeled", required=True, type=pathlib.Path, help="A labeled-set file")
    split.add_argument("--p", type=float, required=True, help="Percentage of candidate edges")
    split.add_argument("--model", choices=builtin_register().names("model"), default=construction.EXTRACT)
    split.add_argument("--seed", type=int, default=0)
    _output(split)
    split.set_defaults(handler=_split_mixed, inputs=("edges", "labels", "labeled"), outputs=1)

    nac = subparsers.add_parser("nac", help="Prints the normalized assortativity of each edge kind")
    nac.add_argument("--edges", required=True, type=pathlib.Path, help="An edges TSV file")
    _labels(nac)
    nac.add_argument("--labeled", type=pathlib.Path, default=None, help="Only treat these nodes as labeled")
    nac.add_argument("--restrict-labeled", action="store_true", help="Only count edges between labeled nodes")
    nac.set_defaults(handler=_nac, inputs=("edges", "labels", "labeled"), outputs=0)

    run = subparsers.add_parser("run", help=run_help)
    run.add_argument("--method", required=True, choices=builtin_register().names("method"))
    run.add_argument("--mixed", required=True, type=pathlib.Path, help="A mixed edges TSV file")
    _labels(run)
    run.add_argument("--labeled", type=pathlib.Path, default=None, help="Only these nodes keep their label")
    run.add_argument("--gamma", type=_gamma, default="cv")
    run.add_argument("--epsilon", type=float, default=0.001)
    run.add_argument("--nu", type=float, default=0.95)
    run.add_argument("--max-iters", type=int, default=1000)
    run.add_argument("--cv-folds", type=int, default=5)
    run.add_argument("--grid", type=float, nargs="+", default=list(evaluation.DEFAULT_GRID))
    run.add_argument("--raw-weights", action="store_true", help="Use edge weights without row normalization")
    run.add_argument("--seed", type=int, default=0)
    _output(run)
    run.set_defaults(handler=_run, inputs=("mixed", "labels", "labeled"), outputs=1)

    evaluate = subparsers.add_parser("evaluate", help="Runs every experiment described by a spec file")
    evaluate.add_argument("--spec", required=True, type=pathlib.Path, help="An experiment spec JSON file")
    evaluate.add_argument("--jobs", type=int, default=1, help="Realizations to run in parallel")
    _output(evaluate)
    evaluate.set_defaults(handler=_evaluate, inputs=("spec",), outputs=1)

    replay = subparsers.add_parser("replay", help="Re-runs the command recorded in a manifest")
    replay.add_argument("--manifest", required=True, type=pathlib.Path)
    replay.set_defaults(handler=None, inputs=(), outputs=0)

    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Read the command line.
    """
    args = build_parser().parse_args(argv)
    count = len(args.output) if args.outputs else 0
    if count != args.outputs:
        raise ValueError(f"{args.command} writes {args.outputs} file(s), got {count} -o flag(s)")
    return args


def _gen_g50c(args, manifest):
    features, labels = args.output
    entry.main_gen_g50c(args.n, args.d, args.bayes_error, args.balance, args.seed, features, labels)


def _build_knn(args, manifest):
    entry.main_build_knn(args.features, args.k, args.sigma, args.output[0])


def _split_mixed(args, manifest):
    entry.main_split_mixed(
        args.edges, args.labels, args.labeled, args.p, args.model, args.seed, args.output[0], args.positive
    )


def _nac(args, manifest):
    entry.main_nac(args.edges, args.labels, args.labeled, args.restrict_labeled, args.positive)


def _run(args, manifest):
    settings = RunSettings(
        epsilon=args.epsilon, max_iters=args.max_iters, nu=args.nu, normalize=not args.raw_weights
    )
    entry.main_run(
        args.method, args.mixed, args.labels, args.labeled, args.gamma, settings, args.output[0],
        args.cv_folds, tuple(args.grid), args.seed, args.positive
    )


def _evaluate(args, manifest):
    entry.main_evaluate(args.spec, args.output[0], args.jobs, manifest)


def _plain(value):
    if isinstance(value, pathlib.Path):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    return value


def _manifest(args, argv: List[str]) -> entry.RunManifest:
    flags = {
        key: _plain(value) for key, value in vars(args).items() if key not in ("handler", "inputs", "outputs")
    }
    manifest = entry.RunManifest(
        command=args.command,
        argv=list(argv),
        flags=flags,
        seeds={"seed": args.seed} if "seed" in vars(args) else {},
    )
    for name in args.inputs:
        if (path := getattr(args, name)) is not None:
            manifest.add_input(path)
    return manifest


def _dispatch(argv: List[str]) -> int:
    args = parse_args(argv)
    if args.command == "replay":
        manifest = entry.load_manifest(args.manifest)
        log.info("Replaying %s", " ".join(manifest.argv))
        return _dispatch(manifest.argv)

    manifest = _manifest(args, argv)
    args.handler(args, manifest)
    for output in args.output if args.outputs else ():
        entry.write_manifest(output, manifest)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Runs one command and returns the process exit code: 0 on success, 1 when an input or flag
    is invalid and 2 when a requested quantity is undefined for the given input.
    """
    argv = sys.argv[1:] if argv is None else list(argv)
    verbose = "-v" in argv or "--verbose" in argv
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s:%(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return _dispatch(argv)
    except SystemExit as e:
        # argparse reports usage errors with 2, which is reserved for undefined quantities
        return EXIT_INVALID if e.code else EXIT_OK
    except NacUndefinedError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (InvalidSpecError, formats.FormatError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
