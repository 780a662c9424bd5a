"""
Command-line front end.

    python main.py norm WEIGHT OPERATOR
    python main.py spectrum WEIGHT OPERATOR --method pure_state --json
    python main.py laws --seed 7 --trials 50 --laws gkz radical --out runs/gkz
    python main.py shiftlab --model bilateral_factorial --N-list 20 60 100 --grid 0.25 --out runs/shift

Exit codes: 0 success, 1 mathematical non-applicability (non-member,
non-invertible, failing law), 2 usage or I/O error.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional, Tuple

from src.config import Config
from src.core.aspectrum import SpectrumMethod
from src.core.laws import FuzzConfig, RankPolicy, law_ids
from src.core.shiftlab import ShiftKind, WeightScaleMode
from src.repositories.artifact_repository import json_safe
from src.services import ExperimentService, OperatorResult, OperatorService
from src.services.operator_service import EXIT_USAGE

logger = logging.getLogger(__name__)

TOLERANCE_FLAGS = ("rank_rel_tol", "residual_tol", "set_match_tol", "psd_clamp_tol")


def _dims(value: str) -> Tuple[int, int]:
    try:
        low, high = (int(part) for part in value.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX, got {value!r}") from None
    return low, high


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("tolerances")
    for name in TOLERANCE_FLAGS:
        group.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float, default=None)
    common.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"Logging level (default {Config.LOG_LEVEL})",
    )
    common.add_argument("--json", action="store_true", help="Print the machine-readable report")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="aspectra",
        description="A-weighted spectral computations and theorem fuzzing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("norm", "Membership verdict and A-seminorms"),
        ("adjoint", "Canonical A-adjoint and A^1/2-adjoint"),
        ("spectrum", "A-spectrum and A-spectral radius"),
        ("invert", "A-invertibility by both routes"),
    ):
        cmd = sub.add_parser(name, parents=[common], help=help_text)
        cmd.add_argument("weight", help="Weight matrix file (MatrixFile JSON)")
        cmd.add_argument("operator", help="Operator matrix file (MatrixFile JSON)")
        if name == "spectrum":
            cmd.add_argument(
                "--method",
                default=SpectrumMethod.COMPRESSION.value,
                choices=[m.value for m in SpectrumMethod],
            )
            cmd.add_argument("--doublings", type=int, default=Config.GELFAND_DOUBLINGS)
        if name == "invert":
            cmd.add_argument("--out", default=None, help="Write the A-inverse to this file")
        if name == "adjoint":
            cmd.add_argument("--out", default=None, help="Directory for a_adjoint.json and half_adjoint.json")

    laws_cmd = sub.add_parser("laws", parents=[common], help="Run the seeded law suite")
    laws_cmd.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
    laws_cmd.add_argument("--trials", type=int, default=Config.DEFAULT_TRIALS)
    laws_cmd.add_argument("--dims", type=_dims, default=Config.DEFAULT_DIMS, help="MIN,MAX dimension range")
    laws_cmd.add_argument("--laws", nargs="+", default=None, help=f"Subset of: {', '.join(law_ids())}")
    laws_cmd.add_argument("--rank-policy", default=RankPolicy.MIXED.value, choices=[p.value for p in RankPolicy])
    laws_cmd.add_argument("--scale", type=float, default=Config.DEFAULT_SCALE)
    laws_cmd.add_argument("--spread", type=float, default=Config.DEFAULT_SPREAD)
    laws_cmd.add_argument("--out", default=None, help="Directory for reports, manifest and counterexamples")

    shift_cmd = sub.add_parser("shiftlab", parents=[common], help="Truncated weighted-shift scans")
    shift_cmd.add_argument("--model", required=True, choices=[k.value for k in ShiftKind])
    shift_cmd.add_argument("--N-list", dest="N_list", type=int, nargs="+", default=[20, 60, 100])
    shift_cmd.add_argument("--grid", type=float, default=0.25, help="Grid spacing over [-1.5, 1.5]^2")
    shift_cmd.add_argument("--mode", default=WeightScaleMode.LINEAR.value, choices=[m.value for m in WeightScaleMode])
    shift_cmd.add_argument("--out", default=None, help="Directory for CSV tables and manifest")

    gen_cmd = sub.add_parser("generate", parents=[common], help="Write seeded random weight and member files")
    gen_cmd.add_argument("--out", required=True)
    gen_cmd.add_argument("--n", type=int, required=True)
    gen_cmd.add_argument("--rank", type=int, required=True)
    gen_cmd.add_argument("--seed", type=int, default=Config.DEFAULT_SEED)
    gen_cmd.add_argument("--spread", type=float, default=Config.DEFAULT_SPREAD)
    gen_cmd.add_argument("--scale", type=float, default=Config.DEFAULT_SCALE)
    return parser


def _emit(result: OperatorResult, as_json: bool) -> int:
    if as_json:
        print(json.dumps(json_safe(result.payload), indent=2, sort_keys=True))
    else:
        for line in result.lines:
            print(line)
    if result.error_message:
        print(f"error: {result.error_message}", file=sys.stderr)
    return result.exit_code


def _split_law_ids(values: Optional[List[str]]) -> Optional[List[str]]:
    if not values:
        return None
    return [part for value in values for part in value.split(",") if part]


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        logging.getLogger().setLevel(args.log_level)

    overrides = {name: getattr(args, name) for name in TOLERANCE_FLAGS if getattr(args, name) is not None}
    try:
        tol = Config.tolerances(**overrides)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.command in ("norm", "adjoint", "spectrum", "invert"):
        service = OperatorService(tol)
        if args.command == "norm":
            result = service.norm(args.weight, args.operator)
        elif args.command == "adjoint":
            result = service.adjoint(args.weight, args.operator, args.out)
        elif args.command == "spectrum":
            result = service.spectrum(args.weight, args.operator, args.method, args.doublings)
        else:
            result = service.invert(args.weight, args.operator, args.out)
        return _emit(result, args.json)

    experiments = ExperimentService(tolerance_overrides=overrides)
    if args.command == "laws":
        try:
            cfg = FuzzConfig(
                seed=args.seed,
                trials=args.trials,
                dim_range=args.dims,
                rank_policy=RankPolicy(args.rank_policy),
                scale=args.scale,
                spread=args.spread,
                tol=tol,
            )
        except ValueError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_USAGE
        result = experiments.run_laws(cfg, _split_law_ids(args.laws), args.out)
    elif args.command == "shiftlab":
        result = experiments.run_shiftlab(args.model, args.N_list, args.grid, args.mode, args.out)
    else:
        result = experiments.generate(args.out, args.n, args.rank, args.seed, args.spread, args.scale)
    return _emit(result, args.json)
