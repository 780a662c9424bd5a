import logging
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.config import Config
from src.core import laws, shiftlab, weightspace
from src.core.errors import UnknownLaw
from src.repositories import ArtifactRepository, MatrixRepository
from src.services.operator_service import EXIT_NOT_APPLICABLE, EXIT_OK, EXIT_USAGE, OperatorResult, guarded
from src.utils.seeding import derive_seed

logger = logging.getLogger(__name__)

SCAN_COLUMNS = ["lambda_re", "lambda_im", "N", "growth", "status"]
DISC_COLUMNS = ["lambda_re", "lambda_im", "modulus", "ratio", "score", "divergent"]
LAW_REPORTS_NAME = "law_reports.json"
PROBE_INDICES = 12


@dataclass
class LawsRunResult(OperatorResult):
    reports: List[laws.LawReport] = field(default_factory=list)

    @property
    def failed_laws(self) -> List[str]:
        return [r.law_id for r in self.reports if not r.ok]


@dataclass
class ShiftlabRunResult(OperatorResult):
    disc: Optional[shiftlab.DiscReport] = None
    scans: List[shiftlab.ScanResult] = field(default_factory=list)


class ExperimentService:
    """Law-suite runs, shift-lab scans and random matrix generation."""

    def __init__(
        self,
        matrix_repository: Optional[MatrixRepository] = None,
        tolerance_overrides: Optional[Dict[str, float]] = None,
    ):
        self.matrix_repo = matrix_repository or MatrixRepository()
        self.tolerance_overrides = {k: v for k, v in (tolerance_overrides or {}).items() if v is not None}

    def run_laws(
        self,
        cfg: laws.FuzzConfig,
        law_ids: Optional[Sequence[str]] = None,
        out_dir: Optional[str] = None,
    ) -> LawsRunResult:
        try:
            reports = laws.run_suite(cfg, law_ids)
        except UnknownLaw as e:
            logger.error(f"laws: {e}")
            return LawsRunResult(success=False, exit_code=EXIT_USAGE, error_message=str(e.args[0]))

        result = LawsRunResult(
            success=all(r.ok for r in reports),
            reports=reports,
            payload={"config": cfg.to_dict(), "laws": [r.to_dict() for r in reports]},
        )
        for r in reports:
            status = "PASS" if r.ok else "FAIL"
            extra = f" inconclusive={r.inconclusive}" if r.inconclusive else ""
            result.lines.append(
                f"{r.law_id:<22} {status} {r.passed}/{r.trials} worst={r.worst_deviation:.3e}{extra}"
            )
        if not result.success:
            result.exit_code = EXIT_NOT_APPLICABLE
            result.error_message = f"Failing laws: {', '.join(result.failed_laws)}"

        if out_dir:
            try:
                repo = ArtifactRepository(out_dir)
                result.written.append(repo.write_json(LAW_REPORTS_NAME, result.payload))
                for r in reports:
                    if r.counterexample is not None:
                        bundle = {"law_id": r.law_id, "config": cfg.to_dict(), **r.counterexample.to_dict()}
                        result.written.append(repo.write_json(f"counterexample_{r.law_id}.json", bundle))
                result.written.append(repo.write_manifest(
                    "laws",
                    {**cfg.to_dict(), "laws": list(law_ids) if law_ids else laws.law_ids()},
                    self.tolerance_overrides,
                    seed=cfg.seed,
                ))
            except OSError as e:
                logger.error(f"laws: could not write artifacts: {e}")
                return LawsRunResult(success=False, exit_code=EXIT_USAGE, reports=reports, error_message=str(e))
        return result

    @guarded
    def run_shiftlab(
        self,
        kind: str,
        N_list: Sequence[int],
        grid_density: float = 0.25,
        mode: str = shiftlab.WeightScaleMode.LINEAR.value,
        out_dir: Optional[str] = None,
    ) -> ShiftlabRunResult:
        if grid_density <= 0:
            raise ValueError(f"grid density must be positive, got {grid_density}")
        N_list = sorted(int(N) for N in N_list)
        if not N_list:
            raise ValueError("at least one truncation size is required")
        model = shiftlab.ShiftModel(shiftlab.ShiftKind(kind), N_list[-1], shiftlab.WeightScaleMode(mode))
        shiftlab.ShiftModel(model.kind, N_list[0], model.weight_scale_mode)
        result = ShiftlabRunResult(success=True, payload={"model": model.to_dict(), "N_list": N_list})

        if model.kind == shiftlab.ShiftKind.UNILATERAL_HALVED:
            norm_T, norm_L, residual = shiftlab.example_one_norms(model.N)
            result.payload.update({"norm_T": norm_T, "norm_L": norm_L, "adjoint_residual": residual})
            result.lines.append(f"{norm_T:.12g}, {norm_L:.12g}")
            result.scans = shiftlab.resolvent_scan(model, shiftlab.disc_grid(grid_density), N_list)
        else:
            if len(N_list) < 2:
                raise ValueError("bilateral_factorial scans need at least two truncation sizes")
            disc = shiftlab.disc_report(model, grid_density, N_list)
            result.disc = disc
            result.scans = disc.scans
            top = max(min(model.index_offset + model.N - 2, PROBE_INDICES), 1)
            ratios = shiftlab.vector_ratio_probe(model, list(range(1, top + 1)))
            result.payload.update({
                "divergent": disc.divergent_count,
                "bounded": disc.bounded_count,
                "score_threshold": disc.score_threshold,
                "resolvable_radius": disc.resolvable_radius,
                "vector_ratios": ratios,
            })
            result.lines.append(
                f"divergent: {disc.divergent_count}, bounded: {disc.bounded_count} "
                f"(resolvable radius {disc.resolvable_radius:.3f})"
            )
            result.lines.append("vector ratios n=1..{}: {}".format(top, ", ".join(f"{r:.6g}" for r in ratios)))

        if out_dir:
            repo = ArtifactRepository(out_dir)
            result.written.append(repo.write_csv("scan.csv", (s.to_row() for s in result.scans), SCAN_COLUMNS))
            if result.disc is not None:
                result.written.append(
                    repo.write_csv("disc_scores.csv", (r.to_row() for r in result.disc.rows), DISC_COLUMNS)
                )
            result.written.append(repo.write_manifest(
                "shiftlab",
                {"model": model.kind.value, "N_list": N_list, "grid": grid_density, "mode": model.weight_scale_mode.value},
                self.tolerance_overrides,
            ))
        return result

    @guarded
    def generate(
        self,
        out_dir: str,
        n: int,
        rank: int,
        seed: int = Config.DEFAULT_SEED,
        spread: float = Config.DEFAULT_SPREAD,
        scale: float = Config.DEFAULT_SCALE,
    ) -> OperatorResult:
        """Writes weight.json, member.json and nonmember.json for a seeded random weight."""
        w = weightspace.random_weight(derive_seed(seed, "generate", "weight"), n, rank, spread)
        member = weightspace.random_in_MA(derive_seed(seed, "generate", "member"), w, scale)
        result = OperatorResult(success=True, exit_code=EXIT_OK)
        result.written.append(self.matrix_repo.save(os.path.join(out_dir, "weight.json"), w.A))
        result.written.append(self.matrix_repo.save(os.path.join(out_dir, "member.json"), member.T))
        if rank < n:
            perturbation = weightspace.complex_gaussian(
                np.random.default_rng(derive_seed(seed, "generate", "nonmember")), (rank, n - rank), scale
            )
            nonmember = member.T + w.U @ perturbation @ w.V.conj().T
            result.written.append(self.matrix_repo.save(os.path.join(out_dir, "nonmember.json"), nonmember))

        repo = ArtifactRepository(out_dir)
        result.written.append(repo.write_manifest(
            "generate",
            {"n": n, "rank": rank, "spread": spread, "scale": scale},
            self.tolerance_overrides,
            seed=seed,
        ))
        result.payload = {"weight_rank": w.rank, "n": n, "files": list(result.written)}
        result.lines.extend(f"wrote {path}" for path in result.written)
        return result
