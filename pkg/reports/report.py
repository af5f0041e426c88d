"""
report.py - parameter sweeps and their tables.

Has the following functions:
- sweep_entropy_gap(specs, tol, jobs): lambda_0, lambda_mu and the gap per extension spec.
- sweep_discontinuity(taus, n, epsilon, grid, tail, jobs): entropy estimate of G_tau per tau.
- scenario_summary(report, other_pieces): plain-text summary with a verdict per row.
- fnv1a_64(data): 64-bit FNV-1a hash used for config provenance.
- write_report(report, path): CSV with 17 significant digits plus a metadata sidecar.

Rows are computed in parallel when jobs > 1, but always assembled in input
order and then sorted by the swept parameter, so the CSV does not depend
on scheduling. Metadata (hash, timestamp, version) lives next to the CSV,
not inside it.
"""

#####################################
# Import Modules
#####################################

# import from standard library
import datetime
import math
import pathlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

# import external packages
import pandas as pd

# import from local modules
from estimators.entropy_estimate import SamplingGrid, separated_entropy, variation_verdict
from maps.smooth_maps import family_G, restrict_to_slice
from symbolic.sft_core import DEFAULT_TOL, spectral_radius
from symbolic.tangency_extend import ExtensionSpec, extend_matrix
from utils.utils_config import canonical_config_text
from utils.utils_errors import ConfigError, InvalidSpecError
from utils.utils_logger import logger

__all__ = [
    "TOOLKIT_VERSION",
    "SweepReport",
    "fnv1a_64",
    "sweep_entropy_gap",
    "sweep_discontinuity",
    "scenario_summary",
    "write_report",
]

TOOLKIT_VERSION = "0.1.0"

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK_64 = 0xFFFFFFFFFFFFFFFF

GAP_COLUMNS = ["n1", "n2", "ell", "lambda_0", "lambda_mu", "gap"]
DISC_COLUMNS = ["tau", "scope", "entropy"]

#####################################
# Report Type
#####################################


@dataclass
class SweepReport:
    kind: str
    frame: pd.DataFrame
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def rows(self) -> list[dict]:
        return self.frame.to_dict(orient="records")


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK_64
    return h


def _metadata(config: dict[str, object]) -> dict[str, str]:
    text = canonical_config_text(config)
    return {
        "config_hash": f"{fnv1a_64(text.encode('utf-8')):016x}",
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "version": TOOLKIT_VERSION,
    }


def _run_rows(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(fn, items))


#####################################
# Symbolic Sweep
#####################################


def _gap_row(spec: ExtensionSpec, tol: float) -> dict:
    lam_0 = spectral_radius(spec.H, tol).radius
    lam_mu = spectral_radius(extend_matrix(spec), tol).radius
    return {
        "n1": spec.n1,
        "n2": spec.n2,
        "ell": spec.ell,
        "lambda_0": lam_0,
        "lambda_mu": lam_mu,
        "gap": math.log(lam_mu) - math.log(lam_0),
    }


def sweep_entropy_gap(specs: Iterable[ExtensionSpec], tol: float = DEFAULT_TOL, jobs: int = 1) -> SweepReport:
    """
    One row per spec, sorted by (ell, n1, n2).

    Raises:
        InvalidSpecError: naming the first invalid row; nothing is computed in that case.
    """
    specs = list(specs)
    for row, spec in enumerate(specs):
        try:
            spec.validate()
        except InvalidSpecError as e:
            logger.error(f"sweep row {row} is invalid: {e.detail}")
            raise InvalidSpecError(f"row {row} (N1={spec.n1}, N2={spec.n2}): {e.detail}") from e

    rows = _run_rows(lambda spec: _gap_row(spec, tol), specs, jobs)
    frame = pd.DataFrame(rows, columns=GAP_COLUMNS)
    frame = frame.sort_values(["ell", "n1", "n2"], kind="mergesort").reset_index(drop=True)
    for _, row in frame.iterrows():
        if row["gap"] <= 0:
            logger.warning(f"non-positive entropy gap at N1={row['n1']}, N2={row['n2']}")

    config = {
        "kind": "sweep-gap",
        "tol": repr(tol),
        "specs": ";".join(f"{s.H!r}:{s.n1}:{s.n2}" for s in specs),
    }
    logger.info(f"entropy gap sweep over {len(frame)} specs")
    return SweepReport(kind="sweep-gap", frame=frame, metadata=_metadata(config))


#####################################
# Discontinuity Sweep
#####################################


def sweep_discontinuity(
    taus: Iterable[float],
    n: int,
    epsilon: float,
    grid: SamplingGrid | None = None,
    tail: float = 0.5,
    jobs: int = 1,
) -> SweepReport:
    """
    Entropy estimate of G_tau for each tau, sorted by tau.

    tau = 0 is estimated on its invariant slice z = 0 (scope "slice"), every
    tau > 0 on the bounding box of the whole ball at the same y spacing
    (scope "ball").
    """
    taus = sorted(set(float(t) for t in taus))
    if 0.0 not in taus:
        raise ConfigError("the tau grid must include 0")
    if any(t < 0 for t in taus):
        raise ConfigError("flow times must be nonnegative")
    grid = grid or SamplingGrid()

    def row(tau: float) -> dict:
        G = family_G(tau)
        if tau == 0.0:
            G, scope, sampling = restrict_to_slice(G, 0.0), "slice", grid
        else:
            scope, sampling = "ball", grid.covering(G)
        estimate = separated_entropy(G, n, epsilon, sampling, tail)
        return {"tau": tau, "scope": scope, "entropy": estimate.value}

    frame = pd.DataFrame(_run_rows(row, taus, jobs), columns=DISC_COLUMNS)
    config = {
        "kind": "sweep-disc",
        "taus": ",".join(repr(t) for t in taus),
        "n": n,
        "epsilon": repr(epsilon),
        "resolution": grid.resolution,
        "curves": grid.curves,
        "tail": repr(tail),
    }
    logger.info(f"discontinuity sweep over {len(frame)} flow times")
    return SweepReport(kind="sweep-disc", frame=frame, metadata=_metadata(config))


#####################################
# Output
#####################################


def scenario_summary(report: SweepReport, other_pieces: tuple[float, ...] = ()) -> str:
    """
    One line per row. For gap sweeps the unfolded horseshoe is piece 0 and
    `other_pieces` are the entropies of the remaining basic sets.
    """
    lines = [f"{report.kind}: {len(report.frame)} rows"]
    if report.kind == "sweep-gap":
        for row in report.rows:
            pieces = [math.log(row["lambda_0"]), *other_pieces]
            verdict = variation_verdict(pieces, 0, 0.0)
            lines.append(
                f"N1={row['n1']} N2={row['n2']} lambda_0={row['lambda_0']:.12g} "
                f"lambda_mu={row['lambda_mu']:.12g} gap={row['gap']:.6g} verdict={verdict.value}"
            )
    else:
        for row in report.rows:
            lines.append(f"tau={row['tau']:g} scope={row['scope']} entropy={row['entropy']:.6g}")
        rows = report.rows
        at_zero = [r["entropy"] for r in rows if r["tau"] == 0.0]
        positive = [r["entropy"] for r in rows if r["tau"] > 0.0]
        if at_zero and positive:
            lines.append(f"jump at tau=0: {at_zero[0] - max(positive):.6g}")
    return "\n".join(lines) + "\n"


def write_report(report: SweepReport, path: pathlib.Path) -> pathlib.Path:
    """Write the CSV and a `<name>.meta` sidecar with the provenance fields."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    report.frame.to_csv(path, index=False, float_format="%.17g")
    meta_path = path.with_suffix(".meta")
    meta_path.write_text("".join(f"{key}={value}\n" for key, value in sorted(report.metadata.items())))
    logger.info(f"Wrote {report.kind} report to {path}")
    return path
