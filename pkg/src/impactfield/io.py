"""CSV emission and re-ingestion for study results.

Machine-facing values are written with ``repr`` so every float
round-trips exactly; unreachable distances serialize as the literal
string ``inf``. All writers go through an atomic temp-file-plus-rename
so a crashed run never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .analysis import (
    CorrelationRecord,
    CurvePoint,
    DecayCurve,
    ExponentialFit,
    StudyCell,
    Treatment,
)
from .errors import ValidationError
from .graph import DistanceMatrix, Graph
from .impact import ImpactMatrix
from .spectral import SpectralDecomposition

__all__ = [
    "atomic_write_text",
    "write_curves_csv",
    "read_curves_csv",
    "write_fits_csv",
    "read_fits_csv",
    "write_correlations_csv",
    "read_correlations_csv",
    "write_dyads_csv",
    "read_dyads_csv",
    "write_distance_csv",
    "write_decomposition_csv",
    "ManifestEntry",
    "write_manifest_csv",
    "read_manifest_csv",
]

CURVES_HEADER = ["network", "treatment", "gamma", "distance", "mean_impact", "n_pairs"]
FITS_HEADER = ["network", "treatment", "gamma", "d_min", "d_max", "slope", "intercept", "r_squared"]
CORRELATIONS_HEADER = ["network", "treatment", "gamma", "order", "pearson_r", "n_dyads"]
MANIFEST_HEADER = ["network", "n", "edges", "mean_degree", "diameter", "status"]


def _fmt(value: float) -> str:
    return repr(float(value))


def atomic_write_text(path: Path | str, text: str) -> None:
    """Write text to path via a same-directory temp file and rename."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _read_rows(path: Path | str, expected_header: list[str]) -> list[dict[str, str]]:
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != expected_header:
            raise ValidationError(
                f"{path}: header {reader.fieldnames} does not match {expected_header}"
            )
        return list(reader)


def write_curves_csv(path: Path | str, cells: list[StudyCell]) -> None:
    rows = []
    for cell in cells:
        if cell.curve is None:
            continue
        for point in cell.curve.points:
            rows.append(
                [
                    cell.network,
                    cell.treatment.value,
                    _fmt(cell.gamma),
                    str(point.distance),
                    _fmt(point.mean_impact),
                    str(point.n_pairs),
                ]
            )
    atomic_write_text(path, _csv_text(CURVES_HEADER, rows))


def read_curves_csv(path: Path | str) -> dict[tuple[str, Treatment, float], DecayCurve]:
    grouped: dict[tuple[str, Treatment, float], list[CurvePoint]] = {}
    for row in _read_rows(path, CURVES_HEADER):
        key = (row["network"], Treatment(row["treatment"]), float(row["gamma"]))
        grouped.setdefault(key, []).append(
            CurvePoint(
                distance=int(row["distance"]),
                mean_impact=float(row["mean_impact"]),
                n_pairs=int(row["n_pairs"]),
            )
        )
    return {
        key: DecayCurve(gamma=key[2], treatment=key[1], points=tuple(points))
        for key, points in grouped.items()
    }


def write_fits_csv(path: Path | str, cells: list[StudyCell]) -> None:
    rows = []
    for cell in cells:
        if cell.fit is None:
            continue
        rows.append(
            [
                cell.network,
                cell.treatment.value,
                _fmt(cell.gamma),
                str(cell.fit.d_range[0]),
                str(cell.fit.d_range[1]),
                _fmt(cell.fit.slope),
                _fmt(cell.fit.intercept),
                _fmt(cell.fit.r_squared),
            ]
        )
    atomic_write_text(path, _csv_text(FITS_HEADER, rows))


def read_fits_csv(path: Path | str) -> dict[tuple[str, Treatment, float], ExponentialFit]:
    out = {}
    for row in _read_rows(path, FITS_HEADER):
        key = (row["network"], Treatment(row["treatment"]), float(row["gamma"]))
        out[key] = ExponentialFit(
            slope=float(row["slope"]),
            intercept=float(row["intercept"]),
            r_squared=float(row["r_squared"]),
            d_range=(int(row["d_min"]), int(row["d_max"])),
        )
    return out


def write_correlations_csv(path: Path | str, cells: list[StudyCell]) -> None:
    rows = []
    for cell in cells:
        for record in cell.correlations:
            rows.append(
                [
                    record.network,
                    record.treatment.value,
                    _fmt(record.gamma),
                    str(record.order),
                    _fmt(record.pearson_r),
                    str(record.n_dyads),
                ]
            )
    atomic_write_text(path, _csv_text(CORRELATIONS_HEADER, rows))


def read_correlations_csv(path: Path | str) -> list[CorrelationRecord]:
    return [
        CorrelationRecord(
            network=row["network"],
            gamma=float(row["gamma"]),
            treatment=Treatment(row["treatment"]),
            order=int(row["order"]),
            pearson_r=float(row["pearson_r"]),
            n_dyads=int(row["n_dyads"]),
        )
        for row in _read_rows(path, CORRELATIONS_HEADER)
    ]


def _dyads_header(orders: list[int]) -> list[str]:
    return ["src", "dst", "dist", "exact"] + [f"approx{order}" for order in orders]


def write_dyads_csv(
    path: Path | str,
    graph: Graph,
    dist: DistanceMatrix,
    exact: ImpactMatrix,
    approximations: dict[int, ImpactMatrix],
) -> None:
    """Joint per-dyad dump: every off-diagonal ordered pair, row-major.

    Unreachable pairs are kept, with ``inf`` in the distance column.
    """
    orders = sorted(approximations)
    rows = []
    for i in range(graph.n):
        for j in range(graph.n):
            if i == j:
                continue
            d = dist.distance(i, j)
            row = [
                graph.label_of(i),
                graph.label_of(j),
                "inf" if d is None else str(d),
                _fmt(exact.values[i, j]),
            ]
            row.extend(_fmt(approximations[order].values[i, j]) for order in orders)
            rows.append(row)
    atomic_write_text(path, _csv_text(_dyads_header(orders), rows))


def read_dyads_csv(path: Path | str) -> list[dict[str, object]]:
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        names = reader.fieldnames or []
        if names[:4] != ["src", "dst", "dist", "exact"]:
            raise ValidationError(f"{path}: unexpected dyad header {names}")
        out = []
        for row in reader:
            parsed: dict[str, object] = {
                "src": row["src"],
                "dst": row["dst"],
                "dist": float("inf") if row["dist"] == "inf" else int(row["dist"]),
                "exact": float(row["exact"]),
            }
            for name in names[4:]:
                parsed[name] = float(row[name])
            out.append(parsed)
        return out


def write_distance_csv(
    path: Path | str, dist: DistanceMatrix, labels: tuple[str, ...] | None = None
) -> None:
    """All ordered pairs as ``src,dst,dist`` with ``inf`` for no path."""
    rows = []
    for i in range(dist.n):
        for j in range(dist.n):
            d = dist.distance(i, j)
            rows.append(
                [
                    labels[i] if labels else str(i),
                    labels[j] if labels else str(j),
                    "inf" if d is None else str(d),
                ]
            )
    atomic_write_text(path, _csv_text(["src", "dst", "dist"], rows))


def write_decomposition_csv(directory: Path | str, decomposition: SpectralDecomposition) -> None:
    """Debugging dump of a decomposition; not a stability-guaranteed format.

    Writes ``modes.csv`` plus long-format right-vector and left-row
    tables under the given directory.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    mode_rows = [
        [str(mode), _fmt(value.real), _fmt(value.imag), _fmt(decomposition.residual)]
        for mode, value in enumerate(decomposition.eigenvalues)
    ]
    atomic_write_text(
        directory / "modes.csv",
        _csv_text(["mode", "eigenvalue_re", "eigenvalue_im", "residual"], mode_rows),
    )
    for name, matrix, transpose in (
        ("right_vectors.csv", decomposition.right_vectors, True),
        ("left_rows.csv", decomposition.left_rows, False),
    ):
        rows = []
        for mode in range(decomposition.num_modes):
            vector = matrix[:, mode] if transpose else matrix[mode, :]
            for node, entry in enumerate(vector):
                rows.append([str(mode), str(node), _fmt(entry.real), _fmt(entry.imag)])
        atomic_write_text(directory / name, _csv_text(["mode", "node", "re", "im"], rows))


@dataclass(frozen=True)
class ManifestEntry:
    """Per-network summary line of a corpus run."""

    network: str
    n: int | None
    edges: int | None
    mean_degree: float | None
    diameter: int | None
    status: str


def write_manifest_csv(path: Path | str, entries: list[ManifestEntry]) -> None:
    rows = [
        [
            entry.network,
            "" if entry.n is None else str(entry.n),
            "" if entry.edges is None else str(entry.edges),
            "" if entry.mean_degree is None else _fmt(entry.mean_degree),
            "" if entry.diameter is None else str(entry.diameter),
            entry.status,
        ]
        for entry in entries
    ]
    atomic_write_text(path, _csv_text(MANIFEST_HEADER, rows))


def read_manifest_csv(path: Path | str) -> list[ManifestEntry]:
    return [
        ManifestEntry(
            network=row["network"],
            n=int(row["n"]) if row["n"] else None,
            edges=int(row["edges"]) if row["edges"] else None,
            mean_degree=float(row["mean_degree"]) if row["mean_degree"] else None,
            diameter=int(row["diameter"]) if row["diameter"] else None,
            status=row["status"],
        )
        for row in _read_rows(path, MANIFEST_HEADER)
    ]
