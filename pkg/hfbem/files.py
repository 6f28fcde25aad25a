"""Byte-stable writers for the CSV, data and gnuplot files produced by the experiments."""
import csv
import math
import os
from collections.abc import Iterable
from collections.abc import Sequence
from pathlib import Path
from typing import Any
from typing import Optional
from typing import Union

import numpy as np

from hfbem._logging import logger

PathLike = Union[str, os.PathLike]

log = logger(__name__)

ERROR_VS_DEGREE_GP = """\
# gnuplot script: log10 L2 error against polynomial degree, one curve per wavenumber
set terminal pngcairo size 800,600
set output 'error_vs_degree.png'
set xlabel 'd'
set ylabel 'log10 L2 error'
set key outside right
plot {curves}
"""

POINTWISE_ERROR_GP = """\
# gnuplot script: pointwise log10 error along the boundary for k = {k}
set terminal pngcairo size 800,600
set output 'pointwise_error_k{k}.png'
set datafile separator ','
set xlabel 't'
set ylabel 'log10 |eta - eta_hat|'
set key outside right
plot {curves}
"""


def fmt(value: Any) -> str:
    """17 significant digits for floats (enough to round-trip), plain text otherwise."""
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        return format(float(value), ".17g")
    if value is None:
        return ""
    return str(value)


def write_table(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    log.debug(f"wrote {path}")


def write_columns(path: PathLike, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    """One row per sample of equally long columns."""
    write_table(path, header, zip(*columns))


def write_density_csv(path: PathLike, nodes: np.ndarray, eta: np.ndarray, envelope: np.ndarray) -> None:
    write_columns(
        path,
        ["t", "re_eta", "im_eta", "re_eta_slow", "im_eta_slow"],
        [nodes, eta.real, eta.imag, envelope.real, envelope.imag],
    )


def write_galerkin_csv(
    path: PathLike,
    nodes: np.ndarray,
    eta_hat: np.ndarray,
    regions: Sequence[tuple[int, str, float, float, float]],
) -> None:
    """Approximation at the nodes, a blank line, then per-region coefficient norms."""
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["t", "re_eta_hat", "im_eta_hat"])
        for row in zip(nodes, eta_hat.real, eta_hat.imag):
            writer.writerow([fmt(v) for v in row])
        fp.write("\n")
        writer.writerow(["region", "label", "a", "b", "coefficient_l2"])
        for row in regions:
            writer.writerow([fmt(v) for v in row])
    log.debug(f"wrote {path}")


def write_error_vs_degree(path: PathLike, ks: Sequence[float], degrees: Sequence[int], table: np.ndarray) -> None:
    """Rows of d followed by the log10 error for each k; table[i, j] belongs to degrees[i], ks[j]."""
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        fp.write("# d " + " ".join(f"k={fmt(float(k))}" for k in ks) + "\n")
        for d, row in zip(degrees, table):
            fp.write(" ".join([str(d)] + [fmt(float(v)) for v in row]) + "\n")
    log.debug(f"wrote {path}")


def write_gnuplot_scripts(directory: PathLike, ks: Sequence[float], pointwise_k: Optional[float] = None) -> list[Path]:
    """error_vs_degree.gp for every k and pointwise_error.gp for pointwise_k (the first k when unset)."""
    directory = Path(directory)
    curves = ", ".join(
        f"'error_vs_degree.dat' using 1:{i + 2} with linespoints title 'k={fmt(float(k))}'" for i, k in enumerate(ks)
    )
    written = [directory / "error_vs_degree.gp", directory / "pointwise_error.gp"]
    written[0].write_text(ERROR_VS_DEGREE_GP.format(curves=curves), encoding="utf-8")
    k_plot = fmt(float(ks[0] if pointwise_k is None else pointwise_k))
    pointwise = (
        f"'pointwise_error_k{k_plot}.csv' using 1:i with lines title columnhead(i)"
    )
    script = POINTWISE_ERROR_GP.format(k=k_plot, curves=f"for [i=2:*] {pointwise}")
    written[1].write_text(script, encoding="utf-8")
    return written


def pointwise_filename(k: float) -> str:
    return f"pointwise_error_k{fmt(float(k))}.csv"
