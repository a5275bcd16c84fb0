"""Scaling measurements over Church words and their figures."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

from . import constraints as C
from . import encodings as E
from . import fterm as F


@dataclass
class Row:
    length: int
    word_size: int
    word_atoms: int
    rev_size: int
    rev_steps: int


def measure(lengths, fuel: int = 1_000_000, pattern: str = "10") -> list:
    rows = []
    for n in lengths:
        bits = (pattern * n)[:n]
        w = E.word(bits)
        r = E.rev_applied(bits)
        _, steps = F.beta_normalize(r, fuel)
        rows.append(Row(n, F.term_size(w), len(C.gen_all(w).store), F.term_size(r), steps))
    return rows


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    mx, my = sum(lx) / len(lx), sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


def quadratic_constant(xs, ys) -> float:
    """Smallest c with y <= c * x^2 on every point."""
    return max(y / x ** 2 for x, y in zip(xs, ys))


def write_csv(rows, path: Path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(asdict(rows[0])))
        w.writeheader()
        for r in rows:
            w.writerow(asdict(r))


def plot(rows, outdir: Path) -> list:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    panels = [
        ("atoms_vs_size.png", "word_size", "word_atoms", "constraint atoms"),
        ("steps_vs_size.png", "rev_size", "rev_steps", "beta steps of rev(w)"),
    ]
    for name, xk, yk, label in panels:
        xs = [getattr(r, xk) for r in rows]
        ys = [getattr(r, yk) for r in rows]
        c = quadratic_constant(xs, ys)
        fig, ax = plt.subplots(figsize=(5, 4))
        ax.loglog(xs, ys, "o-", label=label)
        ax.loglog(xs, [c * x ** 2 for x in xs], "--", label=f"{c:.3g}·size²")
        ax.set_xlabel("term size")
        ax.set_ylabel(label)
        ax.set_title(f"log-log slope {loglog_slope(xs, ys):.2f}")
        ax.legend()
        fig.tight_layout()
        fig.savefig(outdir / name, dpi=120)
        plt.close(fig)
        written.append(outdir / name)
    return written
