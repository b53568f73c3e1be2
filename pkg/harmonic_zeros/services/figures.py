import io
from typing import Optional, Sequence

import matplotlib
import numpy as np
from matplotlib import patches
from matplotlib.figure import Figure

from harmonic_zeros import config
from harmonic_zeros.errors import InvalidParameter
from harmonic_zeros.services.critical_curve import CriticalCurve
from harmonic_zeros.services.harmonic import Sense
from harmonic_zeros.services.theorems import AnnulusBounds, SweepRow
from harmonic_zeros.services.zeros import ZeroCensus

# Fixed ids in the SVG output
matplotlib.rcParams["svg.hashsalt"] = "harmonic-zeros"

DPI = 100

# Figure palette
INK = "#1B1856"
CURVE = "#C0392B"
AXES = "#ADB5BD"
MUTED = "#6C757D"


class FigureService:
    """SVG figures of zeros, critical curves, annuli and sweep heatmaps"""

    def __init__(self, size: Optional[int] = None):
        self.size = size or config["svg_size"]
        if self.size < 64:
            raise InvalidParameter("SVG size must be >= 64", {"svg_size": self.size})

    def _plane(self, radius: float, title: str):
        """Square complex-plane axes over [-1.1 radius, 1.1 radius] with the unit circle"""
        fig = Figure(figsize=(self.size / DPI, self.size / DPI), dpi=DPI)
        ax = fig.subplots()
        extent = 1.1 * radius
        ax.set_xlim(-extent, extent)
        ax.set_ylim(-extent, extent)
        ax.set_aspect("equal")
        ax.axhline(0, color=AXES, linewidth=0.8)
        ax.axvline(0, color=AXES, linewidth=0.8)
        ax.add_patch(patches.Circle((0, 0), 1.0, fill=False, color=MUTED, linestyle="--", linewidth=0.8))
        ax.set_title(title, fontsize=9)
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        return fig, ax

    @staticmethod
    def _save(fig: Figure) -> str:
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
        return buffer.getvalue()

    @staticmethod
    def _scatter_zeros(ax, census: ZeroCensus):
        """Filled = preserving, hollow = reversing, red squares = critical"""
        groups = {sense: [z.location for z in census.zeros if z.sense is sense] for sense in Sense}
        preserving = np.array(groups[Sense.PRESERVING], dtype=complex)
        reversing = np.array(groups[Sense.REVERSING], dtype=complex)
        critical = np.array(groups[Sense.CRITICAL], dtype=complex)
        ax.scatter(preserving.real, preserving.imag, s=22, color=INK, label="preserving", zorder=3)
        ax.scatter(
            reversing.real, reversing.imag, s=22, facecolors="none", edgecolors=INK,
            linewidths=1.2, label="reversing", zorder=3,
        )
        if critical.size:
            ax.scatter(critical.real, critical.imag, s=26, marker="s", color=CURVE, label="critical", zorder=3)
        ax.legend(frameon=False, fontsize=7, loc="upper right")

    def render_zeros(self, census: ZeroCensus, title: str = "Zeros") -> str:
        fig, ax = self._plane(census.outer_radius, title)
        self._scatter_zeros(ax, census)
        return self._save(fig)

    def render_curve(
        self, curve: CriticalCurve, radius: float, census: Optional[ZeroCensus] = None,
        title: str = "Critical curve",
    ) -> str:
        fig, ax = self._plane(radius, title)
        for loop in curve.loops:
            closed = np.append(loop.points, loop.points[0])
            ax.plot(closed.real, closed.imag, color=CURVE, linewidth=1.0)
        if census is not None:
            self._scatter_zeros(ax, census)
        return self._save(fig)

    def render_annuli(self, bounds: AnnulusBounds, census: ZeroCensus, title: str = "Annuli") -> str:
        """R1..R4 circles with the census zeros overlaid"""
        fig, ax = self._plane(max(census.outer_radius, bounds.R4), title)
        for label, radius, color in (
            ("R1", bounds.R1, INK), ("R2", bounds.R2, INK), ("R3", bounds.R3, CURVE), ("R4", bounds.R4, CURVE),
        ):
            ax.add_patch(patches.Circle((0, 0), radius, fill=False, color=color, linewidth=0.9))
            ax.annotate(label, (radius, 0), xytext=(2, 2), textcoords="offset points", fontsize=7, color=color)
        self._scatter_zeros(ax, census)
        return self._save(fig)

    def render_sweep(self, rows: Sequence[SweepRow], title: str = "Sweep") -> str:
        """Heatmap of census totals over the (a, b) grid; failed cells are hatched"""
        a_values = sorted({row.a for row in rows})
        b_values = sorted({row.b for row in rows})
        totals = np.full((len(b_values), len(a_values)), np.nan)
        for row in rows:
            if row.total is not None:
                totals[b_values.index(row.b), a_values.index(row.a)] = row.total

        fig = Figure(figsize=(self.size / DPI, self.size / DPI), dpi=DPI)
        ax = fig.subplots()
        edges_a = np.arange(len(a_values) + 1) - 0.5
        edges_b = np.arange(len(b_values) + 1) - 0.5
        ax.set_xlim(edges_a[0], edges_a[-1])
        ax.set_ylim(edges_b[0], edges_b[-1])
        if not np.isnan(totals).all():
            mesh = ax.pcolormesh(edges_a, edges_b, np.ma.masked_invalid(totals), cmap="viridis", shading="flat")
            fig.colorbar(mesh, ax=ax, label="zeros")

        for i, j in zip(*np.nonzero(np.isnan(totals))):
            ax.add_patch(
                patches.Rectangle(
                    (j - 0.5, i - 0.5), 1, 1, facecolor=AXES, edgecolor=MUTED, hatch="//", linewidth=0.5,
                )
            )
        if len(a_values) * len(b_values) <= 400:
            for i, j in zip(*np.nonzero(~np.isnan(totals))):
                ax.text(j, i, f"{int(totals[i, j])}", ha="center", va="center", fontsize=6, color="white")

        ax.set_xticks(range(len(a_values)), [f"{a:g}" for a in a_values], fontsize=6, rotation=90)
        ax.set_yticks(range(len(b_values)), [f"{b:g}" for b in b_values], fontsize=6)
        ax.set_xlabel("a")
        ax.set_ylabel("b")
        ax.set_title(title, fontsize=9)
        return self._save(fig)
