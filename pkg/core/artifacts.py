"""Deterministic CSV / JSON / SVG renderings of lab results."""
import io
import json
import math
from typing import Any, Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

import config  # noqa: E402
from .geodesics import leaf_r  # noqa: E402
from .models import ConjugateReport, Trajectory  # noqa: E402

TRAJECTORY_COLUMNS = ["t", "r", "phi", "rdot", "phidot", "clairaut_c"]
EVENT_COLUMNS = ["kind", "t", "r", "phi"]


def trajectory_frame(traj: Trajectory) -> pd.DataFrame:
    clairaut = traj.clairaut_values
    return pd.DataFrame({
        "t": traj.t,
        "r": traj.r,
        "phi": traj.phi,
        "rdot": traj.rdot,
        "phidot": traj.phidot,
        "clairaut_c": clairaut if clairaut is not None else np.full(len(traj), np.nan),
    }, columns=TRAJECTORY_COLUMNS)


def events_frame(traj: Trajectory) -> pd.DataFrame:
    rows = [{"kind": e.kind, "t": e.t, "r": e.state.r, "phi": e.state.phi} for e in traj.events]
    return pd.DataFrame(rows, columns=EVENT_COLUMNS)


def csv_text(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=config.FLOAT_FORMAT, lineterminator="\n")


def _plain(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def json_text(obj: Any) -> str:
    return json.dumps(_plain(obj), ensure_ascii=False, indent=2, sort_keys=True) + "\n"


class StripPlot:
    """Polyline drawing of the strip r∈[−2,2], φ∈[0,π]."""

    def __init__(self, title: Optional[str] = None):
        self.fig, self.ax = plt.subplots(figsize=(8, 6))
        self.ax.set_xlim(*config.SVG_R_LIMITS)
        self.ax.set_ylim(*config.SVG_PHI_LIMITS)
        self.ax.set_xlabel("r")
        self.ax.set_ylabel("phi")
        self.ax.axhline(0.5 * math.pi, color="0.8", linewidth=0.6)
        self.ax.axvline(0.0, color="0.8", linewidth=0.6)
        if title:
            self.ax.set_title(title)

    def trajectory(self, traj: Trajectory, color: str = "C0", label: Optional[str] = None) -> "StripPlot":
        self.ax.plot(traj.r, traj.phi, color=color, linewidth=0.9, label=label)
        return self

    def points(self, r: Sequence[float], phi: Sequence[float], marker: str = "o",
               color: str = "C3", label: Optional[str] = None) -> "StripPlot":
        if len(r):
            self.ax.plot(r, phi, linestyle="none", marker=marker, markersize=4, color=color, label=label)
        return self

    def conjugate_points(self, report: ConjugateReport) -> "StripPlot":
        states = [report.geodesic.state_at(z) for z in report.jacobi_zeros]
        return self.points([s.r for s in states], [s.phi for s in states], marker="x",
                           color="C3", label="conjugate points")

    def leaves(self, kappas: Iterable[float]) -> "StripPlot":
        phi = np.linspace(0.0, math.pi, 241)
        for kappa in kappas:
            self.ax.plot(leaf_r(kappa, phi), phi, color="0.6", linewidth=0.5, linestyle="--")
        return self

    def svg(self) -> str:
        if self.ax.get_legend_handles_labels()[0]:
            self.ax.legend(loc="upper right", fontsize=7)
        buf = io.StringIO()
        with plt.rc_context({"svg.hashsalt": config.SVG_HASHSALT, "svg.fonttype": "none"}):
            self.fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(self.fig)
        return buf.getvalue()
