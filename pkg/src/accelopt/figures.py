"""Convergence-figure rendering for the report path.

One figure per problem point: best-so-far objective value versus iteration,
log scale, one curve per solver.  Files land next to the delimited output.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

STYLE = {
    "figure.figsize": (6.4, 4.2),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.labelsize": 11,
    "legend.fontsize": 9,
    "lines.linewidth": 1.4,
}


def _cell_key(trace):
    return (trace.problem, trace.params)


def render_convergence(traces, out_dir):
    """Render one PNG per (problem, params) group; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    groups = {}
    for trace in traces:
        groups.setdefault(_cell_key(trace), []).append(trace)

    written = []
    with plt.rc_context(STYLE):
        for (problem, params), cell_traces in groups.items():
            fig, ax = plt.subplots()
            for trace in cell_traces:
                ks = [r.k for r in trace.records]
                hs = np.minimum.accumulate([r.h for r in trace.records])
                if not ks:
                    continue
                ax.plot(ks, hs, label=trace.solver)
            ax.set_yscale("log")
            ax.set_xlabel("iteration")
            ax.set_ylabel("best objective value")
            title = problem if not params else f"{problem} ({params})"
            ax.set_title(title)
            ax.legend()
            fig.tight_layout()
            stem = f"{problem}__{params or 'default'}".replace("/", "_")
            path = out / f"{stem}.png"
            fig.savefig(path, dpi=150)
            plt.close(fig)
            written.append(path)
    return written
