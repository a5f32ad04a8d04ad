"""CSV snapshots and gnuplot scripts."""
import csv
import os

import numpy as np


def _fmt(x):
    return repr(float(x))


def snapshot_columns(system):
    return ["t", "x", *system.components, "u", "eta", "Pi"]


def write_snapshot(path, system, field):
    """One row per cell; floats are written in shortest round-trip form."""
    W = field.states
    cols = [field.grid.centers, *W, system.velocity(W), system.entropy(W), system.pressure(W)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(snapshot_columns(system))
        for i in range(W.shape[1]):
            w.writerow([_fmt(field.time)] + [_fmt(c[i]) for c in cols])
    return path


def read_snapshot(path):
    """Return ``(header, data)`` with ``data`` of shape ``(n_rows, n_cols)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])


def write_profiles_script(path, files, system):
    names = [os.path.basename(f) for f in files]
    lst = " ".join(names)
    first = system.components[0]
    lines = [
        "# gnuplot script: profiles of the first component, velocity and entropy",
        "set datafile separator ','",
        "set terminal pngcairo size 1500,450",
        "set output 'profiles.png'",
        f"files = \"{lst}\"",
        "set multiplot layout 1,3",
        "set xlabel 'x'",
        f"set title '{first}'",
        "plot for [f in files] f using 'x':'" + first + "' with lines title f",
        "set title 'u'",
        "plot for [f in files] f using 'x':'u' with lines title f",
        "set title 'eta'",
        "plot for [f in files] f using 'x':'eta' with lines title f",
        "unset multiplot",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def write_convergence(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n_cells", "dx", "l1", "order"])
        for r in rows:
            w.writerow([r.n_cells, _fmt(r.dx), _fmt(r.l1), _fmt(r.order)])
    return path


def write_convergence_script(path, csv_name="convergence.csv"):
    lines = [
        "# gnuplot script: frame-shift L1 distance against cell size",
        "set datafile separator ','",
        "set terminal pngcairo size 700,500",
        "set output 'convergence.png'",
        "set logscale xy",
        "set xlabel 'dx'",
        "set ylabel 'L1 distance'",
        f"plot '{csv_name}' using 'dx':'l1' with linespoints title 'frame shift'",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
