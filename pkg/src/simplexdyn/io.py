"""Artifact serialization: CSV trajectories and ensembles, JSON reports.

Floats are written with 17 significant digits so round-trips are exact;
JSON is canonical (sorted keys) so artifacts hash stably.  Every sidecar
embeds the configuration hash and master seed, which makes reruns
byte-identical and auditable.
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from . import aitchison as ag
from .replicator import Trajectory
from .sde import Ensemble


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()[:16]


def write_json(path, obj):
    path = Path(path)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def sidecar(config: dict, **extra) -> dict:
    """Provenance block stored next to every artifact."""
    return {"config": config, "config_hash": config_hash(config),
            "version": f"simplexdyn-{__version__}", **extra}


def write_trajectory_csv(path, traj: Trajectory):
    n = traj.n
    chart = traj.ilr_states()
    header = (["t"] + [f"p_{i}" for i in range(1, n + 1)]
              + [f"ilr_{i}" for i in range(1, n)])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k in range(traj.times.size):
            row = ([fmt(traj.times[k])]
                   + [fmt(v) for v in traj.states[k]]
                   + [fmt(v) for v in chart[k]])
            w.writerow(row)


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        n = sum(1 for h in header if h.startswith("p_"))
        times, states = [], []
        for row in r:
            times.append(float(row[0]))
            states.append([float(v) for v in row[1:1 + n]])
    return Trajectory(np.asarray(times), np.asarray(states), scheme="from-csv")


def write_ensemble_csv(path, ens: Ensemble):
    n = ens.terminal_states.shape[1]
    header = ["trajectory_id", "seed"] + [f"p_{i}" for i in range(1, n + 1)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k in range(ens.terminal_states.shape[0]):
            w.writerow([str(k), str(int(ens.seeds[k]))]
                       + [fmt(v) for v in ens.terminal_states[k]])


def read_ensemble_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        states = [[float(v) for v in row[2:]] for row in r]
    return np.asarray(states)


def write_portrait_csv(path, portrait):
    """Rows of (composition, velocity) samples for a three-type field."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["p_1", "p_2", "p_3", "v_1", "v_2", "v_3"])
        for p, v in portrait:
            w.writerow([fmt(x) for x in (*p, *v)])


def read_portrait_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        next(r)
        out = []
        for row in r:
            vals = [float(v) for v in row]
            out.append((np.asarray(vals[:3]), np.asarray(vals[3:])))
    return out


def write_flow_csv(path, record):
    """JKO flow log: step, t, entropy, variance, w2_error_vs_exact."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "t", "entropy", "variance", "w2_error_vs_exact"])
        for step, t, ent, var, err in record.rows():
            w.writerow([str(step), fmt(t), fmt(ent), fmt(var), fmt(err)])
