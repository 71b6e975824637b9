"""Command-line driver: one subcommand per experiment, CSV outputs with provenance.

Exit codes: 0 success, 2 configuration/usage error, 1 numerical or I/O failure.
Default output directory comes from the WIGSTAT_OUTDIR environment variable
(falling back to the current directory).  All angles are radians.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import WigstatError
from .lines import (
    SphereLineModel,
    TorusLineModel,
    discrete_cluster_distribution,
    random_wfl,
    structure_statistics,
    wfl_torus,
)
from .spectral import (
    empirical_cdf,
    excess_of_eigenstates,
    goe_ensemble_excess,
    propagator_matrix,
    unitary_eigensystem,
)
from .sphere import TopParams, coherent_state_sphere, gkq_coefficients, kicked_top_step, \
    sphere_quadrature, wigner_sphere_grid
from .states import QuantumState, RngStream, basis_state, random_state
from .stats import (
    WeightedSamples,
    autocorrelation_torus,
    moments_and_excess,
    relaxation_scan,
    value_histogram,
)
from .torus import TorusMapParams, coherent_state_torus, sawtooth_step, sym_indices, wigner_torus

SUBCOMMANDS = ("evolve", "value-stats", "relaxation", "autocorr",
               "eigen-excess", "goe-excess", "wfl-stats", "clusters")


@dataclass
class ExperimentConfig:
    system: str = "sawtooth"            # sawtooth | kicked-top | random-model
    N: int = 101
    J: float = 50.0
    K0: float = 0.5
    L: int = 1
    alpha: float = 10.0
    gamma: float = float(np.pi / 2)
    init: str = ""                      # coherent:q=..,p=.. | random | basis:i
    t_max: int = 10
    seed: int = 0
    out_dir: str = ""
    bins: int = 80
    lines: int = 1000
    geometry: str = "sphere"            # for goe-excess / random-model
    dim: int = 101                      # for goe-excess
    realizations: int = 10
    coeff_variances: bool = False
    timestamp: bool = True

    def __post_init__(self):
        if not self.out_dir:
            self.out_dir = os.environ.get("WIGSTAT_OUTDIR", ".")

    def header_lines(self, subcommand: str) -> list[str]:
        pairs = ", ".join(f"{k}={v}" for k, v in sorted(vars(self).items())
                          if k != "timestamp")
        lines = [f"wigstat {subcommand}", f"config: {pairs}", f"seed: {self.seed}"]
        if self.timestamp:
            lines.append(f"created: {datetime.now(timezone.utc).isoformat()}")
        return lines


def write_csv(path, header_lines, column_names, rows):
    """CSV with '#'-prefixed provenance header and 17-significant-digit reals."""

    def fmt(x):
        if isinstance(x, (float, np.floating)):
            return format(float(x), ".17g")
        return str(x)

    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(column_names) + "\n")
        for row in rows:
            fh.write(",".join(fmt(x) for x in row) + "\n")
    return path


def read_csv(path):
    """Parse a wigstat CSV back into (header_lines, column_names, float rows)."""
    header, rows, names = [], [], None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                header.append(line[1:].strip())
            elif names is None:
                names = line.split(",")
            elif line:
                rows.append([float(x) for x in line.split(",")])
    return header, names, rows


def _default_init(config: ExperimentConfig, subcommand: str) -> str:
    if config.system == "sawtooth":
        if subcommand == "autocorr":
            return "coherent:q=2.1,p=1.2"
        return "coherent:q=2.0943951023931953,p=1.0471975511965976"
    return "coherent:theta=2.0943951023931953,phi=1.0471975511965976"


def _parse_init(spec: str, config: ExperimentConfig) -> QuantumState:
    dim = config.N if config.system == "sawtooth" else int(round(2 * config.J)) + 1
    if spec == "random":
        return random_state(dim, RngStream(config.seed))
    if spec.startswith("basis:"):
        return basis_state(dim, int(spec.split(":", 1)[1]))
    if spec.startswith("coherent:"):
        kv = dict(item.split("=") for item in spec.split(":", 1)[1].split(","))
        if config.system == "sawtooth":
            return coherent_state_torus(float(kv["q"]), float(kv["p"]), config.N)
        return coherent_state_sphere(float(kv["theta"]), float(kv["phi"]), config.J)
    raise WigstatError(f"cannot parse initial state spec {spec!r}")


def _map_params(config: ExperimentConfig):
    if config.system == "sawtooth":
        return TorusMapParams(config.K0, config.L, config.N)
    if config.system == "kicked-top":
        return TopParams(config.alpha, config.gamma, config.J)
    raise WigstatError(f"system {config.system!r} defines no map")


def _step_for(config: ExperimentConfig):
    return sawtooth_step if config.system == "sawtooth" else kicked_top_step


def _samples(config: ExperimentConfig, psi: QuantumState) -> WeightedSamples:
    if config.system == "sawtooth":
        return WeightedSamples.from_torus(wigner_torus(psi))
    return WeightedSamples.from_sphere(gkq_coefficients(psi, config.J))


def _outpath(config: ExperimentConfig, name: str) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


# ---------------------------------------------------------------------------
# subcommand bodies
# ---------------------------------------------------------------------------

def _run_evolve(config: ExperimentConfig) -> list[Path]:
    psi = _parse_init(config.init, config)
    params = _map_params(config)
    step = _step_for(config)
    header = config.header_lines("evolve")
    written = []
    for t in range(config.t_max + 1):
        if config.system == "sawtooth":
            W = wigner_torus(psi)
            x = 2.0 * np.pi * np.arange(config.N) / config.N
            rows = [(n, k, x[n], x[k], W.values[n, k])
                    for n in range(config.N) for k in range(config.N)]
            cols = ("n_index", "k_index", "q", "p", "w")
        else:
            vals, _ = wigner_sphere_grid(gkq_coefficients(psi, config.J))
            theta, phi, _ = sphere_quadrature(int(round(2 * config.J)))
            rows = [(i, j, theta[i], phi[j], vals[i, j])
                    for i in range(theta.size) for j in range(phi.size)]
            cols = ("theta_index", "phi_index", "theta", "phi", "w")
        written.append(write_csv(_outpath(config, f"wf_t{t:03d}.csv"), header, cols, rows))
        psi = step(psi, params)
    return written


def _run_value_stats(config: ExperimentConfig) -> list[Path]:
    psi = _parse_init(config.init, config)
    params = _map_params(config)
    step = _step_for(config)
    header = config.header_lines("value-stats")
    srows, hrows = [], []
    for t in range(config.t_max + 1):
        s = _samples(config, psi)
        m = moments_and_excess(s)
        srows.append((t, m.mean, m.variance, m.excess, m.negative_fraction))
        hist = value_histogram(s, config.bins)
        for left, right, dens in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.densities):
            hrows.append((t, left, right, dens))
        psi = step(psi, params)
    return [
        write_csv(_outpath(config, "value_stats.csv"), header,
                  ("t", "mean", "variance", "excess", "neg_fraction"), srows),
        write_csv(_outpath(config, "value_hist.csv"), header,
                  ("t", "bin_left", "bin_right", "density"), hrows),
    ]


def _run_relaxation(config: ExperimentConfig) -> list[Path]:
    psi = _parse_init(config.init, config)
    series = relaxation_scan(_map_params(config), psi, config.t_max)
    header = config.header_lines("relaxation")
    rows = list(zip(series.times.tolist(), series.excess, series.negative_fraction))
    path = write_csv(_outpath(config, "relaxation.csv"), header,
                     ("t", "excess", "neg_fraction"), rows)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(f"# t_r = {series.t_r}, t_c = {series.t_c}, "
                 f"threshold = {format(series.threshold, '.17g')}\n")
    return [path]


def _run_autocorr(config: ExperimentConfig) -> list[Path]:
    if config.system != "sawtooth":
        raise WigstatError("autocorr is defined on the torus grid (system=sawtooth)")
    psi = _parse_init(config.init, config)
    params = _map_params(config)
    for _ in range(config.t_max):
        psi = sawtooth_step(psi, params)
    C, (r, prof) = autocorrelation_torus(wigner_torus(psi))
    header = config.header_lines("autocorr")
    sym = sym_indices(config.N)
    grid_rows = [(sym[a], sym[b], C[a, b])
                 for a in range(config.N) for b in range(config.N)]
    return [
        write_csv(_outpath(config, "autocorr_grid.csv"), header,
                  ("dn", "dm", "C"), grid_rows),
        write_csv(_outpath(config, "autocorr_radial.csv"), header,
                  ("r", "C_mean"), list(zip(r, prof))),
    ]


def _run_eigen_excess(config: ExperimentConfig) -> list[Path]:
    params = _map_params(config)
    es = unitary_eigensystem(propagator_matrix(params))
    geometry = "torus" if config.system == "sawtooth" else "sphere"
    eps = excess_of_eigenstates(es, geometry)
    header = config.header_lines("eigen-excess")
    rows = [(k, es.eigenphases[k], eps[k]) for k in range(es.dim)]
    v, c = empirical_cdf(eps)
    return [
        write_csv(_outpath(config, "eigen_excess.csv"), header,
                  ("k", "omega", "excess"), rows),
        write_csv(_outpath(config, "eigen_excess_cdf.csv"), header,
                  ("excess", "cumulative"), list(zip(v, c))),
    ]


def _run_goe_excess(config: ExperimentConfig) -> list[Path]:
    eps = goe_ensemble_excess(config.dim, config.realizations, config.geometry,
                              RngStream(config.seed))
    v, c = empirical_cdf(eps)
    return [write_csv(_outpath(config, "goe_excess_cdf.csv"),
                      config.header_lines("goe-excess"),
                      ("excess", "cumulative"), list(zip(v, c)))]


def _collect_lines(config: ExperimentConfig):
    if config.system == "random-model":
        if config.geometry == "torus":
            model = TorusLineModel(config.N)
        else:
            model = SphereLineModel(config.J)
        streams = RngStream(config.seed).split(config.lines)
        return [random_wfl(model, s) for s in streams]
    if config.system == "sawtooth":
        psi = _parse_init(config.init, config)
        params = _map_params(config)
        for _ in range(config.t_max):
            psi = sawtooth_step(psi, params)
        return [wfl_torus(psi, n) for n in range(config.N)]
    # kicked top: equator line of the evolved state, one per kick
    from .lines import wfl_sphere
    psi = _parse_init(config.init, config)
    params = _map_params(config)
    out = []
    for _ in range(config.t_max):
        psi = kicked_top_step(psi, params)
        out.append(wfl_sphere(psi, config.J))
    return out


def _run_wfl_stats(config: ExperimentConfig) -> list[Path]:
    lines = _collect_lines(config)
    header = config.header_lines("wfl-stats")
    stats = structure_statistics(lines)
    se, sd = stats.spacing_histogram(config.bins)
    ae, ad = stats.amplitude_histogram(config.bins)
    H, jse, jae = stats.joint_histogram(60)
    written = [
        write_csv(_outpath(config, "wfl_spacing_hist.csv"), header,
                  ("bin_left", "bin_right", "density"),
                  list(zip(se[:-1], se[1:], sd))),
        write_csv(_outpath(config, "wfl_amplitude_hist.csv"), header,
                  ("bin_left", "bin_right", "density"),
                  list(zip(ae[:-1], ae[1:], ad))),
        write_csv(_outpath(config, "wfl_joint_hist.csv"), header,
                  ("s_left", "s_right", "A_left", "A_right", "density"),
                  [(jse[i], jse[i + 1], jae[j], jae[j + 1], H[i, j])
                   for i in range(H.shape[0]) for j in range(H.shape[1])]),
    ]
    if config.coeff_variances:
        M = max(l.modes for l in lines)
        u = np.full((len(lines), M), np.nan)
        v = np.full((len(lines), M), np.nan)
        for i, l in enumerate(lines):
            u[i, :l.modes] = l.u
            v[i, :l.modes] = l.v
        rows = [(q + 1, np.nanvar(u[:, q]), np.nanvar(v[:, q])) for q in range(M)]
        written.append(write_csv(_outpath(config, "wfl_coeff_variances.csv"), header,
                                 ("q", "var_u", "var_v"), rows))
    return written


def _run_clusters(config: ExperimentConfig) -> list[Path]:
    if config.system != "sawtooth":
        raise WigstatError("clusters runs on the discrete torus mesh (system=sawtooth)")
    psi = _parse_init(config.init, config)
    params = _map_params(config)
    for _ in range(config.t_max):
        psi = sawtooth_step(psi, params)
    W = wigner_torus(psi)
    offset = 1.0 / np.sqrt(config.N - 1.0)
    dist = discrete_cluster_distribution(W, offset)
    rows = [(int(s), p, float(2.0 ** -s))
            for s, p in zip(dist.lengths, dist.probabilities)]
    return [write_csv(_outpath(config, "clusters.csv"),
                      config.header_lines("clusters"),
                      ("s", "P_s", "P_s_binary"), rows)]


_RUNNERS = {
    "evolve": _run_evolve,
    "value-stats": _run_value_stats,
    "relaxation": _run_relaxation,
    "autocorr": _run_autocorr,
    "eigen-excess": _run_eigen_excess,
    "goe-excess": _run_goe_excess,
    "wfl-stats": _run_wfl_stats,
    "clusters": _run_clusters,
}


def run(config: ExperimentConfig, subcommand: str) -> int:
    """Execute one experiment; returns the process exit code."""
    if subcommand not in _RUNNERS:
        print(f"unknown subcommand {subcommand!r}", file=sys.stderr)
        return 2
    try:
        _validate(config, subcommand)
    except WigstatError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if not config.init:
        config.init = _default_init(config, subcommand)
    try:
        written = _RUNNERS[subcommand](config)
    except WigstatError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def _validate(config: ExperimentConfig, subcommand: str):
    if config.system not in ("sawtooth", "kicked-top", "random-model"):
        raise WigstatError(f"unknown system {config.system!r}")
    if config.system == "sawtooth" and config.N % 2 == 0:
        raise WigstatError(f"sawtooth needs odd N, got {config.N}")
    if config.system == "random-model" and subcommand != "wfl-stats":
        raise WigstatError("system random-model only drives wfl-stats")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wigstat",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--system", choices=("sawtooth", "kicked-top", "random-model"),
                       default="sawtooth")
        p.add_argument("--N", type=int, default=101)
        p.add_argument("--J", type=float, default=50.0)
        p.add_argument("--K0", type=float, default=0.5)
        p.add_argument("--L", type=int, default=1)
        p.add_argument("--alpha", type=float, default=10.0)
        p.add_argument("--gamma", type=float, default=float(np.pi / 2))
        p.add_argument("--init", default="")
        p.add_argument("--t-max", dest="t_max", type=int, default=10)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", dest="out_dir", default="")
        p.add_argument("--bins", type=int, default=80)
        p.add_argument("--lines", type=int, default=1000)
        p.add_argument("--geometry", choices=("torus", "sphere"), default="sphere")
        p.add_argument("--dim", type=int, default=101)
        p.add_argument("--realizations", type=int, default=10)
        p.add_argument("--coeff-variances", dest="coeff_variances", action="store_true")
        p.add_argument("--no-timestamp", dest="timestamp", action="store_false")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(args).items() if k != "subcommand"}
    config = ExperimentConfig(**fields)
    return run(config, args.subcommand)


if __name__ == "__main__":
    sys.exit(main())
