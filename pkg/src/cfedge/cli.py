"""Batch experiment runner behind the ``cfedge`` console script.

``cfedge run`` reads a JSON experiment description (from a file, a named
preset, or a preset with file overrides), evaluates the requested grid
and writes two artifacts next to each other:

- ``<label>.csv``: one row per grid point, RFC 4180, UTF-8
- ``<label>.manifest.json``: config echo, library versions, seed,
  wall time and outcome; written even when the run fails

Exit codes: 0 success, 2 unusable spec, 3 infeasible configuration
(including queue overload), 4 numerical failure.

Identical spec and seed give byte-identical CSV output, whatever the
worker count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import platform
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np
import scipy

from . import __version__, comm, offload, sim
from . import energy as energy_mod
# Direct submodule import; the package attribute `secp` is the function.
from .secp import find_r_threshold as _find_r_threshold
from .secp import secp as _secp_point
from .errors import InfeasibilityError, NumericalError, StabilityError
from .model import ComputeConfig, NetworkConfig, stability_report
from .offload import MecCdfCache
from .presets import get_preset

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4

KINDS = ("scmp_vs_R", "scp_surface", "secp_surface", "r_threshold",
         "energy_vs_xi", "validate")

COLUMNS = {
    "scmp_vs_R": ["R_km", "p_oul", "p_odl_lo", "p_odl_hi", "p_odl_point",
                  "scmp", "sim_p_oul", "sim_p_oul_se", "sim_p_odl",
                  "sim_p_odl_se", "sim_i_mean", "sim_i_var"],
    "scp_surface": ["R_km", "theta", "scp_cs", "scp_mec", "scp"],
    "secp_surface": ["R_km", "theta", "secp", "comp_term", "ul_term",
                     "dl_term"],
    "r_threshold": ["M", "lambda_b", "t_s", "area_km2", "R_th_m", "theta",
                    "secp_max"],
    "energy_vs_xi": ["xi", "R_star_km", "theta_star", "E_comp_J", "E_comm_J",
                     "E_total_J", "secp_achieved"],
    "validate": ["check", "value_analytic", "value_oracle", "delta", "tol",
                 "status"],
}


class SpecError(ValueError):
    """The experiment description does not validate (exit code 2)."""


@dataclass
class ExperimentSpec:
    kind: str
    label: str
    network: dict
    compute: dict
    energy: dict
    sweep: dict
    replications: int
    seed: int

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentSpec":
        if not isinstance(data, dict):
            raise SpecError("spec must be a JSON object")
        kind = data.get("kind")
        if kind not in KINDS:
            raise SpecError(f"unknown kind {kind!r}; expected one of "
                            + ", ".join(KINDS))
        sweep = data.get("sweep", {})
        if not isinstance(sweep, dict):
            raise SpecError("'sweep' must be an object")
        _check_sweep(kind, sweep)
        if kind != "scmp_vs_R" and not data.get("compute"):
            raise SpecError(f"kind {kind} needs a 'compute' section")
        sim_section = data.get("sim", {})
        label = str(data.get("label", kind))
        safe = "".join(c if c.isalnum() or c in "-_." else "-" for c in label)
        return cls(
            kind=kind,
            label=safe or kind,
            network=dict(data.get("network", {})),
            compute=dict(data.get("compute", {})),
            energy=dict(data.get("energy", {})),
            sweep=dict(sweep),
            replications=int(sim_section.get("replications", 1000)),
            seed=int(sim_section.get("seed", 0)),
        )

    def resolved(self) -> dict:
        """Canonical mapping; round-trips through from_mapping."""
        return {
            "kind": self.kind,
            "label": self.label,
            "network": self.network,
            "compute": self.compute,
            "energy": self.energy,
            "sweep": self.sweep,
            "sim": {"replications": self.replications, "seed": self.seed},
        }


def _check_sweep(kind: str, sweep: dict) -> None:
    def need_grid(key):
        grid = sweep.get(key)
        if not isinstance(grid, (list, tuple)) or len(grid) == 0:
            raise SpecError(f"kind {kind} needs a non-empty sweep.{key}")

    def need_bounds():
        bounds = sweep.get("r_bounds_km")
        if (not isinstance(bounds, (list, tuple)) or len(bounds) != 2
                or not 0 < bounds[0] < bounds[1]):
            raise SpecError("sweep.r_bounds_km must be [lo, hi] with "
                            "0 < lo < hi")

    if kind == "scmp_vs_R":
        need_grid("radii_km")
    elif kind in ("scp_surface", "secp_surface"):
        need_grid("radii_km")
        need_grid("theta_grid")
    elif kind == "r_threshold":
        need_grid("rows")
        need_grid("areas_km2")
        need_bounds()
    elif kind == "energy_vs_xi":
        need_grid("xi_grid")
        need_bounds()
    elif kind == "validate":
        need_grid("radii_km")


def _network_for(spec: ExperimentSpec, **overrides) -> NetworkConfig:
    merged = dict(spec.network)
    for side in ("ul", "dl"):
        db_key = f"sir_threshold_{side}_db"
        if db_key in merged:
            merged[f"sir_threshold_{side}"] = 10.0 ** (merged.pop(db_key) / 10.0)
    merged.update(overrides)
    try:
        return NetworkConfig(**merged)
    except TypeError as exc:
        raise SpecError(f"bad network section: {exc}") from None


def _compute_for(spec: ExperimentSpec, **overrides) -> ComputeConfig:
    merged = dict(spec.compute)
    merged.update(overrides)
    for key in ("type_probs", "mu_c", "mu_m"):
        if key in merged:
            merged[key] = tuple(merged[key])
    try:
        return ComputeConfig(**merged)
    except TypeError as exc:
        raise SpecError(f"bad compute section: {exc}") from None


def _energy_for(spec: ExperimentSpec) -> energy_mod.EnergyConfig:
    merged = dict(spec.energy)
    for key in ("f_cs_hz", "f_mec_hz"):
        if key in merged:
            merged[key] = tuple(merged[key])
    try:
        return energy_mod.EnergyConfig(**merged)
    except TypeError as exc:
        raise SpecError(f"bad energy section: {exc}") from None


# Caches for the latency CDF of multi-task service sums. Keyed by the
# values that determine them, so serial and parallel runs produce the
# same numbers whether or not a cache is shared.
_MEC_CACHES: dict = {}


def _mec_cache(comp: ComputeConfig) -> MecCdfCache:
    key = (comp.type_probs, comp.mu_m, comp.target_latency)
    cache = _MEC_CACHES.get(key)
    if cache is None:
        cache = MecCdfCache(comp, comp.target_latency)
        _MEC_CACHES[key] = cache
    return cache


# ---------------------------------------------------------------------------
# Grid construction and per-point evaluation


def _points(spec: ExperimentSpec) -> list:
    sweep = spec.sweep
    if spec.kind == "scmp_vs_R":
        return [{"R": float(r)} for r in sweep["radii_km"]]
    if spec.kind in ("scp_surface", "secp_surface"):
        return [{"R": float(r), "theta": float(th)}
                for r in sweep["radii_km"] for th in sweep["theta_grid"]]
    if spec.kind == "r_threshold":
        return [{**row, "area": float(area)}
                for row in sweep["rows"] for area in sweep["areas_km2"]]
    if spec.kind == "energy_vs_xi":
        return [{"xi": float(x)} for x in sweep["xi_grid"]]
    if spec.kind == "validate":
        pts = [{"check": "uplink_outage", "R": float(r)}
               for r in sweep["radii_km"]]
        pts += [{"check": "downlink_outage", "R": float(r)}
                for r in sweep["radii_km"]]
        r0 = float(sweep["radii_km"][-1])
        pts += [{"check": "interference_mean", "R": r0},
                {"check": "interference_var", "R": r0},
                {"check": "queue_pmf_tv_n1"},
                {"check": "queue_pmf_tv_n4"},
                {"check": "scp_mec_vs_des"},
                {"check": "scp_cs_vs_des"}]
        return pts
    raise SpecError(f"unknown kind {spec.kind!r}")


def _eval_scmp(spec: ExperimentSpec, index: int, point: dict) -> dict:
    net = _network_for(spec, coverage_radius=point["R"])
    p_oul = comm.uplink_outage(net)
    dl = comm.downlink_outage(net)
    scenario = sim.SpatialScenario.for_network(net, spec.replications,
                                               seed=spec.seed + index)
    ul_sample = sim.simulate_uplink_outage(net, scenario)
    dl_sample = sim.simulate_downlink_sir(net, scenario)
    return {
        "R_km": point["R"],
        "p_oul": p_oul,
        "p_odl_lo": dl.lower,
        "p_odl_hi": dl.upper,
        "p_odl_point": dl.point,
        "scmp": (1.0 - p_oul) * (1.0 - dl.point),
        "sim_p_oul": ul_sample.estimate,
        "sim_p_oul_se": ul_sample.stderr,
        "sim_p_odl": dl_sample.outage,
        "sim_p_odl_se": dl_sample.outage_se,
        "sim_i_mean": dl_sample.i_mean,
        "sim_i_var": dl_sample.i_var,
    }


def _eval_scp_surface(spec: ExperimentSpec, index: int, point: dict) -> dict:
    net = _network_for(spec, coverage_radius=point["R"])
    comp = _compute_for(spec, offload_prob=point["theta"])
    p_oul = comm.uplink_outage(net)
    rates = offload.arrival_rates(net, comp, p_oul)
    report = stability_report(comp, rates.lambda_c, rates.lambda_m)
    cs = mec = float("nan")
    if report.stable_cs:
        cs = offload.scp_cs(comp, rates.lambda_c)
    if report.stable_mec:
        spectrum = offload.queue_spectrum(comp, rates.lambda_m)
        mec = offload.scp_mec(net, comp, spectrum, rates,
                              cache=_mec_cache(comp))
    theta = comp.offload_prob
    if theta == 0.0:
        total = mec
    elif theta == 1.0:
        total = cs
    else:
        total = theta * cs + (1.0 - theta) * mec
    return {"R_km": point["R"], "theta": theta, "scp_cs": cs,
            "scp_mec": mec, "scp": total}


def _eval_secp_surface(spec: ExperimentSpec, index: int, point: dict) -> dict:
    net = _network_for(spec, coverage_radius=point["R"])
    comp = _compute_for(spec, offload_prob=point["theta"])
    try:
        result = _secp_point(net, comp, cache=_mec_cache(comp))
    except StabilityError:
        # An overloaded corner of the grid is data, not a run failure.
        nan = float("nan")
        return {"R_km": point["R"], "theta": point["theta"], "secp": nan,
                "comp_term": nan, "ul_term": nan, "dl_term": nan}
    return {"R_km": point["R"], "theta": point["theta"], "secp": result.secp,
            "comp_term": result.comp_term, "ul_term": result.ul_term,
            "dl_term": result.dl_term}


def _eval_r_threshold(spec: ExperimentSpec, index: int, point: dict) -> dict:
    net = _network_for(spec,
                       antennas_per_ap=int(point["antennas_per_ap"]),
                       lambda_b=float(point["lambda_b"]),
                       network_area=point["area"])
    comp = _compute_for(spec, target_latency=float(point["target_latency"]))
    bounds = tuple(spec.sweep["r_bounds_km"])
    row = {"M": int(point["antennas_per_ap"]),
           "lambda_b": float(point["lambda_b"]),
           "t_s": float(point["target_latency"]),
           "area_km2": point["area"]}
    try:
        best_r, best_theta, best_val = _find_r_threshold(
            net, comp, bounds)
    except InfeasibilityError:
        row.update({"R_th_m": float("nan"), "theta": float("nan"),
                    "secp_max": float("nan"), "_infeasible": True})
        return row
    row.update({"R_th_m": best_r * 1000.0, "theta": best_theta,
                "secp_max": best_val})
    return row


def _eval_energy(spec: ExperimentSpec, index: int, point: dict) -> dict:
    xi = point["xi"]
    net = _network_for(spec)
    comp = _compute_for(spec)
    cfg = _energy_for(spec)
    bounds = tuple(spec.sweep["r_bounds_km"])
    try:
        r_star, theta_star, breakdown = energy_mod.minimize_energy(
            net, comp, cfg, xi, r_bounds=bounds)
    except InfeasibilityError:
        nan = float("nan")
        return {"xi": xi, "R_star_km": nan, "theta_star": nan,
                "E_comp_J": nan, "E_comm_J": nan, "E_total_J": nan,
                "secp_achieved": nan, "_infeasible": True}
    net_star = _network_for(spec, coverage_radius=r_star)
    comp_star = _compute_for(spec, offload_prob=theta_star)
    achieved = _secp_point(net_star, comp_star,
                             cache=_mec_cache(comp_star)).secp
    return {"xi": xi, "R_star_km": r_star, "theta_star": theta_star,
            "E_comp_J": breakdown.e_comp, "E_comm_J": breakdown.e_comm,
            "E_total_J": breakdown.e_total, "secp_achieved": achieved}


def _queue_setup(spec: ExperimentSpec, single: bool):
    """Synthetic-load network for the queueing checks.

    The single-server run uses a heavier load than the server-group run:
    with one queue the arrival process is exactly Poisson, so the
    spectrum math can be checked at substantial utilisation, while the
    group run must stay light for the independent-queue approximation of
    minimum-load dispatch to hold.
    """
    q = dict(spec.sweep.get("queue", {}))
    if single:
        lam_d = float(q.get("lambda_d_n1", 16000.0))
        duration = float(q.get("duration_n1_s", 2900.0))
    else:
        lam_d = float(q.get("lambda_d", 2700.0))
        duration = float(q.get("duration_s", 4200.0))
    net = _network_for(spec, coverage_radius=float(q.get("r_km", 0.1)),
                       lambda_d=lam_d)
    comp = _compute_for(spec, offload_prob=0.0)
    return net, comp, duration, int(q.get("n_mec", 4))


def _vrow(check: str, analytic: float, oracle: float, delta: float,
          tol: float) -> dict:
    return {"check": check, "value_analytic": analytic,
            "value_oracle": oracle, "delta": delta, "tol": tol,
            "status": "pass" if delta <= tol else "fail"}


def _tv_distance(empirical: np.ndarray, spectrum) -> float:
    """Total variation between a finite empirical pmf and the model pmf."""
    acc = 0.0
    for v, mass in enumerate(empirical):
        acc += abs(mass - spectrum.pmf(v))
    return 0.5 * (acc + spectrum.tail(len(empirical)))


def _eval_validate(spec: ExperimentSpec, index: int, point: dict) -> dict:
    check = point["check"]
    if check in ("uplink_outage", "downlink_outage", "interference_mean",
                 "interference_var"):
        net = _network_for(spec, coverage_radius=point["R"])
        scenario = sim.SpatialScenario.for_network(
            net, spec.replications, seed=spec.seed + index)
        name = f"{check}@R={point['R']:g}km"
        if check == "uplink_outage":
            ana = comm.uplink_outage(net)
            sample = sim.simulate_uplink_outage(net, scenario)
            delta = abs(ana - sample.estimate)
            return _vrow(name, ana, sample.estimate, delta,
                         0.02 + 3.0 * sample.stderr)
        if check == "downlink_outage":
            out = comm.downlink_outage(net)
            sample = sim.simulate_downlink_sir(net, scenario)
            delta = max(0.0, out.lower - sample.outage,
                        sample.outage - out.upper)
            return _vrow(name, out.point, sample.outage, delta,
                         0.03 + 3.0 * sample.outage_se)
        sample = sim.simulate_downlink_sir(net, scenario,
                                           beam_placement="independent")
        params = comm.gamma_interference_params(net)
        if check == "interference_mean":
            return _vrow(name, params.mean, sample.i_mean,
                         abs(params.mean - sample.i_mean),
                         3.0 * sample.i_mean_se)
        return _vrow(name, params.variance, sample.i_var,
                     abs(params.variance - sample.i_var),
                     3.0 * sample.i_var_se)

    if check in ("queue_pmf_tv_n1", "queue_pmf_tv_n4"):
        single = check.endswith("n1")
        net, comp, duration, n_group = _queue_setup(spec, single)
        n = 1 if single else n_group
        log = sim.simulate_mlcm(net, comp, duration, seed=spec.seed + index,
                                n_mec=n, p_oul=0.0)
        rates = offload.arrival_rates(net, comp, 0.0)
        spectrum = offload.queue_spectrum(comp, rates.lambda_m)
        if n == 1:
            empirical = log.queue_length_pmf(server_id=1)
        else:
            snapshot = log.extras["mec_queue_snapshot"]
            first = snapshot[log.analysis_mask(), 0]
            empirical = np.bincount(first) / len(first)
        tv = _tv_distance(empirical, spectrum)
        return _vrow(check, 0.0, tv, tv, 0.02)

    if check == "scp_mec_vs_des":
        net, comp, duration, n = _queue_setup(spec, single=False)
        log = sim.simulate_mlcm(net, comp, duration,
                                seed=spec.seed + index, n_mec=n, p_oul=0.0)
        rates = offload.arrival_rates(net, comp, 0.0)
        spectrum = offload.queue_spectrum(comp, rates.lambda_m)
        ana = offload.mec_conditional_cdf(spectrum, n, _mec_cache(comp))
        emp = log.sojourn_cdf(comp.target_latency, mec_only=True)
        return _vrow(check, ana, emp, abs(ana - emp), 0.03)

    if check == "scp_cs_vs_des":
        qcs = dict(spec.sweep.get("queue_cs", {}))
        lam_c = float(qcs.get("lambda_c", 50.0))
        net = _network_for(spec, coverage_radius=0.05, lambda_d=lam_c,
                           network_area=1.0)
        comp = _compute_for(spec, offload_prob=1.0)
        log = sim.simulate_mlcm(net, comp,
                                float(qcs.get("duration_s", 2400.0)),
                                seed=spec.seed + index, n_mec=1, p_oul=0.0)
        ana = offload.scp_cs(comp, lam_c)
        emp = log.sojourn_cdf(comp.target_latency, server_id=0)
        return _vrow(check, ana, emp, abs(ana - emp), 0.02)

    raise SpecError(f"unknown validate check {check!r}")


_EVALUATORS = {
    "scmp_vs_R": _eval_scmp,
    "scp_surface": _eval_scp_surface,
    "secp_surface": _eval_secp_surface,
    "r_threshold": _eval_r_threshold,
    "energy_vs_xi": _eval_energy,
    "validate": _eval_validate,
}


def _eval_point(spec: ExperimentSpec, index: int, point: dict) -> dict:
    return _EVALUATORS[spec.kind](spec, index, point)


# Worker-pool plumbing. Each worker process rebuilds the spec once; rows
# come back through ``map`` so output order equals grid order no matter
# which worker finishes first.
_WORKER_SPEC: ExperimentSpec | None = None


def _init_worker(payload: dict) -> None:
    global _WORKER_SPEC
    _WORKER_SPEC = ExperimentSpec.from_mapping(payload)


def _worker_eval(task: tuple) -> dict:
    index, point = task
    return _eval_point(_WORKER_SPEC, index, point)


def _evaluate(spec: ExperimentSpec, points: list, workers: int) -> list:
    if workers <= 1 or len(points) <= 1:
        return [_eval_point(spec, i, p) for i, p in enumerate(points)]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(spec.resolved(),)) as pool:
        return list(pool.map(_worker_eval, list(enumerate(points))))


# ---------------------------------------------------------------------------
# Run orchestration


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv_rows(path: str, columns: list, rows: list) -> None:
    """RFC 4180 CSV: CRLF line endings, header row, '.' decimals."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in columns])


def write_manifest(path: str, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(spec: ExperimentSpec, out_dir: str = ".",
                   workers: int = 1) -> int:
    """Evaluate a spec; write CSV + manifest; return the exit code."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, spec.label + ".csv")
    manifest_path = os.path.join(out_dir, spec.label + ".manifest.json")
    started = datetime.now(timezone.utc)
    t0 = time.monotonic()
    rows = None
    error = None
    code = EXIT_OK
    try:
        rows = _evaluate(spec, _points(spec), workers)
        flags = [row.pop("_infeasible", False) for row in rows]
        if rows and all(flags):
            error = ("InfeasibilityError",
                     "no grid point admits a feasible configuration")
            code = EXIT_INFEASIBLE
    except (InfeasibilityError, StabilityError) as exc:
        error = (type(exc).__name__, str(exc))
        code = EXIT_INFEASIBLE
    except NumericalError as exc:
        error = (type(exc).__name__, str(exc))
        code = EXIT_NUMERICAL

    if rows is not None:
        write_csv_rows(csv_path, COLUMNS[spec.kind], rows)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "kind": spec.kind,
        "label": spec.label,
        "status": "ok" if error is None else "failed",
        "error": None if error is None else {"type": error[0],
                                             "message": error[1]},
        "exit_code": code,
        "spec": spec.resolved(),
        "seed": spec.seed,
        "replications": spec.replications,
        "started_utc": started.isoformat(),
        "wall_time_s": time.monotonic() - t0,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "cfedge": __version__,
        },
        "output_csv": os.path.basename(csv_path) if rows is not None else None,
        "rows_written": len(rows) if rows is not None else 0,
    }
    if spec.kind == "validate" and rows is not None:
        manifest["checks_failed"] = sum(r["status"] == "fail" for r in rows)
    write_manifest(manifest_path, manifest)
    return code


def _load_spec(path: str | None, preset: str | None,
               seed: int | None, reps: int | None) -> ExperimentSpec:
    merged: dict = {}
    if preset is not None:
        try:
            merged = get_preset(preset)
        except KeyError as exc:
            raise SpecError(str(exc)) from None
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                overrides = json.load(fh)
        except OSError as exc:
            raise SpecError(f"cannot read spec file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec file is not valid JSON: {exc}") from None
        if not isinstance(overrides, dict):
            raise SpecError("spec file must contain a JSON object")
        for key, val in overrides.items():
            if isinstance(val, dict) and isinstance(merged.get(key), dict):
                merged[key] = {**merged[key], **val}
            else:
                merged[key] = val
    if not merged:
        raise SpecError("give a spec file, --preset, or both")
    sim_section = dict(merged.get("sim", {}))
    if seed is not None:
        sim_section["seed"] = seed
    if reps is not None:
        sim_section["replications"] = reps
    merged["sim"] = sim_section
    return ExperimentSpec.from_mapping(merged)


def main(argv: list | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cfedge",
        description="Batch evaluation of edge-assisted dense-antenna "
                    "networks: success probabilities, radius thresholds "
                    "and energy minimization.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="evaluate one experiment spec")
    run.add_argument("spec_file", nargs="?", default=None,
                     help="JSON experiment description")
    run.add_argument("--preset", default=None,
                     help="named preset; a spec file overrides it key "
                          "by key")
    run.add_argument("--seed", type=int, default=None,
                     help="override the simulation seed")
    run.add_argument("--reps", type=int, default=None,
                     help="override the replication budget")
    run.add_argument("--out", default=".", help="output directory")
    run.add_argument("--workers", type=int, default=1,
                     help="process count for grid evaluation")

    args = parser.parse_args(argv)
    try:
        spec = _load_spec(args.spec_file, args.preset, args.seed, args.reps)
    except SpecError as exc:
        print(f"cfedge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    code = run_experiment(spec, out_dir=args.out, workers=args.workers)
    status = "ok" if code == EXIT_OK else f"failed (exit {code})"
    print(f"{spec.label}: {status} -> "
          f"{os.path.join(args.out, spec.label + '.csv')}")
    return code


if __name__ == "__main__":
    sys.exit(main())
