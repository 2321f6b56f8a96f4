"""Command-line interface: optimize, calibrate, scan, amplify, rb, report,
and the all-in-one pipeline.

All artifacts are CSV (with '#' metadata headers and nine-significant-digit
floats) or JSON, written under --output-dir.  Every random choice derives
from the command seed through named SeedSequence streams, so a repeated run
with the same flags produces byte-identical files.  Exit codes: 0 success,
1 domain or I/O error, 2 usage error.
"""

from __future__ import annotations

import math
import sys
import zlib
from pathlib import Path

import click
import numpy as np
import yaml

from . import calibration, metrology, rb
from .device import DeviceModel, device_preset, load_device, valencia_like
from .errors import RobustPulseError
from .io import config_hash, read_json, write_csv, write_json
from .optimizer import (OptimizationSpec, optimize, scan_robustness,
                        target_rotation)
from .pulses import (DT_NS, PulseConstraints, TimeGrid, drag_waveform,
                     load_waveform, save_waveform, square_waveform)

TWO_PI = 2.0 * math.pi


def _load_config(path, section):
    if path is None:
        return {}
    payload = yaml.safe_load(Path(path).read_text()) or {}
    merged = {k: v for k, v in payload.items() if not isinstance(v, dict)}
    merged.update(payload.get(section, {}) or {})
    return merged


def _resolve(flag_value, config, key, default):
    if flag_value is not None:
        return flag_value
    if key in config:
        return config[key]
    return default


def _get_device(preset, device_file) -> DeviceModel:
    if device_file is not None:
        return load_device(device_file)
    return device_preset(preset or "valencia-like")


def _parse_target(text: str):
    if text == "rx:pi":
        return np.pi, 0.0
    if text == "rx:pi2":
        return np.pi / 2.0, 0.0
    if text.startswith("custom:"):
        parts = text[len("custom:"):].split(",")
        if len(parts) != 2:
            raise click.UsageError(
                "custom target must be custom:<theta>,<phi>")
        return float(parts[0]), float(parts[1])
    raise click.UsageError(f"unknown target {text!r}")


def _make_grid(duration_ns: float, segments: int) -> TimeGrid:
    samples_per_segment = max(1, round(duration_ns / (DT_NS * segments)))
    return TimeGrid(dt=DT_NS, segment_count=segments,
                    samples_per_segment=samples_per_segment)


def _derived_seed(*parts) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


@click.group()
@click.option("--output-dir", "-o", default=".", show_default=True,
              type=click.Path(file_okay=False), help="Artifact directory.")
@click.pass_context
def cli(ctx, output_dir):
    """Robust single-qubit pulse design, simulation, and metrology."""
    ctx.ensure_object(dict)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ctx.obj["out"] = out


# ---------------------------------------------------------------------------
# optimize
# ---------------------------------------------------------------------------

@cli.command("optimize")
@click.option("--target", default="rx:pi", show_default=True,
              help="rx:pi | rx:pi2 | custom:<theta>,<phi>")
@click.option("--mode", default="dephasing", show_default=True,
              type=click.Choice(["none", "dephasing", "amplitude", "dual"]))
@click.option("--duration-ns", type=float, default=None,
              help="Pulse duration (default: 2x the preset pi duration).")
@click.option("--segments", type=int, default=None)
@click.option("--cutoff-mhz", type=float, default=None)
@click.option("--omega-max", type=float, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--preset", default=None)
@click.option("--device", "device_file", type=click.Path(exists=True),
              default=None)
@click.option("--config", type=click.Path(exists=True), default=None)
@click.option("--out", "out_file", default="waveform.json", show_default=True)
@click.pass_context
def cmd_optimize(ctx, target, mode, duration_ns, segments, cutoff_mhz,
                 omega_max, restarts, seed, preset, device_file, config,
                 out_file):
    """Design a robust pulse and write it as waveform JSON + cost CSV."""
    cfg = _load_config(config, "optimize")
    device = _get_device(_resolve(preset, cfg, "preset", None), device_file)
    duration_ns = _resolve(duration_ns, cfg, "duration_ns",
                           2.0 * device.pi_duration_ns)
    segments = _resolve(segments, cfg, "segments", 40)
    cutoff_mhz = _resolve(cutoff_mhz, cfg, "cutoff_mhz", 30.0)
    omega_max = _resolve(omega_max, cfg, "omega_max", 0.3)
    restarts = _resolve(restarts, cfg, "restarts", 8)
    seed = _resolve(seed, cfg, "seed", 0)
    theta, phi = _parse_target(target)
    grid = _make_grid(duration_ns, segments)
    constraints = PulseConstraints(omega_max=omega_max, f_cutoff=cutoff_mhz)
    spec = OptimizationSpec(target=target_rotation(theta, phi, 2),
                            robustness_mode=mode, constraints=constraints,
                            grid=grid, restarts=restarts, seed=seed)
    result = optimize(spec, label=f"{mode}-{target}")
    out_path = ctx.obj["out"] / out_file
    save_waveform(result.waveform, out_path)
    meta = {"target": target, "mode": mode, "seed": seed,
            "duration_ns": grid.duration, "segments": segments,
            "config_hash": config_hash({"target": target, "mode": mode,
                                        "seed": seed})}
    write_csv(out_path.with_name(out_path.stem + "_cost.csv"),
              ["iteration", "cost"],
              [(i, c) for i, c in enumerate(result.cost_history)],
              metadata=meta)
    click.echo(
        f"optimize: {target} {mode} -> {out_path} "
        f"(cost {result.final_cost:.3e}, "
        f"converged {result.converged})")


# ---------------------------------------------------------------------------
# calibrate
# ---------------------------------------------------------------------------

@cli.command("calibrate")
@click.option("--front-end", "front_end_file", type=click.Path(exists=True),
              default=None, help="JSON with g1, g3, true_s_amp, true_s_rel, "
              "offset_i, offset_q.")
@click.option("--shots", type=int, default=4096, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--reps", default="5,9", show_default=True)
@click.option("--s-min", type=float, default=0.90, show_default=True)
@click.option("--s-max", type=float, default=1.10, show_default=True)
@click.option("--s-step", type=float, default=0.005, show_default=True)
@click.option("--preset", default=None)
@click.pass_context
def cmd_calibrate(ctx, front_end_file, shots, seed, reps, s_min, s_max,
                  s_step, preset):
    """Coarse + fine calibration against a simulated front end."""
    params = read_json(front_end_file) if front_end_file else {}
    front_end = calibration.FrontEndModel(**params)
    device = device_preset(preset or "valencia-like")
    grid = _make_grid(device.pi_duration_ns, 20)
    probe = square_waveform(np.pi, grid.duration, grid, label="probe-pi")
    rep_counts = [int(x) for x in reps.split(",")]
    s_grid = np.arange(s_min, s_max + 0.5 * s_step, s_step)
    result = calibration.calibrate(front_end, probe,
                                   repetition_counts=rep_counts,
                                   s_grid=s_grid, shots=shots, seed=seed)
    out = ctx.obj["out"]
    write_json(out / "calibration_result.json", {
        "s_amp": result.s_amp, "s_rel": result.s_rel,
        "residual_infidelity_estimate": result.residual_infidelity_estimate,
        "amp_map": {"amplitudes": result.amp_map.amplitudes,
                    "rates_i": result.amp_map.rates_i,
                    "rates_q": result.amp_map.rates_q}})
    meta = {"shots": shots, "seed": seed}
    for param, fixed in (("amp", 1.0), ("rel", result.s_amp)):
        fid = calibration.scan_scale(front_end, probe, rep_counts, s_grid,
                                     param, s_amp_fixed=fixed)
        rows = [(s_grid[j], rep_counts[i], fid[i, j])
                for i in range(len(rep_counts)) for j in range(len(s_grid))]
        write_csv(out / f"calibration_scan_{param}.csv",
                  ["s_value", "rep_count", "fidelity"], rows, metadata=meta)
    click.echo(f"calibrate: s_amp {result.s_amp:.9g} "
               f"s_rel {result.s_rel:.9g} -> {out}")


# ---------------------------------------------------------------------------
# scan
# ---------------------------------------------------------------------------

@cli.command("scan")
@click.option("--waveform", "waveform_file", required=True,
              type=click.Path(exists=True))
@click.option("--delta-max-mhz", type=float, default=1.0, show_default=True)
@click.option("--eps-max", type=float, default=0.2, show_default=True)
@click.option("--points", type=int, default=21, show_default=True)
@click.option("--qubit", type=int, default=0, show_default=True)
@click.option("--preset", default=None)
@click.option("--out", "out_file", default="scan.csv", show_default=True)
@click.pass_context
def cmd_scan(ctx, waveform_file, delta_max_mhz, eps_max, points, qubit,
             preset, out_file):
    """Quasi-static (detuning, amplitude) robustness map of a waveform."""
    w = load_waveform(waveform_file)
    device = device_preset(preset or "valencia-like")
    delta_range = TWO_PI * 1e-3 * np.linspace(-delta_max_mhz, delta_max_mhz,
                                              points)
    eps_range = np.linspace(-eps_max, eps_max, points)
    result = scan_robustness(w, delta_range, eps_range, device, qubit)
    rows = []
    for i, dmhz in enumerate(delta_range / (TWO_PI * 1e-3)):
        for j, eps in enumerate(eps_range):
            rows.append((dmhz, result.delta_percent_of_frequency[i],
                         eps, result.eps_percent[j],
                         result.infidelity[i, j]))
    out_path = ctx.obj["out"] / out_file
    write_csv(out_path,
              ["delta_mhz", "delta_pct_of_freq", "eps", "eps_pct",
               "infidelity"],
              rows, metadata={"waveform": w.label, "qubit": qubit})
    center = result.infidelity[points // 2, points // 2]
    click.echo(f"scan: {w.label} -> {out_path} (center cell {center:.3e})")


# ---------------------------------------------------------------------------
# amplify
# ---------------------------------------------------------------------------

def _amplify_campaign(out: Path, waveforms: dict, device: DeviceModel,
                      modes, days: int, qubits: int, shots, seed: int,
                      fix_p1: bool = False) -> list[dict]:
    """Run the (pulse x mode x qubit x day) amplification grid; emit files."""
    fits = []
    for pulse_label, w in waveforms.items():
        for mode in modes:
            for qubit in range(qubits):
                for day in range(days):
                    label_tag = zlib.crc32(pulse_label.encode())
                    rec_seed = _derived_seed(seed, label_tag,
                                             modes.index(mode), qubit, day)
                    record = metrology.run_amplification(
                        w, device, qubit, shots=shots, mode=mode,
                        seed=rec_seed)
                    stem = f"{pulse_label}_{mode}_q{qubit}_d{day}"
                    write_csv(out / f"amplify_{stem}.csv", ["n", "p1"],
                              list(zip(record.repetition_counts,
                                       record.probabilities)),
                              metadata={"pulse": pulse_label, "mode": mode,
                                        "qubit": qubit, "day": day,
                                        "shots": shots, "seed": rec_seed})
                    chosen, exp_fit, gauss_fit = metrology.select_model(
                        record, fix_p1=fix_p1)
                    payload = {
                        "pulse": pulse_label, "mode": mode, "qubit": qubit,
                        "day": day, "model": chosen.model,
                        "p1": chosen.p1, "eps_r": chosen.eps_r,
                        "beta": chosen.beta, "eps": chosen.eps,
                        "t1_estimate_ns": exp_fit.t1_estimate,
                        "pulse_duration_ns": chosen.pulse_duration_ns,
                        "aicc_exp": exp_fit.aicc(),
                        "aicc_gauss": gauss_fit.aicc(),
                    }
                    write_json(out / f"fit_{stem}.json", payload)
                    fits.append(payload)
    return fits


def _write_variability(out: Path, fits: list[dict], pulse: str, mode: str,
                       days: int, qubits: int) -> None:
    cells = {(f["qubit"], f["day"]): f for f in fits
             if f["pulse"] == pulse and f["mode"] == mode}
    eps = np.full((qubits, days), np.nan)
    rows = []
    for q in range(qubits):
        for d in range(days):
            f = cells.get((q, d))
            if f is None:
                rows.append(("cell", q, d, None, None, None))
            else:
                eps[q, d] = f["eps"]
                rows.append(("cell", q, d, f["eps_r"], f["beta"], f["eps"]))
    with np.errstate(invalid="ignore"):
        for q in range(qubits):
            vals = eps[q][~np.isnan(eps[q])]
            if len(vals):
                rows.append(("per_qubit", q, None, None, None, None,
                             float(vals.mean()), float(vals.std())))
        for d in range(days):
            vals = eps[:, d][~np.isnan(eps[:, d])]
            if len(vals):
                rows.append(("per_day", None, d, None, None, None,
                             float(vals.mean()), float(vals.std())))
    grand = eps[~np.isnan(eps)]
    rows.append(("grand", None, None, None, None, None,
                 float(grand.mean()) if len(grand) else None, None))
    padded = [tuple(r) + (None,) * (8 - len(r)) for r in rows]
    write_csv(out / f"variability_{pulse}_{mode}.csv",
              ["row_type", "qubit", "day", "eps_r", "beta", "eps",
               "mean_eps", "std_eps"],
              padded, metadata={"pulse": pulse, "mode": mode})


@cli.command("amplify")
@click.option("--waveform", "waveform_file", required=True,
              type=click.Path(exists=True))
@click.option("--mode", default="serial", show_default=True,
              type=click.Choice(["serial", "parallel", "both"]))
@click.option("--days", type=int, default=1, show_default=True)
@click.option("--qubits", type=int, default=None,
              help="Default: all preset qubits.")
@click.option("--shots", type=int, default=1024, show_default=True)
@click.option("--infinite-shots", is_flag=True, default=False)
@click.option("--fix-p1", is_flag=True, default=False,
              help="Pin the fit visibility to the first data point.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--preset", default=None)
@click.pass_context
def cmd_amplify(ctx, waveform_file, mode, days, qubits, shots,
                infinite_shots, fix_p1, seed, preset):
    """Repeated-pulse error amplification campaign + fits + statistics."""
    w = load_waveform(waveform_file)
    device = device_preset(preset or "valencia-like")
    qubits = qubits or device.qubit_count
    modes = ["serial", "parallel"] if mode == "both" else [mode]
    out = ctx.obj["out"]
    fits = _amplify_campaign(out, {w.label: w}, device, modes, days, qubits,
                             None if infinite_shots else shots, seed,
                             fix_p1=fix_p1)
    for m in modes:
        _write_variability(out, fits, w.label, m, days, qubits)
    mean_eps = float(np.mean([f["eps"] for f in fits]))
    click.echo(f"amplify: {w.label} {'/'.join(modes)} "
               f"{qubits}x{days} cells -> {out} (mean eps {mean_eps:.3e})")


# ---------------------------------------------------------------------------
# rb
# ---------------------------------------------------------------------------

@cli.command("rb")
@click.option("--x90", "x90_file", required=True, type=click.Path())
@click.option("--x180", "x180_file", required=True, type=click.Path())
@click.option("--lengths", default="1,2,4,8,16,32,64", show_default=True)
@click.option("--seqs-per-length", type=int, default=30, show_default=True)
@click.option("--shots", type=int, default=1024, show_default=True)
@click.option("--detuning-khz", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--qubit", type=int, default=0, show_default=True)
@click.option("--preset", default=None)
@click.option("--tag", default="rb", show_default=True,
              help="Artifact filename prefix.")
@click.pass_context
def cmd_rb(ctx, x90_file, x180_file, lengths, seqs_per_length, shots,
           detuning_khz, seed, qubit, preset, tag):
    """Clifford randomized benchmarking of an x90/x180 pulse pair."""
    pulse_set = {"x90": load_waveform(x90_file),
                 "x180": load_waveform(x180_file)}
    device = device_preset(preset or "valencia-like")
    length_list = [int(x) for x in lengths.split(",")]
    noise = rb.RBNoiseConfig(include_t1=True,
                             detuning=TWO_PI * detuning_khz * 1e-6)
    report = rb.run_rb(pulse_set, device, qubit=qubit, lengths=length_list,
                       sequences_per_length=seqs_per_length, shots=shots,
                       noise_config=noise, seed=seed)
    out = ctx.obj["out"]
    raw_rows = [(int(j), k, report.survivals[int(j)][k])
                for j in report.lengths
                for k in range(len(report.survivals[int(j)]))]
    meta = {"seed": seed, "shots": shots, "detuning_khz": detuning_khz,
            "qubit": qubit}
    write_csv(out / f"{tag}_raw.csv", ["length", "seq_index", "survival"],
              raw_rows, metadata=meta)
    write_json(out / f"{tag}_fit.json",
               {"decay_a": report.decay_a, "decay_b": report.decay_b,
                "decay_p": report.decay_p, "epc": report.epc, **meta})
    gamma_rows = []
    for j in report.lengths:
        params = report.gamma_params[int(j)]
        skew = report.skewness[int(j)]
        if params is None:
            gamma_rows.append((int(j), None, None, None))
        else:
            gamma_rows.append((int(j), params[0], params[1], skew))
    write_csv(out / f"{tag}_gamma.csv",
              ["length", "gamma_shape", "gamma_scale", "skewness"],
              gamma_rows, metadata=meta)
    click.echo(f"rb: EPC {report.epc:.3e} -> {out}/{tag}_*.csv")


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@cli.command("report")
@click.argument("campaign_dir", required=False, type=click.Path(exists=True))
@click.pass_context
def cmd_report(ctx, campaign_dir):
    """Aggregate fit JSONs into eps/ratio matrices and a T1 comparison."""
    out = Path(campaign_dir) if campaign_dir else ctx.obj["out"]
    n_missing = _write_report(out)
    click.echo(f"report: matrices under {out} ({n_missing} NA cells)")


def _write_report(out: Path) -> int:
    fits = [read_json(p) for p in sorted(out.glob("fit_*.json"))]
    if not fits:
        raise RobustPulseError(f"no fit_*.json files under {out}")
    pulses = sorted({f["pulse"] for f in fits})
    modes = sorted({f["mode"] for f in fits})
    qubits = max(f["qubit"] for f in fits) + 1
    days = max(f["day"] for f in fits) + 1
    n_missing = 0
    matrices = {}
    for pulse in pulses:
        for mode in modes:
            eps = np.full((qubits, days), np.nan)
            for f in fits:
                if f["pulse"] == pulse and f["mode"] == mode:
                    eps[f["qubit"], f["day"]] = f["eps"]
            matrices[(pulse, mode)] = eps
            n_missing += int(np.isnan(eps).sum())
            rows = [[q] + [eps[q, d] if np.isfinite(eps[q, d]) else None
                           for d in range(days)]
                    for q in range(qubits)]
            write_csv(out / f"eps_matrix_{pulse}_{mode}.csv",
                      ["qubit"] + [f"day{d}" for d in range(days)],
                      rows, metadata={"pulse": pulse, "mode": mode})
    baseline = "drag" if "drag" in pulses else pulses[0]
    for pulse in pulses:
        if pulse == baseline:
            continue
        for mode in modes:
            base = matrices[(baseline, mode)]
            this = matrices[(pulse, mode)]
            with np.errstate(invalid="ignore", divide="ignore"):
                ratio = base / this
            rows = [[q] + [ratio[q, d] if np.isfinite(ratio[q, d]) else None
                           for d in range(days)]
                    for q in range(qubits)]
            write_csv(out / f"ratio_{baseline}_over_{pulse}_{mode}.csv",
                      ["qubit"] + [f"day{d}" for d in range(days)],
                      rows, metadata={"baseline": baseline, "pulse": pulse,
                                      "mode": mode})
    t1_rows = []
    for pulse in pulses:
        for mode in modes:
            for q in range(qubits):
                vals = [f["t1_estimate_ns"] for f in fits
                        if f["pulse"] == pulse and f["mode"] == mode
                        and f["qubit"] == q and np.isfinite(f["t1_estimate_ns"])]
                t1_rows.append((pulse, mode, q,
                                float(np.mean(vals)) if vals else None))
    write_csv(out / "t1_comparison.csv",
              ["pulse", "mode", "qubit", "fitted_t1_ns"], t1_rows)
    summary = [f"pulses: {', '.join(pulses)}",
               f"modes: {', '.join(modes)}",
               f"grid: {qubits} qubits x {days} days",
               f"missing cells: {n_missing}"]
    for (pulse, mode), eps in sorted(matrices.items()):
        finite = eps[np.isfinite(eps)]
        if len(finite):
            summary.append(f"mean eps {pulse}/{mode}: {finite.mean():.9g}")
    (out / "summary.txt").write_text("\n".join(summary) + "\n")
    return n_missing


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@cli.command("pipeline")
@click.option("--preset", default="valencia-like", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--days", type=int, default=2, show_default=True)
@click.option("--shots", type=int, default=1024, show_default=True)
@click.option("--restarts", type=int, default=4, show_default=True)
@click.pass_context
def cmd_pipeline(ctx, preset, seed, days, shots, restarts):
    """Optimize four pulse types, scan, calibrate, amplify, rb, report."""
    out = ctx.obj["out"]
    device = device_preset(preset)
    tau = device.pi_duration_ns
    constraints = PulseConstraints(omega_max=0.3)

    grid_primitive = _make_grid(tau, 20)
    waveforms = {
        "drag": drag_waveform(np.pi, grid_primitive.duration, 0.5,
                              grid_primitive, label="drag"),
        "square": square_waveform(np.pi, grid_primitive.duration,
                                  grid_primitive, label="square"),
    }
    robust_grid = _make_grid(2.0 * tau, 40)
    for mode in ("dephasing", "amplitude"):
        spec = OptimizationSpec(target=target_rotation(np.pi, 0.0, 2),
                                robustness_mode=mode, constraints=constraints,
                                grid=robust_grid, restarts=restarts,
                                seed=_derived_seed(seed, 1, mode == "dephasing"))
        waveforms[mode] = optimize(spec, label=mode).waveform
    for label, w in waveforms.items():
        save_waveform(w, out / f"pulse_{label}.json")
    click.echo(f"pipeline[1/6] optimized {len(waveforms)} pulse types")

    delta_range = TWO_PI * 1e-3 * np.linspace(-1.0, 1.0, 21)
    eps_range = np.linspace(-0.2, 0.2, 21)
    for label, w in waveforms.items():
        res = scan_robustness(w, delta_range, eps_range, device, 0)
        rows = [(delta_range[i] / (TWO_PI * 1e-3), eps_range[j],
                 res.infidelity[i, j])
                for i in range(21) for j in range(21)]
        write_csv(out / f"scan_{label}.csv",
                  ["delta_mhz", "eps", "infidelity"],
                  rows, metadata={"pulse": label})
    click.echo("pipeline[2/6] robustness scans done")

    front_end = calibration.FrontEndModel(true_s_amp=1.03, true_s_rel=0.98)
    grid_probe = _make_grid(tau, 20)
    probe = square_waveform(np.pi, grid_probe.duration, grid_probe)
    cal = calibration.calibrate(front_end, probe, shots=4096,
                                seed=_derived_seed(seed, 2))
    write_json(out / "calibration_result.json",
               {"s_amp": cal.s_amp, "s_rel": cal.s_rel,
                "residual_infidelity_estimate":
                    cal.residual_infidelity_estimate})
    click.echo("pipeline[3/6] calibration done")

    fits = _amplify_campaign(out, waveforms, device, ["serial", "parallel"],
                             days, device.qubit_count, shots,
                             _derived_seed(seed, 3))
    for label in waveforms:
        for m in ("serial", "parallel"):
            _write_variability(out, fits, label, m, days, device.qubit_count)
    click.echo(f"pipeline[4/6] amplification campaign: {len(fits)} fits")

    x90_spec = OptimizationSpec(target=target_rotation(np.pi / 2.0, 0.0, 2),
                                robustness_mode="dephasing",
                                constraints=constraints,
                                grid=grid_primitive, restarts=restarts,
                                seed=_derived_seed(seed, 4))
    x90 = optimize(x90_spec, label="dephasing-x90").waveform
    x180_spec = OptimizationSpec(target=target_rotation(np.pi, 0.0, 2),
                                 robustness_mode="dephasing",
                                 constraints=constraints,
                                 grid=grid_primitive, restarts=restarts,
                                 seed=_derived_seed(seed, 5))
    x180 = optimize(x180_spec, label="dephasing-x180").waveform
    save_waveform(x90, out / "pulse_rb_x90.json")
    save_waveform(x180, out / "pulse_rb_x180.json")
    rb_sets = {"drag": {"x90": drag_waveform(np.pi / 2.0,
                                             grid_primitive.duration, 0.5,
                                             grid_primitive),
                        "x180": waveforms["drag"]},
               "robust": {"x90": x90, "x180": x180}}
    for name, pulse_set in rb_sets.items():
        noise = rb.RBNoiseConfig(include_t1=True, detuning=TWO_PI * 1e-4)
        report = rb.run_rb(pulse_set, device, lengths=(1, 4, 16, 64, 128, 256),
                           sequences_per_length=30, shots=shots,
                           noise_config=noise, seed=_derived_seed(seed, 6))
        write_json(out / f"rb_{name}_fit.json",
                   {"decay_a": report.decay_a, "decay_b": report.decay_b,
                    "decay_p": report.decay_p, "epc": report.epc})
        raw_rows = [(int(j), k, report.survivals[int(j)][k])
                    for j in report.lengths
                    for k in range(len(report.survivals[int(j)]))]
        write_csv(out / f"rb_{name}_raw.csv",
                  ["length", "seq_index", "survival"], raw_rows,
                  metadata={"pulse_set": name})
    click.echo("pipeline[5/6] randomized benchmarking done")

    _write_report(out)
    click.echo(f"pipeline[6/6] report written under {out}")


def run(argv=None) -> int:
    """Programmatic entry point returning the process exit code."""
    try:
        cli.main(args=argv, standalone_mode=False, obj={})
        return 0
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return 1
    except (RobustPulseError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except SystemExit as exc:  # pragma: no cover - click internals
        return int(exc.code or 0)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
