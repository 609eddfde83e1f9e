"""Command-line front end.

Subcommands wrap the library's protocols and benchmarks::

    ionramsey ramsey     --config cfg.ini [--expectation-mode] ...
    ionramsey scaling    --config cfg.ini ...
    ionramsey dephasing  --config cfg.ini ...
    ionramsey calibrate  --config cfg.ini ...
    ionramsey fourier    --config cfg.ini ...

Configs are INI files (flat key-value with sections, diff-friendly for
experiment logs): a command reads its own section plus the optional [run]
section; unknown sections or keys are rejected. Every run writes
``<command>.csv`` (or ``.json`` with ``--format json``) plus
``<command>_summary.json`` into ``--out``; existing files are never
overwritten unless ``--force`` is given. All outputs embed the library
version and a manifest hash (sha256 over command, seed, format, flags, and
the config text), and are byte-identical for equal seeds at any
``--threads`` value.

Exit codes: 0 success, 2 configuration error, 3 register-capacity error,
4 non-convergence or ambiguous-fringe error. Errors are reported as one
JSON object on stderr.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__, streams
from .bench import (
    SCHEMA_VERSION,
    dephasing_benchmark,
    fringe_multiplier,
    scan_scaling,
    theory_sigma,
)
from .errors import (
    AmbiguousFringeError,
    CapacityError,
    ConfigError,
    ConvergenceError,
    IonRamseyError,
)
from .noise import ImperfectionSpec, NoiseSpec
from .protocols import (
    CalibrationState,
    RamseyConfig,
    ensemble_contrast,
    estimate_frequency,
    fit_fringe_frequency,
    flag_large_admixture,
    fourier_decompose,
    fringe_scan,
    ghz_signal,
    make_truth_simulator,
    naive_single_point_omega0,
    run_ghz_ramsey,
    run_standard_ramsey,
    synthesize_signal,
    two_point_calibrate,
)
from .records import (
    EstimateRecord,
    TrialRecord,
    record_row,
    CSV_COLUMNS,
    write_json,
    write_records_csv,
    write_table_csv,
)

_RUN_KEYS = {"seed"}
_SECTION_KEYS = {
    "ramsey": {
        "protocol",
        "n_ions",
        "t_ramsey",
        "omega_0",
        "omega_r",
        "readout",
        "final_phase",
        "phi0",
        "shots",
        "gamma",
        "noise_mode",
        "epsilon",
        "allow_wrap",
        "scan_points",
        "scan_t_max",
    },
    "scaling": {"l_values", "trials", "t_ramsey", "omega_0"},
    "dephasing": {
        "gamma",
        "n_ions",
        "t_min",
        "t_max",
        "grid_points",
        "trials",
        "mode",
        "refine",
    },
    "calibrate": {
        "n_ions",
        "omega_0",
        "omega_r1",
        "omega_r2",
        "t_r1",
        "t_r2",
        "bias_tc",
        "tol",
        "max_iter",
        "phi0",
    },
    "fourier": {
        "input",
        "n_ions",
        "delta_omega",
        "grid_points",
        "c",
        "xi",
        "epsilon",
        "threshold",
    },
}


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: str
    config_text: str
    seed: int
    out_dir: str
    fmt: str
    expectation: bool
    threads: int

    def hash(self) -> str:
        payload = json.dumps(
            {
                "command": self.command,
                "config": self.config_text,
                "expectation": self.expectation,
                "format": self.fmt,
                "seed": self.seed,
                "version": __version__,
            },
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def meta(self) -> dict[str, object]:
        return {
            "command": self.command,
            "manifest_sha256": self.hash(),
            "seed": self.seed,
            "version": __version__,
        }


def _load_config(path: str, command: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse error in {path}: {exc}") from exc
    allowed_sections = {"run", command}
    for section in parser.sections():
        if section not in allowed_sections:
            raise ConfigError(
                f"unknown section [{section}] for command {command!r} "
                f"(allowed: {sorted(allowed_sections)})"
            )
        allowed = _RUN_KEYS if section == "run" else _SECTION_KEYS[command]
        for key in parser[section]:
            if key not in allowed:
                raise ConfigError(
                    f"unknown key {key!r} in [{section}] (allowed: {sorted(allowed)})"
                )
    if not parser.has_section(command):
        raise ConfigError(f"config is missing the [{command}] section")
    return parser


def _get(parser, section: str, key: str, conv, default):
    if not parser.has_option(section, key):
        if default is None:
            raise ConfigError(f"missing required key {key!r} in [{section}]")
        return default
    raw = parser.get(section, key)
    try:
        return conv(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad value for {key!r} in [{section}]: {raw!r}") from exc


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(raw)


def _parse_epsilon(raw: str) -> ImperfectionSpec:
    """Admixture list: whitespace-separated ``p:amplitude[:phase]`` items."""
    eps: dict[int, complex] = {}
    for item in raw.split():
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(item)
        p = int(parts[0])
        amp = float(parts[1])
        phase = float(parts[2]) if len(parts) == 3 else 0.0
        eps[p] = amp * np.exp(1j * phase)
    return ImperfectionSpec(epsilon=eps)


def _parse_floats(raw: str) -> list[float]:
    return [float(x) for x in raw.replace(",", " ").split()]


def _parse_ints(raw: str) -> list[int]:
    return [int(x) for x in raw.replace(",", " ").split()]


def _resolve_seed(parser, cli_seed: int | None) -> int:
    if cli_seed is not None:
        return cli_seed
    if parser.has_section("run") and parser.has_option("run", "seed"):
        return _get(parser, "run", "seed", int, 0)
    return 0


def _output_paths(manifest: RunManifest) -> tuple[Path, Path]:
    out = Path(manifest.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if manifest.fmt == "csv" else "json"
    return out / f"{manifest.command}.{ext}", out / f"{manifest.command}_summary.json"


def _check_overwrite(paths: tuple[Path, ...], force: bool) -> None:
    clashes = [str(p) for p in paths if p.exists()]
    if clashes and not force:
        raise ConfigError(
            f"refusing to overwrite existing outputs {clashes}; pass --force"
        )


def _write_records(path: Path, records, manifest: RunManifest) -> None:
    if manifest.fmt == "csv":
        write_records_csv(path, records, manifest.meta())
    else:
        rows = [dict(zip(CSV_COLUMNS, record_row(r))) for r in records]
        write_json(path, {"meta": manifest.meta(), "rows": rows})


def _write_table(path: Path, columns, rows, manifest: RunManifest) -> None:
    if manifest.fmt == "csv":
        write_table_csv(path, columns, rows, manifest.meta())
    else:
        dicts = [
            {col: val for col, val in zip(columns, row)} for row in rows
        ]
        write_json(path, {"meta": manifest.meta(), "rows": dicts})


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _ramsey_config(parser) -> tuple[str, RamseyConfig, int, float]:
    sec = "ramsey"
    protocol = _get(parser, sec, "protocol", str, "ghz").strip()
    if protocol not in ("standard", "ghz"):
        raise ConfigError(f"protocol must be standard|ghz, got {protocol!r}")
    gamma = _get(parser, sec, "gamma", float, 0.0)
    noise = None
    if gamma > 0:
        noise = NoiseSpec(gamma=gamma, mode=_get(parser, sec, "noise_mode", str, "independent"))
    imperfection = None
    if parser.has_option(sec, "epsilon"):
        imperfection = _get(parser, sec, "epsilon", _parse_epsilon, None)
    try:
        cfg = RamseyConfig(
            n_ions=_get(parser, sec, "n_ions", int, None),
            t_ramsey=_get(parser, sec, "t_ramsey", float, None),
            omega_r=_get(parser, sec, "omega_r", float, None),
            omega_0=_get(parser, sec, "omega_0", float, 0.0),
            noise=noise,
            imperfection=imperfection,
            readout=_get(parser, sec, "readout", str, "final_pulse"),
            final_phase=_get(parser, sec, "final_phase", float, 0.0),
            phi0=_get(parser, sec, "phi0", float, 0.0),
            shots=_get(parser, sec, "shots", int, 1000),
            allow_wrap=_get(parser, sec, "allow_wrap", _parse_bool, False),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    scan_points = _get(parser, sec, "scan_points", int, 64)
    scan_t_max = _get(parser, sec, "scan_t_max", float, cfg.t_ramsey)
    return protocol, cfg, scan_points, scan_t_max


def cmd_ramsey(manifest: RunManifest, parser) -> int:
    protocol, cfg, scan_points, scan_t_max = _ramsey_config(parser)
    records_path, summary_path = _output_paths(manifest)
    summary: dict[str, object] = {
        "schema_version": SCHEMA_VERSION,
        "meta": manifest.meta(),
        "protocol": protocol,
        "n_ions": cfg.n_ions,
        "t_ramsey": cfg.t_ramsey,
        "omega_r": cfg.omega_r,
        "delta_omega": cfg.delta_omega,
        "readout": cfg.readout,
        "expectation_mode": manifest.expectation,
    }
    if manifest.expectation:
        t_grid = scan_t_max * np.arange(1, scan_points + 1) / scan_points
        signal = fringe_scan(replace(cfg, allow_wrap=True), protocol, t_grid)
        rows = [
            TrialRecord(protocol, cfg.n_ions, float(t), cfg.omega_r, "", float(s))
            for t, s in zip(t_grid, signal)
        ]
        _write_records(records_path, rows, manifest)
        fit = fit_fringe_frequency(t_grid, signal)
        mult = fringe_multiplier(protocol, cfg.n_ions)
        summary["fitted_fringe_frequency"] = fit.frequency
        summary["expected_fringe_frequency"] = abs(cfg.delta_omega) * mult
        summary["fitted_amplitude"] = fit.amplitude
    else:
        proto_tag = (
            "standard"
            if protocol == "standard"
            else ("ghz_reversed" if cfg.readout == "time_reversed" else "ghz_parity")
        )
        runner = run_standard_ramsey if protocol == "standard" else run_ghz_ramsey
        batch = 2000
        n_batches = max(1, -(-cfg.shots // batch))
        sizes = [min(batch, cfg.shots - b * batch) for b in range(n_batches)]

        def one_batch(b: int):
            rng = streams.stream(manifest.seed, 0, b)
            label = f"{manifest.seed}/0/{b}"
            return runner(replace(cfg, shots=sizes[b]), rng, seed_label=label)

        batches = streams.parallel_map(one_batch, n_batches, manifest.threads)
        records = streams.merge_in_order(batches)
        all_rows: list = list(records)
        contrast = ensemble_contrast(cfg.n_ions, cfg.noise, cfg.t_ramsey, proto_tag)
        try:
            est = estimate_frequency(
                records, contrast=contrast, final_phase=cfg.final_phase
            )
            all_rows.append(est)
            summary["estimate_delta_omega"] = est.estimate
            summary["estimate_sigma"] = est.sigma
        except IonRamseyError as exc:
            summary["estimate_error"] = f"{type(exc).__name__}: {exc}"
        mean_outcome = float(np.mean([r.outcome for r in records]))
        summary["shots"] = cfg.shots
        summary["mean_outcome"] = mean_outcome
        _write_records(records_path, all_rows, manifest)
    write_json(summary_path, summary)
    return 0


def cmd_scaling(manifest: RunManifest, parser) -> int:
    sec = "scaling"
    l_values = _get(parser, sec, "l_values", _parse_ints, None)
    trials = _get(parser, sec, "trials", int, 10_000)
    template = RamseyConfig(
        n_ions=1,
        t_ramsey=_get(parser, sec, "t_ramsey", float, 1.0),
        omega_r=0.0,
        omega_0=_get(parser, sec, "omega_0", float, 0.0),
    )
    records_path, summary_path = _output_paths(manifest)
    columns = ("protocol", "L", "T_R", "tau", "sigma_measured", "sigma_theory", "ratio")
    if manifest.expectation:
        # No sampling noise to measure: emit the analytic limits themselves.
        rows = []
        slopes = {}
        for protocol in ("standard", "ghz"):
            sigmas = []
            for n_ions in l_values:
                tau = trials * template.t_ramsey
                sig = theory_sigma(protocol, n_ions, template.t_ramsey, tau)
                sigmas.append(sig)
                rows.append((protocol, n_ions, template.t_ramsey, tau, sig, sig, 1.0))
            coef = np.polyfit(np.log(l_values), np.log(sigmas), 1)
            slopes[protocol] = float(coef[0])
        _write_table(records_path, columns, rows, manifest)
        write_json(
            summary_path,
            {
                "schema_version": SCHEMA_VERSION,
                "meta": manifest.meta(),
                "expectation_mode": True,
                "slopes": slopes,
                "trials": trials,
            },
        )
        return 0
    report = scan_scaling(
        l_values, template, trials, seed=manifest.seed, threads=manifest.threads
    )
    rows = [
        (p.protocol, p.n_ions, p.t_ramsey, p.tau, p.sigma_measured, p.sigma_theory, p.ratio)
        for p in report.points
    ]
    _write_table(records_path, columns, rows, manifest)
    write_json(
        summary_path,
        {
            "schema_version": SCHEMA_VERSION,
            "meta": manifest.meta(),
            "expectation_mode": False,
            "slopes": report.slopes,
            "slope_sigma": report.slope_sigma,
            "trials": report.trials,
            "low_statistics": report.low_statistics,
        },
    )
    return 0


def cmd_dephasing(manifest: RunManifest, parser) -> int:
    sec = "dephasing"
    gamma = _get(parser, sec, "gamma", float, None)
    n_ions = _get(parser, sec, "n_ions", int, None)
    t_min = _get(parser, sec, "t_min", float, None)
    t_max = _get(parser, sec, "t_max", float, None)
    points = _get(parser, sec, "grid_points", int, 12)
    trials = _get(parser, sec, "trials", int, 5000)
    mode = _get(parser, sec, "mode", str, "sampled")
    refine = _get(parser, sec, "refine", _parse_bool, True)
    if manifest.expectation:
        mode = "analytic"
    if t_min <= 0 or t_max <= t_min:
        raise ConfigError("need 0 < t_min < t_max")
    t_grid = np.geomspace(t_min, t_max, points)
    report = dephasing_benchmark(
        gamma,
        n_ions,
        t_grid,
        trials,
        seed=manifest.seed,
        threads=manifest.threads,
        mode=mode,
        refine=refine,
    )
    records_path, summary_path = _output_paths(manifest)
    columns = ("protocol", "T_R", "sigma_sqrt_tau")
    rows = []
    for protocol in ("standard", "ghz"):
        curve = report.curves[protocol]
        rows.extend(
            (protocol, float(t), float(v))
            for t, v in zip(curve.t_grid, curve.sigma_tau)
        )
    _write_table(records_path, columns, rows, manifest)
    write_json(
        summary_path,
        {
            "schema_version": SCHEMA_VERSION,
            "meta": manifest.meta(),
            "gamma": gamma,
            "n_ions": n_ions,
            "mode": report.mode,
            "trials": report.trials,
            "t_opt": {p: report.curves[p].t_opt for p in report.curves},
            "min_sigma_sqrt_tau": {
                p: report.curves[p].min_value for p in report.curves
            },
            "argmin_on_boundary": {
                p: report.curves[p].argmin_on_boundary for p in report.curves
            },
            "t_opt_ratio": report.t_opt_ratio,
            "min_ratio": report.min_ratio,
        },
    )
    return 0


def cmd_calibrate(manifest: RunManifest, parser) -> int:
    sec = "calibrate"
    n_ions = _get(parser, sec, "n_ions", int, None)
    omega_0 = _get(parser, sec, "omega_0", float, None)
    cal = CalibrationState(
        omega_r1=_get(parser, sec, "omega_r1", float, None),
        omega_r2=_get(parser, sec, "omega_r2", float, None),
        t_r1=_get(parser, sec, "t_r1", float, None),
        t_r2=_get(parser, sec, "t_r2", float, None),
    )
    bias_tc = _get(parser, sec, "bias_tc", float, 0.0)
    tol = _get(parser, sec, "tol", float, 0.0) or None
    max_iter = _get(parser, sec, "max_iter", int, 50)
    cfg = RamseyConfig(
        n_ions=n_ions,
        t_ramsey=cal.t_r2,
        omega_r=cal.omega_r1,
        omega_0=omega_0,
        phi0=_get(parser, sec, "phi0", float, 0.0),
    )
    bias = (lambda t: float(np.exp(-t / bias_tc))) if bias_tc > 0 else None
    sim = make_truth_simulator(cfg, bias=bias)
    history: list = []
    result = two_point_calibrate(
        sim, cal, cfg, tol=tol, max_iter=max_iter, history=history
    )
    records_path, summary_path = _output_paths(manifest)
    columns = ("iteration", "omega_r1", "omega_r2", "phi_f", "omega0_estimate")
    _write_table(records_path, columns, history, manifest)
    fringe_width = float(np.pi / (n_ions * cal.t_r2))
    naive = naive_single_point_omega0(sim, cal.omega_r2, cal.t_r2, n_ions)
    write_json(
        summary_path,
        {
            "schema_version": SCHEMA_VERSION,
            "meta": manifest.meta(),
            "n_ions": n_ions,
            "bias_tc": bias_tc,
            "iterations": result.iterations,
            "omega0_estimate": result.omega0,
            "omega0_truth": omega_0,
            "abs_error": abs(result.omega0 - omega_0),
            "fringe_width": fringe_width,
            "error_in_fringe_widths": abs(result.omega0 - omega_0) / fringe_width,
            "phi_f": result.phi_f,
            "naive_single_point_estimate": naive,
            "naive_offset": abs(naive - omega_0),
        },
    )
    return 0


def _read_signal_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    ts, ss = [], []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read signal file {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) < 2:
            raise ConfigError(f"bad signal row {line!r} in {path} (line {lineno})")
        try:
            t, s = float(parts[0]), float(parts[1])
        except ValueError:
            if not ts:  # column-header row before the first sample
                continue
            raise ConfigError(
                f"bad signal row {line!r} in {path} (line {lineno})"
            ) from None
        ts.append(t)
        ss.append(s)
    if not ts:
        raise ConfigError(f"no samples found in {path}")
    return np.array(ts), np.array(ss)


def cmd_fourier(manifest: RunManifest, parser) -> int:
    sec = "fourier"
    n_ions = _get(parser, sec, "n_ions", int, None)
    delta_omega = _get(parser, sec, "delta_omega", float, None)
    threshold = _get(parser, sec, "threshold", float, 0.1)
    if parser.has_option(sec, "input"):
        t_grid, signal = _read_signal_csv(parser.get(sec, "input"))
        source = "file"
    elif parser.has_option(sec, "c"):
        c = _get(parser, sec, "c", _parse_floats, None)
        xi = _get(parser, sec, "xi", _parse_floats, [0.0] * len(c))
        if len(c) != n_ions or len(xi) != n_ions:
            raise ConfigError("c and xi must list one value per harmonic (n_ions)")
        points = _get(parser, sec, "grid_points", int, 128)
        period = 2 * np.pi / abs(delta_omega)
        t_grid = period * np.arange(points) / points
        signal = synthesize_signal(t_grid, delta_omega, c, xi)
        source = "synthetic"
    elif parser.has_option(sec, "epsilon"):
        imperfection = _get(parser, sec, "epsilon", _parse_epsilon, None)
        points = _get(parser, sec, "grid_points", int, 128)
        period = 2 * np.pi / abs(delta_omega)
        t_grid = period * np.arange(1, points + 1) / points
        cfg = RamseyConfig(
            n_ions=n_ions,
            t_ramsey=1.0,
            omega_r=delta_omega,
            omega_0=0.0,
            imperfection=imperfection,
            allow_wrap=True,
        )
        signal = np.array([ghz_signal(cfg, t_ramsey=float(t)) for t in t_grid])
        source = "state_vector"
    else:
        raise ConfigError("[fourier] needs one of: input=, c=, or epsilon=")
    fit = fourier_decompose(t_grid, signal, n_ions, delta_omega)
    records_path, summary_path = _output_paths(manifest)
    columns = ("p", "C_p", "xi_p")
    rows = [(p, float(fit.c[p - 1]), float(fit.xi[p - 1])) for p in range(1, n_ions + 1)]
    _write_table(records_path, columns, rows, manifest)
    write_json(
        summary_path,
        {
            "schema_version": SCHEMA_VERSION,
            "meta": manifest.meta(),
            "source": source,
            "n_ions": n_ions,
            "delta_omega": delta_omega,
            "n_samples": int(len(t_grid)),
            "residual_rms": fit.residual,
            "dominant_p": int(np.argmax(fit.c)) + 1,
            "large_admixture_flag": flag_large_admixture(fit, threshold),
        },
    )
    return 0


_COMMANDS = {
    "ramsey": cmd_ramsey,
    "scaling": cmd_scaling,
    "dephasing": cmd_dephasing,
    "calibrate": cmd_calibrate,
    "fourier": cmd_fourier,
}


def _build_argparser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ionramsey",
        description="Ramsey spectroscopy simulations on entangled trapped-ion registers",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment/benchmark")
        p.add_argument("--config", required=True, help="INI config file")
        p.add_argument("--seed", type=int, default=None, help="global seed (overrides [run] seed)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument(
            "--expectation-mode",
            action="store_true",
            help="exact expectations instead of sampled shots "
            "(scaling/dephasing: analytic curves)",
        )
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_argparser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ConfigError(f"--threads must be >= 1, got {args.threads}")
        parser = _load_config(args.config, args.command)
        manifest = RunManifest(
            command=args.command,
            config_path=args.config,
            config_text=Path(args.config).read_text(),
            seed=_resolve_seed(parser, args.seed),
            out_dir=args.out,
            fmt=args.format,
            expectation=args.expectation_mode,
            threads=args.threads,
        )
        _check_overwrite(_output_paths(manifest), args.force)
        return _COMMANDS[args.command](manifest, parser)
    except ConfigError as exc:
        _fail(exc)
        return 2
    except CapacityError as exc:
        _fail(exc)
        return 3
    except (ConvergenceError, AmbiguousFringeError) as exc:
        _fail(exc)
        return 4
    except IonRamseyError as exc:  # residual library errors: config-level
        _fail(exc)
        return 2


def _fail(exc: Exception) -> None:
    sys.stderr.write(
        json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
    )


if __name__ == "__main__":
    sys.exit(main())
