"""Batch front end.

Four core subcommands plus figure rendering:

  gen          simulate an experiment, write records + ground truth JSON
  reconstruct  run the iterative reconstruction on a record file
  bench        timing/convergence campaign over dimensions and families
  selftest     quick run of the library's key invariants
  report       render trace/benchmark CSVs to PNG figures

Exit codes: 0 success/converged, 1 selftest failure, 2 bad configuration
or unparseable input, 3 reconstruction stopped by the sweep budget.

All randomness flows from --seed through named substreams, so every
command is reproducible bit-for-bit (timing columns excepted).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import baseline, imposition, matcore, metrics, observables, simulate, states
from .errors import TomographyError

EXIT_OK = 0
EXIT_SELFTEST_FAIL = 1
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3

OUT_DIR_ENV = "QSTOMO_OUT"

FAMILIES = ("mub", "random", "pauli")
TRUE_KINDS = ("pure", "mixed")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated description of one synthetic experiment."""

    dim: int
    family: str                      # mub | random | pauli | path to JSON
    m: int | None = None
    true_state: str = "pure"         # pure | mixed | path to JSON
    true_rank: int | None = None
    shots: int | None = None
    epsilon: float = 0.0
    rank: int | None = None
    max_sweeps: int = imposition.DEFAULT_MAX_SWEEPS
    tol_distributional: float = imposition.DEFAULT_TOL_DISTRIBUTIONAL
    tol_step: float = imposition.DEFAULT_TOL_STEP
    n_seeds: int = 1
    seed: int = 0
    out_dir: str = "."

    def validated(self) -> "ExperimentConfig":
        """Cross-field consistency checks; returns a copy with m defaulted."""
        if self.dim < 2:
            raise ValueError(f"dim: need >= 2, got {self.dim}")
        family = self.family
        m = self.m
        if family == "pauli":
            if self.dim != 2:
                raise ValueError(f"family pauli: requires dim 2, got {self.dim}")
            if m not in (None, 3):
                raise ValueError(f"family pauli: m is fixed at 3, got {m}")
            m = 3
        elif family == "mub":
            if not observables.is_prime(self.dim):
                raise ValueError(f"family mub: requires prime dim, got {self.dim}")
            if m is None:
                m = self.dim + 1
            if not 1 <= m <= self.dim + 1:
                raise ValueError(f"family mub: m must lie in [1, {self.dim + 1}], got {m}")
        elif family == "random":
            if m is None:
                m = self.dim + 1
            if m < 1:
                raise ValueError(f"family random: m must be >= 1, got {m}")
        elif not Path(family).is_file():
            raise ValueError(
                f"family: expected one of {FAMILIES} or an existing file, got {family!r}"
            )
        if self.true_state not in TRUE_KINDS and not Path(self.true_state).is_file():
            raise ValueError(
                f"true: expected one of {TRUE_KINDS} or an existing file, "
                f"got {self.true_state!r}"
            )
        if self.true_rank is not None and not 1 <= self.true_rank <= self.dim:
            raise ValueError(f"true-rank: must lie in [1, {self.dim}], got {self.true_rank}")
        if self.shots is not None and self.shots < 1:
            raise ValueError(f"shots: must be >= 1, got {self.shots}")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon: must lie in [0, 1], got {self.epsilon}")
        if self.rank is not None and not 1 <= self.rank <= self.dim:
            raise ValueError(f"rank: must lie in [1, {self.dim}], got {self.rank}")
        if self.n_seeds < 1:
            raise ValueError(f"n-seeds: must be >= 1, got {self.n_seeds}")
        return replace(self, m=m)


def _child_seeds(master: int, n: int) -> list[int]:
    ss = np.random.SeedSequence(master)
    return [int(s) for s in ss.generate_state(n, dtype=np.uint64)]


def _observable_set_for(config: ExperimentConfig, seed: int) -> observables.ObservableSet:
    if config.family == "mub":
        return observables.mub_set(config.dim, config.m)
    if config.family == "random":
        return observables.random_observable_set(config.dim, config.m, seed)
    if config.family == "pauli":
        return observables.pauli_set()
    obj = json.loads(Path(config.family).read_text())
    oset = observables.observable_set_from_json(obj)
    if oset.dim != config.dim:
        raise ValueError(f"observable file dim {oset.dim} != configured dim {config.dim}")
    return oset


def _true_state_for(config: ExperimentConfig, seed: int) -> states.DensityMatrix:
    if config.true_state == "pure":
        return states.random_pure_state(config.dim, seed)
    if config.true_state == "mixed":
        r = config.true_rank if config.true_rank is not None else config.dim
        return states.random_mixed_state(config.dim, r, seed)
    obj = json.loads(Path(config.true_state).read_text())
    rho = states.state_from_json(obj)
    if rho.dim != config.dim:
        raise ValueError(f"state file dim {rho.dim} != configured dim {config.dim}")
    return rho


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_config_file(path: str | None, parser: argparse.ArgumentParser) -> dict:
    if path is None:
        return {}
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"--config {path}: {exc}")
    if not isinstance(obj, dict):
        parser.error(f"--config {path}: expected a JSON object")
    return obj


def _merged(args, file_cfg: dict, key: str, default):
    """Resolution order: explicit flag > config file entry > default."""
    v = getattr(args, key, None)
    if v is not None:
        return v
    if key in file_cfg:
        return file_cfg[key]
    return default


def _resolve_out_dir(args, file_cfg: dict) -> Path:
    v = _merged(args, file_cfg, "out", None)
    if v is None:
        v = os.environ.get(OUT_DIR_ENV, ".")
    out = Path(v)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_from_args(args, file_cfg: dict) -> ExperimentConfig:
    return ExperimentConfig(
        dim=_merged(args, file_cfg, "dim", 0),
        family=_merged(args, file_cfg, "family", "mub"),
        m=_merged(args, file_cfg, "m", None),
        true_state=_merged(args, file_cfg, "true", "pure"),
        true_rank=_merged(args, file_cfg, "true_rank", None),
        shots=_merged(args, file_cfg, "shots", None),
        epsilon=_merged(args, file_cfg, "epsilon", 0.0),
        rank=_merged(args, file_cfg, "rank", None),
        max_sweeps=_merged(args, file_cfg, "max_sweeps", imposition.DEFAULT_MAX_SWEEPS),
        tol_distributional=_merged(
            args, file_cfg, "tol_distributional", imposition.DEFAULT_TOL_DISTRIBUTIONAL
        ),
        tol_step=_merged(args, file_cfg, "tol_step", imposition.DEFAULT_TOL_STEP),
        n_seeds=_merged(args, file_cfg, "n_seeds", 1),
        seed=_merged(args, file_cfg, "seed", 0),
    )


# ---------------------------------------------------------------- gen


def cmd_gen(args, parser) -> int:
    file_cfg = _load_config_file(args.config, parser)
    try:
        config = _config_from_args(args, file_cfg).validated()
    except ValueError as exc:
        parser.error(str(exc))
    out = _resolve_out_dir(args, file_cfg)

    s_state, s_obs, s_sample = _child_seeds(config.seed, 3)
    try:
        ideal = _true_state_for(config, s_state)
        oset = _observable_set_for(config, s_obs)
    except (ValueError, TomographyError, OSError, json.JSONDecodeError, KeyError) as exc:
        parser.error(str(exc))
    prepared = simulate.depolarize(ideal, config.epsilon) if config.epsilon > 0 else ideal
    records = simulate.record_set(prepared, oset, shots=config.shots, seed=s_sample)

    _write_json(out / "records.json", simulate.records_to_json(records))
    _write_json(out / "true_state.json", states.state_to_json(prepared.matrix))
    if config.epsilon > 0:
        _write_json(out / "ideal_state.json", states.state_to_json(ideal.matrix))
    mode = "exact" if config.shots is None else f"{config.shots} shots"
    print(
        f"gen: d={config.dim} family={config.family} m={len(oset)} "
        f"true={config.true_state} eps={config.epsilon} mode={mode} -> {out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------- reconstruct


def cmd_reconstruct(args, parser) -> int:
    file_cfg = _load_config_file(args.config, parser)
    records_path = _merged(args, file_cfg, "records", None)
    if records_path is None:
        parser.error("reconstruct: --records is required")
    try:
        arr = json.loads(Path(records_path).read_text())
        records = simulate.records_from_json(arr)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, TomographyError) as exc:
        print(f"error: records file {records_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not records:
        print(f"error: records file {records_path} is empty", file=sys.stderr)
        return EXIT_CONFIG

    d = records[0].dim
    seed = _merged(args, file_cfg, "seed", 0)
    psd = _merged(args, file_cfg, "psd_projection", None)
    if psd is None:
        # noisy records get the projection by default; exact data does not
        psd = any(rec.shots is not None for rec in records)
    try:
        cfg = imposition.IterationConfig(
            max_sweeps=_merged(args, file_cfg, "max_sweeps", imposition.DEFAULT_MAX_SWEEPS),
            tol_distributional=_merged(
                args, file_cfg, "tol_distributional", imposition.DEFAULT_TOL_DISTRIBUTIONAL
            ),
            tol_step=_merged(args, file_cfg, "tol_step", imposition.DEFAULT_TOL_STEP),
            rank=_merged(args, file_cfg, "rank", None),
            final_psd_projection=bool(psd),
        )
    except ValueError as exc:
        parser.error(str(exc))

    true_matrix = None
    true_path = _merged(args, file_cfg, "true", None)
    if true_path is not None:
        try:
            rho_true = states.state_from_json(json.loads(Path(true_path).read_text()))
        except (OSError, json.JSONDecodeError, KeyError, ValueError, TomographyError) as exc:
            print(f"error: true-state file {true_path}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        if abs(states.purity(rho_true) - 1.0) <= 1e-8:
            true_matrix = rho_true.matrix
        else:
            print("note: reference state is mixed; fidelity column omitted",
                  file=sys.stderr)

    rho0 = states.random_pure_state(d, seed)
    result = imposition.reconstruct(records, rho0, cfg, true_state=true_matrix)

    out = _resolve_out_dir(args, file_cfg)
    _write_json(out / "result.json", imposition.result_to_json(result))
    (out / "trace.csv").write_text(result.trace.to_csv())
    if args.plot:
        from . import report

        report.plot_trace(out / "trace.csv", out / "trace.png")

    last = result.trace.rows[-1]
    print(
        f"reconstruct: d={d} m={len(records)} sweeps={result.n_sweeps} "
        f"stop={result.stop_reason.value} D={last.distributional:.3e} -> {out}"
    )
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


# ---------------------------------------------------------------- bench


def _env_fingerprint() -> str:
    """Compact note on the matrix kernels behind the timings."""
    blas = "unknown"
    try:
        cfg = np.show_config(mode="dicts")
        blas = cfg["Build Dependencies"]["blas"]["name"]
    except Exception:
        pass
    return f"numpy={np.__version__};blas={blas}"


def _bench_trial(payload: tuple) -> dict:
    """One (d, family) trial; top-level function so worker pools can pickle it."""
    (d, family, m, shots, epsilon, rank, max_sweeps, tol_d, tol_s, trial_seed) = payload
    s_state, s_obs, s_sample, s_init = _child_seeds(trial_seed, 4)
    config = ExperimentConfig(
        dim=d, family=family, m=m, true_state="mixed", shots=shots, epsilon=epsilon
    ).validated()
    ideal = _true_state_for(config, s_state)
    oset = _observable_set_for(config, s_obs)
    prepared = simulate.depolarize(ideal, epsilon) if epsilon > 0 else ideal
    records = simulate.record_set(prepared, oset, shots=shots, seed=s_sample)
    cfg = imposition.IterationConfig(
        max_sweeps=max_sweeps,
        tol_distributional=tol_d,
        tol_step=tol_s,
        rank=rank,
        final_psd_projection=shots is not None or epsilon > 0,
    )
    rho0 = states.random_pure_state(d, s_init)

    t0 = time.perf_counter()
    try:
        result = imposition.reconstruct(records, rho0, cfg)
        imp = {
            "seconds": time.perf_counter() - t0,
            "sweeps": result.n_sweeps,
            "ok": result.converged,
        }
    except TomographyError:
        imp = {"seconds": None, "sweeps": None, "ok": False}

    t0 = time.perf_counter()
    try:
        baseline.baseline_estimate(records)
        base = {"seconds": time.perf_counter() - t0, "ok": True}
    except TomographyError:
        base = {"seconds": None, "ok": False}
    return {"imposition": imp, "baseline": base}


def _aggregate(values: list) -> tuple:
    vals = [v for v in values if v is not None]
    if not vals:
        return "", ""
    mean = float(np.mean(vals))
    std = float(np.std(vals))
    return format(mean, ".6e"), format(std, ".6e")


def cmd_bench(args, parser) -> int:
    file_cfg = _load_config_file(args.config, parser)
    dims_raw = _merged(args, file_cfg, "dims", "2,3,5")
    families_raw = _merged(args, file_cfg, "family", "mub")
    try:
        dims = [int(s) for s in str(dims_raw).split(",") if s.strip()]
    except ValueError:
        parser.error(f"--dims: expected comma-separated integers, got {dims_raw!r}")
    families = [s.strip() for s in str(families_raw).split(",") if s.strip()]
    trials = _merged(args, file_cfg, "trials", 20)
    jobs = _merged(args, file_cfg, "jobs", 1)
    m = _merged(args, file_cfg, "m", None)
    shots = _merged(args, file_cfg, "shots", None)
    epsilon = _merged(args, file_cfg, "epsilon", 0.0)
    rank = _merged(args, file_cfg, "rank", None)
    max_sweeps = _merged(args, file_cfg, "max_sweeps", imposition.DEFAULT_MAX_SWEEPS)
    tol_d = _merged(args, file_cfg, "tol_distributional",
                    imposition.DEFAULT_TOL_DISTRIBUTIONAL)
    tol_s = _merged(args, file_cfg, "tol_step", imposition.DEFAULT_TOL_STEP)
    master_seed = _merged(args, file_cfg, "seed", 0)
    if trials < 1:
        parser.error(f"--trials: must be >= 1, got {trials}")

    # validate every cell before any work
    for family in families:
        for d in dims:
            try:
                ExperimentConfig(dim=d, family=family, m=m, shots=shots,
                                 epsilon=epsilon, rank=rank).validated()
            except ValueError as exc:
                parser.error(f"cell (d={d}, family={family}): {exc}")

    out = _resolve_out_dir(args, file_cfg)
    env = _env_fingerprint()
    lines = ["d,family,algorithm,mean_seconds,std_seconds,mean_sweeps,success_rate,env"]
    cell_seeds = _child_seeds(master_seed, len(families) * len(dims))
    idx = 0
    for family in families:
        for d in dims:
            trial_seeds = _child_seeds(cell_seeds[idx], trials)
            idx += 1
            payloads = [
                (d, family, m, shots, epsilon, rank, max_sweeps, tol_d, tol_s, s)
                for s in trial_seeds
            ]
            if jobs > 1:
                from concurrent.futures import ProcessPoolExecutor

                with ProcessPoolExecutor(max_workers=jobs) as pool:
                    results = list(pool.map(_bench_trial, payloads))
            else:
                results = [_bench_trial(p) for p in payloads]

            imp = [r["imposition"] for r in results]
            base = [r["baseline"] for r in results]
            mean_s, std_s = _aggregate([r["seconds"] for r in imp])
            sweeps = [r["sweeps"] for r in imp if r["sweeps"] is not None]
            mean_sweeps = format(float(np.mean(sweeps)), ".6g") if sweeps else ""
            rate = sum(r["ok"] for r in imp) / trials
            lines.append(
                f"{d},{family},imposition,{mean_s},{std_s},{mean_sweeps},{rate:.4f},{env}"
            )
            mean_s, std_s = _aggregate([r["seconds"] for r in base])
            brate = sum(r["ok"] for r in base) / trials
            lines.append(f"{d},{family},baseline,{mean_s},{std_s},,{brate:.4f},{env}")
            print(f"bench: d={d} family={family} trials={trials} done")

    (out / "bench.csv").write_text("\n".join(lines) + "\n")
    if args.plot:
        from . import report

        report.plot_bench(out / "bench.csv", out / "bench.png")
    print(f"bench: wrote {out / 'bench.csv'}")
    return EXIT_OK


# ---------------------------------------------------------------- selftest


def _check_exact_imposition() -> None:
    rng = np.random.default_rng(11)
    for _ in range(50):
        d = int(rng.integers(2, 9))
        obs = observables.random_observable_set(d, 1, int(rng.integers(2**32)))[0]
        p = rng.dirichlet(np.ones(d))
        sigma = states.random_intermediate(d, int(rng.integers(2**32)))
        out = imposition.impose(obs, p, sigma)
        assert np.max(np.abs(simulate.born_probabilities(out, obs) - p)) < 1e-12
        assert abs(np.trace(out).real - 1.0) < 1e-12
        assert matcore.is_hermitian(out, 1e-12)


def _check_contraction_properties() -> None:
    rng = np.random.default_rng(12)
    for _ in range(300):
        d = int(rng.integers(2, 7))
        obs = observables.random_observable_set(d, 1, int(rng.integers(2**32)))[0]
        rho = states.random_mixed_state(d, d, int(rng.integers(2**32)))
        sigma = states.random_intermediate(d, int(rng.integers(2**32)))
        p = simulate.born_probabilities(rho, obs)
        out = imposition.impose(obs, p, sigma)
        base = metrics.hs_distance(sigma, rho.matrix)
        assert metrics.hs_distance(out, sigma) <= base + 1e-12
        assert metrics.hs_distance(out, rho.matrix) <= 2.0 * base + 1e-12


def _check_dual_route() -> None:
    rng = np.random.default_rng(13)
    for _ in range(100):
        d = int(rng.integers(2, 9))
        obs = observables.random_observable_set(d, 1, int(rng.integers(2**32)))[0]
        p = rng.dirichlet(np.ones(d))
        sigma = states.random_intermediate(d, int(rng.integers(2**32)))
        a = imposition.impose(obs, p, sigma)
        b = imposition._impose_additive(obs, p, sigma)
        assert np.max(np.abs(a - b)) < 1e-12


def _check_mub_single_sweep() -> None:
    for d in (2, 3, 5):
        rho = states.random_mixed_state(d, d, seed=100 + d)
        oset = observables.mub_set(d, d + 1)
        records = simulate.record_set(rho, oset)
        result = imposition.reconstruct(
            records, states.random_pure_state(d, seed=200 + d)
        )
        assert result.n_sweeps == 1, f"d={d}: took {result.n_sweeps} sweeps"
        assert metrics.hs_distance(result.estimate.matrix, rho.matrix) < 1e-8


def _check_metric_values() -> None:
    assert abs(metrics.hellinger([0.5, 0.5], [1, 0]) - np.sqrt(2 - np.sqrt(2))) < 1e-12
    assert abs(metrics.hellinger([1, 0], [0, 1]) - np.sqrt(2)) < 1e-12
    half = np.eye(2) / 2
    zero = np.diag([1.0, 0.0])
    assert abs(metrics.hs_distance(half, zero) - 1 / np.sqrt(2)) < 1e-12


def _check_baseline_agreement() -> None:
    rho = states.random_mixed_state(3, 3, seed=7)
    oset = observables.random_observable_set(3, 4, seed=8)
    records = simulate.record_set(rho, oset)
    result = imposition.reconstruct(records, states.random_pure_state(3, seed=9))
    est = baseline.baseline_estimate(records)
    assert result.converged
    assert metrics.hs_distance(result.estimate.matrix, est.matrix) < 1e-6


def _check_pure_imposition() -> None:
    psi = states.random_state_vector(2, seed=21)
    obs = observables.random_observable_set(2, 1, seed=22)[0]
    p = np.array([0.7, 0.3])
    out_vec = imposition.impose_pure(obs, p, psi)
    amps = obs.basis.conj().T @ out_vec
    assert np.max(np.abs(np.abs(amps) ** 2 - p)) < 1e-12
    rho_pure = np.outer(out_vec, out_vec.conj())
    rho_full = imposition.impose(obs, p, np.outer(psi, psi.conj()))
    delta = obs.basis.conj().T @ (rho_pure - rho_full) @ obs.basis
    assert np.max(np.abs(delta - np.diag(np.diagonal(delta)))) > 1e-6


SELFTEST_CHECKS = (
    ("exact-imposition", _check_exact_imposition),
    ("contraction-properties", _check_contraction_properties),
    ("dual-route-agreement", _check_dual_route),
    ("mub-single-sweep", _check_mub_single_sweep),
    ("metric-values", _check_metric_values),
    ("baseline-agreement", _check_baseline_agreement),
    ("pure-state-imposition", _check_pure_imposition),
)


def cmd_selftest(args, parser) -> int:
    failures = 0
    for name, check in SELFTEST_CHECKS:
        try:
            check()
        except AssertionError as exc:
            failures += 1
            detail = f": {exc}" if str(exc) else ""
            print(f"FAIL {name}{detail}")
        else:
            print(f"ok   {name}")
    if failures:
        print(f"selftest: {failures} of {len(SELFTEST_CHECKS)} checks failed")
        return EXIT_SELFTEST_FAIL
    print(f"selftest: all {len(SELFTEST_CHECKS)} checks passed")
    return EXIT_OK


# ---------------------------------------------------------------- report


def cmd_report(args, parser) -> int:
    if args.trace is None and args.bench is None:
        parser.error("report: pass --trace and/or --bench")
    if args.trace is not None and args.bench is not None and args.out:
        parser.error("report: --out is ambiguous with both --trace and --bench")
    from . import report

    try:
        if args.trace is not None:
            dest = args.out or Path(args.trace).with_suffix(".png")
            print(f"report: wrote {report.plot_trace(args.trace, dest)}")
        if args.bench is not None:
            dest = args.out or Path(args.bench).with_suffix(".png")
            print(f"report: wrote {report.plot_bench(args.bench, dest)}")
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qstomo",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with defaults for any flag")
        p.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or .)")
        p.add_argument("--seed", type=int, help="master seed (default 0)")

    p = sub.add_parser("gen", help="simulate an experiment and write record files")
    add_common(p)
    p.add_argument("--dim", type=int, help="Hilbert space dimension")
    p.add_argument("--family", help="mub | random | pauli | observable-set JSON file")
    p.add_argument("--m", type=int, help="number of observables (default d+1)")
    p.add_argument("--true", dest="true", help="pure | mixed | state JSON file")
    p.add_argument("--true-rank", dest="true_rank", type=int,
                   help="rank of the mixed true state (default full)")
    p.add_argument("--shots", type=int, help="finite sample size (default exact)")
    p.add_argument("--epsilon", type=float, help="depolarizing prep error in [0,1]")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("reconstruct", help="run the iterative reconstruction")
    add_common(p)
    p.add_argument("--records", help="records JSON file (from gen)")
    p.add_argument("--true", dest="true",
                   help="optional true-state JSON for the fidelity column")
    p.add_argument("--max-sweeps", dest="max_sweeps", type=int)
    p.add_argument("--tol-distributional", dest="tol_distributional", type=float)
    p.add_argument("--tol-step", dest="tol_step", type=float)
    p.add_argument("--rank", type=int, help="rank constraint on the iterate")
    p.add_argument("--psd-projection", dest="psd_projection",
                   action=argparse.BooleanOptionalAction,
                   help="project the final estimate to the PSD cone "
                        "(default: on for sampled records, off for exact)")
    p.add_argument("--plot", action="store_true", help="render trace.png as well")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("bench", help="timing and convergence campaign")
    add_common(p)
    p.add_argument("--dims", help="comma list of dimensions, e.g. 2,3,5")
    p.add_argument("--family", help="comma list from: mub random pauli")
    p.add_argument("--m", type=int, help="observables per set (default d+1)")
    p.add_argument("--trials", type=int, help="trials per cell (default 20)")
    p.add_argument("--shots", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--rank", type=int)
    p.add_argument("--max-sweeps", dest="max_sweeps", type=int)
    p.add_argument("--tol-distributional", dest="tol_distributional", type=float)
    p.add_argument("--tol-step", dest="tol_step", type=float)
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--plot", action="store_true", help="render bench.png as well")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("selftest", help="run the fast invariant battery")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("report", help="render CSV artifacts to figures")
    p.add_argument("--trace", help="trace CSV to plot")
    p.add_argument("--bench", help="bench CSV to plot")
    p.add_argument("--out", help="figure path (default: alongside the CSV)")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
