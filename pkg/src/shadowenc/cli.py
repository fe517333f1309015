"""Command-line front end: encode / classify-iris / classify-fraud /
bench-shadow / verify.

Every run writes a ``manifest.json`` (argument echo, seed, versions) next to
its outputs so a run can be reproduced byte-for-byte in single-worker mode.
Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import random_init
from .chc import (
    NORM_MODES,
    classify_exact,
    classify_trained,
    build_psi_init,
    kernel_sum_reference,
    layout_for,
)
from .datasets import (
    DataError,
    default_data_dir,
    load_creditcard,
    load_iris,
)
from .shadows import sample_fidelity_estimate
from .statevector import fidelity_exact, from_coeffs, random_state
from .training import TrainingConfig, scaled_schedule, train


class NumericError(Exception):
    """Internal consistency violated (norms, identities, NaNs)."""


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="shadowenc",
        description="Variational complex-amplitude encoding and compact "
        "Hadamard classification",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, data_help):
        sp.add_argument("--data", type=Path, default=None, help=data_help)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--out-dir", type=Path, default=Path("runs"))

    enc = sub.add_parser("encode", help="train the encoder on a target "
                         "coefficient CSV (columns: index, real, imag)")
    common(enc, "target coefficient CSV")
    enc.add_argument("--layers", type=int, default=12)
    enc.add_argument("--iters", type=int, default=400)
    enc.add_argument("--shots", type=int, default=1000)
    enc.add_argument("--shots-grad", type=int, default=100)
    enc.add_argument("--grad-mode", choices=("shadow", "exact"), default="shadow")

    for name, pair_default in (("classify-iris", "setosa:versicolor"),
                               ("classify-fraud", None)):
        c = sub.add_parser(name)
        common(c, "dataset CSV (iris: bundled copy by default)")
        if name == "classify-iris":
            c.add_argument("--pair", default=pair_default,
                           help="species pair, e.g. setosa:versicolor")
        c.add_argument("--mode", choices=("exact", "trained"), default="exact")
        c.add_argument("--layers", type=int, default=12)
        c.add_argument("--iters", type=int, default=400)
        c.add_argument("--shots", type=int, default=1000)
        c.add_argument("--shots-grad", type=int, default=100)
        c.add_argument("--grad-mode", choices=("shadow", "exact"), default="shadow")
        c.add_argument("--phi", default="auto",
                       help="'auto' (atan of class ratio) or radians")
        c.add_argument("--norm", choices=NORM_MODES, default="per-vector")

    b = sub.add_parser("bench-shadow", help="estimator bias/variance vs "
                       "snapshot count against the exact oracle")
    common(b, "unused")
    b.add_argument("--qubits", type=int, default=5)
    b.add_argument("--batches", type=int, default=50)
    b.add_argument("--shots-list", default="10,100,1000")

    v = sub.add_parser("verify", help="run the invariant suites")
    common(v, "unused")
    return p


def write_manifest(out_dir: Path, args: argparse.Namespace, extra=None):
    out_dir.mkdir(parents=True, exist_ok=True)
    import numba
    import scipy

    payload = {
        "command": args.command,
        "config": {
            k: (str(v) if isinstance(v, Path) else v)
            for k, v in vars(args).items()
            if k != "command"
        },
        "seed": getattr(args, "seed", None),
        "versions": {
            "shadowenc": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
            "numba": numba.__version__,
            "scipy": scipy.__version__,
        },
    }
    if extra:
        payload.update(extra)
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)


def _parse_phi(raw) -> float | None:
    if raw == "auto":
        return None
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"--phi must be 'auto' or a number, got {raw!r}") from exc


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# encode
# ---------------------------------------------------------------------------


def read_target_csv(path: Path) -> np.ndarray:
    if path is None:
        raise ConfigError("encode requires --data (target coefficient CSV)")
    if not path.exists():
        raise DataError(f"target file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        need = {"index", "real", "imag"}
        if not need.issubset(set(reader.fieldnames or ())):
            raise DataError(f"{path} must have columns index, real, imag")
        rows = [(int(r["index"]), float(r["real"]), float(r["imag"])) for r in reader]
    dim = max(i for i, _, _ in rows) + 1
    n = int(np.ceil(np.log2(max(dim, 2))))
    coeffs = np.zeros(1 << n, dtype=np.complex128)
    for i, re, im in rows:
        coeffs[i] = re + 1j * im
    nrm = np.linalg.norm(coeffs)
    if nrm == 0:
        raise DataError("target coefficients are all zero")
    if abs(nrm - 1.0) > 1e-6:
        raise DataError(f"target coefficients must be unit norm (got {nrm:.6g})")
    return coeffs


def run_encode(args) -> int:
    coeffs = read_target_csv(args.data)
    n = int(np.log2(len(coeffs)))
    rng = np.random.default_rng(args.seed)
    spec, init = random_init(n, args.layers, rng)
    schedule = scaled_schedule(args.iters)
    cfg = TrainingConfig(
        iterations=args.iters, n_shot=args.shots, n_shot_grad=args.shots_grad,
        lr_schedule=schedule, mode=args.grad_mode, seed=args.seed,
    )
    params, trace = train(spec, init, coeffs, cfg, rng)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.json").write_text(trace.to_json(), encoding="utf-8")
    from .ansatz import build_state

    model = build_state(spec, params)
    with open(out / "amplitudes.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "model_real", "model_imag", "target_real", "target_imag"])
        for k in range(len(coeffs)):
            w.writerow([k, _fmt(model.amps[k].real), _fmt(model.amps[k].imag),
                        _fmt(coeffs[k].real), _fmt(coeffs[k].imag)])
    final_f = trace.records[-1].exact_fidelity
    write_manifest(out, args, {"final_exact_fidelity": final_f})
    print(f"encode: {len(trace.records)} iterations, final exact fidelity "
          f"{final_f:.6f}; outputs in {out}")
    if not np.isfinite(final_f):
        raise NumericError("training produced a non-finite fidelity")
    return 0


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


def _train_and_classify(job_args):
    """Module-level worker so classification can fan out across processes."""
    (n_qubits, layers, seed_key, target, cfg_kwargs, layout_args) = job_args
    from .chc import ClassifierLayout

    rng = np.random.default_rng(list(seed_key))
    spec, init = random_init(n_qubits, layers, rng)
    cfg = TrainingConfig(**cfg_kwargs)
    params, trace = train(spec, init, target, cfg, rng)
    layout = ClassifierLayout(*layout_args)
    res = classify_trained(spec, params, layout)
    return res.sigma_z, res.label, trace.records[-1].exact_fidelity


def run_classify(args, dataset_kind: str) -> int:
    phi = _parse_phi(getattr(args, "phi", "auto"))
    if dataset_kind == "iris":
        pair = tuple(args.pair.split(":"))
        if len(pair) != 2:
            raise ConfigError(f"--pair must be 'a:b', got {args.pair!r}")
        data_path = args.data
        if data_path is None and default_data_dir() is not None:
            candidate = default_data_dir() / "iris.csv"
            data_path = candidate if candidate.exists() else None
        train_set, tests = load_iris(data_path, species_pair=pair)
        table_name = f"iris_{pair[0]}_{pair[1]}"
    else:
        data_path = args.data
        if data_path is None and default_data_dir() is not None:
            candidate = default_data_dir() / "creditcard.csv"
            data_path = candidate if candidate.exists() else None
        if data_path is None:
            raise DataError(
                "classify-fraud needs --data pointing at the transaction CSV "
                f"(or place creditcard.csv under ${'SHADOWENC_DATA'})"
            )
        train_set, tests = load_creditcard(data_path)
        table_name = "fraud"

    layout = layout_for(train_set, phi=phi)
    rows = []
    fidelities = []
    if args.mode == "exact":
        for tc in tests:
            psi = build_psi_init(train_set, tc.features, layout, args.norm)
            res = classify_exact(psi, layout)
            ref = kernel_sum_reference(train_set, tc.features, layout.phi, args.norm)
            if abs(res.sigma_z - ref) > 1e-12:
                raise NumericError(
                    f"quantum/classical mismatch on #{tc.record_id}: "
                    f"{res.sigma_z} vs {ref}"
                )
            rows.append((tc, res))
    else:
        jobs = []
        cfg_kwargs = dict(
            iterations=args.iters, n_shot=args.shots, n_shot_grad=args.shots_grad,
            lr_schedule=scaled_schedule(args.iters), mode=args.grad_mode,
            seed=args.seed,
        )
        for idx, tc in enumerate(tests):
            psi = build_psi_init(train_set, tc.features, layout, args.norm)
            jobs.append((layout.total_qubits, args.layers, (args.seed, idx),
                         psi.amps, cfg_kwargs,
                         (layout.n_feature_qubits, layout.n_index_qubits,
                          layout.phi)))
        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                outcomes = list(pool.map(_train_and_classify, jobs))
        else:
            outcomes = [_train_and_classify(j) for j in jobs]
        from .chc import ClassificationResult

        for tc, (sz, label, fid) in zip(tests, outcomes):
            rows.append((tc, ClassificationResult(sz, label, "trained")))
            fidelities.append(fid)

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    table_path = out / f"{table_name}_{args.mode}.csv"
    correct = 0
    with open(table_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["test_id", "class", "sigma_z", "label", "correct"])
        for tc, res in rows:
            ok = res.label == tc.true_label
            correct += ok
            w.writerow([tc.record_id, tc.class_name, _fmt(res.sigma_z),
                        "+1" if res.label > 0 else "-1", "Correct" if ok else "Incorrect"])
    extra = {"n_correct": correct, "n_tests": len(rows)}
    if fidelities:
        extra["final_fidelities"] = fidelities
    write_manifest(out, args, extra)
    print(f"{args.command}: {correct}/{len(rows)} correct ({args.mode} mode); "
          f"table at {table_path}")
    return 0


# ---------------------------------------------------------------------------
# bench-shadow
# ---------------------------------------------------------------------------


def run_bench(args) -> int:
    try:
        shots_list = [int(s) for s in args.shots_list.split(",") if s]
    except ValueError as exc:
        raise ConfigError(f"bad --shots-list {args.shots_list!r}") from exc
    if not shots_list or min(shots_list) < 1:
        raise ConfigError("--shots-list needs positive integers")
    rng = np.random.default_rng(args.seed)
    model = random_state(args.qubits, rng)
    target = random_state(args.qubits, rng)
    exact = fidelity_exact(model, target)
    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    report = out / "bench_shadow.csv"
    with open(report, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["n_shot", "batches", "mean_estimate", "std", "stderr",
                    "exact_fidelity", "bias"])
        for n_shot in shots_list:
            vals = [
                sample_fidelity_estimate(model, target.amps, n_shot, rng).value
                for _ in range(args.batches)
            ]
            mean = float(np.mean(vals))
            std = float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0
            stderr = std / np.sqrt(len(vals))
            w.writerow([n_shot, args.batches, _fmt(mean), _fmt(std),
                        _fmt(stderr), _fmt(exact), _fmt(mean - exact)])
            print(f"n_shot={n_shot:>6}: mean={mean:+.4f} exact={exact:+.4f} "
                  f"stderr={stderr:.4f}")
    write_manifest(out, args)
    print(f"bench-shadow: report at {report}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def run_verify(args) -> int:
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except Exception as exc:  # noqa: BLE001 - report every failure kind
            checks.append((name, False, str(exc)))

    rng = np.random.default_rng(args.seed)

    def norm_preservation():
        from .ansatz import build_state

        for seed in range(30):
            spec, params = random_init(int(rng.integers(1, 6)),
                                       int(rng.integers(1, 8)), rng)
            if abs(build_state(spec, params).norm() - 1.0) > 1e-9:
                raise NumericError("norm drifted")

    def tableau_roundtrip():
        from .clifford import sample_random_clifford, tableau_of_circuit

        for _ in range(20):
            n = int(rng.integers(1, 6))
            t = sample_random_clifford(n, rng)
            if not t.is_valid():
                raise NumericError("invalid sampled tableau")
            back = tableau_of_circuit(n, t.circuit())
            if not (np.array_equal(back.tx, t.tx) and np.array_equal(back.tz, t.tz)
                    and np.array_equal(back.tp, t.tp)):
                raise NumericError("synthesis does not reproduce the tableau")

    def amplitude_oracle():
        from .amplitudes import amplitude
        from .clifford import sample_random_clifford

        for _ in range(10):
            n = int(rng.integers(1, 5))
            t = sample_random_clifford(n, rng)
            u = t.to_unitary()
            for _ in range(5):
                b = int(rng.integers(1 << n))
                k = int(rng.integers(1 << n))
                if abs(amplitude(t, b, k) - u[b, k]) > 1e-9:
                    raise NumericError("amplitude mismatch vs dense")

    def channel_identity():
        from .shadows import build_channel_tables, exact_estimator_expectation

        tables = build_channel_tables(1)
        for _ in range(10):
            model = random_state(1, rng)
            target = random_state(1, rng)
            got = exact_estimator_expectation(model.amps, target.amps, tables)
            if abs(got - fidelity_exact(model, target)) > 1e-12:
                raise NumericError("estimator expectation != exact fidelity")

    def kernel_identity():
        from .chc import TrainingSet

        for _ in range(20):
            pairs = int(rng.integers(1, 5))
            feats = int(rng.integers(2, 9))
            tset = TrainingSet(rng.normal(size=(pairs, feats)),
                               rng.normal(size=(pairs, feats)))
            layout = layout_for(tset, phi=float(rng.uniform(0, np.pi / 2)))
            test = rng.normal(size=feats)
            psi = build_psi_init(tset, test, layout)
            got = classify_exact(psi, layout).sigma_z
            want = kernel_sum_reference(tset, test, layout.phi)
            if abs(got - want) > 1e-12:
                raise NumericError("kernel identity violated")

    def sampling_uniformity():
        from scipy.stats import chisquare

        from .clifford import draw_clifford_randoms, enumerate_cliffords, tableau_from_draws

        group = enumerate_cliffords(1)
        index = {t.key(): i for i, t in enumerate(group)}
        counts = np.zeros(24)
        kd, bd, sd = draw_clifford_randoms(1, rng, 20000)
        for i in range(20000):
            counts[index[tableau_from_draws(1, kd[i], bd[i], int(sd[i])).key()]] += 1
        _, p = chisquare(counts)
        if p <= 0.001:
            raise NumericError(f"uniformity chi-squared p = {p}")

    check("statevector norm preservation", norm_preservation)
    check("tableau synthesis roundtrip", tableau_roundtrip)
    check("stabilizer amplitude vs dense", amplitude_oracle)
    check("shadow channel identity (n=1)", channel_identity)
    check("quantum-classical kernel identity", kernel_identity)
    check("clifford sampling uniformity (n=1)", sampling_uniformity)

    out = args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(out, args, {"checks": [
        {"name": n, "passed": ok, "detail": d} for n, ok, d in checks
    ]})
    failed = 0
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
        failed += not ok
    if failed:
        raise NumericError(f"{failed} verification suite(s) failed")
    print("verify: all suites passed")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "encode":
            return run_encode(args)
        if args.command == "classify-iris":
            return run_classify(args, "iris")
        if args.command == "classify-fraud":
            return run_classify(args, "fraud")
        if args.command == "bench-shadow":
            return run_bench(args)
        if args.command == "verify":
            return run_verify(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(json.dumps({"error": {"category": "config", "message": str(exc)}}),
              file=sys.stderr)
        return 2
    except DataError as exc:
        print(json.dumps({"error": {"category": "data", "message": str(exc)}}),
              file=sys.stderr)
        return 3
    except NumericError as exc:
        print(json.dumps({"error": {"category": "numeric", "message": str(exc)}}),
              file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
