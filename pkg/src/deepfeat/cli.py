"""Command-line interface.

Subcommands cover the full pipeline: synthetic data generation, feature
extraction, training, evaluation, multi-run ablation, and effect-size
reporting. Progress goes to stderr; machine-readable results go to files
or stdout. Exit codes: 0 success, 1 runtime failure, 2 usage/validation
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

USAGE_ERROR = 2
RUNTIME_ERROR = 1


class UsageError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _load_vocab():
    from .llm import BpeVocab

    here = os.path.dirname(os.path.abspath(__file__))
    for base in (os.path.join(here, "..", ".."), os.getcwd()):
        vocab = os.path.join(base, "fixtures", "gpt2", "vocab.json")
        merges = os.path.join(base, "fixtures", "gpt2", "merges.txt")
        if os.path.isfile(vocab) and os.path.isfile(merges):
            return BpeVocab.load(vocab, merges)
    env = os.environ.get("DEEPFEAT_VOCAB_DIR")
    if env:
        return BpeVocab.load(os.path.join(env, "vocab.json"), os.path.join(env, "merges.txt"))
    raise UsageError("cannot locate vocab.json/merges.txt; set DEEPFEAT_VOCAB_DIR")


def _resolve_weights(args):
    from .llm import Gpt2Weights, synthetic_gpt2_weights

    path = getattr(args, "weights", None)
    if path:
        if not os.path.isfile(path):
            raise UsageError(f"weights file not found: {path}")
        return Gpt2Weights.from_tsar(path)
    _log(f"no --weights given; using synthetic transformer weights (seed {args.weights_seed})")
    return synthetic_gpt2_weights(args.weights_seed)


def cmd_synth(args) -> int:
    from . import data

    spec = None
    if args.spec:
        try:
            spec = json.load(open(args.spec, encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read spec: {e}") from e
    try:
        ds = data.synth_generate(spec, seed=args.seed)
    except data.DatasetError as e:
        raise UsageError(f"bad spec: {e}") from e
    data.save_dataset(ds, args.out)
    _log(f"wrote {len(ds)} samples to {args.out}")
    print(json.dumps(data.describe(ds)))
    return 0


def cmd_extract(args) -> int:
    from . import data, rocket
    from .llm import SerializationConfig, llm_features_matrix
    from .model import build_model
    from .nn.tensor import Tensor

    ds = data.load_dataset(args.dataset)
    series = [s.values for s, _ in ds.samples]
    if args.branch == "rf":
        bank = rocket.generate_bank(args.seed)
        matrix = rocket.extract_matrix(series, bank)
    elif args.branch == "pf":
        if not args.weights and not args.allow_synthetic_weights:
            raise UsageError("--branch pf requires --weights (or --allow-synthetic-weights)")
        weights = _resolve_weights(args)
        vocab = _load_vocab()
        cfg = SerializationConfig(fractional_digits=args.digits, separator=args.separator)
        done = [0]

        def progress(done_n, total):
            if done_n - done[0] >= 25 or done_n == total:
                done[0] = done_n
                _log(f"forward passes: {done_n}/{total}")

        matrix = llm_features_matrix(series, cfg, vocab, weights, progress=progress)
    elif args.branch in ("global", "local"):
        model = build_model("full", max(2, len(ds.classes)), args.seed)
        x = ds.values_matrix().astype(np.float32)[:, :, None]
        from . import branches as br

        rows = []
        for start in range(0, x.shape[0], 64):
            chunk = Tensor(x[start : start + 64])
            if args.branch == "global":
                rows.append(br.global_branch(chunk, model.global_params).data)
            else:
                rows.append(br.local_branch(chunk, model.local_params).data)
        matrix = np.concatenate(rows, axis=0)
    else:
        raise UsageError(f"unknown branch {args.branch!r}")
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"f{i}" for i in range(matrix.shape[1])) + "\n")
        for row in matrix:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    _log(f"wrote {matrix.shape[0]}x{matrix.shape[1]} feature matrix to {args.out}")
    return 0


def _config_from_args(args):
    from .train import TrainConfig

    base: dict = {}
    if getattr(args, "config", None):
        try:
            base = json.load(open(args.config, encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config: {e}") from e
    overrides = {
        "epochs": args.epochs,
        "seed": args.seed,
        "ablation_mode": getattr(args, "mode", None),
        "selection_policy": getattr(args, "selection", None),
        "batch_size": getattr(args, "batch_size", None),
        "lr0": getattr(args, "lr0", None),
        "focal_gamma": getattr(args, "gamma", None),
        "focal_alpha": getattr(args, "alpha", None),
        "gpt2_weights_path": getattr(args, "weights", None),
        "gpt2_weights_seed": getattr(args, "weights_seed", None),
    }
    for key, value in overrides.items():
        if value is not None:
            base[key] = value
    base["dataset_dir"] = args.dataset
    try:
        return TrainConfig(**base)
    except (TypeError, ValueError) as e:
        raise UsageError(f"bad configuration: {e}") from e


def cmd_train(args) -> int:
    from . import data
    from .train import save_checkpoint, train, write_history_csv

    config = _config_from_args(args)
    ds = data.load_dataset(args.dataset)
    vocab = _load_vocab() if "l" in _mode_branches(config.ablation_mode) else None
    result = train(config, ds, vocab=vocab, log="[train]")
    os.makedirs(args.out, exist_ok=True)
    prefix = os.path.join(args.out, "checkpoint")
    save_checkpoint(result, prefix)
    write_history_csv(os.path.join(args.out, "history.csv"), result.history)
    summary = {
        "mode": config.ablation_mode,
        "selected_epoch": result.selected_epoch,
        "test_accuracy": result.test_report.accuracy,
        "test_macro_f1": result.test_report.macro_f1,
        "runtime_seconds": result.runtime_seconds,
        "checkpoint": prefix,
    }
    print(json.dumps(summary))
    return 0


def _mode_branches(mode: str):
    from .model import MODE_BRANCHES

    return MODE_BRANCHES[mode]


def cmd_eval(args) -> int:
    from . import data
    from .train import TrainConfig, evaluate, load_checkpoint, prepare_features, stratified_split

    ds = data.load_dataset(args.dataset)
    model, sidecar = load_checkpoint(args.checkpoint)
    cfg_dict = dict(sidecar["config"])
    cfg_dict["dataset_dir"] = args.dataset
    config = TrainConfig(**cfg_dict)
    if sidecar["classes"] != ds.classes:
        raise UsageError("checkpoint classes do not match the dataset")
    vocab = _load_vocab() if "l" in _mode_branches(config.ablation_mode) else None
    bundle = prepare_features(ds, config, vocab=vocab, log="[eval]")
    labels = ds.label_indices()
    train_idx, test_idx = stratified_split(ds)
    split = {"train": train_idx, "test": test_idx, "all": np.arange(len(ds))}[args.split]
    report = evaluate(model, bundle, split, labels, ds.classes)
    print(json.dumps(report.to_dict()))
    return 0


def cmd_ablate(args) -> int:
    from . import data
    from .ablation import ablation_run, write_cohens_d_csv, write_runs_csv, write_summary_csv

    config = _config_from_args(args)
    ds = data.load_dataset(args.dataset)
    modes = tuple(args.modes.split(","))
    needs_vocab = any("l" in _mode_branches(m) for m in modes)
    vocab = _load_vocab() if needs_vocab else None
    if args.jobs > 1:
        results = _ablate_parallel(config, args, modes)
    else:
        results = ablation_run(config, ds, modes=modes, n_runs=args.runs, vocab=vocab, log="[ablate]")
    os.makedirs(args.out, exist_ok=True)
    write_runs_csv(os.path.join(args.out, "runs.csv"), results)
    write_summary_csv(os.path.join(args.out, "summary.csv"), results)
    write_cohens_d_csv(os.path.join(args.out, "cohens_d.csv"), results)
    for mode, series in results.items():
        s = series.summary()
        _log(f"{s['label']}: acc {s['acc_mean']:.4f}+/-{s['acc_std']:.4f} f1 {s['f1_mean']:.4f}+/-{s['f1_std']:.4f}")
    print(json.dumps({m: results[m].summary() for m in results}))
    return 0


def _ablate_worker(payload):
    """Runs in a worker process; returns (mode, run, seed, acc, f1)."""
    from dataclasses import replace

    from . import data
    from .train import TrainConfig, train

    cfg_dict, dataset_dir, mode, run, seed = payload
    config = replace(TrainConfig(**cfg_dict), ablation_mode=mode, seed=seed)
    ds = data.load_dataset(dataset_dir)
    vocab = _load_vocab() if "l" in _mode_branches(mode) else None
    result = train(config, ds, vocab=vocab)
    return mode, run, seed, result.test_report.accuracy, result.test_report.macro_f1


def _ablate_parallel(config, args, modes):
    import multiprocessing
    from concurrent.futures import ProcessPoolExecutor
    from dataclasses import asdict

    from .ablation import RunSeries

    jobs = []
    for mode in modes:
        for run in range(args.runs):
            jobs.append((asdict(config), args.dataset, mode, run, config.seed + run))
    results = {m: RunSeries(mode=m) for m in modes}
    # spawn, not fork: the parent may hold numba/OpenMP thread state that
    # is not fork-safe
    ctx = multiprocessing.get_context("spawn")
    with ProcessPoolExecutor(max_workers=args.jobs, mp_context=ctx) as pool:
        for mode, run, seed, acc, f1 in pool.map(_ablate_worker, jobs):
            results[mode].seeds.append(seed)
            results[mode].accuracy.append(acc)
            results[mode].macro_f1.append(f1)
    return results


def cmd_report(args) -> int:
    from .ablation import cohens_d_matrix, load_runs_csv, write_cohens_d_csv, write_summary_csv

    try:
        results = load_runs_csv(args.runs_csv)
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read runs csv: {e}") from e
    summaries = {m: s.summary() for m, s in results.items()}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_summary_csv(os.path.join(args.out, "summary.csv"), results)
        write_cohens_d_csv(os.path.join(args.out, "cohens_d.csv"), results)
    labels, matrix = cohens_d_matrix(results, "accuracy")
    print(json.dumps({"summary": summaries, "cohens_d_accuracy": {"labels": labels, "matrix": matrix.tolist()}}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deepfeat", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset directory")
    p.add_argument("--spec", help="JSON spec file (defaults to the built-in 4-class spec)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="write a per-sample feature matrix CSV")
    p.add_argument("--dataset", required=True)
    p.add_argument("--branch", required=True, choices=("rf", "pf", "global", "local"))
    p.add_argument("--weights", help="TSAR transformer weights (required for pf)")
    p.add_argument("--allow-synthetic-weights", action="store_true")
    p.add_argument("--weights-seed", type=int, default=2026)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--digits", type=int, default=3)
    p.add_argument("--separator", default=", ")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train one model variant")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", help="JSON config file; flags override file values")
    p.add_argument("--mode", choices=("full", "rf", "pf", "rf_pf", "dc"))
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--selection", choices=("val_best", "test_best", "last"))
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr0", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--weights")
    p.add_argument("--weights-seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset split")
    p.add_argument("--checkpoint", required=True, help="path prefix (without .tsar/.json)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", choices=("train", "test", "all"), default="test")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="multi-run ablation across variants")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--modes", default="rf,pf,rf_pf,dc,full")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--selection", choices=("val_best", "test_best", "last"))
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr0", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--weights")
    p.add_argument("--weights-seed", type=int)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="summarize run records: mean/std + Cohen's d matrix")
    p.add_argument("--runs-csv", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    from . import data
    from .nn.optim import DivergenceError

    try:
        return args.func(args)
    except UsageError as e:
        _log(f"error: {e}")
        return USAGE_ERROR
    except data.DatasetError as e:
        _log(f"dataset error ({e.code}): {e}")
        return USAGE_ERROR
    except ValueError as e:
        _log(f"validation error: {e}")
        return USAGE_ERROR
    except DivergenceError as e:
        _log(f"training diverged: {e}")
        return RUNTIME_ERROR
    except OSError as e:
        _log(f"io error: {e}")
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
