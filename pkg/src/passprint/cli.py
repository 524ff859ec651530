"""
Command-line front end: dataset generation, training, evaluation, pass
fingerprinting of circuit pairs, pass application and oracle verification.

Exit codes: 0 success, 1 usage error, 2 I/O or schema error, 3 verification
failure.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (LABEL_NAMES, BuilderConfig, DatasetError, build_dataset, export_csv,
                      load_dataset, save_dataset)
from .features import extract_features
from .ml.metrics import EvalReport
from .ml.models import (ModelError, ModelKind, evaluate, load_model, predict, save_model,
                        split_dataset, train)
from .passes import ALL_PASSES, PassId, run_passes
from .qasm import QasmError, read_qasm_file, write_qasm_file
from .report import (AGGREGATE_HEADER, PER_LABEL_HEADER, aggregate_rows, format_table,
                     per_label_rows, reference_deltas, write_report_bundle)
from .verify import trial_circuits, verify_pass

log = logging.getLogger("passprint")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- helpers -------------------------------------------------------------

def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(path, command, config, seeds, timings, outputs, extra=None) -> Path:
    doc = {
        "command": command,
        "argv": sys.argv[1:],
        "config": config,
        "seeds": seeds,
        "version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "timings_s": {k: round(v, 3) for k, v in timings.items()},
        "outputs": {name: {"path": str(p), "sha256": sha256_of(p)} for name, p in outputs.items()},
    }
    if extra:
        doc.update(extra)
    path = Path(path)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def manifest_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.name + ".manifest.json")


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(text)


def _report_text(rep: EvalReport) -> str:
    table = format_table(PER_LABEL_HEADER[:5], per_label_rows(rep, with_reference=False))
    return (f"{table}\n\nhamming {rep.hamming:.4f}  avg_f1 {rep.avg_f1:.4f}  "
            f"micro_f1 {rep.micro_f1:.4f}")


def _qubit_range(text: str) -> tuple[int, int]:
    try:
        if "-" in text:
            lo, hi = (int(v) for v in text.split("-", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or LO-HI, got {text!r}") from None
    if not 2 <= lo <= hi:
        raise argparse.ArgumentTypeError("qubit range needs 2 <= LO <= HI")
    return lo, hi


def _parse_passes(text: str) -> list[PassId]:
    names = [t.strip() for t in text.split(",") if t.strip()]
    if not names:
        raise UsageError("--passes needs at least one pass name")
    try:
        return [PassId.parse(n) for n in names]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _builder_config(args) -> BuilderConfig:
    try:
        return BuilderConfig(samples=args.samples, q_min=args.qmin, q_max=args.qmax,
                             depth=args.depth, misc_prob=args.misc_prob, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _progress(done, total):
    log.info("generated %d/%d samples", done, total)


# --- commands ------------------------------------------------------------

def cmd_gen(args) -> int:
    cfg = _builder_config(args)
    t0 = time.perf_counter()
    ds = build_dataset(cfg, jobs=args.jobs, progress=_progress)
    t_build = time.perf_counter() - t0
    save_dataset(ds, args.out)
    outputs = {"dataset": Path(args.out)}
    if args.csv:
        export_csv(ds, args.csv)
        outputs["csv"] = Path(args.csv)
    write_manifest(manifest_path(args.out), "gen", vars(cfg), {"dataset": cfg.seed},
                   {"build": t_build}, outputs)
    prevalence = dict(zip(LABEL_NAMES, ds.Y.mean(axis=0).round(4).tolist()))
    _emit(args, {"samples": len(ds), "out": str(args.out), "label_prevalence": prevalence},
          f"wrote {len(ds)} samples to {args.out}")
    return EXIT_OK


def _split(args):
    ds = load_dataset(args.data)
    try:
        return split_dataset(ds, args.split, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _hyper(args):
    if not args.hyper:
        return None
    try:
        hyper = json.loads(args.hyper)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--hyper is not valid JSON: {exc}") from None
    if not isinstance(hyper, dict):
        raise UsageError("--hyper must be a JSON object")
    return hyper


def cmd_train(args) -> int:
    tr, te = _split(args)
    t0 = time.perf_counter()
    model = train(args.model, tr, _hyper(args), args.seed)
    t_train = time.perf_counter() - t0
    save_model(model, args.out)
    rep = evaluate(model, te)
    config = {"data": str(args.data), "model": args.model, "split": args.split,
              "hyper": model.hyper}
    write_manifest(manifest_path(args.out), "train", config, {"split": args.seed, "model": args.seed},
                   {"train": t_train}, {"model": Path(args.out), "data": Path(args.data)},
                   {"test_report": rep.to_dict(), "training_log": model.training_log})
    _emit(args, rep.to_dict(), f"model saved to {args.out} ({len(tr)} train / {len(te)} test)\n\n"
          + _report_text(rep))
    return EXIT_OK


def cmd_eval(args) -> int:
    model = load_model(args.model)
    _, te = _split(args)
    rep = evaluate(model, te)
    if args.out:
        Path(args.out).write_text(json.dumps(rep.to_dict(), indent=2) + "\n", encoding="utf-8")
        write_manifest(manifest_path(args.out), "eval",
                       {"data": str(args.data), "model": str(args.model), "split": args.split},
                       {"split": args.seed}, {}, {"report": Path(args.out)})
    _emit(args, rep.to_dict(), _report_text(rep))
    return EXIT_OK


def cmd_predict(args) -> int:
    model = load_model(args.model)
    original = read_qasm_file(args.original)
    optimized = read_qasm_file(args.optimized)
    if original.num_qubits != optimized.num_qubits:
        raise InputError(f"qubit count mismatch: original has {original.num_qubits}, "
                         f"optimized has {optimized.num_qubits}")
    proba, decision = predict(model, extract_features(original, optimized))
    rows = [{"pass": name, "probability": float(p), "detected": bool(d)}
            for name, p, d in zip(LABEL_NAMES, proba, decision)]
    payload = {"model": model.kind.value, "baseline": rows[:-1], "miscellaneous": rows[-1]}
    lines = [f"{r['pass']:<26} {r['probability']:.3f}  {'yes' if r['detected'] else 'no'}"
             for r in rows[:-1]]
    m = rows[-1]
    lines += ["", f"{'Miscellaneous (other)':<26} {m['probability']:.3f}  "
              f"{'yes' if m['detected'] else 'no'}"]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_optimize(args) -> int:
    passes = _parse_passes(args.passes)
    circuit = read_qasm_file(args.inp)
    out = run_passes(circuit, passes)
    write_qasm_file(out, args.out)
    applied = [p.cli_name for p in ALL_PASSES if p in passes]
    _emit(args, {"passes": applied, "gates_before": len(circuit), "gates_after": len(out)},
          f"applied {', '.join(applied)}: {len(circuit)} -> {len(out)} gates, wrote {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.pass_name == "all":
        passes = list(ALL_PASSES)
    else:
        passes = _parse_passes(args.pass_name)
    q_min, q_max = args.qubits
    circuits = list(trial_circuits(args.trials, q_min, q_max, args.depth, args.seed))
    results = [verify_pass(p, circuits=circuits) for p in passes]
    payload = {"trials": args.trials, "qubits": [q_min, q_max], "depth": args.depth,
               "seed": args.seed, "passes": [r.to_dict() for r in results],
               "ok": all(r.ok for r in results)}
    rows = [(r.pass_id.cli_name, r.trials - r.failures, r.failures, f"{r.max_deviation:.2e}",
             f"{r.tolerance:.0e}", r.fired) for r in results]
    _emit(args, payload, format_table(("pass", "ok", "failed", "max_dev", "tol", "fired"), rows))
    return EXIT_OK if payload["ok"] else EXIT_VERIFY


def run_reproduce(cfg: BuilderConfig, out_dir, split=0.8, split_seed=0, model_seed=0,
                  kinds=tuple(ModelKind), jobs=1, save_models=False, hyper=None) -> dict:
    """Generate, split, train every model kind and write tables, figures and a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings = {}
    t0 = time.perf_counter()
    ds = build_dataset(cfg, jobs=jobs, progress=_progress)
    timings["build"] = time.perf_counter() - t0
    data_path = out / "dataset.jsonl"
    save_dataset(ds, data_path)
    tr, te = split_dataset(ds, split, split_seed)
    reports, models, outputs, logs = {}, {}, {"dataset": data_path}, {}
    for kind in kinds:
        kind = ModelKind(kind)
        t0 = time.perf_counter()
        model = train(kind, tr, (hyper or {}).get(kind.value), model_seed)
        timings[f"train_{kind.value}"] = time.perf_counter() - t0
        reports[kind] = evaluate(model, te)
        models[kind] = model
        logs[kind.value] = model.training_log
        log.info("%s: hamming %.4f", kind.value, reports[kind].hamming)
        if save_models:
            p = out / f"model_{kind.value}.json.gz"
            save_model(model, p)
            outputs[f"model_{kind.value}"] = p
    outputs.update(write_report_bundle(out, reports, ds.Y))
    p = out / "reports.json"
    p.write_text(json.dumps({k.value: r.to_dict() for k, r in reports.items()}, indent=2) + "\n",
                 encoding="utf-8")
    outputs["reports"] = p
    deltas = reference_deltas(reports)
    manifest = write_manifest(
        out / "manifest.json", "reproduce",
        {"builder": vars(cfg), "split": split, "models": [ModelKind(k).value for k in kinds]},
        {"dataset": cfg.seed, "split": split_seed, "model": model_seed},
        timings, outputs,
        {"reference_comparison": deltas, "training_logs": logs,
         "label_prevalence": dict(zip(LABEL_NAMES, ds.Y.mean(axis=0).tolist()))})
    return {"reports": reports, "models": models, "outputs": outputs, "manifest": manifest,
            "timings": timings, "dataset": ds}


def cmd_reproduce(args) -> int:
    cfg = _builder_config(args)
    kinds = [ModelKind(k) for k in args.models.split(",")] if args.models else list(ModelKind)
    res = run_reproduce(cfg, args.out_dir, args.split, args.split_seed, args.seed, kinds,
                        args.jobs, args.save_models)
    reports = res["reports"]
    payload = {"out_dir": str(args.out_dir), "manifest": str(res["manifest"]),
               "aggregate": {k.value: {"hamming": r.hamming, "avg_f1": r.avg_f1,
                                       "micro_f1": r.micro_f1} for k, r in reports.items()}}
    parts = []
    if ModelKind.RANDOM_FOREST in reports:
        parts.append(format_table(PER_LABEL_HEADER, per_label_rows(reports[ModelKind.RANDOM_FOREST])))
    parts.append(format_table(AGGREGATE_HEADER, aggregate_rows(reports)))
    parts.append(f"artifacts in {args.out_dir}")
    _emit(args, payload, "\n\n".join(parts))
    return EXIT_OK


# --- argument parsing ----------------------------------------------------

def _add_gen_flags(p):
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--qmin", type=int, default=4)
    p.add_argument("--qmax", type=int, default=12)
    p.add_argument("--depth", type=int, default=50)
    p.add_argument("--misc-prob", type=float, default=0.25)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output is unchanged)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="passprint", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"passprint {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(fn=fn)
        return p

    p = command("gen", cmd_gen, "generate a labelled dataset")
    _add_gen_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also export a CSV copy")

    kinds = [k.value for k in ModelKind]
    p = command("train", cmd_train, "train a model on the training split")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, choices=kinds)
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hyper", help="JSON object overriding default hyperparameters")
    p.add_argument("--out", required=True)

    p = command("eval", cmd_eval, "evaluate a saved model on the test split")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, help="model file")
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here")

    p = command("predict", cmd_predict, "fingerprint the passes behind a circuit pair")
    p.add_argument("--original", required=True)
    p.add_argument("--optimized", required=True)
    p.add_argument("--model", required=True, help="model file")

    p = command("optimize", cmd_optimize, "apply passes to a QASM file")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--passes", required=True,
                   help="comma list of: " + ", ".join(x.cli_name for x in ALL_PASSES))
    p.add_argument("--out", required=True)

    p = command("verify", cmd_verify, "check pass soundness against the simulator")
    p.add_argument("--pass", dest="pass_name", default="all")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--qubits", type=_qubit_range, default=(4, 6), help="N or LO-HI")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)

    p = command("reproduce", cmd_reproduce, "full pipeline: generate, train all models, report")
    _add_gen_flags(p)
    p.add_argument("--split", type=float, default=0.8)
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--models", help="comma list of model kinds (default: all)")
    p.add_argument("--save-models", action="store_true")
    p.add_argument("--out-dir", required=True)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, DatasetError, ModelError, QasmError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
