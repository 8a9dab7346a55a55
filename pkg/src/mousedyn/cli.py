"""Command-line surface: ingest, train, evaluate, stream, report.

Each stage reads and writes plain files so intermediate results stay
inspectable. Exit codes: 0 success, 2 configuration error, 3 data error,
4 model error.
"""

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import artifacts, pipeline, reporting
from .actions import DEFAULT_BLOCK_LEN, MouseAction
from .datasets import SplitSpec, build_binary_dataset, train_test_split
from .errors import ConfigError, DataError, ModelError
from .events import Session, iter_events, parse_events, serialize_sessions
from .features import feature_file_lines
from .metrics import EvalReport, aggregate_top10
from .streaming import STATUS_ALARM, BlockBuffer, StreamSummary, TrustMonitor, TrustPolicy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_MODEL = 4


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{path}: no such file")
    return p.read_text()


def _load_sessions(path: str) -> list[Session]:
    sessions = parse_events(_read_text(path))
    if not sessions:
        raise DataError(f"{path}: no events found")
    return sessions


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args: argparse.Namespace) -> int:
    sessions = _load_sessions(args.events)
    by_user = pipeline.actions_from_sessions(sessions, args.block_len)
    manifest = {
        "block_len": args.block_len,
        "n_sessions": len(sessions),
        "users": [s.subject for s in sessions],
        "events_per_user": {str(s.subject): len(s) for s in sessions},
        "actions_per_user": {str(u): len(a) for u, a in sorted(by_user.items())},
    }
    out = _out_dir(args.out)
    (out / "sessions.csv").write_text("\n".join(serialize_sessions(sessions)) + "\n")
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    mats = pipeline.user_matrices(by_user, "features")
    if mats:
        rows = [(u, i, mats[u][i]) for u in sorted(mats) for i in range(len(mats[u]))]
        lines = feature_file_lines(
            [r[2] for r in rows],
            [r[0] for r in rows],                 # multiclass view: label = subject
            [(r[0], r[1]) for r in rows],
        )
        (out / "features.csv").write_text("\n".join(lines) + "\n")
    n_events = sum(len(s) for s in sessions)
    n_actions = sum(len(a) for a in by_user.values())
    print(f"ingested {len(sessions)} subjects, {n_events} events, "
          f"{n_actions} actions (block_len {args.block_len}) -> {out}")
    return EXIT_OK


_OVERRIDE_FLAGS = (
    # (args attribute, hyperparameter key, applicable kinds)
    ("k", "k", ("knn",)),
    ("trees", "n_trees", ("rf",)),
    ("max_depth", "max_depth", ("rf",)),
    ("c", "C", ("svm",)),
    ("gamma", "gamma", ("svm",)),
    ("max_passes", "max_passes", ("svm",)),
    ("epochs", "epochs", ("cnn", "ann")),
    ("batch_size", "batch_size", ("cnn", "ann")),
    ("learning_rate", "learning_rate", ("cnn", "ann")),
)


def _hyperparams(args: argparse.Namespace) -> dict:
    hp = pipeline.default_hyperparams(args.model, args.preset)
    for attr, key, kinds in _OVERRIDE_FLAGS:
        value = getattr(args, attr, None)
        if value is None:
            continue
        if args.model not in kinds:
            raise ConfigError(f"--{attr.replace('_', '-')} does not apply to model {args.model!r}")
        hp[key] = value
    return hp


def _artifact_name(kind: str, target: int | None) -> str:
    return "ann.json" if kind == "ann" else f"{kind}_user{target:04d}.json"


def cmd_train(args: argparse.Namespace) -> int:
    kind = args.model
    hp = _hyperparams(args)
    split = SplitSpec(train_fraction=args.split, seed=args.seed)
    sessions = _load_sessions(args.events)
    by_user = pipeline.actions_from_sessions(sessions, args.block_len)
    rep = pipeline.REPRESENTATION_FOR_KIND[kind]
    mats = pipeline.user_matrices(by_user, rep)
    if len(mats) < 2:
        raise DataError(f"need at least 2 users with actions, got {len(mats)}")
    out = _out_dir(args.out)

    if kind == "ann":
        fitted, manifest, _, _ = pipeline.multiclass_run(
            mats, args.seed, split, hp, args.block_len)
        doc = artifacts.build_artifact(
            kind,
            params=artifacts.network_params(fitted.model, fitted.arch),
            hyperparams=hp, seed=args.seed, block_len=args.block_len,
            manifest=manifest, representation=rep,
            history=pipeline.history_dict(fitted.history),
        )
        artifacts.write_artifact(out / _artifact_name(kind, None), doc)
        print(f"wrote 1 ann artifact to {out}")
        return EXIT_OK

    for target in sorted(mats):
        try:
            fitted, manifest, _, _ = pipeline.binary_user_run(
                kind, target, mats, args.seed, split, hp, args.block_len,
                n_jobs=args.jobs)
        except ModelError as exc:
            raise ModelError(f"user {target}: {exc}")
        if kind == "cnn":
            params = artifacts.network_params(fitted.model, fitted.arch)
        else:
            params = artifacts.model_params(kind, fitted.model)
        doc = artifacts.build_artifact(
            kind, params=params, hyperparams=hp, seed=args.seed,
            block_len=args.block_len, manifest=manifest, representation=rep,
            scaler=fitted.scaler, target_user=target,
            history=pipeline.history_dict(fitted.history),
        )
        artifacts.write_artifact(out / _artifact_name(kind, target), doc)
    print(f"wrote {len(mats)} {kind} artifacts to {out}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    kind = args.model
    models_dir = Path(args.models)
    if kind == "ann":
        paths = sorted(models_dir.glob("ann.json"))
    else:
        paths = sorted(models_dir.glob(f"{kind}_user*.json"))
    if not paths:
        raise DataError(f"no {kind} artifacts in {models_dir}")
    docs = [artifacts.read_artifact(p) for p in paths]
    for doc, path in zip(docs, paths):
        if doc["kind"] != kind:
            raise ModelError(f"{path}: artifact kind {doc['kind']!r}, expected {kind!r}")
        if doc["seed"] != args.seed:
            raise ConfigError(
                f"{path}: artifact was trained with seed {doc['seed']}, got --seed {args.seed}"
            )
    out = _out_dir(args.out)

    if kind == "ann":
        doc = docs[0]
        report_doc = reporting.ann_report_doc(doc["history"], doc["manifest"])
    else:
        block_len = docs[0]["block_len"]
        sessions = _load_sessions(args.events)
        by_user = pipeline.actions_from_sessions(sessions, block_len)
        rep = pipeline.REPRESENTATION_FOR_KIND[kind]
        mats = pipeline.user_matrices(by_user, rep)
        per_user, curves = [], {}
        for doc in docs:
            if doc["block_len"] != block_len:
                raise ModelError("artifacts disagree on block_len")
            target = doc["target_user"]
            ds = build_binary_dataset(target, mats, doc["seed"])
            _, test_ds = train_test_split(ds, pipeline.split_from_manifest(doc["manifest"]))
            model = artifacts.restore_model(doc)
            scaler = artifacts.restore_scaler(doc)
            um, curve = pipeline.evaluate_binary(kind, model, scaler, test_ds, target)
            per_user.append(um)
            curves[target] = curve
        report = EvalReport(
            model_kind=kind, partition="test",
            per_user=tuple(per_user), aggregate=aggregate_top10(per_user),
            manifest={"seed": args.seed, "block_len": block_len,
                      "n_models": len(docs), "split": docs[0]["manifest"]["split"]},
            roc_curves=curves,
        )
        report_doc = reporting.report_to_doc(report)

    reporting.write_report(out / f"eval_{kind}.json", report_doc)
    table = reporting.render_table(report_doc)
    (out / f"table_{kind}.txt").write_text(table)
    if kind != "ann":
        reporting.write_roc_csv(out / f"roc_{kind}.csv", report_doc)
    print(table, end="")
    return EXIT_OK


def cmd_stream(args: argparse.Namespace) -> int:
    doc = artifacts.read_artifact(args.artifact)
    kind = doc["kind"]
    if kind not in artifacts.BINARY_KINDS:
        raise ConfigError(f"streaming needs a binary model artifact, got kind {kind!r}")
    if args.block_len is not None and args.block_len != doc["block_len"]:
        raise ConfigError(
            f"--block-len {args.block_len} does not match artifact block_len {doc['block_len']}"
        )
    block_len = doc["block_len"]
    model = artifacts.restore_model(doc)
    scaler = artifacts.restore_scaler(doc)
    rep = pipeline.REPRESENTATION_FOR_KIND[kind]
    nominal = doc["target_user"] if doc["target_user"] is not None else 0
    policy = TrustPolicy(
        smoothing=args.smoothing,
        threshold=args.trust_threshold,
        consecutive_limit=args.consecutive,
    )
    monitor = TrustMonitor(policy)
    buffer = BlockBuffer(block_len)
    n_events = 0
    n_alarms = 0

    def relabeled(text: str):
        nonlocal n_events
        for event in iter_events(text):
            n_events += 1
            yield dataclasses.replace(event, subject=nominal)

    print("index,score,trust,status")
    for path in args.inputs:
        for block in buffer.feed(relabeled(_read_text(path))):
            try:
                action = MouseAction(subject=nominal, events=block,
                                     action_index=monitor.n_updates)
            except ValueError as exc:
                raise DataError(f"bad event block at action {monitor.n_updates}: {exc}")
            row = pipeline.action_matrix([action], rep)
            score = float(pipeline.score_rows(kind, model, scaler, row)[0])
            update = monitor.update(score)
            if update.status == STATUS_ALARM:
                n_alarms += 1
            print(f"{update.index},{update.score:.6f},{update.trust:.6f},{update.status}")

    summary = StreamSummary(
        n_events=n_events, n_actions=monitor.n_updates, n_alarms=n_alarms,
        discarded_events=buffer.pending, final_trust=monitor.trust,
        final_status=monitor.status,
    )
    print(f"# summary events={summary.n_events} actions={summary.n_actions} "
          f"alarms={summary.n_alarms} discarded={summary.discarded_events} "
          f"final_trust={summary.final_trust:.6f} status={summary.final_status}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    reports_dir = Path(args.reports)
    docs = []
    if reports_dir.is_dir():
        for path in sorted(reports_dir.glob("eval_*.json")):
            docs.append(reporting.read_report(path))
    out = _out_dir(args.out)
    table = reporting.render_comparison(docs)
    (out / "comparison.txt").write_text(table)
    print(table, end="")
    for doc in docs:
        if doc.get("roc"):
            reporting.plot_roc_overlay(doc, out / f"roc_{doc['kind']}.svg")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mousedyn",
        description="Mouse-dynamics continuous authentication pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse raw events into a session store")
    p_ingest.add_argument("--events", required=True, help="event file (timestamp,x,y,subject)")
    p_ingest.add_argument("--out", required=True, help="output directory")
    p_ingest.add_argument("--block-len", type=int, default=DEFAULT_BLOCK_LEN)
    p_ingest.set_defaults(func=cmd_ingest)

    p_train = sub.add_parser("train", help="fit models and write artifacts")
    p_train.add_argument("--events", required=True)
    p_train.add_argument("--out", required=True, help="artifact directory")
    p_train.add_argument("--seed", type=int, required=True)
    p_train.add_argument("--model", required=True, choices=artifacts.MODEL_KINDS)
    p_train.add_argument("--block-len", type=int, default=DEFAULT_BLOCK_LEN)
    p_train.add_argument("--split", type=float, default=0.8, help="train fraction")
    p_train.add_argument("--preset", choices=sorted(pipeline.PRESETS), default="release")
    p_train.add_argument("--jobs", type=int, default=1, help="forest-fitting workers")
    p_train.add_argument("--k", type=int, help="knn neighbor count")
    p_train.add_argument("--trees", type=int, help="rf tree count")
    p_train.add_argument("--max-depth", type=int, help="rf depth limit")
    p_train.add_argument("--c", type=float, help="svm penalty C")
    p_train.add_argument("--gamma", type=float, help="svm rbf width")
    p_train.add_argument("--max-passes", type=int, help="svm SMO pass limit")
    p_train.add_argument("--epochs", type=int, help="neural epochs")
    p_train.add_argument("--batch-size", type=int, help="neural batch size")
    p_train.add_argument("--learning-rate", type=float, help="adam base rate")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="score artifacts and write reports")
    p_eval.add_argument("--events", required=True)
    p_eval.add_argument("--models", required=True, help="artifact directory")
    p_eval.add_argument("--out", required=True, help="report directory")
    p_eval.add_argument("--seed", type=int, required=True)
    p_eval.add_argument("--model", required=True, choices=artifacts.MODEL_KINDS)
    p_eval.set_defaults(func=cmd_evaluate)

    p_stream = sub.add_parser("stream", help="run the trust monitor over event files")
    p_stream.add_argument("--artifact", required=True, help="binary model artifact")
    p_stream.add_argument("inputs", nargs="+", help="event files in ingest format, '-' for stdin")
    p_stream.add_argument("--block-len", type=int, default=None,
                          help="must match the artifact when given")
    p_stream.add_argument("--lambda", dest="smoothing", type=float, default=0.2,
                          help="EWMA weight on the newest score")
    p_stream.add_argument("--trust-threshold", type=float, default=0.5)
    p_stream.add_argument("--consecutive", type=int, default=3,
                          help="low updates in a row before alarm")
    p_stream.set_defaults(func=cmd_stream)

    p_report = sub.add_parser("report", help="merge evaluation reports")
    p_report.add_argument("--reports", required=True, help="directory of eval_*.json files")
    p_report.add_argument("--out", required=True, help="output directory")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
