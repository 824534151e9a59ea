"""Command line driver: train, prune, explain, eval, inspect-clauses.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 model format error.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import logging
import sys
from pathlib import Path


from . import __version__
from .evaluation import METRICS, accuracy, annotator_maps, pairwise_table
from .explain import MODES, tams
from .machine import ModelConfig, TsetlinMachine
from .persistence import ModelFile, ModelFormatError, load_model, save_model
from .pruning import DEFAULT_SWEEP, MAX_FRACTION, prune
from .rules import describe_clauses, select_clauses
from .text import (
    DEFAULT_MAX_VOCAB,
    DatasetError,
    build_vocabulary,
    load_dataset,
    load_vocabulary,
    save_vocabulary,
    tokenize,
    vectorize_tokens,
)

log = logging.getLogger("tmprune")

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_FORMAT = 4

MODEL_NAME = "tm.model"


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclasses.dataclass
class RunConfig:
    train: str = ""
    format: str = ""
    vocab_size: int = DEFAULT_MAX_VOCAB
    clauses: int = 200
    num_states: int = 256
    T: int = 20
    s: float = 5.0
    epochs: int = 20
    seed: int = 42
    fractions: list = dataclasses.field(default_factory=lambda: list(DEFAULT_SWEEP))
    metric: str = "comprehensiveness"
    out_dir: str = "."
    deterministic: bool = True

    def validate(self) -> None:
        if self.vocab_size < 1:
            raise CLIError("vocab_size must be positive", EXIT_CONFIG)
        if self.epochs < 1:
            raise CLIError("epochs must be at least 1", EXIT_CONFIG)
        if self.metric not in METRICS + ("accuracy",):
            raise CLIError(f"unknown metric {self.metric!r}", EXIT_CONFIG)
        for f in self.fractions:
            check_fraction(f)
        try:
            self.model_config(2)
        except ValueError as err:
            raise CLIError(str(err), EXIT_CONFIG) from None

    def model_config(self, num_classes: int) -> ModelConfig:
        return ModelConfig(
            num_classes=num_classes,
            clauses_per_class=self.clauses,
            num_states=self.num_states,
            T=self.T,
            s=self.s,
            seed=self.seed,
        )


def check_fraction(value) -> float:
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise CLIError(f"invalid prune fraction {value!r}", EXIT_CONFIG) from None
    if not 0.0 <= f <= MAX_FRACTION:
        raise CLIError(f"prune fraction {f} outside [0, {MAX_FRACTION}]", EXIT_CONFIG)
    return f


def parse_fractions(text: str) -> list[float]:
    return [check_fraction(v) for v in text.replace(" ", "").split(",") if v]


def read_config_file(path) -> dict:
    """``key = value`` lines; values are parsed as JSON when possible."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise CLIError(f"config file {path} not found", EXIT_CONFIG) from None
    except configparser.Error as err:
        raise CLIError(f"bad config file {path}: {err}", EXIT_CONFIG) from None
    known = {f.name for f in dataclasses.fields(RunConfig)}
    values = {}
    for key, raw in parser["run"].items():
        if key not in known:
            raise CLIError(f"unknown config key {key!r}", EXIT_CONFIG)
        try:
            values[key] = json.loads(raw)
        except json.JSONDecodeError:
            values[key] = raw.strip("\"'")
    return values


def build_run_config(args) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if isinstance(values.get("fractions"), str):
        values["fractions"] = parse_fractions(values["fractions"])
    try:
        cfg = RunConfig(**values)
        for f in dataclasses.fields(RunConfig):
            v = getattr(cfg, f.name)
            if f.type in ("int", "float") and not isinstance(v, (int, float)):
                raise TypeError(f"{f.name} must be a number")
    except TypeError as err:
        raise CLIError(str(err), EXIT_CONFIG) from None
    cfg.validate()
    return cfg


# -- helpers ---------------------------------------------------------------


def _load_model(path) -> ModelFile:
    path = Path(path)
    if not path.is_file():
        raise CLIError(f"model file {path} not found", EXIT_DATA)
    try:
        mf = load_model(path)
    except ModelFormatError as err:
        raise CLIError(f"{path}: {err}", EXIT_FORMAT) from None
    if mf.vocab is None:
        raise CLIError(f"{path}: model file carries no vocabulary", EXIT_FORMAT)
    return mf


def _load_data(path, labels=None, fmt=None):
    path = Path(path)
    if not path.is_file():
        raise CLIError(f"dataset {path} not found", EXIT_DATA)
    try:
        return load_dataset(path, format=fmt or None, labels=labels)
    except (DatasetError, ValueError, OSError) as err:
        raise CLIError(f"{path}: {err}", EXIT_DATA) from None


def _check_vocab(mf: ModelFile, vocab_path) -> None:
    if not vocab_path:
        return
    try:
        vocab = load_vocabulary(vocab_path)
    except (OSError, ValueError) as err:
        raise CLIError(f"{vocab_path}: {err}", EXIT_DATA) from None
    if vocab.fingerprint != mf.model.vocab_fingerprint:
        raise CLIError("vocabulary fingerprint does not match the model", EXIT_FORMAT)


def variant_name(mf: ModelFile) -> str:
    f = mf.meta.get("prune_fraction")
    if f is None:
        return "vanilla TM"
    return f"TM ({100 * f:g}%)"


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- commands --------------------------------------------------------------


def cmd_train(args) -> int:
    cfg = build_run_config(args)
    if not cfg.train:
        raise CLIError("no training data given (--train)", EXIT_CONFIG)
    data = _load_data(cfg.train, fmt=cfg.format)
    if len(data) == 0:
        raise CLIError(f"{cfg.train}: no documents", EXIT_DATA)
    if len(data.labels) < 2:
        raise CLIError(f"{cfg.train}: need at least two labels", EXIT_DATA)
    vocab = build_vocabulary([d.tokens for d in data], cfg.vocab_size)
    X, y = data.vectorize(vocab)
    model = TsetlinMachine(cfg.model_config(len(data.labels)), len(vocab), vocab.fingerprint)

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log_lines = []

    def on_epoch(epoch, m):
        acc = m.accuracy(X, y)
        log.info("epoch %d train accuracy %.4f", epoch + 1, acc)
        log_lines.append(json.dumps({"epoch": epoch + 1, "train_accuracy": acc}))

    model.fit(X, y, epochs=cfg.epochs, seed=cfg.seed, callback=on_epoch)
    save_model(out / MODEL_NAME, model, vocab, data.labels)
    save_vocabulary(vocab, out / "vocab.txt")
    (out / "train_log.jsonl").write_text("\n".join(log_lines) + "\n", encoding="utf-8")
    _write_json(out / "run_config.json", {**dataclasses.asdict(cfg), "config_fingerprint": model.fingerprint})
    print(out / MODEL_NAME)
    return 0


def pruned_path(model_path: Path, fraction: float, out_dir=None) -> Path:
    base = model_path.name[: -len(".model")] if model_path.name.endswith(".model") else model_path.name
    pct = 100 * fraction
    tag = f"{int(round(pct)):02d}" if abs(pct - round(pct)) < 1e-9 else f"{pct:g}"
    return Path(out_dir or model_path.parent) / f"{base}.pruned-{tag}.model"


def cmd_prune(args) -> int:
    if args.fraction is None and args.sweep is None:
        raise CLIError("give --fraction or --sweep", EXIT_CONFIG)
    fractions = [check_fraction(args.fraction)] if args.fraction is not None else parse_fractions(args.sweep)
    if not fractions:
        raise CLIError("no prune fractions given", EXIT_CONFIG)
    mf = _load_model(args.model)
    if mf.meta.get("prune_fraction"):
        log.warning("%s is already pruned; fractions apply to its remaining literals", args.model)
    model_path = Path(args.model)
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
    for f in fractions:
        pruned, report = prune(mf.model, f, mf.vocab)
        dest = pruned_path(model_path, f, args.out_dir)
        meta = {**mf.meta, "prune_fraction": f, "base_model": model_path.name}
        save_model(dest, pruned, mf.vocab, mf.labels, meta)
        _write_json(dest.with_suffix(".report.json"), {**report.to_dict(), "config_fingerprint": pruned.fingerprint})
        log.info("pruned %d of %d ranked literals at %.2f", len(report.pruned), report.ranked, f)
        print(dest)
    return 0


def _read_texts(path) -> list[str]:
    """``text`` fields of a JSONL file (``-`` reads standard input)."""
    if path == "-":
        content = sys.stdin.read()
    else:
        path = Path(path)
        if not path.is_file():
            raise CLIError(f"input {path} not found", EXIT_DATA)
        content = path.read_text(encoding="utf-8")
    texts = []
    for line in content.splitlines():
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            texts.append(row["text"] if isinstance(row, dict) else str(row))
        except (json.JSONDecodeError, KeyError):
            raise CLIError(f"{path}: row {len(texts)}: expected an object with 'text'", EXIT_DATA) from None
    return texts


def cmd_explain(args) -> int:
    mf = _load_model(args.model)
    _check_vocab(mf, args.vocab)
    texts = _read_texts(args.input)
    docs = [tokenize(t) for t in texts]
    maps = tams(mf.model, mf.vocab, docs, args.mode, workers=1 if args.deterministic else args.workers)
    out = []
    for text, tokens, amap in zip(texts, docs, maps):
        x = vectorize_tokens(tokens, mf.vocab)
        pred = mf.model.predict(x)
        out.append({
            "text": text,
            "predicted": mf.labels[pred] if mf.labels else pred,
            "mode": args.mode,
            "tokens": amap.to_records(),
        })
    text = json.dumps(out, indent=2, ensure_ascii=False)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


def cmd_eval(args) -> int:
    models = [_load_model(p) for p in args.model]
    base = models[0]
    for p, mf in zip(args.model[1:], models[1:]):
        if not mf.model.same_binding(base.model) or mf.labels != base.labels:
            raise CLIError(f"{p} is bound to a different vocabulary or configuration", EXIT_FORMAT)
    _check_vocab(base, args.vocab)
    data = _load_data(args.data, labels=base.labels or None)
    if len(data) == 0:
        raise CLIError(f"{args.data}: no documents", EXIT_DATA)
    metrics = args.metric or ["comprehensiveness"]
    similarity = [m for m in metrics if m != "accuracy"]
    if similarity and data.num_annotators == 0:
        raise CLIError(
            f"{args.data}: similarity metrics need human attention maps ('hams') on every document",
            EXIT_DATA,
        )
    if args.annotator == "all":
        annotators = list(range(data.num_annotators))
    else:
        annotators = [int(args.annotator) - 1]
        if similarity and annotators[0] >= data.num_annotators:
            raise CLIError(f"dataset has no annotator {args.annotator}", EXIT_DATA)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    name = args.dataset_name or Path(args.data).stem
    names = [variant_name(mf) for mf in models]
    fractions = {n: mf.meta.get("prune_fraction", 0.0) for n, mf in zip(names, models)}
    workers = 1 if args.deterministic else args.workers

    rows = []
    for n, mf in zip(names, models):
        acc = accuracy(mf.model, data, mf.vocab)
        rows.append(f"{n},{fractions[n]},{name},{acc!r}")
        print(f"accuracy {n}: {100 * acc:.2f}%")
    (out / "accuracy.csv").write_text("model_variant,prune_fraction,dataset,accuracy\n" + "\n".join(rows) + "\n")

    hams = {f"HAM{a + 1}": annotator_maps(data, a) for a in annotators}
    for metric in similarity:
        maps = {n: tams(mf.model, mf.vocab, data.documents, metric, workers=workers) for n, mf in zip(names, models)}
        variants = [metric] + (["sufficiency_complement"] if metric == "sufficiency" else [])
        for label in variants:
            report = pairwise_table(hams, maps, label, dataset=name, fractions=fractions)
            (out / f"similarity-{label}.csv").write_text(report.to_csv())
            (out / f"similarity-{label}.json").write_text(report.to_json() + "\n")
            print(report.format_table())
    return 0


def cmd_inspect_clauses(args) -> int:
    mf = _load_model(args.model)
    _check_vocab(mf, args.vocab)
    pruned = None
    if args.diff:
        other = _load_model(args.diff)
        if not other.model.same_binding(mf.model):
            raise CLIError(f"{args.diff} is bound to a different vocabulary or configuration", EXIT_FORMAT)
        pruned = other.model
    x = None
    if args.doc is not None:
        x = vectorize_tokens(tokenize(args.doc), mf.vocab)
    elif args.sample is not None:
        texts = _read_texts(args.sample)
        if not texts:
            raise CLIError(f"{args.sample}: no documents", EXIT_DATA)
        x = vectorize_tokens(tokenize(texts[0]), mf.vocab)
    count = None if args.count <= 0 else args.count
    ids = select_clauses(mf.model, x, count)
    if x is not None:
        pred = mf.model.predict(x)
        print(f"prediction: {mf.labels[pred] if mf.labels else pred}; {len(ids)} firing clauses shown")
    for line in describe_clauses(mf.model, mf.vocab, ids, mf.labels, pruned):
        print(line)
    if pruned is not None:
        print("literals in [brackets] are removed by pruning")
    return 0


# -- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--deterministic", action="store_true", help="single-threaded, reproducible execution")
    common.add_argument("--workers", type=int, default=1, help="threads for per-document explanation")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tmprune", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train a Tsetlin Machine")
    p.add_argument("--config", help="key = value configuration file; flags override it")
    p.add_argument("--train", help="training dataset (.jsonl or .csv)")
    p.add_argument("--format", choices=["jsonl", "csv"])
    p.add_argument("--vocab-size", dest="vocab_size", type=int)
    p.add_argument("--clauses", type=int, help="clauses per class (even)")
    p.add_argument("--num-states", dest="num_states", type=int)
    p.add_argument("--T", dest="T", type=int, help="vote clipping threshold")
    p.add_argument("--s", dest="s", type=float, help="specificity")
    p.add_argument("--epochs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("prune", parents=[common], help="prune the least frequent literals")
    p.add_argument("--model", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--fraction", help="fraction of ranked literals to prune, in [0, 0.5]")
    g.add_argument("--sweep", nargs="?", const=",".join(str(f) for f in DEFAULT_SWEEP),
                   help="comma separated fractions (default 0.05..0.40 step 0.05)")
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("explain", parents=[common], help="token attention maps as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="JSONL file with a 'text' field per row (- for stdin)")
    p.add_argument("--mode", choices=MODES, default="comprehensiveness")
    p.add_argument("--vocab", help="vocabulary file to check against the model")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("eval", parents=[common], help="accuracy and attention-map similarity tables")
    p.add_argument("--model", required=True, nargs="+", help="model files; the first is the reference binding")
    p.add_argument("--data", required=True)
    p.add_argument("--metric", action="append", choices=list(METRICS) + ["accuracy"])
    p.add_argument("--annotator", choices=["1", "2", "3", "all"], default="all")
    p.add_argument("--dataset-name", dest="dataset_name")
    p.add_argument("--vocab")
    p.add_argument("--out-dir", dest="out_dir", default=".")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("inspect-clauses", parents=[common], help="print clauses as propositional rules")
    p.add_argument("--model", required=True)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--doc", help="show clauses firing on this text")
    src.add_argument("--sample", help="JSONL file; clauses firing on its first row")
    p.add_argument("--count", type=int, default=10, help="clauses to show (0 = all)")
    p.add_argument("--diff", help="pruned model; its removed literals are marked")
    p.add_argument("--vocab")
    p.set_defaults(func=cmd_inspect_clauses)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CLIError as err:
        print(f"tmprune: error: {err}", file=sys.stderr)
        return err.code


if __name__ == "__main__":
    sys.exit(main())
