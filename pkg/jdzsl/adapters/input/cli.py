"""
Command-Line Adapter

Parses arguments, records flag values as runtime configuration and routes
each subcommand to its handler. Handlers write results to files and stdout;
logs go to stderr.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from application.attribute_prediction import AttributePredictor
from application.dictionary_training import DictionaryTrainer
from application.evaluation_service import EvaluationService, methods_for_strategy
from application.grid_search import GridSearch
from application.label_assignment import assign_labels, embed_points
from application.recovery_study import RecoverySettings, lemma1_study
from domain.dense_matrix import l2_normalize_columns
from domain.errors import DataValidationError, UsageError
from domain.hyper_params import EMBEDDINGS, HyperParams
from domain.joint_dictionary import SeenDataset, UnseenPrototypes
from infrastructure.storage.matrix_file import (
    read_labels,
    read_matrix,
    read_split,
    write_labels,
    write_matrix,
    write_split,
)
from infrastructure.synthetic.generator import SynthSpec, gen_synthetic

from adapters.output import report_writer

logger = logging.getLogger(__name__)

# (flag, config key, type) for every hyper-parameter flag
HYPER_FLAGS: List[Tuple[str, str, Callable]] = [
    ("--lambda", "lambda", float),
    ("--gamma", "gamma", float),
    ("--rho", "rho", float),
    ("--r", "r", int),
    ("--outer-iters", "outer_iters", int),
    ("--fista-max-iter", "fista_max_iter", int),
    ("--fista-tol", "fista_tol", float),
    ("--aaw-max-iter", "aaw_max_iter", int),
    ("--aaw-step", "aaw_step", float),
    ("--knn-k", "knn_k", int),
    ("--lp-alpha", "lp_alpha", float),
    ("--tsne-perplexity", "tsne_perplexity", float),
    ("--tsne-iters", "tsne_iters", int),
    ("--dz-sweeps", "dz_sweeps", int),
    ("--dz-steps", "dz_steps", int),
]

SYNTH_FLAGS: List[Tuple[str, str, Callable]] = [
    ("--p", "p", int),
    ("--q", "q", int),
    ("--r-true", "r_true", int),
    ("--k-true", "k_true", int),
    ("--n", "n", int),
    ("--m", "m", int),
    ("--n-seen-classes", "n_seen_classes", int),
    ("--n-test-per-class", "n_test_per_class", int),
    ("--noise-sigma", "noise_sigma", float),
    ("--shift-sigma", "shift_sigma", float),
    ("--code-jitter", "code_jitter", float),
]


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


class UsageArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises UsageError instead of exiting"""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageArgumentParser(prog="jdzsl", description="Zero-shot learning with coupled sparse dictionaries")
    parser.add_argument("--seed", type=int, default=None, help="Seed for every random draw")
    parser.add_argument("--config", default=None, help="key=value config file (flags override it)")
    parser.add_argument("--normalize-l2", action="store_true", help="Scale feature and attribute columns to unit norm")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", parser_class=UsageArgumentParser)
    commands.required = True

    hyper = UsageArgumentParser(add_help=False)
    for flag, key, cast in HYPER_FLAGS:
        hyper.add_argument(flag, dest=f"model.{key}", type=cast, default=None)
    hyper.add_argument("--embedding", dest="model.embedding", choices=EMBEDDINGS, default=None)

    model_io = UsageArgumentParser(add_help=False)
    model_io.add_argument("--model", required=True)
    model_io.add_argument("--features", required=True, help="Test features (p x l)")
    model_io.add_argument("--prototypes", required=True, help="Unseen prototype attributes (q x M)")
    model_io.add_argument("--prototype-labels", required=True)

    synth = commands.add_parser("synth", help="Write a synthetic dataset")
    synth.add_argument("--out", required=True)
    for flag, key, cast in SYNTH_FLAGS:
        synth.add_argument(flag, dest=f"synthetic.{key}", type=cast, default=None)
    synth.add_argument("--format", choices=("raw", "csv"), default="raw")

    train = commands.add_parser("train", parents=[hyper], help="Learn the coupled dictionaries")
    train.add_argument("--features", required=True)
    train.add_argument("--attributes", required=True)
    train.add_argument("--labels", required=True)
    train.add_argument("--prototypes", default=None)
    train.add_argument("--prototype-labels", default=None)
    train.add_argument("--split", default=None,
                       help="Unseen class ids; their samples leave the training set and give the prototypes")
    train.add_argument("--model", required=True)
    train.add_argument("--trace", default=None, help="Objective trace file (default: <model>.trace)")

    predict = commands.add_parser("predict", parents=[hyper, model_io], help="Predict attributes")
    predict.add_argument("--mode", choices=("aag", "aaw"), default="aag")
    predict.add_argument("--out-dir", required=True)

    assign = commands.add_parser("assign", parents=[hyper, model_io], help="Assign unseen-class labels")
    assign.add_argument("--mode", choices=("aag", "aaw"), default="aaw")
    assign.add_argument("--strategy", choices=("nn", "taaw"), default="taaw")
    assign.add_argument("--emit-embedding", default=None)
    assign.add_argument("--out", default=None, help="Label file (default: stdout)")

    evaluate = commands.add_parser("evaluate", parents=[hyper, model_io], help="hit@K of the pipelines")
    evaluate.add_argument("--labels", required=True, help="True labels of the test features")
    evaluate.add_argument("--strategy", dest="evaluation.strategy", choices=("nn", "taaw", "all"), default=None)
    evaluate.add_argument("--repeats", dest="evaluation.repeats", type=int, default=None)
    evaluate.add_argument("--report", default=None)

    lemma1 = commands.add_parser("lemma1", help="Sparse recovery error versus p")
    lemma1.add_argument("--p-list", dest="lemma1.p_list", type=_int_list, default=None)
    lemma1.add_argument("--trials", dest="lemma1.trials", type=int, default=None)
    lemma1.add_argument("--k", dest="lemma1.k", type=int, default=None)
    lemma1.add_argument("--r", dest="lemma1.r", type=int, default=None)
    lemma1.add_argument("--q", dest="lemma1.q", type=int, default=None)
    lemma1.add_argument("--noise-sigma", dest="lemma1.noise_sigma", type=float, default=None)
    lemma1.add_argument("--report", default=None)

    grid = commands.add_parser("grid", parents=[hyper], help="Validate (lambda, gamma) on held-out seen classes")
    grid.add_argument("--features", required=True)
    grid.add_argument("--attributes", required=True)
    grid.add_argument("--labels", required=True)
    grid.add_argument("--lambdas", dest="grid.lambdas", type=_float_list, default=None)
    grid.add_argument("--gammas", dest="grid.gammas", type=_float_list, default=None)
    grid.add_argument("--holdout-classes", dest="grid.holdout_classes", type=int, default=None)
    grid.add_argument("--out", default=None, help="Write the best point as a config fragment")
    return parser


class CommandLineAdapter:
    """Adapter for processing command-line invocations"""

    def __init__(self, config_loader, model_repository, stdout=None):
        """
        Args:
            config_loader: Configuration management object
            model_repository: Model persistence
            stdout: Stream for results (defaults to sys.stdout)
        """
        self.config_loader = config_loader
        self.model_repository = model_repository
        self.stdout = stdout or sys.stdout
        self.command_handlers: Dict[str, Callable[[argparse.Namespace], int]] = {
            "synth": self._handle_synth,
            "train": self._handle_train,
            "predict": self._handle_predict,
            "assign": self._handle_assign,
            "evaluate": self._handle_evaluate,
            "lemma1": self._handle_lemma1,
            "grid": self._handle_grid,
        }

    def apply_overrides(self, args: argparse.Namespace) -> None:
        """Store every flag that was given as a runtime config value"""
        if args.seed is not None:
            for key in ("model.seed", "synthetic.seed", "lemma1.seed"):
                self.config_loader.set_runtime(key, args.seed)
        if args.normalize_l2:
            self.config_loader.set_runtime("io.normalize_l2", True)
        for dest, value in vars(args).items():
            if "." in dest and value is not None:
                self.config_loader.set_runtime(dest, value)

    def dispatch(self, args: argparse.Namespace) -> int:
        handler = self.command_handlers.get(args.command)
        if handler is None:
            raise UsageError(f"Unknown command: {args.command}")
        logger.debug("Dispatching %s", args.command)
        return handler(args)

    def _emit(self, text: str) -> None:
        self.stdout.write(text)
        self.stdout.flush()

    def _params(self) -> HyperParams:
        return HyperParams.from_config(self.config_loader)

    def _model_params(self, stored_params: HyperParams, r: int) -> HyperParams:
        """Stored training settings, with explicitly configured values on top"""
        explicit = self.config_loader.explicit("model")
        return HyperParams.from_dict({**stored_params.to_dict(), **explicit}).with_overrides(r=r)

    def _read_columns(self, path: str) -> np.ndarray:
        matrix = read_matrix(path)
        if self.config_loader.get("io.normalize_l2", False):
            matrix = l2_normalize_columns(matrix)
        return matrix

    def _read_prototypes(self, args: argparse.Namespace) -> UnseenPrototypes:
        return UnseenPrototypes(self._read_columns(args.prototypes), read_labels(args.prototype_labels))

    def _handle_synth(self, args: argparse.Namespace) -> int:
        spec = SynthSpec.from_config(self.config_loader)
        data = gen_synthetic(spec)
        out = Path(args.out)
        suffix = ".csv" if args.format == "csv" else ".bin"
        files = {
            "seen_features": data.seen.features,
            "seen_attributes": data.seen.attributes,
            "proto_attributes": data.protos.attributes,
            "test_features": data.test_features,
        }
        for stem, matrix in files.items():
            write_matrix(out / f"{stem}{suffix}", matrix)
        write_labels(out / f"seen_labels{suffix}", data.seen.labels)
        write_labels(out / f"proto_labels{suffix}", data.protos.labels)
        write_labels(out / f"test_labels{suffix}", data.test_labels)
        write_split(out / "unseen_split.txt", data.protos.labels)
        self._emit(report_writer.key_value_lines({f"synthetic.{k}": v for k, v in spec.to_dict().items()}))
        return 0

    def _handle_train(self, args: argparse.Namespace) -> int:
        params = self._params()
        data = SeenDataset(self._read_columns(args.features), self._read_columns(args.attributes),
                           read_labels(args.labels))
        data, protos = self._training_split(args, data)
        dictionary, report = DictionaryTrainer(params).train(data, protos)
        self.model_repository.save(args.model, dictionary, params)
        report_writer.write_trace(args.trace or f"{args.model}.trace", report.objective_trace)
        summary = {f"model.{k}": v for k, v in dictionary.describe(report.codes_a).items()}
        summary["train.initial_objective"] = f"{report.objective_trace[0]:.17g}"
        summary["train.final_objective"] = f"{report.objective_trace[-1]:.17g}"
        summary["train.fallback_rounds"] = report.fallback_rounds
        self._emit(report_writer.key_value_lines(summary))
        return 0

    def _training_split(self, args: argparse.Namespace, data: SeenDataset
                        ) -> Tuple[SeenDataset, UnseenPrototypes]:
        """
        Seen training samples and unseen prototypes

        With --split, samples of the listed classes are removed from the training
        set; their attribute vectors are the prototypes unless prototype files are given.
        """
        if (args.prototypes is None) != (args.prototype_labels is None):
            raise UsageError("--prototypes and --prototype-labels go together")
        if args.split is None:
            if args.prototypes is None:
                raise UsageError("train needs --prototypes and --prototype-labels, or --split")
            return data, self._read_prototypes(args)

        held_out = np.isin(data.labels, read_split(args.split))
        if held_out.all():
            raise DataValidationError(f"{args.split}: every training sample belongs to an unseen class")
        if args.prototypes is not None:
            protos = self._read_prototypes(args)
        elif held_out.any():
            protos = data.subset(held_out).class_prototypes()
        else:
            raise DataValidationError(f"{args.split}: no sample belongs to a listed class and no prototype files given")
        logger.info("Split %s holds out %d samples", args.split, int(held_out.sum()))
        return data.subset(~held_out), protos

    def _load_predictor(self, args: argparse.Namespace):
        stored = self.model_repository.load(args.model)
        params = self._model_params(stored.params, stored.dictionary.r)
        return stored.dictionary, params

    def _handle_predict(self, args: argparse.Namespace) -> int:
        dictionary, params = self._load_predictor(args)
        protos = self._read_prototypes(args)
        result = AttributePredictor(dictionary, params).predict_batch(
            self._read_columns(args.features), protos, args.mode
        )
        out = Path(args.out_dir)
        suffix = ".csv" if args.features.lower().endswith(".csv") else ".bin"
        write_matrix(out / f"codes{suffix}", result.codes)
        write_matrix(out / f"predicted_attributes{suffix}", result.predicted_attributes)
        write_matrix(out / f"soft_assignments{suffix}", result.assignment_matrix().T)
        self._emit(report_writer.key_value_lines({
            "predict.mode": args.mode,
            "predict.n_samples": result.n_samples,
            "predict.mean_entropy": f"{result.mean_entropy():.6f}",
        }))
        return 0

    def _handle_assign(self, args: argparse.Namespace) -> int:
        dictionary, params = self._load_predictor(args)
        protos = self._read_prototypes(args)
        result = AttributePredictor(dictionary, params).predict_batch(
            self._read_columns(args.features), protos, args.mode
        )
        transductive = assign_labels(result, protos, params, args.strategy)
        labels = result.labels
        embedding = transductive.embedding if transductive is not None else None
        if args.emit_embedding and embedding is None:
            embedding = embed_points(np.hstack([protos.attributes, result.predicted_attributes]), params)

        if args.emit_embedding:
            node_labels = np.concatenate([protos.labels, labels])
            report_writer.write_text(args.emit_embedding,
                                     report_writer.embedding_csv(embedding, protos.n_prototypes, node_labels))
        text = "".join(f"{int(label)}\n" for label in labels)
        if args.out:
            report_writer.write_text(args.out, text)
        else:
            self._emit(text)
        return 0

    def _handle_evaluate(self, args: argparse.Namespace) -> int:
        dictionary, params = self._load_predictor(args)
        protos = self._read_prototypes(args)
        section = self.config_loader.get("evaluation", {})
        reports = EvaluationService(dictionary, params).evaluate(
            self._read_columns(args.features), read_labels(args.labels), protos,
            methods=methods_for_strategy(section["strategy"]),
            repeats=int(section["repeats"]),
            ks=tuple(section["ks"]),
        )
        machine = report_writer.eval_key_values(reports)
        self._emit(report_writer.eval_table(reports) + "\n" + machine)
        if args.report:
            report_writer.write_text(args.report, machine)
        return 0

    def _handle_lemma1(self, args: argparse.Namespace) -> int:
        section = dict(self.config_loader.get("lemma1", {}))
        p_list = section.pop("p_list")
        table = lemma1_study(p_list, RecoverySettings(**section))
        machine = report_writer.recovery_key_values(table)
        self._emit(report_writer.recovery_table(table) + "\n" + machine)
        if args.report:
            report_writer.write_text(args.report, machine)
        return 0

    def _handle_grid(self, args: argparse.Namespace) -> int:
        params = self._params()
        data = SeenDataset(self._read_columns(args.features), self._read_columns(args.attributes),
                           read_labels(args.labels))
        section = self.config_loader.get("grid", {})
        if not section["lambdas"] or not section["gammas"]:
            raise UsageError("grid needs at least one lambda and one gamma")
        result = GridSearch(params).run(data, section["lambdas"], section["gammas"],
                                        n_holdout=int(section["holdout_classes"]))
        self._emit(report_writer.grid_table(result))
        if args.out:
            report_writer.write_text(args.out, report_writer.grid_config_fragment(result))
        return 0


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)
