"""
Report Writer - human-readable tables and key=value lines

Machine-readable output is flat key=value lines sorted by key, with fixed
number formatting, so identical runs produce identical bytes.
"""
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Union

import numpy as np

from application.grid_search import GridResult
from application.recovery_study import RecoveryTable
from domain.metrics import EvalReport

logger = logging.getLogger(__name__)

METHOD_ORDER = ("AAg", "AAw", "TAAw")


def _number(value: float, digits: int = 4) -> str:
    return "nan" if not np.isfinite(value) else f"{value:.{digits}f}"


def key_value_lines(entries: Mapping[str, object]) -> str:
    return "".join(f"{key}={entries[key]}\n" for key in sorted(entries))


def _ordered(reports: Mapping[str, EvalReport]) -> List[EvalReport]:
    rank = {name: index for index, name in enumerate(METHOD_ORDER)}
    return [reports[name] for name in sorted(reports, key=lambda name: (rank.get(name, len(rank)), name))]


def eval_key_values(reports: Mapping[str, EvalReport]) -> str:
    """e.g. TAAw.hit@1=0.8823"""
    entries: Dict[str, object] = {}
    for report in _ordered(reports):
        prefix = report.method
        for k, value in report.hit_at.items():
            entries[f"{prefix}.hit@{k}"] = _number(value)
            entries[f"{prefix}.hit@{k}.std"] = _number(report.hit_at_std.get(k, float("nan")))
        for cls, value in report.per_class_accuracy.items():
            entries[f"{prefix}.class.{cls}.accuracy"] = _number(value)
        entries[f"{prefix}.mean_entropy"] = _number(report.mean_entropy, 6)
        entries[f"{prefix}.n_test"] = report.n_test
        entries[f"{prefix}.seeds"] = ",".join(str(seed) for seed in report.seeds_used)
    return key_value_lines(entries)


def eval_table(reports: Mapping[str, EvalReport]) -> str:
    ordered = _ordered(reports)
    ks = sorted({k for report in ordered for k in report.hit_at})
    header = ["method"] + [f"hit@{k}" for k in ks] + ["entropy", "n_test"]
    rows = [header]
    for report in ordered:
        cells = [report.method]
        for k in ks:
            mean = report.hit_at.get(k, float("nan"))
            std = report.hit_at_std.get(k, 0.0)
            cells.append(f"{100 * mean:.2f} +/- {100 * std:.2f}")
        cells += [_number(report.mean_entropy), str(report.n_test)]
        rows.append(cells)
    return _render(rows)


def recovery_table(table: RecoveryTable) -> str:
    rows = [["p", "mean_error", "std_error", "support", "sqrt(k log r/p)", "1/sqrt(p)+1/sqrt(p+q)"]]
    for row in table.rows:
        rows.append([str(row.p), _number(row.mean_error, 6), _number(row.std_error, 6),
                     _number(row.support_recovery, 3), _number(row.rate, 6), _number(row.bound_predictor, 6)])
    return _render(rows) + f"fitted constant c' = {_number(table.fitted_constant, 6)}\n"


def recovery_key_values(table: RecoveryTable) -> str:
    entries: Dict[str, object] = {"fitted_constant": _number(table.fitted_constant, 6)}
    for row in table.rows:
        entries[f"p{row.p}.mean_error"] = _number(row.mean_error, 6)
        entries[f"p{row.p}.std_error"] = _number(row.std_error, 6)
        entries[f"p{row.p}.support_recovery"] = _number(row.support_recovery, 4)
        entries[f"p{row.p}.bound_predictor"] = _number(row.bound_predictor, 6)
    return key_value_lines(entries)


def grid_table(result: GridResult) -> str:
    rows = [["lambda", "gamma", "hit@1"]]
    rows += [[f"{point.lambda_:g}", f"{point.gamma:g}", _number(point.hit_at_1)] for point in result.points]
    best = result.best
    return _render(rows) + f"best: lambda={best.lambda_:g} gamma={best.gamma:g} hit@1={_number(best.hit_at_1)}\n"


def grid_config_fragment(result: GridResult) -> str:
    best = result.best
    return f"# best of {len(result.points)} grid points (hit@1={_number(best.hit_at_1)})\n" \
           f"model.lambda={best.lambda_!r}\nmodel.gamma={best.gamma!r}\n"


def _render(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.rjust(width) for cell, width in zip(row, widths)) for row in rows]
    return "\n".join(lines) + "\n"


def write_text(path: Union[str, Path], text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", path)


def write_trace(path: Union[str, Path], trace: Iterable[float]) -> None:
    """Objective trace, one value per line with 17 significant digits"""
    write_text(path, "".join(f"{value:.17g}\n" for value in trace))


def write_labels_text(path: Union[str, Path], labels: Iterable[int]) -> None:
    write_text(path, "".join(f"{int(label)}\n" for label in labels))


def embedding_csv(embedding: np.ndarray, n_prototypes: int, labels: np.ndarray) -> str:
    """
    Args:
        embedding: d x n coordinates, prototype nodes first
        n_prototypes: Number of leading prototype nodes
        labels: Length-n class label per node
    """
    xs = embedding[0]
    ys = embedding[1] if embedding.shape[0] > 1 else np.zeros_like(xs)
    lines = ["node_id,is_prototype,x,y,label"]
    for node in range(embedding.shape[1]):
        lines.append(f"{node},{int(node < n_prototypes)},{xs[node]:.17g},{ys[node]:.17g},{int(labels[node])}")
    return "\n".join(lines) + "\n"
