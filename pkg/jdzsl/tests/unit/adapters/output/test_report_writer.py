"""
Unit tests for report formatting
"""
import numpy as np

from adapters.output import report_writer
from application.grid_search import GridPoint, GridResult
from application.recovery_study import RecoveryRow, RecoveryTable
from domain.metrics import EvalReport


def reports():
    return {
        "TAAw": EvalReport("TAAw", {1: 0.88231, 3: 0.95}, {1: 0.01, 3: 0.0}, {20: 1.0, 21: 0.5}, 40, [0, 1], 0.25),
        "AAg": EvalReport("AAg", {1: 0.5, 3: 0.9}, {1: 0.0, 3: 0.0}, {20: 0.5}, 40, [0, 1], 1.0),
    }


class TestReportWriter:
    """Test class for report_writer"""

    def test_eval_key_values_are_sorted_and_fixed_width(self):
        text = report_writer.eval_key_values(reports())
        lines = text.splitlines()

        keys = [line.split("=", 1)[0] for line in lines]
        assert keys == sorted(keys)
        assert "TAAw.hit@1=0.8823" in lines
        assert "TAAw.class.21.accuracy=0.5000" in lines
        assert "TAAw.mean_entropy=0.250000" in lines
        assert "AAg.seeds=0,1" in lines

    def test_eval_table_orders_methods(self):
        table = report_writer.eval_table(reports())
        rows = table.splitlines()
        assert rows[0].split()[0] == "method"
        assert rows[1].split()[0] == "AAg"
        assert "88.23 +/- 1.00" in rows[2]

    def test_recovery_outputs(self):
        table = RecoveryTable([RecoveryRow(32, 0.5, 0.1, 0.2, 0.8, 0.3)], fitted_constant=0.625)
        assert "fitted constant c' = 0.625000" in report_writer.recovery_table(table)
        assert "p32.mean_error=0.500000\n" in report_writer.recovery_key_values(table)

    def test_grid_fragment_is_a_config_file(self):
        result = GridResult([GridPoint(0.01, 0.1, 0.5), GridPoint(0.1, 1.0, 0.75)])
        fragment = report_writer.grid_config_fragment(result)
        assert "model.lambda=0.1\n" in fragment
        assert "model.gamma=1.0\n" in fragment
        assert fragment.startswith("#")

    def test_embedding_csv(self):
        embedding = np.array([[0.0, 1.0, 2.0], [0.5, 1.5, 2.5]])
        text = report_writer.embedding_csv(embedding, 1, np.array([7, 7, 8]))
        assert text.splitlines() == [
            "node_id,is_prototype,x,y,label",
            "0,1,0,0.5,7",
            "1,0,1,1.5,7",
            "2,0,2,2.5,8",
        ]

    def test_trace_has_seventeen_digits(self, tmp_path):
        path = tmp_path / "trace.txt"
        report_writer.write_trace(path, [1 / 3, 0.25])
        assert path.read_text().splitlines() == ["0.33333333333333331", "0.25"]
