"""
Unit tests for the command-line adapter
"""
import io
from unittest.mock import Mock

import numpy as np
import pytest

from adapters.input.cli import CommandLineAdapter, build_parser, parse_args
from domain.errors import UsageError
from domain.hyper_params import HyperParams
from domain.joint_dictionary import init_dictionaries
from infrastructure.config.config_loader import ConfigLoader
from infrastructure.storage.model_repository import StoredModel


class TestParser:
    """Test class for argument parsing"""

    def test_hyper_flags_land_in_model_section(self):
        args = parse_args(["train", "--features", "f", "--attributes", "a", "--labels", "l",
                           "--prototypes", "p", "--prototype-labels", "pl", "--model", "m",
                           "--lambda", "0.3", "--r", "40", "--embedding", "identity"])
        assert getattr(args, "model.lambda") == 0.3
        assert getattr(args, "model.r") == 40
        assert getattr(args, "model.embedding") == "identity"
        assert getattr(args, "model.gamma") is None

    def test_global_flags(self):
        args = parse_args(["--seed", "7", "--normalize-l2", "lemma1", "--p-list", "8,16"])
        assert args.seed == 7
        assert args.normalize_l2 is True
        assert getattr(args, "lemma1.p_list") == [8, 16]

    @pytest.mark.parametrize("argv", [
        [],
        ["unknown"],
        ["predict", "--model", "m"],
        ["assign", "--model", "m", "--features", "f", "--prototypes", "p", "--prototype-labels", "l",
         "--strategy", "greedy"],
        ["lemma1", "--p-list", "8,x"],
    ])
    def test_usage_errors(self, argv):
        """Bad command lines raise UsageError instead of exiting"""
        with pytest.raises(UsageError):
            build_parser().parse_args(argv)


class TestCommandLineAdapter:
    """Test class for CommandLineAdapter"""

    @pytest.fixture
    def loader(self, monkeypatch):
        monkeypatch.delenv("JDZSL_CONFIG", raising=False)
        return ConfigLoader()

    def test_apply_overrides(self, loader):
        """Given flags become runtime config; --seed reaches every seeded section"""
        adapter = CommandLineAdapter(loader, Mock(), stdout=io.StringIO())
        args = parse_args(["--seed", "5", "synth", "--out", "d", "--p", "9"])

        adapter.apply_overrides(args)

        assert loader.get("model.seed") == 5
        assert loader.get("synthetic.seed") == 5
        assert loader.get("lemma1.seed") == 5
        assert loader.get("synthetic.p") == 9
        assert loader.get("synthetic.q") == 16

    def test_model_params_keep_stored_values(self, loader):
        """Stored training settings win unless a value was given explicitly"""
        adapter = CommandLineAdapter(loader, Mock(), stdout=io.StringIO())
        stored = HyperParams(lambda_=0.02, gamma=0.5, r=12)
        loader.set_runtime("model.gamma", 3.0)

        params = adapter._model_params(stored, r=12)

        assert params.lambda_ == 0.02
        assert params.gamma == 3.0
        assert params.r == 12

    def test_dispatch_routes_to_handler(self, loader, tmp_path):
        """lemma1 prints a table and writes the report"""
        out = io.StringIO()
        adapter = CommandLineAdapter(loader, Mock(), stdout=out)
        report = tmp_path / "lemma1.txt"
        args = parse_args(["lemma1", "--p-list", "16,32", "--trials", "2", "--r", "40", "--report", str(report)])
        adapter.apply_overrides(args)

        assert adapter.dispatch(args) == 0
        assert "fitted constant" in out.getvalue()
        assert "p16.mean_error=" in report.read_text()

    def test_predict_uses_repository(self, loader, tmp_path):
        """The model comes from the repository; outputs go to --out-dir"""
        from infrastructure.storage.matrix_file import read_matrix, write_labels, write_matrix

        params = HyperParams(r=8)
        repository = Mock()
        repository.load.return_value = StoredModel(init_dictionaries(4, 3, params), params)
        rng = np.random.default_rng(0)
        write_matrix(tmp_path / "x.bin", rng.standard_normal((4, 5)))
        write_matrix(tmp_path / "z.bin", rng.standard_normal((3, 2)))
        write_labels(tmp_path / "zl.bin", np.array([1, 2]))
        adapter = CommandLineAdapter(loader, repository, stdout=io.StringIO())
        args = parse_args(["predict", "--model", "m", "--features", str(tmp_path / "x.bin"),
                           "--prototypes", str(tmp_path / "z.bin"), "--prototype-labels", str(tmp_path / "zl.bin"),
                           "--out-dir", str(tmp_path / "out")])

        assert adapter.dispatch(args) == 0

        repository.load.assert_called_once_with("m")
        assert read_matrix(tmp_path / "out" / "codes.bin").shape == (8, 5)
        assert read_matrix(tmp_path / "out" / "soft_assignments.bin").shape == (2, 5)
