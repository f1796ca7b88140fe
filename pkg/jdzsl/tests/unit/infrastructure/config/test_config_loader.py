"""
Unit tests for ConfigLoader
Tests default loading, key=value config files and runtime overrides
"""
import pytest

from domain.errors import DataValidationError
from domain.hyper_params import HyperParams
from infrastructure.config.config_loader import CONFIG_ENV_VAR, ConfigLoader


@pytest.fixture
def user_config(tmp_path):
    path = tmp_path / "jdzsl.conf"
    path.write_text(
        "# tuned on the validation split\n"
        "model.lambda=0.05\n"
        "gamma=2.0\n"
        "model.aaw_step=none\n"
        "io.normalize_l2=true\n"
        "lemma1.p_list=16,32\n",
        encoding="utf-8",
    )
    return path


class TestConfigLoader:
    """Test class for ConfigLoader"""

    def test_init_default_config(self, monkeypatch):
        """Initialization with default config"""
        monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
        loader = ConfigLoader()

        assert loader.get("model.lambda") == 0.1
        assert loader.get("model.embedding") == "tsne"
        assert loader.get("evaluation.ks") == [1, 3, 5]
        assert loader.get("missing.key", "fallback") == "fallback"
        assert loader.get("lemma1.trials") == 50

    def test_user_file_overrides_defaults(self, user_config):
        """Values are coerced to the type of the default they replace"""
        loader = ConfigLoader(str(user_config))

        assert loader.get("model.lambda") == 0.05
        assert loader.get("model.gamma") == 2.0
        assert loader.get("model.aaw_step") is None
        assert loader.get("io.normalize_l2") is True
        assert loader.get("lemma1.p_list") == [16, 32]
        assert loader.get("model.r") == 64

    def test_env_var_names_the_config(self, user_config, monkeypatch):
        monkeypatch.setenv(CONFIG_ENV_VAR, str(user_config))
        assert ConfigLoader().get("model.lambda") == 0.05

    def test_runtime_beats_file(self, user_config):
        """Priority: Runtime Config > User Config File > Default Config"""
        loader = ConfigLoader(str(user_config))
        loader.set_runtime("model.lambda", 0.5)

        assert loader.get("model.lambda") == 0.5
        assert loader.get("model")["lambda"] == 0.5
        assert loader.get("model")["gamma"] == 2.0

    def test_explicit_lists_only_user_values(self, user_config):
        loader = ConfigLoader(str(user_config))
        loader.set_runtime("rho", 3.0)

        assert loader.explicit("model") == {"lambda": 0.05, "gamma": 2.0, "aaw_step": None, "rho": 3.0}
        assert loader.explicit("grid") == {}

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("model.learning_rate=0.1\n", encoding="utf-8")
        with pytest.raises(DataValidationError, match="Unknown configuration key"):
            ConfigLoader(str(path))

    def test_bad_value_rejected(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("model.r=many\n", encoding="utf-8")
        with pytest.raises(DataValidationError, match="Invalid value"):
            ConfigLoader(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataValidationError, match="not found"):
            ConfigLoader(str(tmp_path / "absent.conf"))

    def test_hyper_params_from_loader(self, user_config):
        params = HyperParams.from_config(ConfigLoader(str(user_config)))
        assert params.lambda_ == 0.05
        assert params.gamma == 2.0
