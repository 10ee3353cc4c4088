import pytest

from ocnn.config import ExperimentConfig, load_config, parse_config_text
from ocnn.errors import ParseError


class TestConfigFile:
    def test_values_and_comments(self):
        v = parse_config_text("# comment\nmethod = jknn, 11nn  # two\nL = 7\nlower-fence = no\np = none\n")
        assert v == {"method": ("jknn", "11nn"), "L": 7, "lower_fence": False, "p": None}

    def test_unknown_key_line(self):
        with pytest.raises(ParseError) as info:
            parse_config_text("L = 3\n\nbogus = 1\n", "exp.cfg")
        assert info.value.line == 3

    @pytest.mark.parametrize("text", ["L = three", "missing equals", "omega = x"])
    def test_bad_lines(self, text):
        with pytest.raises(ParseError):
            parse_config_text(text)

    def test_overrides_win(self, tmp_path):
        p = tmp_path / "exp.cfg"
        p.write_text("seed = 1\nL = 5\nensemble = single, rp\n")
        cfg = load_config(p, {"seed": 9, "L": None})
        assert (cfg.seed, cfg.L, cfg.ensemble) == (9, 5, ("single", "rp"))

    def test_cross_product(self):
        cfg = ExperimentConfig(method=("11nn", "jknn"), ensemble=("single", "rs50"))
        assert [s.label for s in cfg.specs()] == ["11nn/single", "11nn/rs50", "jknn/single", "jknn/rs50"]

    @pytest.mark.parametrize("over", [{"method": ("knn",)}, {"ensemble": ("bag",)}, {"F": 1}, {"omega": 0.0},
                                      {"seed": -1}, {"jobs": 0}])
    def test_validation(self, over):
        with pytest.raises(ParseError):
            load_config(None, over)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_config(tmp_path / "none.cfg")
