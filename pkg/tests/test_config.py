import pytest
from hypothesis import given, strategies as st

from panc.config import RELAY_POSITIONS, SCHEMES, ConfigError, ExperimentConfig, preset


def test_defaults():
    cfg = ExperimentConfig()
    assert cfg.snr_db[0] == 0.0 and cfg.snr_db[-1] == 30.0 and len(cfg.snr_db) == 16
    assert cfg.trials == 10 ** 7
    assert cfg.schemes == SCHEMES
    cfg.validate()


@pytest.mark.parametrize("name", sorted(RELAY_POSITIONS))
def test_presets(name):
    cfg = preset(name)
    assert cfg.relay == RELAY_POSITIONS[name]
    assert preset(name, seed=9).seed == 9


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("nowhere")


@pytest.mark.parametrize("kw", [
    dict(snr_db=(5.0, 5.0)), dict(schemes=("Bogus",)), dict(schemes=("Genie", "Genie")),
    dict(methods=("mc", "sim")), dict(n_channels=0), dict(analytic_channels=20, n_channels=10),
    dict(relay=(0.0, 3 ** 0.5 / 3)), dict(er_ave=0.0), dict(alpha_mode="other"), dict(workers=0),
    dict(snr_db=()), dict(pathloss_exponent=-1.0),
])
def test_validation_rejects(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig().replace(**kw).validate()


@given(st.integers(0, 2 ** 31), st.integers(1, 10 ** 4), st.booleans(),
       st.lists(st.sampled_from(SCHEMES), min_size=1, max_size=7, unique=True),
       st.floats(0.1, 10, allow_nan=False))
def test_text_round_trip(seed, n, use_alpha, schemes, er):
    cfg = ExperimentConfig(seed=seed, n_channels=n, analytic_channels=min(n, 200), use_alpha=use_alpha,
                           schemes=tuple(schemes), er_ave=er, snr_db=(1.5, 2.25))
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg


def test_file_round_trip(tmp_path):
    cfg = preset("strong_rd", seed=4)
    path = tmp_path / "run.cfg"
    cfg.dump(path)
    assert ExperimentConfig.load(path) == cfg


@pytest.mark.parametrize("text", ["seed 3", "nonsense = 1", "seed = x", "use_alpha = maybe"])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text(text)


def test_comments_and_partial_files():
    cfg = ExperimentConfig.from_text("# comment\nseed = 3  # trailing\n\n")
    assert cfg.seed == 3 and cfg.n_symbols == ExperimentConfig().n_symbols
