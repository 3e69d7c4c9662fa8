import pytest
from pydantic import ValidationError

from config import DEFAULT_BUDGET, get_settings


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ("LRC_SEED", "LRC_BUDGET", "LRC_SAMPLES", "LRC_RECOVERY_SAMPLES", "LRC_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def test_defaults():
    settings = get_settings()
    assert settings.seed == 0
    assert settings.budget == DEFAULT_BUDGET
    assert settings.samples == 2000
    assert settings.recovery_samples == 100


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("LRC_SEED", "42")
    monkeypatch.setenv("LRC_BUDGET", "1000")
    monkeypatch.setenv("LRC_SAMPLES", " ")
    settings = get_settings()
    assert (settings.seed, settings.budget, settings.samples) == (42, 1000, 2000)


def test_invalid_values(monkeypatch):
    monkeypatch.setenv("LRC_BUDGET", "0")
    with pytest.raises(ValidationError):
        get_settings()
    monkeypatch.setenv("LRC_BUDGET", "dez")
    with pytest.raises(ValueError):
        get_settings()
