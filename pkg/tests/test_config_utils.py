import pytest

from halfreg_utils.config_utils import ChainConfig, chain_rng, size_guard
from halfreg_utils.errors import SchemaError


def test_chain_config_defaults():
    config = ChainConfig()
    assert config.to_dict() == {'seed': 0, 'steps': 0, 'burnin': 0, 'thin': 1, 'chains': 1, 'mode': 'exactReplay'}
    assert config.exact_replay
    assert not ChainConfig(mode='diagnosticsOnly').exact_replay


@pytest.mark.parametrize('kwargs', [
    {'steps': -1},
    {'burnin': -5},
    {'thin': 0},
    {'chains': 0},
    {'steps': 1.5},
    {'mode': 'fast'},
    {'seed': -1},
])
def test_chain_config_validation(kwargs):
    with pytest.raises(SchemaError):
        ChainConfig(**kwargs)


def test_size_guard(monkeypatch):
    monkeypatch.delenv('HALFREG_SIZE_GUARD', raising=False)
    assert size_guard() == 30
    monkeypatch.setenv('HALFREG_SIZE_GUARD', '16')
    assert size_guard() == 16
    monkeypatch.setenv('HALFREG_SIZE_GUARD', 'many')
    with pytest.raises(SchemaError):
        size_guard()


def test_chain_rng_streams():
    assert chain_rng(7, 0).integers(2 ** 32) == chain_rng(7, 0).integers(2 ** 32)
    assert chain_rng(7, 0).integers(2 ** 62, size=4).tolist() != chain_rng(7, 1).integers(2 ** 62, size=4).tolist()
