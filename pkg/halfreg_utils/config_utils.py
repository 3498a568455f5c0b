"""
Classes and methods for configuring samplers and oracles.
"""
import logging
import os

import numpy as np

from .errors import SchemaError

logger = logging.getLogger(__name__)

SIZE_GUARD_ENV = 'HALFREG_SIZE_GUARD'
DEFAULT_SIZE_GUARD = 30
MODES = ('exactReplay', 'diagnosticsOnly')


class ChainConfig:
    """
    Markov chain run configuration.
    """
    def __init__(self, seed: int = 0, steps: int = 0, burnin: int = 0, thin: int = 1, chains: int = 1, mode: str = 'exactReplay'):
        """
        :param seed: 64-bit seed, per-chain streams are derived from it
        :param steps: number of kernel steps after burn-in
        :param burnin: number of kernel steps discarded before sampling
        :param thin: emit every thin-th state
        :param chains: number of independent chains
        :param mode: 'exactReplay' verifies every proposal and its reverse,
            'diagnosticsOnly' only records ratio statistics
        """
        for name, value, low in (('steps', steps, 0), ('burnin', burnin, 0), ('thin', thin, 1), ('chains', chains, 1)):
            if not isinstance(value, (int, np.integer)) or value < low:
                raise SchemaError(f'{name} must be an integer >= {low}, got {value!r}')
        if mode not in MODES:
            raise SchemaError(f'mode must be one of {MODES}, got {mode!r}')
        if not 0 <= int(seed) < 2 ** 64:
            raise SchemaError(f'seed must fit in 64 bits, got {seed}')

        self._seed = int(seed)
        self._steps = int(steps)
        self._burnin = int(burnin)
        self._thin = int(thin)
        self._chains = int(chains)
        self._mode = mode

    @property
    def seed(self):
        return self._seed

    @property
    def steps(self):
        return self._steps

    @property
    def burnin(self):
        return self._burnin

    @property
    def thin(self):
        return self._thin

    @property
    def chains(self):
        return self._chains

    @property
    def mode(self):
        return self._mode

    @property
    def exact_replay(self):
        return self._mode == 'exactReplay'

    def to_dict(self):
        return {
            'seed': self.seed,
            'steps': self.steps,
            'burnin': self.burnin,
            'thin': self.thin,
            'chains': self.chains,
            'mode': self.mode,
        }

    def __repr__(self):
        return f"ChainConfig({', '.join(f'{k}={v!r}' for k, v in self.to_dict().items())})"


def size_guard(default=DEFAULT_SIZE_GUARD):
    """
    Maximum number of cells n*m the enumeration oracle accepts.

    :param default: guard used when HALFREG_SIZE_GUARD is unset
    :returns: int
    """
    raw = os.environ.get(SIZE_GUARD_ENV)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise SchemaError(f'{SIZE_GUARD_ENV} must be an integer, got {raw!r}')
    if value < 1:
        raise SchemaError(f'{SIZE_GUARD_ENV} must be positive, got {value}')
    logger.debug(f'Size guard overridden to {value} cells.')
    return value


def chain_rng(seed, chain=0):
    """
    Independent generator for one chain; streams for different chain ids do not overlap.

    :param seed: 64-bit seed
    :param chain: chain index
    :returns: numpy.random.Generator
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(chain)]))
