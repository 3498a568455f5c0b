"""
Goodness of fit checks for samplers.
"""
import logging

import numpy as np
import pandas as pd
from scipy.stats import chi2

from .errors import InsufficientSamples, StateSpaceMismatch
from .misc_utils import FieldDict

logger = logging.getLogger(__name__)


def tally_states(encodings):
    """
    Counts of each canonical state encoding.

    :param encodings: iterable of str
    :returns: dict state -> count
    """
    counts = pd.Series(list(encodings), dtype=object).value_counts()
    return {state: int(count) for state, count in counts.items()}


def uniformity_test(sample_counts, state_space_size):
    """
    Pearson chi-square test of sample counts against the uniform law.

    :param sample_counts: dict state -> count; unseen states count as 0
    :param state_space_size: number of states S
    :returns: FieldDict with
        - 'chi2': test statistic
        - 'p_value': upper tail probability with S - 1 degrees of freedom
        - 'tv_distance': total variation distance of the empirical law from uniform
        - 'degrees_of_freedom': S - 1
        - 'total': number of samples
    """
    if state_space_size < 2:
        raise InsufficientSamples(f'state space of size {state_space_size} has nothing to test')
    observed = np.array(list(sample_counts.values()), dtype=np.float64)
    if len(observed) > state_space_size:
        raise StateSpaceMismatch(f'{len(observed)} distinct states exceed the state space size {state_space_size}')
    total = observed.sum()
    if total < 10 * state_space_size:
        raise InsufficientSamples(f'{int(total)} samples, need at least {10 * state_space_size}')

    observed = np.concatenate([observed, np.zeros(state_space_size - len(observed))])
    expected = total / state_space_size
    statistic = float(((observed - expected) ** 2).sum() / expected)
    df = state_space_size - 1
    p_value = float(chi2.sf(statistic, df))
    tv_distance = float(0.5 * np.abs(observed / total - 1 / state_space_size).sum())
    logger.info(f'chi2={statistic:.2f} with {df} degrees of freedom, p={p_value:.4g}, tv={tv_distance:.4f}')
    return FieldDict(chi2=statistic, p_value=p_value, tv_distance=tv_distance, degrees_of_freedom=df, total=int(total))


def binomial_deviations(counts, probabilities, total):
    """
    Deviation of each observed count from its expectation in binomial standard errors.

    :param counts: dict key -> observed count
    :param probabilities: dict key -> exact or float probability, every key of counts must be present
    :param total: number of draws
    :returns: dict key -> z score
    """
    unknown = set(counts) - set(probabilities)
    assert not unknown, f'observed outcomes without probability: {sorted(unknown)[:5]}'
    z = {}
    for key, p in probabilities.items():
        p = float(p)
        sigma = np.sqrt(total * p * (1 - p))
        deviation = counts.get(key, 0) - total * p
        z[key] = 0.0 if sigma == 0 else float(deviation / sigma)
    return z
