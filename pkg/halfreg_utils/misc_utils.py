"""
Misc utils
"""
from fractions import Fraction
from hashlib import md5

import numpy as np


class FieldDict(dict):
    """
    FieldDict is a dictionary that allows attribute-style access to its keys
    in addition to the standard dictionary-style access. Nested dictionaries
    are converted to FieldDict instances.

    Example:
        fd = FieldDict(a=1, b={'c': 2})
        fd.a    # 1
        fd.b.c  # 2
    """
    def __init__(self, **kwargs):
        super().__init__()
        for key, value in kwargs.items():
            self[key] = value

    def __setitem__(self, key, value):
        super().__setitem__(key, self._convert(value))

    def __getattr__(self, name):
        try:
            return self[name]
        except KeyError:
            raise AttributeError(f"'FieldDict' object has no attribute '{name}'")

    def __setattr__(self, name, value):
        self[name] = value

    def __delattr__(self, name):
        del self[name]

    def __repr__(self):
        return f"<FieldDict with keys: {', '.join(repr(k) for k in self.keys())}>"

    @staticmethod
    def _convert(value):
        if isinstance(value, dict) and not isinstance(value, FieldDict):
            return FieldDict(**value)
        elif isinstance(value, (list, tuple)):
            return type(value)(FieldDict._convert(v) for v in value)
        return value


def rational_str(value):
    """
    Formats an exact rational as "p/q" (or "p" for integers). None passes through.
    """
    if value is None:
        return None
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def to_jsonable(obj):
    """
    Recursively converts numpy scalars/arrays, Fractions and tuples into
    JSON serializable python objects.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Fraction):
        return rational_str(obj)
    return obj


def digest(text):
    """
    md5 hex digest of a string.
    """
    return md5(text.encode()).hexdigest()
