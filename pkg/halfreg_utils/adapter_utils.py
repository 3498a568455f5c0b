"""
Adapters for instance, realization and sample files.
"""
import json
import logging
import sys

import numpy as np
import pandas as pd

from .errors import IoError, SchemaError
from .filepath_utils import prepare_output_path, validate_filepath
from .misc_utils import to_jsonable
from .model_utils import ColoredRealization, DegreeMatrix

logger = logging.getLogger(__name__)


class FilePathAdapter:
    def put(self, obj, filepath):
        return prepare_output_path(filepath)

    def get(self, filepath):
        return validate_filepath(filepath)


class JsonAdapter(FilePathAdapter):
    def put(self, obj, filepath):
        filepath = super().put(obj, filepath)
        try:
            with open(filepath, 'w') as f:
                json.dump(to_jsonable(obj), f)
                f.write('\n')
        except OSError as e:
            raise IoError(f'cannot write {filepath}: {e}')
        return filepath

    def get(self, filepath):
        filepath = super().get(filepath)
        try:
            with open(filepath, 'r') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f'{filepath}: line {e.lineno}, column {e.colno}: {e.msg}')
        except (OSError, UnicodeDecodeError) as e:
            raise IoError(f'cannot read {filepath}: {e}')


class DegreeMatrixAdapter(JsonAdapter):
    def put(self, M, filepath):
        return super().put(M.to_dict(), filepath)

    def get(self, filepath):
        data = super().get(filepath)
        if not isinstance(data, dict):
            raise SchemaError(f'{filepath}: expected a JSON object with fields n, m, k, d, f')
        try:
            return DegreeMatrix.from_dict(data)
        except SchemaError as e:
            raise SchemaError(f'{filepath}: {e}')


class RealizationAdapter(JsonAdapter):
    """
    Realizations as JSON objects or as CSV files of n rows with m colour ids each.
    """
    def put(self, R, filepath):
        if str(filepath).endswith('.csv'):
            filepath = prepare_output_path(filepath)
            pd.DataFrame(R.matrix).to_csv(filepath, header=False, index=False)
            return filepath
        return super().put(R.to_dict(), filepath)

    def get(self, filepath, k=None):
        """
        :param k: number of colours, required for CSV files unless it can be taken as max colour + 1
        """
        if str(filepath).endswith('.csv'):
            return self._get_csv(validate_filepath(filepath), k)
        data = super().get(filepath)
        if not isinstance(data, dict):
            raise SchemaError(f'{filepath}: expected a JSON object with fields n, m, k, matrix')
        try:
            return ColoredRealization.from_dict(data)
        except SchemaError as e:
            raise SchemaError(f'{filepath}: {e}')

    @staticmethod
    def _get_csv(filepath, k):
        try:
            df = pd.read_csv(filepath, header=None)
        except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise SchemaError(f'{filepath}: {e}')
        bad_rows = df.index[df.isna().any(axis=1)].tolist()
        if bad_rows:
            raise SchemaError(f'{filepath}: row {bad_rows[0]} has missing entries')
        non_integer = [col for col, dtype in df.dtypes.items() if dtype.kind not in 'iu']
        if non_integer:
            raise SchemaError(f'{filepath}: colour ids must be integers, column {non_integer[0]} is {df.dtypes[non_integer[0]]}')
        matrix = df.to_numpy(dtype=np.int64)
        k = int(matrix.max()) + 1 if k is None else k
        return ColoredRealization(matrix, k)


class NdjsonAdapter(FilePathAdapter):
    """
    Streams of JSON records, one per line. A filepath of None or '-' means stdin/stdout.
    """
    def put(self, records, filepath=None):
        if filepath in (None, '-'):
            self.write(records, sys.stdout)
            return None
        filepath = super().put(records, filepath)
        try:
            with open(filepath, 'w') as f:
                self.write(records, f)
        except OSError as e:
            raise IoError(f'cannot write {filepath}: {e}')
        return filepath

    @staticmethod
    def write(records, stream):
        for record in records:
            stream.write(json.dumps(to_jsonable(record), separators=(',', ':')) + '\n')

    def get(self, filepath=None):
        if filepath in (None, '-'):
            yield from self._read(sys.stdin, '<stdin>')
            return
        filepath = super().get(filepath)
        try:
            with open(filepath, 'r') as f:
                yield from self._read(f, filepath)
        except OSError as e:
            raise IoError(f'cannot read {filepath}: {e}')

    @staticmethod
    def _read(stream, name):
        for lineno, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f'{name}: line {lineno}: {e.msg}')


def sample_record(R, step, chain=0):
    """NDJSON record of one sampled realization"""
    return {'chain': chain, 'step': step, **R.to_dict()}


def parse_matrix_file(path):
    """
    :returns: DegreeMatrix read from a JSON instance file
    """
    return DegreeMatrixAdapter().get(path)


def parse_realization_file(path, k=None):
    return RealizationAdapter().get(path, k=k)
