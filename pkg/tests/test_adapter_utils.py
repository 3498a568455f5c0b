import pytest

from halfreg_utils.adapter_utils import (DegreeMatrixAdapter, NdjsonAdapter,
                                         RealizationAdapter,
                                         parse_matrix_file,
                                         parse_realization_file,
                                         sample_record)
from halfreg_utils.errors import IoError, SchemaError
from halfreg_utils.model_utils import ColoredRealization


def test_matrix_file_round_trip(latin3, tmp_path):
    path = DegreeMatrixAdapter().put(latin3, tmp_path / 'nested' / 'latin3.json')
    assert parse_matrix_file(path) == latin3


def test_matrix_file_names_the_bad_row(write_json):
    path = write_json({'n': 2, 'm': 2, 'k': 2, 'd': [1, 1], 'f': [[1, 1], [1]]})
    with pytest.raises(SchemaError, match='"f" row 1'):
        parse_matrix_file(path)


@pytest.mark.parametrize('field, value', [('f', [[1, 1.5]]), ('f', [[1, True]]), ('d', [True])])
def test_matrix_file_rejects_non_integer_entries(write_json, field, value):
    data = {'n': 2, 'm': 2, 'k': 1, 'd': [1], 'f': [[1, 1]]}
    data[field] = value
    with pytest.raises(SchemaError, match=f'"{field}" must contain integers'):
        parse_matrix_file(write_json(data))


def test_matrix_file_errors(tmp_path, write_json):
    with pytest.raises(IoError):
        parse_matrix_file(tmp_path / 'missing.json')
    with pytest.raises(IoError):
        parse_matrix_file(tmp_path)
    bad = tmp_path / 'bad.json'
    bad.write_text('{"n": 2,\n "m": }')
    with pytest.raises(SchemaError, match='line 2'):
        parse_matrix_file(bad)
    with pytest.raises(SchemaError, match='JSON object'):
        parse_matrix_file(write_json([1, 2, 3]))
    with pytest.raises(SchemaError, match='missing'):
        parse_matrix_file(write_json({'n': 1}))


@pytest.mark.parametrize('name', ['square.csv', 'square.json'])
def test_realization_file_round_trip(latin3_square, tmp_path, name):
    path = RealizationAdapter().put(latin3_square, tmp_path / name)
    assert parse_realization_file(path, k=3) == latin3_square


def test_realization_csv_infers_colours(tmp_path):
    path = tmp_path / 'square.csv'
    path.write_text('0,1\n1,0\n')
    assert parse_realization_file(path).k == 2


def test_realization_csv_errors(tmp_path):
    path = tmp_path / 'ragged.csv'
    path.write_text('0,1,2\n1,2\n')
    with pytest.raises(SchemaError, match='row 1'):
        parse_realization_file(path, k=3)
    path = tmp_path / 'letters.csv'
    path.write_text('0,a\n1,0\n')
    with pytest.raises(SchemaError):
        parse_realization_file(path, k=2)
    path = tmp_path / 'halves.csv'
    path.write_text('0,1.5\n1,0\n')
    with pytest.raises(SchemaError, match='integers'):
        parse_realization_file(path, k=2)


def test_ndjson_round_trip(latin3_square, tmp_path):
    records = [sample_record(latin3_square, step, chain=1) for step in (1, 2)]
    path = NdjsonAdapter().put(records, tmp_path / 'samples.ndjson')
    lines = path.read_text().splitlines()
    assert lines[0] == '{"chain":1,"step":1,"n":3,"m":3,"k":3,"matrix":[[0,1,2],[1,2,0],[2,0,1]]}'
    read = list(NdjsonAdapter().get(path))
    assert read == records
    assert ColoredRealization.from_dict(read[1]) == latin3_square


def test_ndjson_reports_the_bad_line(tmp_path):
    path = tmp_path / 'samples.ndjson'
    path.write_text('{"step": 1}\n{"step": \n')
    with pytest.raises(SchemaError, match='line 2'):
        list(NdjsonAdapter().get(path))


@pytest.mark.parametrize('matrix, message', [
    (5, 'nested list'),
    ([[0, 1], 1], 'row 1 must be a list'),
    ([[0, 1], [1, False]], 'integers'),
])
def test_realization_json_errors(write_json, matrix, message):
    path = write_json({'n': 2, 'm': 2, 'k': 2, 'matrix': matrix})
    with pytest.raises(SchemaError, match=message):
        parse_realization_file(path)
