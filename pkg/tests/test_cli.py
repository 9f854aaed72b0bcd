# tests/test_cli.py

import io
import json

import numpy as np
import pandas as pd
import pytest

from analysis.oracles import rankone_phi_ncc
from config.app_config import DEFAULT_NUMERICS
from main import main

A1_EVAL = ['eval', '--family', 'A', '--rank', '1', '--m', '2']


def _document(text):
    """The JSON document in a stream that may also carry console log lines"""
    lines = text.splitlines()
    start = lines.index('{')
    end = lines.index('}', start)
    return json.loads('\n'.join(lines[start:end + 1]))


def _without_timestamp(document):
    return {key: value for key, value in document.items() if key != 'generated_at'}


def test_eval_writes_result_file(app, tmp_path):
    out = tmp_path / 'out.json'
    code = main(A1_EVAL + ['--theta', 'full', '--lambda', '0+2i', '--H', '1.0', '--output', str(out)])
    assert code == 0
    document = json.loads(out.read_text())
    assert document['schema_version'] == '1.0'
    assert document['subcommand'] == 'eval'
    assert document['root_system'] == 'A1'
    result = document['results'][0]
    assert result['value']['re'] == pytest.approx(np.sin(2.0) / (2 * np.sinh(1.0)), abs=1e-8)
    assert result['value']['im'] == pytest.approx(0.0, abs=1e-8)
    assert result['lambda'] == [{'re': 0.0, 'im': 2.0}]


def test_eval_to_stdout_is_deterministic(app, capsys):
    argv = A1_EVAL + ['--theta', 'empty', '--lambda', '0.5+1i', '--H', '0.8', '--H', '1.6']
    assert main(argv) == 0
    first = json.loads(capsys.readouterr().out)
    assert main(argv) == 0
    second = json.loads(capsys.readouterr().out)
    assert len(first['results']) == 2
    assert _without_timestamp(first) == _without_timestamp(second)


def test_eval_csv_output(app, capsys):
    assert main(A1_EVAL + ['--quantity', 'delta', '--H', '1.0', '--H', '2.0', '--format', 'csv']) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(frame['H_1']) == [1.0, 2.0]
    assert 'value_im' in frame.columns
    assert frame['value_re'].iloc[0] == pytest.approx((2 * np.sinh(1.0)) ** 2, rel=1e-15)


def test_empty_lambda_list_is_an_invalid_job(app, tmp_path, capsys):
    out = tmp_path / 'out.json'
    assert main(A1_EVAL + ['--H', '1.0', '--output', str(out)]) == 1
    assert not out.exists()
    error = _document(capsys.readouterr().err)
    assert error['exit_code'] == 1
    assert error['error']['error'] == 'InvalidSpecError'
    assert error['error']['condition'] == 'empty λ list'


def test_pole_is_a_numeric_failure(app, tmp_path, capsys):
    out = tmp_path / 'out.json'
    code = main(A1_EVAL + ['--theta', 'empty', '--lambda', '0', '--H', '1.0', '--output', str(out)])
    assert code == 2
    document = json.loads(out.read_text())
    assert document['exit_code'] == 2
    assert document['error']['error'] == 'PoleError'
    assert _document(capsys.readouterr().err)['error'] == document['error']


def test_command_line_errors_are_invalid_jobs(app, capsys):
    assert main(['eval', '--rank', 'one']) == 1
    assert _document(capsys.readouterr().err)['error']['module'] == 'cli'
    assert main([]) == 1


def test_job_fields_and_numerics_from_config(app, tmp_path):
    config = tmp_path / 'job.json'
    config.write_text(json.dumps({
        'family': 'A', 'rank': 1, 'm': 2, 'theta': 'empty',
        'lambdas': ['0.5+1i'], 'H': ['1.2'],
        'numerics': {'default_order': 50},
    }))
    out = tmp_path / 'out.json'
    assert main(['--config', str(config), 'eval', '--output', str(out)]) == 0
    assert DEFAULT_NUMERICS.default_order == 50
    document = json.loads(out.read_text())
    assert document['theta'] == 'empty'
    value = complex(document['results'][0]['value']['re'], document['results'][0]['value']['im'])
    assert value == pytest.approx(rankone_phi_ncc(2, 0.5 + 1j, 1.2), rel=1e-10)


def test_command_line_overrides_config(app, tmp_path):
    config = tmp_path / 'job.json'
    config.write_text(json.dumps({'family': 'A', 'rank': 1, 'theta': 'empty', 'lambdas': ['0.5+1i'], 'H': ['1.2']}))
    out = tmp_path / 'out.json'
    assert main(['--config', str(config), 'eval', '--theta', 'full', '--output', str(out)]) == 0
    assert json.loads(out.read_text())['theta'] == 'full'


@pytest.mark.parametrize('content', ['{"numerics": {"bogus": 1}}', '[1, 2]', '{"quadrature": {"radial_nodes": 1}'])
def test_bad_config_file(app, tmp_path, capsys, content):
    config = tmp_path / 'bad.json'
    config.write_text(content)
    assert main(['--config', str(config), 'atlas']) == 1
    assert capsys.readouterr().err.startswith('Error:')


def test_atlas_query(app, capsys):
    assert main(['atlas', '--class', 'ncc', '--m', '8']) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['filters']['class'] == 'ncc'
    assert len(document['records']) == 1
    assert document['records'][0]['concrete']['sigma'] == 'A2'
    assert len(document['isomorphisms']) == 7


def test_atlas_rejects_unknown_class(app):
    assert main(['atlas', '--class', 'hermitian']) == 1


def test_transform_job(app, tmp_path):
    out = tmp_path / 'transform.json'
    code = main(['transform', '--family', 'A', '--rank', '1', '--m', '0', '--radius', '3',
                 '--lambda', '0.5', '--lambda', '1+0.5i', '--radial-nodes', '200', '--output', str(out)])
    assert code == 0
    document = json.loads(out.read_text())
    assert len(document['results']) == 2
    assert all(result['est_error'] < 1e-5 for result in document['results'])
