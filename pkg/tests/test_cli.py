import json

import pytest
from click.testing import CliRunner

from cli import EXIT_FALSE, EXIT_OK, EXIT_UNKNOWN, EXIT_USAGE, cli


@pytest.fixture
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(cli, list(args))


def write_json(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_qftp(runner):
    result = run(runner, '--json', 'qftp', '0.1', '0.1')
    assert result.exit_code == EXIT_OK
    payload = json.loads(result.stdout)
    assert payload['lang'] == 'L0'
    assert payload['arity'] == 2
    assert payload['eq'] == [[0, 1, 2]]


def test_qftp_bad_node(runner):
    result = run(runner, 'qftp', 'x.y')
    assert result.exit_code == EXIT_USAGE


def test_op_widening(runner):
    result = run(runner, '--json', 'op', 'widening', '--target', '2x2', '--param', 'k=2', '--param', 'n=1')
    assert result.exit_code == EXIT_OK
    payload = json.loads(result.stdout)
    assert payload['source'] == {'b': 4, 'd': 2}
    assert payload['image']['1'] == ['2', '3']


def test_canonical_then_verify(runner, tmp_path):
    out = tmp_path / 'sop2.json'
    result = run(runner, 'canonical', '--kind', 'SOP2', '--shape', '2x3', '--out', str(out))
    assert result.exit_code == EXIT_OK
    assert json.loads(out.read_text())['verdict']['ok']

    result = run(runner, 'verify', '--in', str(out))
    assert result.exit_code == EXIT_OK
    assert 'verified' in result.stdout


def test_verify_bare_payload_fails(runner, tmp_path):
    tree = write_json(tmp_path / 'tree.json', {
        'branching': 2, 'depth': 2, 'domain_size': 1, 'labels': {'0': [0], '1': [0]},
    })
    result = run(runner, 'verify', '--kind', 'TP1', '--tree', tree)
    assert result.exit_code == EXIT_FALSE
    assert 'NOT verified' in result.stdout


def test_verify_bare_payload_needs_kind(runner, tmp_path):
    tree = write_json(tmp_path / 'tree.json', {
        'branching': 2, 'depth': 2, 'domain_size': 1, 'labels': {'0': [0], '1': [0]},
    })
    assert run(runner, 'verify', '--in', tree).exit_code == EXIT_USAGE


def test_unknown_kind_is_usage_error(runner):
    result = run(runner, 'canonical', '--kind', 'TP9', '--shape', '2x2')
    assert result.exit_code == EXIT_USAGE


def test_search_found(runner, tmp_path):
    system = write_json(tmp_path / 'system.json', {'domain_size': 2, 'sets': {'a': [0], 'b': [1], 'c': [0, 1]}})
    result = run(runner, '--json', 'search', '--kind', 'SOP2', '--shape', '2x2', '--system', system)
    assert result.exit_code == EXIT_OK
    payload = json.loads(result.stdout)
    assert payload['status'] == 'found'
    assert payload['assignment'] == [0, 1]


def test_search_none(runner, tmp_path):
    system = write_json(tmp_path / 'system.json', {'domain_size': 2, 'sets': {'only': [0, 1]}})
    result = run(runner, 'search', '--kind', 'TP1', '--shape', '2x2', '--system', system)
    assert result.exit_code == EXIT_FALSE
    assert 'no witness' in result.stdout


def test_search_over_budget(runner, tmp_path):
    system = write_json(tmp_path / 'system.json', {'domain_size': 4, 'sets': {'a': [0], 'b': [1], 'c': [2]}})
    result = run(runner, '--budget', '10', 'search', '--kind', 'TP1', '--shape', '2x3', '--system', system, '--no-prune')
    assert result.exit_code == EXIT_UNKNOWN


def test_search_needs_shape(runner, tmp_path):
    system = write_json(tmp_path / 'system.json', {'domain_size': 1, 'sets': {'a': [0]}})
    assert run(runner, 'search', '--kind', 'TP1', '--system', system).exit_code == EXIT_USAGE


def test_transform(runner, tmp_path):
    sct = tmp_path / 'sct.json'
    assert run(runner, 'canonical', '--kind', 'SCT', '--shape', '2x5', '--out', str(sct)).exit_code == EXIT_OK
    out = tmp_path / 'cdt.json'
    result = run(runner, 'transform', '--name', 'sctk-to-cdt2-step', '--in', str(sct), '--param', 'm=2',
                 '--out', str(out))
    assert result.exit_code == EXIT_OK
    document = json.loads(out.read_text())
    assert document['kind'] == 'CDT_N'
    assert document['provenance']['caseFired'] == 'elongate'
    assert document['verdict']['ok']


def test_transform_missing_param(runner, tmp_path):
    sct = tmp_path / 'sct.json'
    run(runner, 'canonical', '--kind', 'SCT', '--shape', '2x5', '--out', str(sct))
    result = run(runner, 'transform', '--name', 'sctk-to-cdt2-step', '--in', str(sct))
    assert result.exit_code == EXIT_USAGE


def test_fuzz_index_suite(runner):
    result = run(runner, '--json', 'fuzz', '--suite', 'index', '--iterations', '1')
    assert result.exit_code == EXIT_OK
    assert json.loads(result.stdout)[0]['ok']


def test_pfc_check(runner, tmp_path):
    structure = write_json(tmp_path / 'm.json', {
        'objects': ['a', 'b'],
        'parameters': ['p'],
        'signature': [{'name': 'R', 'arity': 2}],
        'structures': {'p': {'R': [['a', 'b'], ['b', 'a']]}},
    })
    assert run(runner, 'pfc', 'check', '--base', 'graph', '--in', structure).exit_code == EXIT_OK
    assert run(runner, 'pfc', 'check', '--base', 'equivalence', '--in', structure).exit_code == EXIT_FALSE
    assert run(runner, 'pfc', 'check', '--base', 'posets', '--in', structure).exit_code == EXIT_USAGE


def test_pfc_cover(runner, tmp_path):
    m = write_json(tmp_path / 'm.json', {
        'universe': ['a', 'b'],
        'signature': [{'name': 'R', 'arity': 2}],
        'relations': {'R': [['a', 'b']]},
    })
    result = run(runner, '--json', 'pfc', 'cover', '--in', m, '--class-size', '2')
    assert result.exit_code == EXIT_OK
    payload = json.loads(result.stdout)
    assert payload['universe'] == ['a/0', 'a/1', 'b/0', 'b/1']
    assert {'name': 'E', 'arity': 2} in payload['signature']


def test_pfc_tp2_demo(runner):
    result = run(runner, '--json', 'pfc', 'tp2-demo', '--rows', '2', '--cols', '2')
    assert result.exit_code == EXIT_OK
    payload = json.loads(result.stdout)
    assert payload['certificate']['kind'] == 'TP2'
    assert payload['certificate']['verdict']['ok']
    assert len(payload['structure']['objects']) == 2 + 2 ** 2


def test_pfc_pasting1_fragment_needs_every_key(runner, tmp_path):
    side = {'universe': ['a'], 'signature': [{'name': 'R', 'arity': 2}], 'relations': {'R': []}}
    data = write_json(tmp_path / 'paste.json', {
        'parameters': ['p'],
        'shared': ['a'],
        'fragments': [{'c': side, 'd': side}],
    })
    result = run(runner, 'pfc', 'pasting1', '--in', data)
    assert result.exit_code == EXIT_USAGE
    assert "Missing keys ['new']" in result.output

    data = write_json(tmp_path / 'paste.json', {'parameters': ['p'], 'fragments': [['a']]})
    assert run(runner, 'pfc', 'pasting1', '--in', data).exit_code == EXIT_USAGE
