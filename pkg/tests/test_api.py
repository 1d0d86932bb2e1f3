import pytest
from fastapi.testclient import TestClient

from main import app


@pytest.fixture(scope='module')
def client():
    return TestClient(app)


def graph_side(objects, edges, parameters=('p',)):
    pairs = [[x, y] for x, y in edges] + [[y, x] for x, y in edges]
    return {
        'objects': objects,
        'parameters': list(parameters),
        'signature': [{'name': 'R', 'arity': 2}],
        'structures': {p: {'R': pairs} for p in parameters},
    }


def test_health(client):
    response = client.get('/health')
    assert response.status_code == 200
    assert response.json()['name'] == 'tpkit'


def test_qftp(client):
    response = client.post('/trees/qftp', json={'nodes': ['0.1', '0.1']})
    assert response.status_code == 200
    body = response.json()
    assert body['arity'] == 2
    assert body['eq'] == [[0, 1, 2]]


def test_qftp_unknown_language(client):
    response = client.post('/trees/qftp', json={'nodes': ['0'], 'lang': 'L9'})
    assert response.status_code == 400


def test_meet_closure(client):
    response = client.post('/trees/meet-closure', json={'nodes': ['0.0', '0.1', '1']})
    assert response.status_code == 200
    assert response.json() == ['e', '0', '0.0', '0.1', '1']


def test_build_operation(client):
    response = client.post('/trees/ops', json={'op': 'widening', 'params': {'k': 2, 'n': 1}, 'target': '2x2'})
    assert response.status_code == 200
    body = response.json()
    assert body['source'] == {'b': 4, 'd': 2}
    assert body['image']['1'] == ['2', '3']


def test_build_operation_bad_shape(client):
    response = client.post('/trees/ops', json={'op': 'widening', 'params': {'k': 2, 'n': 1}, 'target': '2by2'})
    assert response.status_code == 400


def test_canonical_and_verify(client):
    response = client.get('/patterns/canonical/SOP2', params={'shape': '2x3'})
    assert response.status_code == 200
    certificate = response.json()
    assert certificate['verdict']['ok']

    certificate['payload']['labels']['0.0'] = []
    response = client.post('/patterns/verify', json=certificate)
    assert response.status_code == 200
    verdict = response.json()['verdict']
    assert not verdict['ok']
    assert [v['rule'] for v in verdict['violations']] == ['path']
    assert verdict['violations'][0]['nodes'] == ['0.0']


def test_canonical_unknown_kind(client):
    assert client.get('/patterns/canonical/TP9', params={'shape': '2x2'}).status_code == 400


def test_search(client):
    request = {
        'spec': {'kind': 'SOP2', 'shape': '2x2'},
        'system': {'domain_size': 2, 'sets': {'a': [0], 'b': [1], 'c': [0, 1]}},
    }
    response = client.post('/patterns/search', json=request)
    assert response.status_code == 200
    body = response.json()
    assert body['status'] == 'found'
    assert body['assignment'] == [0, 1]
    assert body['certificate']['verdict']['ok']


def test_search_needs_shape(client):
    request = {'spec': {'kind': 'TP1'}, 'system': {'domain_size': 1, 'sets': {'a': [0]}}}
    assert client.post('/patterns/search', json=request).status_code == 400


def test_search_over_budget(client):
    request = {
        'spec': {'kind': 'TP1', 'shape': '2x3', 'prune': False, 'budget_assignments': 10},
        'system': {'domain_size': 4, 'sets': {'a': [0], 'b': [1], 'c': [2]}},
    }
    assert client.post('/patterns/search', json=request).status_code == 408


def test_list_transforms(client):
    response = client.get('/transforms/')
    assert response.status_code == 200
    assert 'sctk-to-cdt2-step' in response.json()


def test_transform(client):
    sct = client.get('/patterns/canonical/SCT', params={'shape': '2x5'}).json()
    response = client.post('/transforms/sctk-to-cdt2-step', json={'certificate': sct, 'params': {'m': 2}})
    assert response.status_code == 200
    body = response.json()
    assert body['kind'] == 'CDT_N'
    assert body['params'] == {'n': 2}
    assert body['provenance']['caseFired'] == 'elongate'


def test_transform_errors(client):
    sct = client.get('/patterns/canonical/SCT', params={'shape': '2x5'}).json()
    assert client.post('/transforms/no-such-transform', json={'certificate': sct}).status_code == 404
    assert client.post('/transforms/sctk-to-cdt2-step', json={'certificate': sct}).status_code == 400


def test_amalgamate(client):
    request = {
        'base': 'graph',
        'common': graph_side(['a'], []),
        'left': graph_side(['a', 'b'], [('a', 'b')]),
        'right': graph_side(['a', 'c'], [('a', 'c')]),
    }
    response = client.post('/pfc/amalgamate', json=request)
    assert response.status_code == 200
    body = response.json()
    assert body['structure']['objects'] == ['a', 'b', 'c']
    assert body['structure']['structures']['p']['R'] == [['a', 'b'], ['a', 'c'], ['b', 'a'], ['c', 'a']]
    assert body['right_objects'] == {'a': 'a', 'c': 'c'}


def test_amalgamate_rejects_non_members(client):
    left = graph_side(['a', 'b'], [])
    left['structures']['p']['R'] = [['b', 'b']]
    request = {
        'base': 'graph',
        'common': graph_side(['a'], []),
        'left': left,
        'right': graph_side(['a', 'c'], []),
    }
    assert client.post('/pfc/amalgamate', json=request).status_code == 422


def test_cover(client):
    request = {
        'structure': {'universe': ['a', 'b'], 'signature': [{'name': 'R', 'arity': 2}], 'relations': {'R': [['a', 'b']]}},
        'class_size': 2,
    }
    response = client.post('/pfc/cover', json=request)
    assert response.status_code == 200
    assert response.json()['universe'] == ['a/0', 'a/1', 'b/0', 'b/1']

    request['relation'] = 'R'
    assert client.post('/pfc/cover', json=request).status_code == 400


def test_tp2_demo(client):
    response = client.get('/pfc/tp2-demo', params={'rows': 2, 'cols': 2})
    assert response.status_code == 200
    body = response.json()
    assert body['certificate']['kind'] == 'TP2'
    assert body['certificate']['verdict']['ok']
    assert len(body['structure']['objects']) == 6
