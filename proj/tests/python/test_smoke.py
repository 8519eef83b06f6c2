import math

import pytest

import admg

ZIGZAG = """
x1 -> x2
x2 -> x3
x3 -> x4
x4 -> x5
x1 <-> x3
x3 <-> x5
x2 <-> x4
"""


def test_graph_and_intrinsic_sets():
    g = admg.Graph(ZIGZAG)
    assert g.vertices == ["x1", "x2", "x3", "x4", "x5"]
    assert ("x1", "x3") in g.bidirected_edges
    assert admg.q_count(g) == 23
    sets = admg.intrinsic_sets(g)
    assert len(sets) == 9
    assert (["x1", "x3", "x5"], ["x1", "x3", "x5"], ["x2", "x4"]) in sets


def test_parse_errors_raise():
    with pytest.raises(admg.ParseError):
        admg.Graph("a -> b\nb -> a\n")


def test_bow_is_not_identifiable():
    g = admg.Graph("X -> Y\nX <-> Y\n")
    r = admg.identify(g, on=["Y"], do=["X"])
    assert not r["identified"]
    assert r["hedge"] == {"roots": ["Y"], "f": ["Y"], "f_prime": ["X", "Y"]}
    params = admg.model_for_graph(g, seed=1).q_params()
    assert admg.eid(params, on=["Y"], do=["X"], values={"X": 0}) is None


def test_eid_matches_oracle():
    g = admg.Graph(ZIGZAG)
    model = admg.model_for_graph(g, seed=3)
    params = model.q_params()
    out = admg.eid(params, on=["x5"], do=["x3"], values={"x3": 1})
    assert out["order"] == ["x4"]
    assert out["width"] == 1.0
    got = admg.query(params, on=["x5"], do={"x3": 1})
    want = model.effect(on=["x5"], do={"x3": 1})
    for (values, _, p), (values2, _, q) in zip(got, want):
        assert values == values2
        assert math.isclose(p, q, abs_tol=1e-9)


def test_round_trip_through_text():
    model = admg.random_model(seed=7, observed=5, latent=2)
    g = model.graph
    params = model.q_params()
    again = admg.Params(g, str(params))
    assert str(again) == str(params)
    total = sum(p for _, _, p in again.table())
    assert math.isclose(total, 1.0, abs_tol=1e-12)
    rebuilt = admg.Params.from_table(g, [p for _, _, p in params.table()])
    for (_, _, a), (_, _, b) in zip(rebuilt.table(), params.table()):
        assert math.isclose(a, b, abs_tol=1e-10)
