import json
import math

import numpy as np
import pytest

from momentmatch import specimens
from momentmatch.core import Variant
from momentmatch.errors import ParseError, SchemaError
from momentmatch.inference import log_partition
from momentmatch.io import dumps, fit_document, parse_dataset, parse_model, serialize_model, write_fit_result
from momentmatch.learning import fit
from momentmatch.specimens import rows

from .conftest import DATA

BERNOULLI_DOC = {
    "variables": [{"name": "x", "role": "obs", "symbols": ["0", "1"]}],
    "stat_dim": 1,
    "statistics": [{"assign": {"x": "0"}, "t": [0]}, {"assign": {"x": "1"}, "t": [1]}],
}


def test_parse_minimal_bernoulli():
    spec = parse_model(json.dumps(BERNOULLI_DOC))
    assert spec.variant() is Variant.PLAIN
    np.testing.assert_array_equal(spec.T, [[0.0], [1.0]])
    np.testing.assert_array_equal(spec.log_h, [0.0, 0.0])


def test_parse_missing_configuration():
    doc = dict(BERNOULLI_DOC, statistics=BERNOULLI_DOC["statistics"][:1])
    with pytest.raises(SchemaError, match=r"missing configuration \{x=1\}"):
        parse_model(json.dumps(doc))


def test_parse_unknown_role():
    doc = json.loads(json.dumps(BERNOULLI_DOC))
    doc["variables"][0]["role"] = "hidden"
    with pytest.raises(SchemaError, match=r"variables\[0\]\.role"):
        parse_model(json.dumps(doc))


@pytest.mark.parametrize(
    "mutate, where",
    [
        (lambda d: d["statistics"].append({"assign": {"x": "1"}, "t": [2]}), r"statistics\[2\]: duplicate"),
        (lambda d: d["statistics"][1].update(t=[1, 2]), r"statistics\[1\]\.t"),
        (lambda d: d["statistics"][1].update(t=["a"]), r"statistics\[1\]\.t\[0\]"),
        (lambda d: d["statistics"][1]["assign"].update(x="7"), r"statistics\[1\]\.assign\.x"),
        (lambda d: d["variables"][0].update(symbols=[]), r"variables\[0\]\.symbols"),
        (lambda d: d["variables"][0].update(symbols=["a,b", "c"]), r"variables\[0\]\.symbols\[0\]"),
        (lambda d: d.update(stat_dim=0), r"stat_dim"),
        (lambda d: d.pop("statistics"), r"missing key 'statistics'"),
        (lambda d: d.update(extra=1), r"unknown key"),
        (lambda d: d.update(log_h=[{"assign": {"x": "0"}, "value": "inf"}]), r"log_h\[0\]\.value"),
        (lambda d: d.update(log_h=[{"assign": {"x": "0"}, "value": "-inf"},
                                   {"assign": {"x": "1"}, "value": "-inf"}]), r"forbidden"),
        (lambda d: d["variables"][0].update(role="hid"), r"observed"),
    ],
)
def test_parse_model_errors_name_location(mutate, where):
    doc = json.loads(json.dumps(BERNOULLI_DOC))
    mutate(doc)
    with pytest.raises(SchemaError, match=where):
        parse_model(json.dumps(doc))


def test_parse_model_syntax_error():
    with pytest.raises(ParseError, match="line 1"):
        parse_model("{not json")


def test_parse_log_h_sentinel():
    doc = dict(BERNOULLI_DOC, log_h=[{"assign": {"x": "0"}, "value": "-inf"}])
    spec = parse_model(json.dumps(doc))
    assert spec.log_h[0] == -math.inf
    assert log_partition(spec, {}, [0.3]) == 0.3


@pytest.mark.parametrize("factory", [specimens.bernoulli, specimens.logistic, specimens.mixture, specimens.cond_mixture])
def test_model_roundtrip_exact(factory):
    spec = factory()
    again = parse_model(serialize_model(spec))
    np.testing.assert_array_equal(again.T, spec.T)
    np.testing.assert_array_equal(again.log_h, spec.log_h)
    rng = np.random.default_rng(0)
    for _ in range(10):
        theta = rng.normal(size=spec.stat_dim)
        assert log_partition(again, {}, theta) == log_partition(spec, {}, theta)


def test_model_roundtrip_random_tables():
    rng = np.random.default_rng(11)
    for variant in Variant:
        spec = specimens.random_family(rng, variant)
        lh = np.array(spec.log_h)
        lh[0] = -np.inf
        lh[1] = rng.normal()
        spec = type(spec)(spec.variables, spec.stat_dim, spec.T, lh, name=spec.name)
        again = parse_model(serialize_model(spec))
        np.testing.assert_array_equal(again.T, spec.T)
        np.testing.assert_array_equal(again.log_h, spec.log_h)


def test_shipped_models_parse():
    kinds = {p.stem: parse_model(p.read_text()).variant() for p in DATA.glob("*.json")}
    assert kinds == {
        "bernoulli": Variant.PLAIN,
        "logistic": Variant.CONDITIONAL,
        "mixture": Variant.HIDDEN,
        "cond_mixture": Variant.CONDITIONAL_HIDDEN,
    }


# -- datasets -----------------------------------------------------------


def test_parse_dataset(bernoulli):
    data = parse_dataset("x\n1\n1\n1\n0\n", bernoulli)
    assert data.n == 4
    assert [r["x"] for r in data.rows] == [1, 1, 1, 0]


def test_parse_dataset_header_any_order(logistic):
    data = parse_dataset("y,x\n1,0\n0,1\n", logistic)
    assert data.rows == ({"y": 1, "x": 0}, {"y": 0, "x": 1})


def test_parse_dataset_hidden_header(mixture):
    with pytest.raises(SchemaError, match="line 1.*hidden"):
        parse_dataset("x,u\n1,0\n", mixture)


def test_parse_dataset_unknown_label(bernoulli):
    with pytest.raises(ValueError, match="line 3"):
        parse_dataset("x\n1\n2\n", bernoulli)


@pytest.mark.parametrize(
    "text, where",
    [("", "line 1"), ("x\n", "line 1"), ("y\n1\n", "line 1"), ("x\n1,0\n", "line 2"), ("x,x\n1,1\n", "line 1")],
)
def test_parse_dataset_errors(bernoulli, text, where):
    with pytest.raises(SchemaError, match=where):
        parse_dataset(text, bernoulli)


# -- result documents ---------------------------------------------------


def test_fit_result_roundtrip_bits(bernoulli):
    res = fit(bernoulli, rows(bernoulli, 1, 1, 1, 0))
    doc = json.loads(write_fit_result(res))
    assert doc["status"] == "converged"
    assert float(doc["theta_hat"][0]) == res.theta_hat[0]
    assert float(doc["loglik_final"]) == res.loglik_final
    assert doc["iterations"] == res.iterations
    assert set(doc) >= {"theta_hat", "status", "grad_inf_final", "mm_residual_inf", "loglik_final", "iterations"}


def test_fit_result_diverging(bernoulli):
    doc = json.loads(write_fit_result(fit(bernoulli, rows(bernoulli, 1, 1, 1))))
    assert doc["status"] == "diverging"


def test_fit_result_moment_shapes(cond_mixture):
    res = fit(cond_mixture, rows(cond_mixture, (0, 0), (0, 1), (1, 1), (1, 0), (1, 1)))
    doc = fit_document(res)
    assert len(doc["moment_report"]["data_side"]) == len(doc["moment_report"]["model_side"]) == cond_mixture.stat_dim


def test_dumps_seventeen_digits():
    x = 0.1 + 0.2
    text = dumps({"v": [x, 1 / 3, -math.inf]})
    assert "0.30000000000000004" in text
    assert '"-inf"' in text
    assert float(json.loads(text)["v"][1]) == 1 / 3
