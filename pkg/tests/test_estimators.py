import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from lorentzdod.estimators import LorentzChart, ThickeningDomain
from lorentzdod.errors import GeometryError


def test_chart_params_and_clone():
    est = LorentzChart(n=4)
    assert est.get_params() == {"n": 4}
    assert clone(est).get_params() == {"n": 4}
    assert ThickeningDomain(threshold=0.1).get_params() == {"n": None, "threshold": 0.1, "strict": True}


def test_chart_round_trip(rng):
    X = rng.uniform(-5, 5, (50, 3))
    est = LorentzChart().fit(X)
    Y = est.transform(X)
    assert Y.shape == (50, 5)
    assert np.allclose(np.linalg.norm(Y, axis=1), 1.0)
    assert np.allclose(est.inverse_transform(Y), X, atol=1e-10)
    assert np.allclose(est.fit_transform(X), Y)


def test_chart_validation(rng):
    with pytest.raises(NotFittedError):
        LorentzChart().transform(np.zeros((1, 3)))
    est = LorentzChart().fit(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        est.transform(np.zeros((1, 4)))
    with pytest.raises(ValueError):
        LorentzChart(n=4).fit(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        est.transform([[np.nan, 0.0, 0.0]])


def test_domain_predict(desk, desk_sample):
    est = ThickeningDomain().fit(desk_sample.reps)
    pt = est.find_point()
    on = -est.hyperplanes_.alpha[0] * np.array([1.0, 1.0, -1.0]) * est.hyperplanes_.w[0]
    X = np.stack([pt.v, on])
    assert est.predict(X).tolist() == [True, False]
    assert est.decision_function(X)[0] == pytest.approx(pt.margin)
    via_group = ThickeningDomain().fit_group(desk, depth=6)
    assert np.allclose(via_group.decision_function(X), est.decision_function(X))


def test_domain_strict(frame3):
    X = np.array([[1.0, 0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0, 1.0]])
    with pytest.raises(GeometryError):
        ThickeningDomain().fit(X)
    est = ThickeningDomain(strict=False).fit(X)
    assert len(est.hyperplanes_) == 1


def test_domain_not_fitted():
    with pytest.raises(NotFittedError):
        ThickeningDomain().predict(np.zeros((1, 3)))
