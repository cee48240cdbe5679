import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mbs_lab import CloudFringeModel, DomainError, FringeFitter, cloud_intensity_perp_closed


def test_get_params_and_clone():
    model = CloudFringeModel(s0=3.0, tau=1.5)
    params = model.get_params()
    assert params["s0"] == 3.0 and params["tau"] == 1.5
    twin = clone(model)
    assert twin.get_params() == params and twin is not model
    model.set_params(method="closed_perp")
    assert model.method == "closed_perp"


def test_predict_matches_closed_form():
    model = CloudFringeModel(method="closed_perp", tau=2.0).fit()
    theta = model.geometry_.theta0 + np.linspace(-2e-3, 2e-3, 61)
    want = cloud_intensity_perp_closed(theta, 2.0, model.geometry_, model.cloud_, 5.0)
    np.testing.assert_allclose(model.predict(theta), want, rtol=1e-14)
    # quadrature backend agrees; unsorted input comes back in input order
    quad = CloudFringeModel(tau=2.0).fit()
    shuffled = np.random.default_rng(0).permutation(theta)
    got = quad.predict(shuffled.reshape(-1, 1))
    np.testing.assert_allclose(got, cloud_intensity_perp_closed(shuffled, 2.0, model.geometry_,
                                                                model.cloud_, 5.0), rtol=1e-6)


def test_predict_requires_fit():
    with pytest.raises(NotFittedError):
        CloudFringeModel().predict([0.075])


def test_fit_validates():
    with pytest.raises(DomainError):
        CloudFringeModel(method="bogus").fit()
    with pytest.raises(DomainError):
        CloudFringeModel(s0=-1).fit()


def test_fringe_fitter_estimator():
    theta0 = math.radians(4.3)
    model = CloudFringeModel(method="closed_perp").fit()
    theta = theta0 + np.linspace(-6e-3, 6e-3, 301)
    y = model.predict(theta)
    fitter = FringeFitter(theta0=theta0).fit(theta, y)
    assert fitter.contrast_ == pytest.approx(0.5, abs=1e-6)
    assert fitter.score(theta, y) > 1 - 1e-10
    assert fitter.s_theta_ == pytest.approx(model.geometry_.envelope_width(model.cloud_.s_z), rel=0.01)
    assert clone(fitter).get_params()["theta0"] == theta0
    with pytest.raises(NotFittedError):
        FringeFitter().predict(theta)
