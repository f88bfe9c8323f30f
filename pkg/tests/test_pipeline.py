import numpy as np
import pytest

from angular_spectra.errors import ConfigError
from angular_spectra.models.simple import make_normal_form, make_rotation_example
from angular_spectra.pipeline import AnalysisConfig, analyze
from angular_spectra.system import SystemSpec


def test_config_validation():
    with pytest.raises(ConfigError):
        AnalysisConfig(0)
    with pytest.raises(ConfigError):
        AnalysisConfig(10, origin=-1)
    with pytest.raises(ConfigError):
        AnalysisConfig(10, method="bisect")
    with pytest.raises(ConfigError):
        AnalysisConfig(10, decades=-2)
    assert AnalysisConfig(10, s=[1]).s == (1,)


def test_horizon():
    rot = make_rotation_example()
    assert AnalysisConfig(100, origin=20).horizon(rot) == 141
    stored = SystemSpec.from_matrices(np.tile(np.eye(2), (50, 1, 1)))
    assert AnalysisConfig(10).horizon(stored) == 50
    with pytest.raises(ConfigError):
        analyze(stored, AnalysisConfig(45, origin=10))


def test_rotation_pipeline():
    res = analyze(make_rotation_example(np.pi / 4), AnalysisConfig(100, origin=50))
    assert res.bundle_dims == (1, 2)
    for s in (1, 2):
        np.testing.assert_allclose(res.sigma(s).points, [0.0, np.pi / 4], atol=1e-10)
    d = res.to_dict()
    assert d["bundle_dims"] == [1, 2] and set(d["spectra"]) == {"1", "2"}
    assert d["config"]["N"] == 100


def test_normal_form_pipeline_single_bundle():
    res = analyze(make_normal_form(0.9, 1.0), AnalysisConfig(2000, s=(1,)))
    assert res.bundle_dims == (2,)
    lo, hi = res.sigma(1).min(), res.sigma(1).max()
    assert lo <= 1.0 <= hi and hi - lo < 5e-3


def test_bad_dimension():
    with pytest.raises(ConfigError):
        analyze(make_rotation_example(), AnalysisConfig(10, s=(3,)))
