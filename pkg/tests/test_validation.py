import numpy as np

from angular_spectra.normalform import psi
from angular_spectra.validation import SuiteResult, psi_identities, run_all


def test_all_suites_pass():
    results = run_all()
    assert len(results) == 6
    for r in results:
        assert r.passed, r.line()
        assert r.line().startswith("PASS")


def test_injected_psi_fault_is_caught():
    r = psi_identities(lambda rho, t: psi(rho, t) + 1e-6 * np.sin(t), n=2000)
    assert not r.passed and r.worst > 1e-8
    assert r.line().startswith("FAIL")


def test_suite_result_line():
    assert "n=3" in SuiteResult("x", True, 3, 0.5).line()
