import math

from tensortom.selftest import CheckResult, run_selftest


def test_check_result_pass_logic():
    assert CheckResult("a", 1e-9, 1e-8).passed
    assert not CheckResult("a", 2e-8, 1e-8).passed
    assert not CheckResult("a", math.nan, 1e-8).passed
    assert CheckResult("a", 0.0, 1e-8).line().startswith("PASS")


def test_selftest_is_deterministic_and_passes():
    a = run_selftest(mu=1.0, seed=3)
    b = run_selftest(mu=1.0, seed=3)
    assert len(a) == 8 and all(r.passed for r in a)
    assert [r.residual for r in a] == [r.residual for r in b]


def test_corrupted_alpha_fails_only_the_identity_check():
    failed = [r.name for r in run_selftest(corrupt_alpha=True) if not r.passed]
    assert failed == ["e^G o e^-G identity"]
