import pytest

from operad_forge import verify


def test_profiles():
    assert verify.PROFILES["default"] == {"arity_cap": 4, "weight_cap": 3}
    assert verify.PROFILES["deep"]["arity_cap"] == 5


def test_config_rejects_small_caps():
    with pytest.raises(ValueError):
        verify.Config(arity_cap=1)
    with pytest.raises(ValueError):
        verify.Config(weight_cap=1)


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        verify.run_suite("nope", verify.Config())


def test_every_suite_registered():
    assert set(verify.SUITES) == {"signs", "operad-axioms", "main-theorem", "manin-square", "htt-equality",
                                  "mc-equivalence", "bijections"}


def test_operad_axioms_suite():
    results = verify.run_suite("operad-axioms", verify.Config())
    assert all(r.passed for r in results), [(r.name, r.detail) for r in results if not r.passed]


def test_main_theorem_suite_small_sample():
    results = verify.run_suite("main-theorem", verify.Config(samples=5))
    assert all(r.passed for r in results), [(r.name, r.detail) for r in results if not r.passed]


def test_report_shape():
    rep = verify.report(verify.run_suite("signs", verify.Config()))
    assert rep["passed"] is True
    assert {"suite", "name", "passed", "seconds", "detail", "status"} <= set(rep["checks"][0])


def test_skip_does_not_fail_report():
    r = verify.CheckResult("s", "n", None, 0.0)
    assert r.status == "SKIP"
    assert verify.report([r])["passed"] is True


def test_complete_cobar_and_deformation_checks():
    cfg = verify.Config()
    assert verify.check_complete_cobar(cfg)[0]
    assert verify.check_deformation_complex(cfg)[0]
