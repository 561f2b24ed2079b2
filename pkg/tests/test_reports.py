import json

from mnvbench.numerics import decay_probe, integrate_U2, ray_limit_probe
from mnvbench.reports import ProbeSeries, QuadratureReport, VerificationReport, dumps


def test_verification_report_roundtrip():
    r = VerificationReport("pde", "pass", 12, 340, 1.5, {"denominator_degree": 30})
    d = json.loads(dumps(r.to_dict()))
    assert d["denominator_degree"] == 30
    assert VerificationReport.from_dict(d) == r
    assert r.passed


def test_verification_report_is_flat():
    r = VerificationReport("singularity", "pass", 6, 10, 2.0, {"grid_min_Q": 1.25, "Q_vanishes_at_origin": True})
    d = r.to_dict()
    assert all(not isinstance(v, (dict, list)) for v in d.values())


def test_timings_can_be_suppressed():
    r = VerificationReport("dbar", "pass", 1, 1, 3.25)
    assert r.to_dict(timings=False)["millis"] is None


def test_quadrature_report_roundtrip():
    rep = integrate_U2(1.0, 1e-6)
    assert QuadratureReport.from_dict(json.loads(dumps(rep.to_dict()))) == rep


def test_probe_roundtrip():
    for p in (ray_limit_probe(0.3), decay_probe(1.1, 1.0), decay_probe(1.1, 0.0, "V")):
        d = json.loads(dumps(p.to_dict()))
        assert ProbeSeries.from_dict(d) == p
        assert d["deviation"] == p.deviation
