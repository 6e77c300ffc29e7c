from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realstrata.flow import (
    FlowError,
    FlowOptions,
    basin_survey,
    check_hessian_at_limits,
    classify_point,
    closure_audit,
    flow_to_limit,
    match_label,
)
from realstrata.lie_core import preset
from realstrata.proj_geom import ProjPoint, eval_gradient_map, random_point


def test_critical_seed_gives_single_sample(specs):
    tr = flow_to_limit(specs["sl2r"], ProjPoint([1, 0]))
    assert tr.converged and len(tr) == 1 and tr.step_count == 0


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1), st.sampled_from(["sl2r", "sl3r", "sl2c"]))
def test_eta_nonincreasing_and_terminal_critical(seed, name):
    spec = preset(name)
    tr = flow_to_limit(spec, random_point(spec.n, np.random.default_rng(seed)))
    assert tr.converged
    assert (np.diff(tr.etas) <= 1e-9).all()
    assert tr.terminal_eval.critical
    # recorded samples stay on the unit sphere
    assert np.allclose(np.linalg.norm(tr.points, axis=1), 1.0)


def test_sl2r_complex_seed_flows_to_zero_fiber(specs, candidates):
    label, tr = classify_point(specs["sl2r"], ProjPoint([1, 0.3 + 0.1j]), candidates["sl2r"])
    assert label.index == 0 and tr.terminal_eval.eta < 1e-15
    # the zero fibre is {[1 : i], [1 : -i]}
    assert tr.terminal.same_as(ProjPoint([1, 1j]), 1e-6) or tr.terminal.same_as(ProjPoint([1, -1j]), 1e-6)


def test_real_flow_rejects_complex_seed(specs):
    with pytest.raises(FlowError):
        flow_to_limit(specs["sl3r"], ProjPoint([1, 1j, 0.5]), real=True)
    with pytest.raises(FlowError):
        flow_to_limit(specs["sl2c"], ProjPoint([1, 0.5]), real=True)


def test_real_flow_stays_real(specs):
    tr = flow_to_limit(specs["sl3r"], ProjPoint([1.0, 0.4, -0.7]), real=True)
    assert tr.converged and np.abs(tr.points.imag).max() == 0


def test_budget_exhaustion_is_reported(specs):
    tr = flow_to_limit(specs["sl3r"], ProjPoint([1, 0.3 + 0.2j, 0.5j]), FlowOptions(max_steps=3))
    assert not tr.converged and tr.step_count == 3


def test_labels(specs, candidates):
    spec, c = specs["sl3r"], candidates["sl3r"]
    lab, _ = classify_point(spec, ProjPoint([1, 0.3 + 0.2j, 0.5j]), c)
    assert lab.index == 1  # the edge midpoint diag(1, 1, -2) / 6
    lab, _ = classify_point(spec, ProjPoint([1, 0.3, 0.5]), c)
    assert lab.index == 2  # the vertex diag(2, -1, -1) / 3


def test_match_label_tolerance(specs, candidates):
    spec, c = specs["sl2r"], candidates["sl2r"]
    idx, _, _ = match_label(spec, np.diag([0.5, -0.5]) + 1e-7, c)
    assert idx == 1
    idx, _, d = match_label(spec, np.diag([0.3, -0.3]), c)
    assert idx is None and d > 0.1


def test_survey_is_deterministic_and_parallel_safe(specs, candidates):
    a = basin_survey(specs["sl2r"], 12, 99, candidates["sl2r"], real_seeds=4)
    b = basin_survey(specs["sl2r"], 12, 99, candidates["sl2r"], real_seeds=4, workers=2)
    assert [r.label.key for r in a.records] == [r.label.key for r in b.records]
    assert all(r1.point == r2.point for r1, r2 in zip(a.records, b.records))
    assert a.counts("real") == {"1": 4}
    assert abs(sum(a.percentages().values()) - 100) < 1e-9


def test_closure_audit_sl2r(specs, candidates):
    rep = basin_survey(specs["sl2r"], 4, 3, candidates["sl2r"], real_seeds=4, audit_points=4, audit_neighbors=4)
    a = rep.audit
    assert a.ok
    # every real point sees the open stratum at both radii
    assert len(a.adjacencies) == 4 and all(e[1:] == ("1", "0") for e in a.adjacencies)


def test_closure_audit_flags_reversed_norms(specs, candidates):
    """With norms swapped the real points now border a larger stratum."""
    spec, c = specs["sl2r"], candidates["sl2r"]
    swapped = [replace(c[0], norm=c[1].norm), replace(c[1], norm=c[0].norm)]
    rep = basin_survey(spec, 0, 3, c, real_seeds=3)
    a = closure_audit(spec, rep.records, swapped, n_neighbors=4)
    assert len(a.violations) == 3


def test_hessian_signature_sl2r(specs):
    tr = flow_to_limit(specs["sl2r"], ProjPoint([np.cos(0.4), np.sin(0.4)]))
    h = check_hessian_at_limits(specs["sl2r"], tr)
    assert h.passed and h.codimension == 1 and h.negative_count == 1


def test_hessian_signature_sl3r_real_locus(specs):
    tr = flow_to_limit(specs["sl3r"], ProjPoint([1.0, 0.4, -0.7]))
    h = check_hessian_at_limits(specs["sl3r"], tr)
    assert h.passed and h.codimension == 2 and h.negative_count == 2


def test_hessian_signature_open_strata(specs):
    for name, z in (("sl2r", [1, 0.2 + 0.5j]), ("sl3r", [1, 0.3 + 0.2j, 0.5j])):
        tr = flow_to_limit(specs[name], ProjPoint(z))
        h = check_hessian_at_limits(specs[name], tr)
        assert h.passed and h.codimension == 0 and h.negative_count == 0


def test_terminal_eval_consistent(specs):
    tr = flow_to_limit(specs["sl2c"], ProjPoint([1, 0.2j]))
    ev = eval_gradient_map(specs["sl2c"], tr.terminal)
    assert np.isclose(ev.eta, tr.terminal_eval.eta)
