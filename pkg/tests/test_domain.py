import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lorentzdod.chart import Frame, chart_to_flag, chart_vector
from lorentzdod.domain import (
    AuditReport,
    NullHyperplaneSet,
    ProximalToL,
    audit_table,
    ball_returners,
    domain_margin,
    equivariance_audit,
    find_domain_point,
    properness_audit,
    thickening_in_chart,
    timelike_directions,
)
from lorentzdod.errors import GeometryError, SearchFailed
from lorentzdod.geometry import IsotropicLine, make_space, quadric_margin
from lorentzdod.groups import AffineIsometry, SchottkyGroup, count_words, scale_group
from lorentzdod.limitset import LimitSample, limit_sample

W = IsotropicLine([0.0, 0.0, 1.0, 0.0, 1.0])


def test_thickening_example(frame3):
    hset = thickening_in_chart(frame3, LimitSample.from_lines([W]))
    assert len(hset) == 1
    assert np.allclose(hset.w[0], np.array([1.0, 0.0, 1.0]) / np.sqrt(2))
    assert hset.alpha[0] == 0.0
    # B'(v, w) = (v0 - v2)/sqrt 2
    assert domain_margin(hset, [1.0, 0.0, 1.0]) == 0.0
    assert domain_margin(hset, [0.0, 0.0, 1.0]) == pytest.approx((1 / np.sqrt(2)) / 2)


def test_thickening_rejects_off_quadric_and_l(frame3):
    with pytest.raises(GeometryError, match="Q_L"):
        thickening_in_chart(frame3, LimitSample.from_lines([frame3.L_hat]))
    with pytest.raises(ProximalToL):
        thickening_in_chart(frame3, LimitSample.from_lines([frame3.L, W]))
    hset = thickening_in_chart(frame3, LimitSample.from_lines([frame3.L, W]), strict=False)
    assert len(hset) == 1 and hset.rejected == 1


def test_chart_and_quadric_agree(frame3, desk_sample, rng):
    """Zero set of the linear model equals incidence of h(v) with Q_λ."""
    hset = thickening_in_chart(frame3, desk_sample)
    g = frame3.space.gram
    raw_w = desk_sample.reps[:, 2:]
    scale = np.einsum("ij,ij->i", hset.w, raw_w) / np.einsum("ij,ij->i", raw_w, raw_w)
    for _ in range(50):
        v = rng.uniform(-5, 5, 3)
        direct = desk_sample.reps @ g @ chart_vector(frame3, v)
        assert np.allclose(hset.values(v), scale * direct, atol=1e-12)


def test_point_on_hyperplane_is_incident(frame3, desk_sample):
    hset = thickening_in_chart(frame3, desk_sample)
    w, a = hset.w[0], hset.alpha[0]
    # v = -α w_dual solves B'(v, w) = -α for any q'-dual vector of w
    dual = np.array([w[0], w[1], -w[2]]) / (w @ w)
    v = -a * dual
    assert abs(hset.values(v)[0]) < 1e-12
    line = IsotropicLine(hset.sources[0])
    assert quadric_margin(frame3.space, chart_to_flag(frame3, v), line) < 1e-9


@settings(max_examples=100)
@given(arrays(float, 3, elements=st.floats(-50, 50)))
def test_margin_is_nonnegative_and_scale_free(v):
    frame = Frame.standard(make_space(3))
    hset = thickening_in_chart(frame, LimitSample.from_lines([W, IsotropicLine([1.0, 0.0, 0.0, 1.0, 1.0])]))
    m = domain_margin(hset, v)
    assert 0.0 <= m <= np.linalg.norm(hset.values(v), np.inf)
    assert np.isclose(domain_margin(hset, v[None])[0], m)


def test_margin_empty_set(frame3):
    empty = NullHyperplaneSet(np.zeros((0, 3)), np.zeros(0), frame3.gram_prime, np.zeros((0, 5)))
    assert domain_margin(empty, np.zeros(3)) == np.inf
    with pytest.raises(ValueError):
        find_domain_point(frame3, empty)


def dense_scan(hset, box=20.0, m=41):
    g = np.linspace(-box, box, m)
    pts = np.stack(np.meshgrid(g, g, g), -1).reshape(-1, 3)
    return float(domain_margin(hset, pts).max())


def test_find_domain_point_beats_dense_scan(frame3, desk_sample):
    hset = thickening_in_chart(frame3, desk_sample)
    pt = find_domain_point(frame3, hset)
    assert pt.margin > 0
    assert pt.margin == pytest.approx(domain_margin(hset, pt.v))
    assert pt.margin >= dense_scan(hset)
    # independent check on the quadric side: h(v) is opposite every sample line
    m = chart_to_flag(frame3, pt.v)
    assert min(quadric_margin(frame3.space, m, p) for p in desk_sample.points) > 1e-9


def test_find_domain_point_simple_example(frame3):
    hset = thickening_in_chart(frame3, LimitSample.from_lines([W]))
    pt = find_domain_point(frame3, hset)
    assert pt.margin > 0.1


def test_search_failure_carries_diagnostics(frame3, desk_sample):
    hset = thickening_in_chart(frame3, desk_sample)
    with pytest.raises(SearchFailed) as err:
        find_domain_point(frame3, hset, min_margin=10.0)
    assert err.value.best_point is not None
    assert err.value.densest_direction.shape == (3,)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_timelike_directions(n):
    dirs = timelike_directions(n, 20)
    assert dirs.shape == (40, n)
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
    q = (dirs[:, :-1] ** 2).sum(1) - dirs[:, -1] ** 2
    assert np.all(q < 0)
    assert np.allclose(dirs[0], np.eye(n)[-1])


def test_ball_returners_examples():
    a = np.stack([np.eye(2), np.eye(2)])
    b = np.array([[0.0, 0.0], [10.0, 0.0]])
    mask = ball_returners(a, b, np.zeros(2), 1.0)
    assert mask.tolist() == [True, False]
    # touching at the boundary counts as a return
    assert ball_returners(a[:1], np.array([[2.0, 0.0]]), np.zeros(2), 1.0).tolist() == [True]


def test_audit_linear_group_fixing_center(frame3, desk_linear):
    """Every word fixes the origin, so nothing stabilizes."""
    rep = properness_audit(frame3, desk_linear, np.zeros(3), 0.1, 3)
    assert rep.per_length == [1, 4, 12, 36]
    assert rep.cumulative[-1] == count_words(2, 3)
    assert not rep.stabilized


def test_audit_far_translations_stabilize(frame3, desk):
    big = scale_group(desk, 1e3)
    rep = properness_audit(frame3, big, np.zeros(3), 0.1, 4)
    assert rep.per_length[0] == 1
    assert rep.stabilized


def test_audit_monotone(frame3, desk):
    small = properness_audit(frame3, desk, np.zeros(3), 0.1, 4)
    big = properness_audit(frame3, desk, np.zeros(3), 0.5, 4)
    deeper = properness_audit(frame3, desk, np.zeros(3), 0.1, 5)
    assert all(x <= y for x, y in zip(small.cumulative, big.cumulative))
    assert deeper.cumulative[:5] == small.cumulative
    assert set(small.returners) <= set(deeper.returners)


def test_audit_validation(frame3, desk):
    with pytest.raises(ValueError):
        properness_audit(frame3, desk, np.zeros(3), 0.1, 1)
    with pytest.raises(ValueError):
        properness_audit(frame3, desk, np.zeros(3), -1.0, 3)


def test_audit_json():
    rep = AuditReport(np.zeros(2), 0.5, 2, [1, 0, 0], [(), (1, -2)])
    d = rep.to_json()
    assert d["returners"] == ["e", "aB"] and d["stabilized"] and d["cumulative"] == [1, 1, 1]


def test_equivariance(frame3, desk, rng):
    assert equivariance_audit(frame3, desk, rng.uniform(-3, 3, (200, 3))) < 1e-9



def test_equivariance_trivial_and_translation(frame3, rng):
    eye = AffineIsometry.identity(3)
    shift = AffineIsometry(np.eye(3), [1.0, -2.0, 0.5])
    pts = rng.uniform(-3, 3, (100, 3))
    assert equivariance_audit(frame3, SchottkyGroup((eye, eye)), pts) == 0.0
    assert equivariance_audit(frame3, SchottkyGroup((shift, shift)), pts) <= 1e-10


def test_audit_identity_only():
    rep = audit_table(np.eye(3)[None], np.zeros((1, 3)), [0], [()], np.zeros(3), 1.0, 2)
    assert rep.total == 1 and rep.stabilized


def test_trivial_cocycle_search(frame3, desk_linear):
    hset = thickening_in_chart(frame3, limit_sample(frame3, desk_linear, 6))
    assert np.all(hset.alpha == 0.0)
    assert domain_margin(hset, np.zeros(3)) == 0.0
    pt = find_domain_point(frame3, hset)
    assert pt.margin > 0 and pt.margin >= dense_scan(hset)


def test_center_on_hyperplane_grows(frame3, desk):
    hset = thickening_in_chart(frame3, limit_sample(frame3, desk, 6))
    w, a = hset.w[0], hset.alpha[0]
    center = -a * np.array([w[0], w[1], -w[2]]) / (w @ w)
    rep = properness_audit(frame3, desk, center, 1.0, 6)
    assert not rep.stabilized
    assert all(x < y for x, y in zip(rep.cumulative, rep.cumulative[1:]))
