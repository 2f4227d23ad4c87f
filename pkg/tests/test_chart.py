import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lorentzdod.chart import (
    Frame,
    apply,
    chart_to_flag,
    chart_vector,
    check_orthogonal,
    element_from_json,
    element_to_json,
    embed_affine,
    embed_affine_batch,
    flag_to_chart,
    levi_embed,
    linear_part,
    max_abs,
    random_lorentz,
    shear,
    shear_compose_check,
    transvection,
    translation_part,
)
from lorentzdod.errors import GeometryError, NotInGroup, NotOpposite
from lorentzdod.geometry import IsotropicLine, QuadraticSpace, make_space

coords = st.floats(-5, 5, allow_nan=False)


def general_frame(n, seed=3):
    space = make_space(n)
    g = random_lorentz(space.gram, np.random.default_rng(seed), scale=0.4)
    return Frame(space, g)


def test_shear_example(frame3):
    s = shear(frame3, [1.0, 0.0, 0.0])
    expected = np.eye(5)
    expected[0, 1] = -0.5
    expected[2, 1] = 1.0
    expected[0, 2] = -1.0
    assert np.array_equal(s, expected)
    assert np.array_equal(shear(frame3, np.zeros(3)), np.eye(5))


def test_shear_null_vector_example(frame3):
    # q'(v) = 0 drops the e-term in the image of f
    s = shear(frame3, [0.0, 1.0, 1.0])
    assert s[0, 1] == 0.0
    assert np.array_equal(s @ frame3.f, [0.0, 1.0, 0.0, 1.0, 1.0])


@pytest.mark.parametrize("n", [3, 4, 5])
def test_shear_orthogonal_random(n):
    frame = Frame.standard(make_space(n))
    rng = np.random.default_rng(n)
    for _ in range(1000):
        v = rng.uniform(-10, 10, n)
        s = shear(frame, v)
        assert check_orthogonal(frame.space, s) <= 1e-9 * max(1.0, v @ v)


def test_shear_unipotent(frame_n):
    rng = np.random.default_rng(1)
    for _ in range(50):
        v = rng.standard_normal(frame_n.n)
        nil = shear(frame_n, v) - np.eye(frame_n.space.dim)
        assert max_abs(nil @ nil @ nil) <= 1e-10
        # fixes e, moves f unless v = 0
        assert np.allclose(shear(frame_n, v) @ frame_n.e, frame_n.e)


def test_shear_unipotent_rank():
    frame = Frame.standard(make_space(3))
    nil = shear(frame, [1.0, 2.0, 0.5]) - np.eye(5)
    assert np.linalg.matrix_rank(nil) == 2
    assert np.linalg.matrix_rank(nil @ nil) == 1


@settings(max_examples=100)
@given(arrays(float, 3, elements=coords), arrays(float, 3, elements=coords))
def test_shear_homomorphism(u, v):
    frame = Frame.standard(make_space(3))
    assert shear_compose_check(frame, u, v) <= 1e-10 * (1 + u @ u + v @ v)


def test_shear_rejects_wrong_length(frame3):
    with pytest.raises(GeometryError):
        shear(frame3, [1.0, 2.0])


def test_chart_examples(frame3):
    assert chart_to_flag(frame3, np.zeros(3)).same(frame3.L_hat)
    v = np.array([2.0, 0.0, 0.0])
    assert np.array_equal(chart_vector(frame3, v), [-2.0, 1.0, 2.0, 0.0, 0.0])
    m = chart_to_flag(frame3, v)
    assert abs(frame3.space.q(m.rep)) < 1e-15
    assert np.allclose(flag_to_chart(frame3, m), v, atol=1e-14)


def test_chart_round_trip_random(frame_n, rng):
    for _ in range(200):
        v = rng.uniform(-20, 20, frame_n.n)
        back = flag_to_chart(frame_n, chart_to_flag(frame_n, v))
        assert np.allclose(back, v, rtol=1e-10, atol=1e-10)


def test_flag_to_chart_rejects_points_of_q_l(frame3):
    with pytest.raises(NotOpposite):
        flag_to_chart(frame3, frame3.L)
    w = IsotropicLine([0.0, 0.0, 1.0, 0.0, 1.0])
    with pytest.raises(NotOpposite):
        flag_to_chart(frame3, w)


def test_flag_to_chart_rejects_non_isotropic(frame3):
    with pytest.raises(GeometryError):
        flag_to_chart(frame3, IsotropicLine([0.0, 1.0, 1.0, 0.0, 0.0]))


def test_embed_affine_acts_affinely(frame_n, rng):
    a = random_lorentz(frame_n.gram_prime, rng, 0.5)
    b = rng.standard_normal(frame_n.n)
    g = embed_affine(frame_n, a, b)
    check_orthogonal(frame_n.space, g)
    for _ in range(20):
        v = rng.standard_normal(frame_n.n)
        img = flag_to_chart(frame_n, apply(g, chart_to_flag(frame_n, v)))
        assert np.allclose(img, a @ v + b, atol=1e-9)
    assert np.allclose(linear_part(frame_n, g), a, atol=1e-12)
    assert np.allclose(translation_part(frame_n, g), b, atol=1e-12)


def test_embed_affine_batch_matches_single(frame3, rng):
    a = np.stack([random_lorentz(frame3.gram_prime, rng) for _ in range(5)])
    b = rng.standard_normal((5, 3))
    batch = embed_affine_batch(frame3, a, b)
    for i in range(5):
        assert np.allclose(batch[i], embed_affine(frame3, a[i], b[i]), atol=1e-12)


def test_embed_rejects_non_lorentz(frame3):
    with pytest.raises(NotInGroup):
        embed_affine(frame3, 2 * np.eye(3), np.zeros(3))
    with pytest.raises(GeometryError):
        levi_embed(frame3, np.eye(2))


def test_transvection(frame3, rng):
    a2 = transvection(frame3, 2.0)
    assert np.array_equal(np.diag(a2), [2.0, 0.5, 1.0, 1.0, 1.0])
    check_orthogonal(frame3.space, a2)
    v = rng.standard_normal(3)
    # a_t s_v a_t^{-1} = s_{t v} and a_t h(v) = h(t v)
    conj = a2 @ shear(frame3, v) @ np.linalg.inv(a2)
    assert np.allclose(conj, shear(frame3, 2 * v), atol=1e-12)
    assert np.allclose(flag_to_chart(frame3, apply(a2, chart_to_flag(frame3, v))), 2 * v, atol=1e-12)
    assert np.array_equal(linear_part(frame3, a2), np.eye(3))
    with pytest.raises(ValueError):
        transvection(frame3, 0.0)
    with pytest.raises(ValueError):
        transvection(frame3, -1.0)


def test_linear_part_requires_fixing_l(frame3):
    swap = np.eye(5)[[1, 0, 2, 3, 4]]
    with pytest.raises(NotInGroup):
        linear_part(frame3, swap)


def test_general_frame(rng):
    frame = general_frame(4)
    assert frame.identifier != Frame.standard(frame.space).identifier
    for _ in range(20):
        v = rng.standard_normal(4)
        u = rng.standard_normal(4)
        check_orthogonal(frame.space, shear(frame, v))
        assert shear_compose_check(frame, u, v) < 1e-9
        back = flag_to_chart(frame, chart_to_flag(frame, v))
        assert np.allclose(back, v, atol=1e-9)
    assert chart_to_flag(frame, np.zeros(4)).same(frame.L_hat)


def test_frame_validation():
    space = make_space(3)
    with pytest.raises(GeometryError):
        Frame(space, np.eye(5)[[2, 1, 0, 3, 4]])


def test_element_json_round_trip(frame3, rng):
    g = embed_affine(frame3, random_lorentz(frame3.gram_prime, rng), rng.standard_normal(3))
    payload = element_to_json(frame3, g)
    assert np.array_equal(element_from_json(frame3, payload), g)
    with pytest.raises(GeometryError):
        element_from_json(general_frame(3), payload)


def test_check_orthogonal_rejects(space3):
    with pytest.raises(NotInGroup):
        check_orthogonal(space3, 1.01 * np.eye(5))


def test_unchecked_space_is_not_validated():
    bad = QuadraticSpace.unchecked(3, np.eye(5))
    assert bad.q(np.ones(5)) == 5.0
