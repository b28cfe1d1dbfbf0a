from collections import Counter

import numpy as np
import pytest

from psu3mobius.hermitian_geometry import (HermitianPlane, count_curve_points_ext,
                                           frobenius_triangle_count, self_polar_triangle_count)


@pytest.fixture(scope="module")
def plane():
    return HermitianPlane(1)


def test_point_and_line_counts(plane):
    assert len(plane.points) == 16 * 16 + 16 + 1
    assert len(plane.lines) == 273
    assert plane.n_curve == 65
    assert all(plane.polarity.is_isotropic(P) for P in plane.curve)
    assert not any(plane.polarity.is_isotropic(P) for P in plane.noncurve)


def test_curve_count_by_direct_equation(plane):
    T = plane.tower
    # x z^q + y^(q+1) + z x^q = 0; affine part z = 1 plus (1:0:0)
    affine = sum(1 for x in range(16) for y in range(16) if x ^ T.conj(x) ^ T.norm(y) == 0)
    assert affine + 1 == 65


def test_lines_meet_curve_in_1_or_q_plus_1(plane):
    sizes = Counter(sum(1 for i in pts if i < plane.n_curve) for pts in plane.line_points.values())
    assert sizes == {1: 65, 5: 208}


def test_tangent_is_polar_of_its_point(plane):
    for i, P in enumerate(plane.curve):
        on = [j for j in plane.line_points[plane.polar(P)] if j < plane.n_curve]
        assert on == [i]


def test_polarity_is_an_involution(plane):
    for P in plane.points:
        assert plane.pole(plane.polar(P)) == P


def test_self_polar_triangles_against_orthogonality_graph(plane):
    pts = plane.noncurve
    A = np.array([[int(plane.polarity.form(P, Q) == 0 and P != Q) for Q in pts] for P in pts])
    triangles = int(np.trace(A @ A @ A)) // 6
    assert triangles == 416 == self_polar_triangle_count(4)
    assert len(plane.self_polar_triangles) == 416
    assert all(plane.is_self_polar(t.vertices) for t in plane.self_polar_triangles)


def test_self_polar_triangles_through_a_point(plane):
    c = Counter(v for t in plane.self_polar_triangles for v in t.vertices)
    # G is transitive on non-curve points, so each lies on 3 * 416 / 208 triangles
    assert set(c.values()) == {6}


def test_frobenius_triangles_gf4096(plane):
    T = plane.tower
    F6 = T.F6
    x = np.arange(4096)
    tr = x ^ F6.vpow(x, 4)
    hist = np.bincount(tr, minlength=4096)
    nrm = F6.vpow(x, 5)
    direct = int(hist[nrm].sum()) + 1
    assert direct == count_curve_points_ext(T) == 4865
    assert (direct - 65) // 3 == 1600 == frobenius_triangle_count(4)
    tris = plane.frobenius_triangles
    assert len(tris) == 1600
    assert len({P for t in tris for P in t.vertices}) == 4800


def test_fermat_model_maps_onto_norm_trace(plane):
    fermat = plane.curve_points("fermat")
    assert len(fermat) == 65
    assert {plane.fermat_to_norm_trace(P) for P in fermat} == set(plane.curve)


def test_unknown_triangle_kind(plane):
    with pytest.raises(ValueError):
        plane.enumerate_triangles("bogus")
