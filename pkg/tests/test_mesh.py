import math

import numpy as np
import pytest

from spectral_shapes.mesh import (
    DomainFamily, MeshError, TriMesh, chord_deficit, disk_polygon, ellipse, generate_mesh,
    mesh_from_triangles, overlap_area, overlap_perimeter, passage_area, square_mesh,
    two_disks_overlap, two_disks_passage,
)


def test_square_mesh():
    m = square_mesh(0.1)
    assert len(m.triangles) == 200
    assert m.area == pytest.approx(1.0, abs=1e-14)
    assert m.perimeter == pytest.approx(4.0, abs=1e-14)
    assert m.min_angle == pytest.approx(45.0)
    m.validate(20)


def test_disk_polygon_area():
    m = disk_polygon(256, h=0.05)
    assert abs(m.area - np.pi) < 1e-3
    # exactly the area of the inscribed regular 256-gon
    assert m.area == pytest.approx(128 * math.sin(2 * math.pi / 256), rel=1e-12)
    assert m.min_angle >= 20


def test_passage_area_closed_form():
    L, eps = 0.5, 0.05
    m = two_disks_passage(L, eps, h=0.05)
    circles = [((1 + L / 2, 0.0), 1.0), ((-1 - L / 2, 0.0), 1.0)]
    deficit = chord_deficit(m, circles)
    assert m.area + deficit == pytest.approx(passage_area(L, eps), abs=1e-10)
    # a chord of length c <= h cuts off about c^3 / 12, so the sum stays below length * h^2 / 8
    assert 0 < deficit < 4 * math.pi * 0.05**2 / 8
    # independent estimate of the closed form: two disks plus rectangle minus the two caps cut off
    a = eps / 2
    cap = math.asin(a) - a * math.sqrt(1 - a * a)
    rect = eps * (L + 2 * (1 - math.sqrt(1 - a * a)))
    assert passage_area(L, eps) == pytest.approx(2 * math.pi + rect - 2 * cap, abs=1e-14)
    m.validate(20)


def test_overlap_area_and_perimeter():
    eps = 0.2
    m = two_disks_overlap(eps, h=0.08)
    c = 1 - eps / 2
    deficit = chord_deficit(m, [((c, 0.0), 1.0), ((-c, 0.0), 1.0)])
    assert m.area + deficit == pytest.approx(overlap_area(eps), abs=1e-10)
    assert m.perimeter == pytest.approx(overlap_perimeter(eps), rel=1e-3)
    assert m.perimeter < overlap_perimeter(eps)


def test_passage_resolution_guard():
    with pytest.raises(MeshError):
        two_disks_passage(0.5, 0.05, h=0.05, h_passage=0.05)


def test_refine_and_scale():
    m = ellipse(1.5, 1.0, n=64, h=0.15)
    r = m.refine()
    assert len(r.triangles) == 4 * len(m.triangles)
    assert r.area == pytest.approx(m.area, rel=1e-13)
    assert r.min_angle == pytest.approx(m.min_angle, rel=1e-9)
    assert r.h == pytest.approx(m.h / 2, rel=1e-9)
    r.validate(20)
    s = m.scaled(2.0)
    assert s.area == pytest.approx(4 * m.area) and s.perimeter == pytest.approx(2 * m.perimeter)


def test_text_roundtrip(tmp_path):
    m = square_mesh(0.25)
    text = m.to_text()
    assert text.splitlines()[0].startswith("v ")
    back = TriMesh.from_text(text)
    np.testing.assert_array_equal(back.triangles, m.triangles)
    np.testing.assert_allclose(back.vertices, m.vertices)
    path = tmp_path / "sq.mesh"
    m.write(path)
    assert TriMesh.read(path).area == pytest.approx(m.area)
    with pytest.raises(ValueError):
        TriMesh.from_text("q 1 2\n")


def test_validation_errors():
    # annulus-like strip closing on itself: two boundary loops
    n = 8
    t = 2 * np.pi * np.arange(n) / n
    verts = np.vstack([np.column_stack([np.cos(t), np.sin(t)]), 2 * np.column_stack([np.cos(t), np.sin(t)])])
    tris = []
    for k in range(n):
        a, b, c, d = k, (k + 1) % n, n + (k + 1) % n, n + k
        tris += [(a, b, c), (a, c, d)]
    with pytest.raises(MeshError):
        mesh_from_triangles(verts, tris).validate()
    m = square_mesh(0.5)
    with pytest.raises(MeshError):
        m.validate(50)


@pytest.mark.parametrize("family,h", [
    (DomainFamily("square"), 0.1),
    (DomainFamily("disk_polygon", {"n": 6}), 0.1),
    (DomainFamily("ellipse", {"a": 2.0, "b": 1.0, "n": 128}), 0.08),
    (DomainFamily("two_disks_passage", {"L": 0.5, "eps": 0.2}), 0.1),
    (DomainFamily("two_disks_overlap", {"eps": 0.1}), 0.1),
])
def test_generated_meshes_are_valid(family, h):
    m = generate_mesh(family, h)
    m.validate(20)
    assert m.min_angle >= 20
    assert m.h <= 1.5 * h


def test_unknown_family():
    with pytest.raises(ValueError):
        DomainFamily("torus")
