"""Triangle meshes of planar polygons and the domain families used for
sharpness experiments.

Unstructured meshes are produced by a small DistMesh-style generator: the
boundary is resampled to a graded size function and held fixed, interior
points relax under spring forces, and the final Delaunay triangulation is
checked to contain every boundary segment.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import shapely
from scipy.spatial import Delaunay, cKDTree

log = logging.getLogger(__name__)

MIN_ANGLE = 20.0
GRADING = 0.3


class MeshError(ValueError):
    pass


# --------------------------------------------------------------------------
# mesh container
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TriMesh:
    """Vertices (n, 2), CCW triangles (m, 3), outward boundary edges (k, 2).

    Boundary edges are oriented so that the domain lies on their left.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    name: str = ""

    def __post_init__(self):
        for attr, dtype in (("vertices", float), ("triangles", np.int64), ("boundary", np.int64)):
            arr = np.array(getattr(self, attr), dtype=dtype)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    @property
    def n_vertices(self):
        return len(self.vertices)

    def areas(self):
        p = self.vertices[self.triangles]
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @property
    def area(self):
        return float(self.areas().sum())

    def boundary_lengths(self):
        v = self.vertices
        return np.linalg.norm(v[self.boundary[:, 1]] - v[self.boundary[:, 0]], axis=1)

    @property
    def perimeter(self):
        return float(self.boundary_lengths().sum())

    def edges(self):
        t = self.triangles
        e = np.sort(np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0)

    @property
    def h(self):
        """Characteristic size: the longest edge."""
        e = self.edges()
        return float(np.linalg.norm(self.vertices[e[:, 0]] - self.vertices[e[:, 1]], axis=1).max())

    def angles(self):
        """Interior angles in degrees, shape (m, 3)."""
        p = self.vertices[self.triangles]
        out = np.empty(self.triangles.shape)
        for k in range(3):
            a = p[:, (k + 1) % 3] - p[:, k]
            b = p[:, (k + 2) % 3] - p[:, k]
            cos = np.sum(a * b, axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
            out[:, k] = np.degrees(np.arccos(np.clip(cos, -1, 1)))
        return out

    @property
    def min_angle(self):
        return float(self.angles().min())

    @property
    def boundary_vertices(self):
        return np.unique(self.boundary)

    def validate(self, min_angle=None):
        """Raise MeshError unless the mesh is a valid simply-connected TriMesh."""
        if np.any(self.areas() <= 0):
            raise MeshError("non-positive triangle area")
        t = self.triangles
        half = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        key = np.sort(half, axis=1)
        uniq, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        if np.any(counts > 2):
            raise MeshError("edge shared by more than two triangles")
        single = half[counts[inv.ravel()] == 1]
        b = {tuple(e) for e in self.boundary}
        if b != {tuple(e) for e in single}:
            raise MeshError("boundary edges do not match edges of exactly one triangle")
        nxt = dict(b)
        if len(nxt) != len(b):
            raise MeshError("boundary is not a union of simple loops")
        start = next(iter(nxt))
        cur, steps = nxt[start], 1
        while cur != start and steps <= len(b):
            cur, steps = nxt[cur], steps + 1
        if steps != len(b):
            raise MeshError("boundary is not a single closed loop")
        v = len(np.unique(t))
        if v != self.n_vertices:
            raise MeshError("mesh has unused vertices")
        if v - len(uniq) + len(t) != 1:
            raise MeshError("Euler characteristic differs from a disk")
        if min_angle is not None and self.min_angle < min_angle:
            raise MeshError(f"minimum angle {self.min_angle:.1f} deg below {min_angle} deg")
        return self

    def scaled(self, c):
        return TriMesh(self.vertices * c, self.triangles, self.boundary, self.name)

    def refine(self):
        """Uniform red refinement: every triangle split into four."""
        edges = self.edges()
        n = self.n_vertices
        index = {tuple(e): n + k for k, e in enumerate(edges)}
        mids = 0.5 * (self.vertices[edges[:, 0]] + self.vertices[edges[:, 1]])
        mid = lambda a, b: index[(a, b) if a < b else (b, a)]
        tris, bnd = [], []
        for a, b, c in self.triangles:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        for a, b in self.boundary:
            m = mid(a, b)
            bnd += [(a, m), (m, b)]
        return TriMesh(np.vstack([self.vertices, mids]), tris, bnd, self.name)

    # ---- text format -----------------------------------------------------
    def to_text(self):
        lines = [f"v {x:.17g} {y:.17g}" for x, y in self.vertices]
        lines += [f"t {i} {j} {k}" for i, j, k in self.triangles]
        lines += [f"b {i} {j}" for i, j in self.boundary]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, name=""):
        v, t, b = [], [], []
        for raw in text.splitlines():
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            if tag == "v":
                v.append((float(parts[1]), float(parts[2])))
            elif tag == "t":
                t.append(tuple(int(p) for p in parts[1:4]))
            elif tag == "b":
                b.append(tuple(int(p) for p in parts[1:3]))
            else:
                raise ValueError(f"unknown mesh line {raw!r}")
        return cls(np.array(v).reshape(-1, 2), np.array(t).reshape(-1, 3),
                   np.array(b).reshape(-1, 2), name).validate()

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())

    @classmethod
    def read(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read())


def mesh_from_triangles(vertices, triangles, name=""):
    """Orient triangles CCW, derive the boundary and validate."""
    vertices = np.asarray(vertices, dtype=float)
    t = np.array(triangles, dtype=np.int64)
    p = vertices[t]
    e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
    neg = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0] < 0
    t[neg] = t[neg][:, [0, 2, 1]]
    used = np.unique(t)
    remap = np.full(len(vertices), -1)
    remap[used] = np.arange(len(used))
    vertices, t = vertices[used], remap[t]
    half = np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    key = np.sort(half, axis=1)
    _, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    boundary = half[counts[inv.ravel()] == 1]
    return TriMesh(vertices, t, boundary, name)


# --------------------------------------------------------------------------
# boundary curves
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    a: tuple
    b: tuple

    @property
    def length(self):
        return math.dist(self.a, self.b)

    def __call__(self, s):
        s = np.asarray(s)[:, None]
        return (1 - s) * np.array(self.a) + s * np.array(self.b)


@dataclass(frozen=True)
class Arc:
    """Counter-clockwise (or clockwise if t1 < t0) arc of a circle."""

    center: tuple
    radius: float
    t0: float
    t1: float

    @property
    def length(self):
        return abs(self.t1 - self.t0) * self.radius

    def __call__(self, s):
        t = self.t0 + (self.t1 - self.t0) * np.asarray(s)
        return np.column_stack([self.center[0] + self.radius * np.cos(t),
                                self.center[1] + self.radius * np.sin(t)])


def resample(pieces, size_fn, corner_points=True):
    """Points along a closed chain of pieces with spacing ~ size_fn.

    Each piece contributes its start point and ceil(int ds / h) - 1 interior
    points placed by equidistributing ds / h.
    """
    pts = []
    for piece in pieces:
        s = np.linspace(0.0, 1.0, 2001)
        xy = piece(s)
        h = size_fn(xy)
        dens = piece.length / h
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(s))])
        n = max(1, int(math.ceil(cum[-1] - 1e-9)))
        targets = np.linspace(0.0, cum[-1], n + 1)[:-1]
        pts.append(piece(np.interp(targets, cum, s)))
    return np.vstack(pts)


def polygon_pieces(coords):
    coords = [tuple(map(float, c)) for c in coords]
    return [Segment(coords[k], coords[(k + 1) % len(coords)]) for k in range(len(coords))]


# --------------------------------------------------------------------------
# unstructured generator
# --------------------------------------------------------------------------

def _hex_lattice(bounds, h):
    x0, y0, x1, y1 = bounds
    dy = h * math.sqrt(3) / 2
    ys = np.arange(y0, y1 + dy, dy)
    xs = np.arange(x0, x1 + h, h)
    xx, yy = np.meshgrid(xs, ys)
    xx = xx + 0.5 * h * (np.arange(len(ys))[:, None] % 2)
    return np.column_stack([xx.ravel(), yy.ravel()])


def _unique_edges(t, n):
    e = np.sort(np.vstack([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    key = np.unique(e[:, 0] * n + e[:, 1])
    return np.column_stack([key // n, key % n])


def _missing_segments(tri, nb):
    edges = set()
    for a, b, c in tri.simplices:
        for u, v in ((a, b), (b, c), (c, a)):
            edges.add((min(u, v), max(u, v)))
    return [k for k in range(nb) if (min(k, (k + 1) % nb), max(k, (k + 1) % nb)) not in edges]


def mesh_polygon(pieces, h, size_fn=None, name="", max_iter=60, seed=0, min_angle=MIN_ANGLE):
    """Mesh the region bounded by a closed CCW chain of pieces.

    ``size_fn(xy) -> h`` is an optional target size (capped by ``h``).
    """
    user = size_fn or (lambda xy: np.full(len(xy), h))
    target = lambda xy: np.minimum(user(xy), h)
    bpts = resample(pieces, target)
    nb = len(bpts)
    poly = shapely.Polygon(bpts)
    if not poly.is_valid or poly.area <= 0:
        raise MeshError("boundary is not a simple counter-clockwise polygon")
    shapely.prepare(poly)

    nxt = np.roll(bpts, -1, axis=0)
    seg = np.linalg.norm(nxt - bpts, axis=1)
    spacing = 0.5 * (seg + np.roll(seg, 1))
    # dense boundary samples (4 per segment) tagged with their segment
    frac = np.arange(4) / 4.0
    dense = (bpts[:, None, :] + frac[None, :, None] * (nxt - bpts)[:, None, :]).reshape(-1, 2)
    owner = np.repeat(np.arange(nb), 4)
    tree = cKDTree(dense)

    def dist_and_size(xy):
        d, k = tree.query(xy)
        return d, np.minimum(target(xy), spacing[owner[k]] + GRADING * d)

    def size(xy):
        return dist_and_size(xy)[1]

    def admissible(xy):
        d, hs = dist_and_size(xy)
        return shapely.contains_xy(poly, xy[:, 0], xy[:, 1]) & (d > 0.55 * hs)

    hmin = float(min(spacing.min(), target(bpts).min()))
    rng = np.random.default_rng(seed)
    # coarse lattice thinned by the size function keeps the start cheap
    p = _hex_lattice(poly.bounds, hmin)
    keep = admissible(p)
    p = p[keep]
    prob = (hmin / size(p)) ** 2
    p = p[rng.random(len(p)) < prob]

    for it in range(max_iter):
        allp = np.vstack([bpts, p])
        tri = Delaunay(allp)
        t = tri.simplices
        cen = allp[t].mean(axis=1)
        t = t[shapely.contains_xy(poly, cen[:, 0], cen[:, 1])]
        bars = _unique_edges(t, len(allp))
        vec = allp[bars[:, 0]] - allp[bars[:, 1]]
        L = np.linalg.norm(vec, axis=1)
        hb = size(0.5 * (allp[bars[:, 0]] + allp[bars[:, 1]]))
        L0 = hb * 1.2 * math.sqrt(np.sum(L**2) / np.sum(hb**2))
        F = np.maximum(L0 - L, 0.0)
        fv = (F / L)[:, None] * vec
        force = np.zeros_like(allp)
        np.add.at(force, bars[:, 0], fv)
        np.add.at(force, bars[:, 1], -fv)
        step = 0.2 * force[nb:]
        cand = p + step
        ok = admissible(cand)
        p = np.where(ok[:, None], cand, p)
        move = np.linalg.norm(step[ok], axis=1) / size(p[ok]) if ok.any() else np.zeros(1)
        if move.size and move.max() < 1e-3:
            break

    for _ in range(10):
        allp = np.vstack([bpts, p])
        tri = Delaunay(allp)
        missing = _missing_segments(tri, nb)
        if not missing:
            break
        # boundary protection: clear diametral circles of missing segments
        drop = np.zeros(len(p), bool)
        for k in missing:
            a, b = bpts[k], bpts[(k + 1) % nb]
            c, r = 0.5 * (a + b), 0.5 * np.linalg.norm(b - a)
            drop |= np.linalg.norm(p - c, axis=1) <= r * (1 + 1e-9)
        p = p[~drop]
    else:
        raise MeshError("could not recover boundary segments; try a smaller h")

    t = tri.simplices
    cen = allp[t].mean(axis=1)
    t = t[shapely.contains_xy(poly, cen[:, 0], cen[:, 1])]
    # qhull may return flat facets on collinear boundary points
    e1, e2 = allp[t[:, 1]] - allp[t[:, 0]], allp[t[:, 2]] - allp[t[:, 0]]
    t = t[np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) > 1e-10 * hmin**2]
    mesh = mesh_from_triangles(allp, t, name)
    mesh.validate(min_angle)
    return mesh


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

def square_mesh(h=0.1, side=1.0, name="square"):
    """Structured right-triangle mesh of [0, side]^2 with ceil(side / h) cells per side."""
    n = max(1, int(math.ceil(side / h - 1e-12)))
    x = np.linspace(0.0, side, n + 1)
    xx, yy = np.meshgrid(x, x, indexing="xy")
    verts = np.column_stack([xx.ravel(), yy.ravel()])
    idx = lambda i, j: j * (n + 1) + i
    tris = []
    for j in range(n):
        for i in range(n):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            if (i + j) % 2 == 0:
                tris += [(a, b, c), (a, c, d)]
            else:
                tris += [(a, b, d), (b, c, d)]
    return mesh_from_triangles(verts, tris, name).validate(MIN_ANGLE)


def regular_polygon(n, radius=1.0):
    t = 2 * np.pi * np.arange(n) / n
    return np.column_stack([radius * np.cos(t), radius * np.sin(t)])


def disk_polygon(n=256, h=0.05, **kw):
    return mesh_polygon(polygon_pieces(regular_polygon(n)), h, name=f"disk_polygon({n})", **kw)


def ellipse(a=1.5, b=1.0, n=256, h=0.05, **kw):
    t = 2 * np.pi * np.arange(n) / n
    coords = np.column_stack([a * np.cos(t), b * np.sin(t)])
    return mesh_polygon(polygon_pieces(coords), h, name=f"ellipse({a},{b},{n})", **kw)


def _passage_geometry(L, eps):
    if not 0 < eps < 1:
        raise ValueError("passage width must lie in (0, 1)")
    a = 0.5 * eps
    cx = 1.0 + 0.5 * L
    xj = cx - math.sqrt(1 - a * a)   # junction abscissa (positive side)
    tj = math.asin(a)
    pieces = [
        Segment((-xj, -a), (xj, -a)),
        Arc((cx, 0.0), 1.0, np.pi + tj, 3 * np.pi - tj),
        Segment((xj, a), (-xj, a)),
        Arc((-cx, 0.0), 1.0, tj, 2 * np.pi - tj),
    ]
    return pieces


def passage_area(L, eps):
    """Exact area of two unit disks joined by a passage of length L, width eps."""
    a = 0.5 * eps
    return 2 * np.pi + L * eps + 2 * eps - 2 * (a * math.sqrt(1 - a * a) + math.asin(a))


def overlap_area(eps):
    """Exact area of the union of two unit disks with centres 2 - eps apart."""
    d = 2.0 - eps
    lens = 2 * math.acos(d / 2) - 0.5 * d * math.sqrt(4 - d * d)
    return 2 * np.pi - lens


def overlap_perimeter(eps):
    d = 2.0 - eps
    return 2 * (2 * np.pi - 2 * math.acos(d / 2))


def two_disks_passage(L=0.5, eps=0.05, h=0.05, h_passage=None, **kw):
    """Two unit disks joined by a rectangular passage of length L and width eps.

    The size function is ``h_passage`` (default eps / 3) inside the passage
    and grows linearly away from it.
    """
    hp = h_passage if h_passage is not None else eps / 3.0
    if hp > eps / 3.0 + 1e-15:
        raise MeshError("passage size must satisfy h <= eps / 3")

    def size_fn(xy):
        dx = np.maximum(np.abs(xy[:, 0]) - 0.5 * L, 0.0)
        dy = np.maximum(np.abs(xy[:, 1]) - 0.5 * eps, 0.0)
        return hp + GRADING * np.hypot(dx, dy)

    return mesh_polygon(_passage_geometry(L, eps), h, size_fn,
                        name=f"two_disks_passage({L},{eps})", **kw)


def two_disks_overlap(eps=0.05, h=0.05, **kw):
    """Union of two unit disks with centres 2 - eps apart."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    c = 1.0 - 0.5 * eps
    t = math.acos(c)  # half-angle of the arc removed at the neck
    pieces = [
        Arc((c, 0.0), 1.0, -np.pi + t, np.pi - t),
        Arc((-c, 0.0), 1.0, t, 2 * np.pi - t),
    ]
    y0 = math.sqrt(1 - c * c)
    neck = lambda xy: h * np.minimum(1.0, 0.25 + np.hypot(xy[:, 0], np.abs(xy[:, 1]) - y0))
    return mesh_polygon(pieces, h, neck, name=f"two_disks_overlap({eps})", **kw)


def chord_deficit(mesh, circles):
    """Area between the circle arcs and the mesh's boundary chords.

    ``circles`` lists (centre, radius); every boundary edge whose endpoints
    lie on one of them contributes its circular-segment area.
    """
    v = mesh.vertices
    total = 0.0
    for a, b in mesh.boundary:
        for (cx, cy), r in circles:
            da = math.hypot(v[a, 0] - cx, v[a, 1] - cy)
            db = math.hypot(v[b, 0] - cx, v[b, 1] - cy)
            if abs(da - r) < 1e-9 and abs(db - r) < 1e-9:
                alpha = 2 * math.asin(min(1.0, np.linalg.norm(v[b] - v[a]) / (2 * r)))
                total += 0.5 * r * r * (alpha - math.sin(alpha))
                break
    return total


@dataclass(frozen=True)
class DomainFamily:
    """A named mesh generator with its parameters."""

    generator: str
    params: dict = field(default_factory=dict)

    GENERATORS = ("square", "disk_polygon", "ellipse", "two_disks_passage", "two_disks_overlap")

    def __post_init__(self):
        if self.generator not in self.GENERATORS:
            raise ValueError(f"unknown domain family {self.generator!r}")

    def __hash__(self):
        return hash((self.generator, tuple(sorted(self.params.items()))))


def generate_mesh(family, h, **kw):
    fn = {
        "square": square_mesh,
        "disk_polygon": disk_polygon,
        "ellipse": ellipse,
        "two_disks_passage": two_disks_passage,
        "two_disks_overlap": two_disks_overlap,
    }[family.generator]
    return fn(h=h, **family.params, **kw)
