import numpy as np
import pytest

from stratawave.groups import (LatticeSpec, abelian_group, heisenberg_group,
                               step2_group, group_from_config)

H1 = heisenberg_group()
R3 = abelian_group(3)


def h1_matrix_product(p, q):
    """Independent oracle: multiply in the upper-triangular matrix model.

    exp coords (x, y, u) correspond to the unipotent matrix with first row
    (1, x, u + x y / 2); the product is read back the same way.
    """
    def mat(v):
        x, y, u = v
        return np.array([[1.0, x, u + x * y / 2.0], [0.0, 1.0, y], [0.0, 0.0, 1.0]])

    M = mat(p) @ mat(q)
    x, y = M[0, 1], M[1, 2]
    return np.array([x, y, M[0, 2] - x * y / 2.0])


def test_h1_product_matches_matrix_model():
    rng = np.random.default_rng(0)
    for _ in range(200):
        p, q = rng.normal(size=3), rng.normal(size=3)
        assert np.allclose(H1.multiply(p, q), h1_matrix_product(p, q), atol=1e-12)


def test_h1_product_example():
    assert np.allclose(H1.multiply([1, 0, 0], [0, 1, 0]), [1, 1, 0.5])


def test_identity_and_inverse():
    rng = np.random.default_rng(1)
    for g in (H1, R3):
        p = rng.normal(size=g.n)
        assert np.allclose(g.multiply(p, np.zeros(g.n)), p)
        assert np.allclose(g.multiply(np.zeros(g.n), p), p)
        assert np.allclose(g.multiply(p, g.inverse(p)), 0.0, atol=1e-15)


@pytest.mark.parametrize("g", [H1, R3], ids=["H1", "R3"])
def test_associativity(g):
    rng = np.random.default_rng(2)
    p, q, s = rng.uniform(-2, 2, (3, 10_000, g.n))
    lhs = g.multiply(g.multiply(p, q), s)
    rhs = g.multiply(p, g.multiply(q, s))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@pytest.mark.parametrize("g", [H1, R3], ids=["H1", "R3"])
def test_dilation_automorphism(g):
    rng = np.random.default_rng(3)
    p, q = rng.uniform(-2, 2, (2, 10_000, g.n))
    for r in (0.37, 2.0, 5.5):
        lhs = g.dilate(r, g.multiply(p, q))
        rhs = g.multiply(g.dilate(r, p), g.dilate(r, q))
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_dilate_examples():
    assert np.allclose(H1.dilate(2.0, [1, 1, 1]), [2, 2, 4])
    p = np.array([0.3, -1.2, 0.7])
    assert np.allclose(H1.dilate(1.0, p), p)
    assert np.allclose(H1.dilate(3.0, H1.dilate(1 / 3.0, p)), p)
    with pytest.raises(ValueError):
        H1.dilate(-1.0, p)


def test_scalar_scale():
    p = np.array([1.0, 2.0, 3.0])
    assert np.allclose(H1.scalar_scale(0.0, p), 0.0)
    assert np.allclose(H1.scalar_scale(1.0, p), p)
    assert np.allclose(H1.scalar_scale(0.5, p), [0.5, 1.0, 1.5])


def test_standard_norm_values():
    # H1: (|x|^4 + |y|^4 + |u|^2)^(1/4)
    assert np.isclose(H1.standard_norm([1, 0, 0]), 1.0)
    assert np.isclose(H1.standard_norm([0, 0, 1]), 1.0)
    assert np.isclose(H1.standard_norm([1, 1, 1]), 3.0 ** 0.25)
    # abelian reduces to the euclidean norm
    assert np.isclose(R3.standard_norm([1, 2, 2]), 3.0)


def test_norm_homogeneity_and_symmetry():
    rng = np.random.default_rng(4)
    p = rng.uniform(-3, 3, (10_000, 3))
    for r in (0.2, 1.7):
        assert np.max(np.abs(H1.standard_norm(H1.dilate(r, p)) - r * H1.standard_norm(p))) < 1e-12
    assert np.array_equal(H1.standard_norm(-p), H1.standard_norm(p))
    assert H1.standard_norm(np.zeros(3)) == 0.0


def test_scalar_scale_norm_bound():
    rng = np.random.default_rng(5)
    p = rng.uniform(-3, 3, (5000, 3))
    base = H1.standard_norm(p)
    for t in (0.0, 0.25, 0.5, 0.9, 1.0):
        assert np.all(H1.standard_norm(H1.scalar_scale(t, p)) <= base + 1e-14)


def test_quasi_triangle_inequality_bounded():
    rng = np.random.default_rng(6)
    p, q = rng.uniform(-4, 4, (2, 100_000, 3))
    C = np.max(H1.standard_norm(H1.multiply(p, q))
               / (H1.standard_norm(p) + H1.standard_norm(q)))
    assert np.isfinite(C) and C < 10.0  # regression bound for H1


def test_separation_property():
    rng = np.random.default_rng(7)
    cs = []
    for _ in range(2000):
        u = rng.uniform(-2, 2, 3)
        x = rng.uniform(-3, 3, 3)
        R = H1.standard_norm(H1.multiply(H1.inverse(u), x)) / 2.0
        if R <= 0.05:
            continue
        y = H1.multiply(u, H1.dilate(R * rng.uniform(0, 1) /
                                     max(H1.standard_norm(rng.normal(size=3)), 1e-9),
                                     rng.normal(size=3)))
        du_y = H1.standard_norm(H1.multiply(H1.inverse(u), y))
        if du_y > R:
            continue
        cs.append(H1.standard_norm(H1.multiply(H1.inverse(x), y))
                  / H1.standard_norm(H1.multiply(H1.inverse(u), x)))
    assert len(cs) > 200
    assert min(cs) > 0.05  # empirically positive separation constant


def test_lattice_enumeration_line():
    R1 = abelian_group(1)
    ls = LatticeSpec(group=R1, b=1.0)
    pts = sorted(float(p[0]) for p in ls.enumerate_ball(2.5))
    assert pts == [-2.0, -1.0, 0.0, 1.0, 2.0]
    ls2 = LatticeSpec(group=R1, b=0.5)
    pts2 = sorted(float(p[0]) for p in ls2.enumerate_ball(1.0))
    assert pts2 == [-1.0, -0.5, 0.0, 0.5, 1.0]


def test_lattice_enumeration_h1():
    ls = LatticeSpec(group=H1, b=1.0)
    pts = ls.enumerate_ball(0.5)
    assert len(pts) == 1 and np.allclose(pts[0], 0.0)


def test_lattice_tile_volume():
    ls = LatticeSpec(group=H1, b=0.5)
    assert np.isclose(ls.scaled_tile_volume(), 0.5 ** 4)


def test_unique_tiling_h1():
    rng = np.random.default_rng(8)
    for b in (1.0, 0.5):
        ls = LatticeSpec(group=H1, b=b)
        for _ in range(10_000 // 4):
            g = rng.uniform(-5, 5, 3)
            x, gamma = ls.decompose(g)
            rec = H1.multiply(x, ls.point(gamma))
            assert np.max(np.abs(rec - g)) < 1e-12
            d = np.array(H1.weights, dtype=float)
            assert np.all(x >= -1e-12) and np.all(x < b ** d + 1e-12)


def test_invariant_fields_abelian():
    R2 = abelian_group(2)
    f = lambda p: p[..., 0] ** 2
    val = R2.apply_field("left", 0, f, np.array([1.0, 5.0]))
    assert np.isclose(val, 2.0, atol=1e-10)


def test_invariant_fields_h1():
    # X = d/dx - (y/2) d/du applied to f = u at (0, 1, 0) gives -1/2
    f = lambda p: p[..., 2]
    val = H1.apply_field("left", 0, f, np.array([0.0, 1.0, 0.0]))
    assert np.isclose(val, -0.5, atol=1e-12)
    # right field Y_1 = d/dx + (y/2) d/du
    val = H1.apply_field("right", 0, f, np.array([0.0, 1.0, 0.0]))
    assert np.isclose(val, +0.5, atol=1e-12)


def test_line_integral_identity():
    # g(x) - g(0) = int_0^1 [(x . X) g]([t] x) dt for polynomial g, both frames
    def g(p):
        x, y, u = p[..., 0], p[..., 1], p[..., 2]
        return x ** 2 * y - 2.0 * u * x + y ** 3 + 0.5 * u

    rng = np.random.default_rng(9)
    nodes, weights = np.polynomial.legendre.leggauss(12)
    nodes = 0.5 * (nodes + 1.0)
    weights = 0.5 * weights
    for which in ("left", "right"):
        for _ in range(20):
            x = rng.uniform(-1.5, 1.5, 3)
            acc = 0.0
            for t, w in zip(nodes, weights):
                pt = H1.scalar_scale(t, x)
                acc += w * sum(x[m] * H1.apply_field(which, m, g, pt) for m in range(3))
            assert abs(acc - (g(x) - g(np.zeros(3)))) < 1e-10


def test_step2_generic_group():
    rng = np.random.default_rng(10)
    c = rng.normal(size=(2, 3, 3))
    c = c - np.swapaxes(c, 1, 2)
    g = step2_group(c)
    assert g.Q == 3 + 2 * 2
    p, q, s = rng.uniform(-2, 2, (3, 1000, g.n))
    lhs = g.multiply(g.multiply(p, q), s)
    rhs = g.multiply(p, g.multiply(q, s))
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    assert np.allclose(g.multiply(p, -p), 0.0, atol=1e-14)
    r = 1.8
    assert np.allclose(g.dilate(r, g.multiply(p, q)),
                       g.multiply(g.dilate(r, p), g.dilate(r, q)), atol=1e-12)


def test_group_from_config():
    assert group_from_config("abelian", 2).n == 2
    assert group_from_config("heisenberg").Q == 4
    with pytest.raises(ValueError):
        group_from_config("weird")
