"""Exponential-coordinate arithmetic for stratified Lie groups.

Supports the abelian groups R^n, the 3-dimensional Heisenberg group, and
generic step-2 groups built from antisymmetric structure constants.  Points
are plain numpy vectors in exponential coordinates; the group inverse is
negation, dilations act coordinate-wise with integer weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupDescriptor",
    "LatticeSpec",
    "abelian_group",
    "heisenberg_group",
    "step2_group",
    "group_from_config",
]


@dataclass(frozen=True)
class GroupDescriptor:
    """A stratified group in exponential coordinates.

    ``weights`` are the dilation exponents d_1 <= ... <= d_n; ``n1`` is the
    dimension of the first layer (coordinates of weight 1).  ``structure``
    holds the bracket constants c[k, i, j] so that the step-2 group law is

        (x, u)(x', u') = (x + x', u + u' + 0.5 * c[k,i,j] x_i x'_j).

    For abelian groups ``structure`` is empty.
    """

    name: str
    n: int
    weights: tuple
    n1: int
    structure: np.ndarray = field(repr=False)  # shape (n2, n1, n1), antisymmetric in (i, j)

    @property
    def Q(self) -> int:
        return int(sum(self.weights))

    @property
    def n2(self) -> int:
        return self.n - self.n1

    def check_point(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.n:
            raise ValueError(f"point has dimension {p.shape[-1]}, group has n={self.n}")
        return p

    # -- group operations -------------------------------------------------

    def multiply(self, p, q):
        """Group product in exponential coordinates (broadcasts over leading axes)."""
        p = self.check_point(p)
        q = self.check_point(q)
        out = p + q
        if self.n2:
            x, xp = p[..., : self.n1], q[..., : self.n1]
            # bracket term: 0.5 * c[k,i,j] x_i x'_j
            br = 0.5 * np.einsum("kij,...i,...j->...k", self.structure, x, xp)
            out = out.copy()
            out[..., self.n1 :] += br
        return out

    def inverse(self, p):
        return -self.check_point(p)

    def dilate(self, r, p):
        """Anisotropic dilation: coordinate k scales by r**d_k."""
        if np.any(np.asarray(r) <= 0):
            raise ValueError("dilation parameter must be positive")
        p = self.check_point(p)
        return p * np.power(float(r), np.array(self.weights, dtype=float))

    def scalar_scale(self, t, p):
        """Plain componentwise scaling [t]x = (t x_1, ..., t x_n); not the dilation."""
        return float(t) * self.check_point(p)

    def standard_norm(self, p):
        """Homogeneous norm |x| = (sum |x_k|^(2 b_k))^(1/(2A)), A = prod d_k, b_k = A/d_k."""
        p = self.check_point(p)
        d = np.array(self.weights, dtype=float)
        A = float(np.prod(d))
        bk = A / d
        s = np.sum(np.abs(p) ** (2.0 * bk), axis=-1)
        return s ** (1.0 / (2.0 * A))

    # -- invariant vector fields ------------------------------------------

    def field_coefficients(self, which, index, p):
        """Coefficient vector a(p) of the invariant field sum_m a_m(p) d/dx_m.

        ``which`` is "left" (the X frame; only first-layer indices are
        admitted) or "right" (the Y frame, defined for every coordinate).
        """
        p = self.check_point(p)
        coeff = np.zeros(p.shape[:-1] + (self.n,))
        if which == "left":
            if not 0 <= index < self.n:
                raise ValueError("left frame index out of range")
            coeff[..., index] = 1.0
            if self.n2 and index < self.n1:
                x = p[..., : self.n1]
                # d/dt (x,u)(t e_i) -> bracket coefficient 0.5*[x, e_i]_k
                coeff[..., self.n1 :] = 0.5 * np.einsum(
                    "kj,...j->...k", self.structure[:, :, index], x
                )
        elif which == "right":
            if not 0 <= index < self.n:
                raise ValueError("right frame index out of range")
            coeff[..., index] = 1.0
            if self.n2 and index < self.n1:
                x = p[..., : self.n1]
                coeff[..., self.n1 :] = 0.5 * np.einsum(
                    "kj,...j->...k", self.structure[:, index, :], x
                )
        else:
            raise ValueError("which must be 'left' or 'right'")
        return coeff

    def apply_field(self, which, index, f, p, h=1e-3):
        """Apply the invariant vector field to a callable f at point p.

        Uses 4th-order central differences per coordinate; exact on
        polynomials of degree <= 4.
        """
        p = self.check_point(p)
        coeff = self.field_coefficients(which, index, p)
        val = 0.0
        for m in range(self.n):
            c = coeff[..., m]
            if np.all(c == 0.0):
                continue
            e = np.zeros(self.n)
            e[m] = 1.0
            d = (
                -f(p + 2 * h * e) + 8 * f(p + h * e) - 8 * f(p - h * e) + f(p - 2 * h * e)
            ) / (12 * h)
            val = val + c * d
        return val


def abelian_group(n: int) -> GroupDescriptor:
    if n < 1:
        raise ValueError("n must be >= 1")
    return GroupDescriptor(
        name=f"abelian{n}",
        n=n,
        weights=(1,) * n,
        n1=n,
        structure=np.zeros((0, n, n)),
    )


def heisenberg_group() -> GroupDescriptor:
    """H^1 in symmetric exponential coordinates: (x,y,u)(x',y',u') =
    (x+x', y+y', u+u'+(x y' - y x')/2)."""
    c = np.zeros((1, 2, 2))
    c[0, 0, 1] = 1.0
    c[0, 1, 0] = -1.0
    return GroupDescriptor(name="heisenberg", n=3, weights=(1, 1, 2), n1=2, structure=c)


def step2_group(structure) -> GroupDescriptor:
    """Generic step-2 group from bracket constants c[k, i, j] (antisymmetric in i, j)."""
    c = np.asarray(structure, dtype=float)
    if c.ndim != 3 or c.shape[1] != c.shape[2]:
        raise ValueError("structure constants must have shape (n2, n1, n1)")
    if not np.allclose(c, -np.swapaxes(c, 1, 2)):
        raise ValueError("structure constants must be antisymmetric in the last two axes")
    n2, n1, _ = c.shape
    return GroupDescriptor(
        name=f"step2_{n1}_{n2}",
        n=n1 + n2,
        weights=(1,) * n1 + (2,) * n2,
        n1=n1,
        structure=c,
    )


def group_from_config(kind: str, n: int = None, structure=None) -> GroupDescriptor:
    kind = kind.strip().lower()
    if kind == "abelian":
        if n is None:
            raise ValueError("abelian group needs n")
        return abelian_group(int(n))
    if kind == "heisenberg":
        return heisenberg_group()
    if kind == "step2":
        if structure is None:
            raise ValueError("step2 group needs structure constants")
        return step2_group(structure)
    raise ValueError(f"unknown group kind '{kind}'")


@dataclass(frozen=True)
class LatticeSpec:
    """Discrete set b*Z^n (as dilates b*gamma) with fundamental tile [0,1)^n.

    On the Heisenberg group Z^3 is not a subgroup in symmetric coordinates,
    but unique decomposition g = x * (b gamma) with x in the dilated tile
    still holds; ``decompose`` implements the floor-based factorization.
    """

    group: GroupDescriptor
    b: float = 1.0

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("b must be positive")

    @property
    def tile_volume(self) -> float:
        return 1.0

    def scaled_tile_volume(self) -> float:
        # volume(b R) = V * b^Q for the dilated tile
        return self.tile_volume * self.b ** self.group.Q

    def point(self, gamma):
        """The lattice point b*gamma (a group dilate of the integer vector)."""
        return self.group.dilate(self.b, np.asarray(gamma, dtype=float))

    def enumerate_ball(self, radius: float):
        """All lattice points b*gamma with standard_norm <= radius, sorted
        lexicographically by integer index (deterministic order)."""
        if radius <= 0:
            raise ValueError("radius must be positive")
        g = self.group
        d = np.array(g.weights, dtype=float)
        # |b gamma| <= radius implies |b^{d_k} gamma_k| <= radius^{d_k}
        caps = np.floor((radius ** d) / (self.b ** d)).astype(int)
        grids = [np.arange(-c, c + 1) for c in caps]
        mesh = np.meshgrid(*grids, indexing="ij")
        idx = np.stack([m.ravel() for m in mesh], axis=-1)
        pts = idx * (self.b ** d)
        keep = g.standard_norm(pts) <= radius + 1e-12
        return [pts[i] for i in np.nonzero(keep)[0]]

    def decompose(self, p):
        """Factor p = x * (b gamma) with x in the dilated tile; returns (x, gamma)."""
        g = self.group
        p = g.check_point(p)
        b = self.b
        d = np.array(g.weights, dtype=float)
        scale = b ** d
        gamma = np.zeros(g.n)
        # first layer is abelian in the x-part: straight mod
        gamma[: g.n1] = np.floor(p[: g.n1] / scale[: g.n1])
        if g.n2:
            # solve u-part: p = x * (b gamma): u_p = x_u + b^2 gamma_u + 0.5 [x_1, b gamma_1]
            x1 = p[: g.n1] - gamma[: g.n1] * scale[: g.n1]
            bg1 = gamma[: g.n1] * scale[: g.n1]
            br = 0.5 * np.einsum("kij,i,j->k", g.structure, x1, bg1)
            rem = p[g.n1 :] - br
            gamma[g.n1 :] = np.floor(rem / scale[g.n1 :])
        x = g.multiply(p, g.inverse(self.point(gamma)))
        return x, gamma.astype(int)
