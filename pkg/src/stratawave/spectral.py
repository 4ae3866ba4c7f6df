"""Scalar spectral computations for wavelet profiles F(lam) = lam^k H(lam).

Everything here is one-dimensional analysis of the periodized square sum

    m(lam) = sum_j |F(a^(2j) lam)|^2,

its extrema over one period (the optimal frame bounds), the scale-invariant
energy I = int |F|^2 dt/t, and the near-tightness envelope obtained from the
midpoint rule.  Series truncations are certified from the decay envelope of
F: |F(lam)| <= min(C0 lam^k, CN lam^-N).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

__all__ = [
    "SpectralProfile",
    "MultiplierAnalysis",
    "mexican_hat_profile",
    "heat_power_profile",
    "zero_lattice_profile",
    "tabulated_profile",
    "zero_profile",
    "profile_from_name",
    "eval_multiplier",
    "frame_bounds",
    "multi_generator_bounds",
    "calderon_constant",
    "daubechies_check",
    "tightness_asymptotics",
    "midpoint_error_bound",
]


@dataclass
class SpectralProfile:
    """F(lam) = lam^k H(lam) with decay envelope for certified truncation.

    ``dH``/``d2H`` are optional analytic derivatives of H; when absent,
    derived quantities fall back to central finite differences.
    ``certified`` is False for tabulated user profiles, whose envelope is
    only an empirical fit.
    """

    name: str
    H: Callable
    k: int = 1
    dH: Optional[Callable] = None
    d2H: Optional[Callable] = None
    C0: float = None  # |F| <= C0 lam^k
    CN: float = None  # |F| <= CN lam^-N
    N: float = 4.0
    certified: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be a positive integer")
        if self.C0 is None or self.CN is None:
            c0, cn = _fit_envelope(self, self.N)
            if self.C0 is None:
                self.C0 = c0
            if self.CN is None:
                self.CN = cn

    def F(self, lam):
        lam = np.asarray(lam, dtype=float)
        return np.where(lam > 0, lam ** self.k * self.H(np.maximum(lam, 1e-300)), 0.0)

    def dF(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.dH is not None:
            return self.k * lam ** (self.k - 1) * self.H(lam) + lam ** self.k * self.dH(lam)
        h = np.maximum(1e-6 * np.abs(lam), 1e-9)
        return (self.F(lam + h) - self.F(lam - h)) / (2 * h)

    # log-axis square G(u) = |F(e^u)|^2 and derivatives
    def G(self, u):
        return self.F(np.exp(u)) ** 2

    def dG(self, u):
        lam = np.exp(u)
        return 2.0 * self.F(lam) * self.dF(lam) * lam

    def d2G(self, u):
        lam = np.exp(u)
        if self.dH is not None and self.d2H is not None:
            k = self.k
            F = self.F(lam)
            Fp = self.dF(lam)
            Fpp = (
                k * (k - 1) * lam ** (k - 2) * self.H(lam)
                + 2 * k * lam ** (k - 1) * self.dH(lam)
                + lam ** k * self.d2H(lam)
            )
            # d2/du2 |F(e^u)|^2 with u = log(lam)
            return 2 * lam ** 2 * (Fp ** 2 + F * Fpp) + 2 * lam * F * Fp
        h = 1e-4
        return (self.G(u + h) - 2 * self.G(u) + self.G(u - h)) / h ** 2

    def envelope_F2(self, lam):
        """Certified bound for |F(lam)|^2."""
        lam = np.asarray(lam, dtype=float)
        return np.minimum(self.C0 * lam ** self.k, self.CN * lam ** (-self.N)) ** 2


def _fit_envelope(prof: SpectralProfile, N: float):
    lam = np.exp(np.linspace(np.log(1e-8), np.log(1e8), 20001))
    absF = np.abs(lam ** prof.k * prof.H(lam))
    c0 = float(np.max(absF / lam ** prof.k)) * 1.0000001
    cn = float(np.max(absF * lam ** N)) * 1.0000001
    return c0, cn


def mexican_hat_profile() -> SpectralProfile:
    """F(lam) = lam exp(-lam/2); the stratified Mexican hat generator."""
    return SpectralProfile(
        name="mexican-hat",
        H=lambda lam: np.exp(-lam / 2.0),
        k=1,
        dH=lambda lam: -0.5 * np.exp(-lam / 2.0),
        d2H=lambda lam: 0.25 * np.exp(-lam / 2.0),
        C0=1.0,
        CN=None,
        N=4.0,
    )


def heat_power_profile(k: int) -> SpectralProfile:
    """F(lam) = lam^k exp(-lam/2); k powers of the generator on the heat semigroup."""
    return SpectralProfile(
        name=f"heat-power-{k}",
        H=lambda lam: np.exp(-lam / 2.0),
        k=int(k),
        dH=lambda lam: -0.5 * np.exp(-lam / 2.0),
        d2H=lambda lam: 0.25 * np.exp(-lam / 2.0),
        C0=1.0,
        CN=None,
        N=4.0,
    )


def zero_lattice_profile(a: float = 2.0 ** (1.0 / 3.0)) -> SpectralProfile:
    """Mexican hat damped by sin^2 placed to vanish on the whole dilation
    lattice {a^(2j)}; fails Daubechies' criterion by construction."""
    w = np.pi / np.log(a * a)

    def H(lam):
        lam = np.maximum(lam, 1e-300)
        return np.exp(-lam / 2.0) * np.sin(w * np.log(lam)) ** 2

    return SpectralProfile(name="zero-lattice", H=H, k=1, C0=1.0, CN=None, N=4.0)


def zero_profile() -> SpectralProfile:
    return SpectralProfile(name="zero", H=lambda lam: 0.0 * np.asarray(lam), k=1,
                           C0=0.0, CN=0.0, N=4.0)


def tabulated_profile(lam_pts, H_pts, k: int = 1) -> SpectralProfile:
    """User profile from (lam, H) samples with monotone-cubic interpolation.

    Outside the tabulated range H is extended by zero; the envelope is an
    empirical fit, so the profile is flagged non-certified.
    """
    lam_pts = np.asarray(lam_pts, dtype=float)
    H_pts = np.asarray(H_pts, dtype=float)
    if lam_pts.ndim != 1 or lam_pts.size < 4 or np.any(np.diff(lam_pts) <= 0):
        raise ValueError("need at least 4 strictly increasing lambda samples")
    interp = PchipInterpolator(lam_pts, H_pts, extrapolate=False)

    def H(lam):
        v = interp(np.asarray(lam, dtype=float))
        return np.nan_to_num(v, nan=0.0)

    return SpectralProfile(name="user", H=H, k=int(k), certified=False)


def profile_from_name(name: str, k: int = 1, a: float = 2.0 ** (1.0 / 3.0)) -> SpectralProfile:
    name = name.strip().lower()
    if name in ("mexican-hat", "mexican_hat", "mexicanhat"):
        return mexican_hat_profile()
    if name.startswith("heat-power"):
        return heat_power_profile(k)
    if name in ("zero-lattice", "zero_lattice"):
        return zero_lattice_profile(a)
    if name == "zero":
        return zero_profile()
    raise ValueError(f"unknown profile '{name}'")


@dataclass
class MultiplierAnalysis:
    a: float
    A: float
    B: float
    argmin_lam: float
    argmax_lam: float
    I: float
    tail_err: float
    search_err: float
    window: tuple
    profile_names: tuple = field(default_factory=tuple)

    @property
    def ratio(self) -> float:
        return self.B / self.A if self.A > 0 else math.inf


def _canonical_a(a: float) -> float:
    a = float(a)
    if a <= 0 or a == 1.0:
        raise ValueError("need a > 0, a != 1")
    return a if a > 1.0 else 1.0 / a


def _window(profiles, a, lam_min, lam_max, tol):
    """j-range such that both series tails of sum_p m_{F_p} are < tol/2."""
    la = math.log(a)
    j_lo, j_hi = 0, 0
    for p in profiles:
        if p.C0 == 0.0:
            continue
        k2 = 2.0 * p.k
        # sum_{j<=jlo} (C0 (a^{2j} lam)^k)^2 = C0^2 lam^{2k} a^{4k jlo}/(1-a^{-4k})
        g = a ** (-2.0 * k2)
        target = tol / 4.0 * (1.0 - g) / (p.C0 ** 2 * lam_max ** k2)
        j_lo = min(j_lo, int(math.floor(math.log(max(target, 1e-300)) / (2.0 * k2 * la))))
        n2 = 2.0 * p.N
        gh = a ** (-2.0 * n2)
        target = tol / 4.0 * (1.0 - gh) / (p.CN ** 2 * lam_min ** (-n2))
        j_hi = max(j_hi, int(math.ceil(-math.log(max(target, 1e-300)) / (2.0 * n2 * la))))
    return j_lo - 1, j_hi + 1


def _tail_bound(profiles, a, lam_min, lam_max, j_lo, j_hi):
    tot = 0.0
    for p in profiles:
        if p.C0 == 0.0:
            continue
        k2, n2 = 2.0 * p.k, 2.0 * p.N
        lo = (p.C0 ** 2) * lam_max ** k2 * a ** (4.0 * p.k * (j_lo - 1)) / (1.0 - a ** (-2.0 * k2))
        hi = (p.CN ** 2) * lam_min ** (-n2) * a ** (-4.0 * p.N * (j_hi + 1)) / (1.0 - a ** (-2.0 * n2))
        tot += lo + hi
    return tot


def _m_windowed(profiles, a, lam, j_lo, j_hi):
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    js = np.arange(j_lo, j_hi + 1)
    scales = np.power(a, 2.0 * js)
    out = np.zeros_like(lam)
    for p in profiles:
        out += (p.F(scales[:, None] * lam[None, :]) ** 2).sum(axis=0)
    return out


def eval_multiplier(profile: SpectralProfile, a: float, lam, tol: float = 1e-12):
    """Evaluate m(lam) = sum_j |F(a^(2j) lam)|^2 with a certified truncation.

    Returns (value, err_bound); err_bound <= tol unless the profile has a
    degenerate envelope.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = _canonical_a(a)
    lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
    if np.any(lam_arr <= 0):
        raise ValueError("lambda must be positive")
    if profile.C0 == 0.0:
        z = np.zeros_like(lam_arr)
        return (z[0], 0.0) if np.isscalar(lam) or np.ndim(lam) == 0 else (z, 0.0)
    j_lo, j_hi = _window([profile], a, lam_arr.min(), lam_arr.max(), tol)
    vals = _m_windowed([profile], a, lam_arr, j_lo, j_hi)
    err = _tail_bound([profile], a, lam_arr.min(), lam_arr.max(), j_lo, j_hi)
    if np.isscalar(lam) or np.ndim(lam) == 0:
        return float(vals[0]), err
    return vals, err


def _second_derivative_bound(profiles, a, j_lo, j_hi):
    """sup over one period of |M''(u)|, M(u) = m(e^u), via dense sampling."""
    c = 2.0 * math.log(a)
    u = np.linspace(0.0, c, 512, endpoint=False)
    js = np.arange(j_lo, j_hi + 1)
    tot = np.zeros_like(u)
    for p in profiles:
        for j in js:
            tot += p.d2G(u + 2.0 * j * math.log(a))
    return float(np.max(np.abs(tot))) * 1.05 + 1e-12


def _refine_extremum(fun, lg, i, sign):
    """Golden refinement of grid extremum at index i (periodic grid lg)."""
    n = len(lg)
    step = lg[1] - lg[0]
    lo = lg[i] - step
    hi = lg[i] + step
    res = optimize.minimize_scalar(
        lambda t: sign * fun(np.exp(t)), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-14},
    )
    return float(np.exp(res.x)), float(sign * res.fun)


def _bounds_impl(profiles, a, tol, names):
    a = _canonical_a(a)
    period = a * a
    j_lo, j_hi = _window(profiles, a, 1.0 / period, period * period, tol)
    tail = _tail_bound(profiles, a, 1.0 / period, period * period, j_lo, j_hi)

    ngrid = 2048
    lg = np.linspace(0.0, math.log(period), ngrid, endpoint=False)
    vals = _m_windowed(profiles, a, np.exp(lg), j_lo, j_hi)

    def m_of(lam):
        return float(_m_windowed(profiles, a, lam, j_lo, j_hi)[0])

    # local refinement around the three best minima / maxima brackets
    order_min = np.argsort(vals)[:3]
    order_max = np.argsort(vals)[-3:]
    best_min, arg_min = float(vals.min()), float(np.exp(lg[int(np.argmin(vals))]))
    best_max, arg_max = float(vals.max()), float(np.exp(lg[int(np.argmax(vals))]))
    for i in order_min:
        lam_i, v = _refine_extremum(m_of, lg, int(i), +1.0)
        if v < best_min:
            best_min, arg_min = v, lam_i
    for i in order_max:
        lam_i, v = _refine_extremum(m_of, lg, int(i), -1.0)
        if v > best_max:
            best_max, arg_max = v, lam_i

    # certification: a minimum can hide between grid points by at most L2 h^2 / 8
    L2 = _second_derivative_bound(profiles, a, j_lo, j_hi)
    h = lg[1] - lg[0]
    search_err = L2 * h * h / 8.0

    I_total = 0.0
    for p in profiles:
        I_total += calderon_constant(p, tol=max(tol, 1e-12))[0]

    # fold argmin/argmax into [1, a^2]
    def fold(lam):
        while lam < 1.0:
            lam *= period
        while lam >= period:
            lam /= period
        return lam

    return MultiplierAnalysis(
        a=a,
        A=best_min,
        B=best_max,
        argmin_lam=fold(arg_min),
        argmax_lam=fold(arg_max),
        I=I_total,
        tail_err=tail,
        search_err=search_err,
        window=(j_lo, j_hi),
        profile_names=tuple(names),
    )


def frame_bounds(profile: SpectralProfile, a: float, tol: float = 1e-10) -> MultiplierAnalysis:
    """Optimal frame bounds A = inf m, B = sup m over one period [1, a^2].

    The search is a dense log grid plus golden refinement; ``search_err``
    bounds what a grid cell can hide (second-derivative certificate) and
    ``tail_err`` the series truncation.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if profile.C0 == 0.0:
        return MultiplierAnalysis(a=_canonical_a(a), A=0.0, B=0.0, argmin_lam=1.0,
                                  argmax_lam=1.0, I=0.0, tail_err=0.0, search_err=0.0,
                                  window=(0, 0), profile_names=(profile.name,))
    return _bounds_impl([profile], a, tol, [profile.name])


def multi_generator_bounds(profiles, a: float, tol: float = 1e-10) -> MultiplierAnalysis:
    """Bounds of sum_k m_{F^k} over one period (several generators)."""
    if not profiles:
        raise ValueError("need at least one profile")
    live = [p for p in profiles if p.C0 > 0.0]
    if not live:
        return frame_bounds(profiles[0], a, tol)
    return _bounds_impl(live, _canonical_a(a), tol, [p.name for p in profiles])


def calderon_constant(profile: SpectralProfile, tol: float = 1e-12):
    """I = int_0^inf |F(t)|^2 dt/t by adaptive quadrature on the log axis."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if profile.C0 == 0.0:
        return 0.0, 0.0
    # integrand G(u) = |F(e^u)|^2 decays like e^(2ku) on the left and
    # e^(-2Nu) on the right; choose cut points from the envelope
    u_lo = math.log(max((tol / 10.0 / max(profile.C0 ** 2, 1e-300)) ** (1.0 / (2 * profile.k)), 1e-280))
    u_hi = -math.log(max((tol / 10.0 / max(profile.CN ** 2, 1e-300)) ** (1.0 / (2 * profile.N)), 1e-280))
    val1, err1 = integrate.quad(lambda u: profile.G(u), u_lo, 0.0, epsabs=tol / 4, epsrel=1e-13, limit=400)
    val2, err2 = integrate.quad(lambda u: profile.G(u), 0.0, u_hi, epsabs=tol / 4, epsrel=1e-13, limit=400)
    # analytic tail bounds outside [u_lo, u_hi]
    tail = (profile.C0 ** 2) * math.exp(2 * profile.k * u_lo) / (2 * profile.k)
    tail += (profile.CN ** 2) * math.exp(-2 * profile.N * u_hi) / (2 * profile.N)
    return val1 + val2, err1 + err2 + tail


def daubechies_check(profile: SpectralProfile, a: float, threshold: float = 1e-10,
                     tol: float = 1e-10):
    """Pass iff A > threshold * B.  On failure the argmin is the witness."""
    mb = frame_bounds(profile, a, tol)
    passed = mb.A > threshold * mb.B and mb.B > 0
    witness = None if passed else mb.argmin_lam
    return passed, witness, mb


@dataclass
class TightnessEnvelope:
    a: float
    c: float
    predicted: float      # I / (2 log a)
    eps: float            # relative envelope: A >= pred*(1-eps), B <= pred*(1+eps)
    I: float
    K: float              # |G(u)| <= K e^(-2|u|)
    G2: float             # sup |G''|
    P: float              # constant in P(N c^3 + e^(-2 N c))
    N: int
    certified: bool


def _decay_constant_K(profile: SpectralProfile) -> float:
    """K with |G(u)| <= K e^(-2|u|), i.e. |F|^2 <= K min(lam^2, lam^-2)."""
    lam = np.exp(np.linspace(np.log(1e-10), np.log(1e10), 40001))
    F2 = profile.F(lam) ** 2
    K = np.max(F2 * np.maximum(lam ** 2, lam ** (-2.0)))
    return float(K) * 1.0000001


def tightness_asymptotics(profile: SpectralProfile, a: float) -> TightnessEnvelope:
    """Midpoint-rule envelope for the near-tightness of the frame bounds.

    Returns the prediction I/(2 log a) together with a computed relative
    envelope eps such that A >= pred (1 - eps) and B <= pred (1 + eps)
    whenever c = 2 log a < 1/e (otherwise the result is flagged heuristic).
    """
    a = _canonical_a(a)
    c = 2.0 * math.log(a)
    I, _ = calderon_constant(profile)
    if I == 0.0:
        return TightnessEnvelope(a, c, 0.0, math.inf, 0.0, 0.0, 0.0, math.inf, 0, False)
    K = _decay_constant_K(profile)
    # sup |G''| over the real line (decays both ways; sample widely)
    u = np.linspace(-80.0, 40.0, 60001)
    G2 = float(np.max(np.abs(profile.d2G(u)))) * 1.05

    def err_of(N):
        mid = G2 / 24.0 * (2 * N + 1) * c ** 3
        t1 = 2.0 * K * c * math.exp(2 * c) * math.exp(-2 * (N + 1) * c) / (1.0 - math.exp(-2 * c))
        t2 = K * math.exp(2 * c) * math.exp(-(2 * N + 1) * c)
        return mid + t1 + t2

    Ns = np.unique(np.maximum(1, np.round(np.exp(np.linspace(0, np.log(1e7), 400))).astype(int)))
    errs = np.array([err_of(int(Nv)) for Nv in Ns])
    ibest = int(np.argmin(errs))
    N = int(Ns[ibest])
    E = float(errs[ibest])  # bound for |c * sum G - I|
    eps = E / I
    P = E / (N * c ** 3 + math.exp(-2 * N * c))
    certified = c < 1.0 / math.e
    return TightnessEnvelope(a=a, c=c, predicted=I / c, eps=eps, I=I, K=K, G2=G2,
                             P=P, N=N, certified=certified)


def midpoint_error_bound(f2norm: float, interval: float, delta: float) -> float:
    """Midpoint-rule error bound (1/24) ||f''|| (b-a) (dx)^2."""
    if f2norm < 0 or interval < 0 or delta < 0:
        raise ValueError("arguments must be nonnegative")
    return f2norm * interval * delta * delta / 24.0
