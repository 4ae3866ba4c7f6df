"""Desk-scale verification of the discrete frame machinery.

Truncated wavelet systems psi_{j, b gamma}(x) = a^{-jQ/2} psi((b gamma)^{-1}
(a^{-j} x)) are realized on the line through per-scale coefficient matrices
P_j[i, gamma] = psi(a^{-j} x_i - b gamma), so that

    analysis     c_j = a^{-j/2} h P_j^T f,
    <S f, f>     sum_j |c_j|^2            (manifestly >= 0),
    synthesis    S f = sum_j a^{-j/2} P_j c_j,

and the continuous counterpart R f = sum_j f * psi~_{a^j} * psi_{a^j} runs
through wide-support linear convolutions of the same evaluator.  On H^1 the
analysis/synthesis steps become group convolutions read at (grid-aligned)
lattice points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.ndimage import map_coordinates

from .grids import GridSpec, SampledKernel
from .groups import LatticeSpec
from .heat import twisted_convolve
from .kernels import linear_convolve_1d

__all__ = [
    "LineWaveletSystem",
    "FrameReport",
    "decay_envelope_g",
    "decay_envelope_check",
    "make_test_family",
    "family_spectral_band",
    "select_j_window",
    "r_apply_line",
    "lattice_average_residual",
    "deviation_scan",
    "empirical_frame_ratio",
    "gram_extremes",
    "cz_decay_check",
    "H1WaveletSystem",
]


# ---------------------------------------------------------------- line systems


class LineWaveletSystem:
    """Truncated system {psi_{j, b gamma}} on a line grid.

    ``psi_eval`` is a callable with a ``reach`` attribute (support radius).
    ``z_shift`` translates the generator: T_z psi.  Two different generators
    (analysis phi, synthesis psi) are supported through ``phi_eval``.
    """

    def __init__(self, grid: GridSpec, psi_eval, a: float, b: float,
                 j_window, phi_eval=None, z_shift: float = 0.0):
        if grid.group.n != 1 or grid.group.n2 != 0:
            raise ValueError("LineWaveletSystem needs a 1-d abelian grid")
        if b <= 0 or a <= 1:
            raise ValueError("need a > 1 and b > 0")
        self.grid = grid
        self.psi_eval = psi_eval
        self.phi_eval = phi_eval or psi_eval
        self.a = float(a)
        self.b = float(b)
        self.j_lo, self.j_hi = int(j_window[0]), int(j_window[1])
        self.z = float(z_shift)
        self.x = grid.axis(0)
        self.h = grid.spacings[0]
        self._reach = max(getattr(self.psi_eval, "reach", 10.0),
                          getattr(self.phi_eval, "reach", 10.0)) + abs(self.z)

    def gammas(self, j: int) -> np.ndarray:
        v = self.x * self.a ** (-j)
        lo = int(math.ceil((v[0] - self._reach) / self.b))
        hi = int(math.floor((v[-1] + self._reach) / self.b))
        return np.arange(lo, hi + 1)

    def _block(self, ev, j, gam_vals):
        v = self.x * self.a ** (-j)
        return ev(v[:, None] - gam_vals[None, :] - self.z)

    def coefficients(self, f: np.ndarray, chunk: int = 4096):
        """{j: (gammas, coefficients <f, phi_{j,b gamma}>)}."""
        out = {}
        for j in range(self.j_lo, self.j_hi + 1):
            gs = self.gammas(j)
            cj = np.empty(len(gs))
            s = self.a ** (-j / 2.0) * self.h
            for c0 in range(0, len(gs), chunk):
                P = self._block(self.phi_eval, j, gs[c0 : c0 + chunk] * self.b)
                cj[c0 : c0 + len(P.T)] = s * (P.T @ f)
            out[j] = (gs, cj)
        return out

    def quadform_batch(self, F: np.ndarray, chunk: int = 4096) -> np.ndarray:
        """<S f_k, f_k> for the columns of F (phi = psi assumed)."""
        q = np.zeros(F.shape[1])
        for j in range(self.j_lo, self.j_hi + 1):
            gs = self.gammas(j) * self.b
            w = self.a ** (-float(j)) * self.h ** 2
            for c0 in range(0, len(gs), chunk):
                P = self._block(self.psi_eval, j, gs[c0 : c0 + chunk])
                C = P.T @ F
                q += w * (C * C).sum(axis=0)
        return q

    def apply(self, f: np.ndarray, chunk: int = 4096) -> np.ndarray:
        """S_{phi,psi,b} f on the grid."""
        out = np.zeros_like(f)
        for j in range(self.j_lo, self.j_hi + 1):
            gs = self.gammas(j) * self.b
            w = self.a ** (-float(j)) * self.h
            for c0 in range(0, len(gs), chunk):
                gg = gs[c0 : c0 + chunk]
                Pphi = self._block(self.phi_eval, j, gg)
                c = Pphi.T @ f
                Ppsi = Pphi if self.phi_eval is self.psi_eval else self._block(self.psi_eval, j, gg)
                out += w * (Ppsi @ c)
        return out

    def system_columns(self, j_window=None, gamma_range=None):
        """Dense matrix whose columns are the (normalized) system elements;
        for small-window Gram oracles."""
        jlo, jhi = j_window or (self.j_lo, self.j_hi)
        cols, index = [], []
        for j in range(jlo, jhi + 1):
            gs = self.gammas(j) if gamma_range is None else np.asarray(gamma_range)
            sc = self.a ** (-j / 2.0)
            P = self._block(self.psi_eval, j, gs * self.b)
            cols.append(sc * P)
            index.extend((j, int(g)) for g in gs)
        return np.hstack(cols), index


def r_apply_line(grid: GridSpec, psi_eval, a: float, f: np.ndarray, j_window,
                 periodic: bool = False) -> np.ndarray:
    """R_psi f = sum_j f * psi~_{a^j} * psi_{a^j} by grid convolution.

    ``periodic`` treats f as periodic on the box and periodizes the dilated
    kernels (used for spectral-identity checks on delocalized inputs);
    otherwise kernels are sampled on their full support and the convolution
    is linear (zero extension).
    """
    x = grid.axis(0)
    h = grid.spacings[0]
    n = len(x)
    L = 2.0 * grid.extents[0]
    reach = getattr(psi_eval, "reach", 10.0)
    out = np.zeros_like(f)
    for j in range(int(j_window[0]), int(j_window[1]) + 1):
        s = a ** j
        if periodic:
            wraps = int(np.ceil(reach * s / L)) + 1
            shifts = np.arange(-wraps, wraps + 1) * L
            ker = psi_eval((x[None, :] + shifts[:, None]) / s).sum(axis=0) / s
            tker = np.roll(ker[::-1], 1)  # value at -x_i on the fft-aligned grid
            # cyclic convolution; the two half-box origin shifts cancel
            Fk = np.fft.rfft(ker) * np.fft.rfft(tker)
            out += np.fft.irfft(np.fft.rfft(f) * Fk, n) * h * h
        else:
            m = 2 * int(np.ceil(reach * s / h)) + 1
            kx = (np.arange(m) - m // 2) * h
            kv = psi_eval(kx / s) / s
            g = linear_convolve_1d(f, x[0], h, kv[::-1], kx[0])
            out += linear_convolve_1d(g, x[0], h, kv, kx[0])
    return out


def lattice_average_residual(grid: GridSpec, psi_eval, a: float, b: float,
                             f: np.ndarray, j_window, n_z: int) -> float:
    """sup |R_psi f - sum over midpoint z-nodes of b/n_z * S_{T_z psi, T_z psi, b} f|."""
    R = r_apply_line(grid, psi_eval, a, f, j_window)
    acc = np.zeros_like(f)
    for i in range(n_z):
        z = (i + 0.5) * b / n_z
        sys = LineWaveletSystem(grid, psi_eval, a, b, j_window, z_shift=z)
        acc += sys.apply(f) * (b / n_z)
    return float(np.max(np.abs(acc - R)))


def select_j_window(profile, a: float, lam_band, tol: float = 1e-8):
    """j-range covering m_F over [lam_lo, lam_hi] with tails < tol."""
    from .spectral import _window

    return _window([profile], float(a), float(lam_band[0]), float(lam_band[1]), tol)


def make_test_family(grid: GridSpec, rng, n_plain: int = 64, n_mod: int = 8):
    """Deterministic test family: zero-integral superpositions of three
    gaussians (centers in the inner half, widths in [0.5, 2]) plus modulated
    gaussians.  Columns are L^2-normalized."""
    x = grid.axis(0)
    h = grid.spacings[0]
    half = grid.extents[0] / 2.0
    cols = []
    for _ in range(n_plain):
        cs = rng.uniform(-half, half, 3)
        ws = rng.uniform(0.5, 2.0, 3)
        amps = rng.normal(size=3)
        amps = amps - (amps @ ws) * ws / (ws @ ws)  # zero total integral
        g = np.zeros_like(x)
        for cc, ww, aa in zip(cs, ws, amps):
            g += aa * np.exp(-((x - cc) ** 2) / (2.0 * ww * ww))
        cols.append(g / math.sqrt((g * g).sum() * h))
    for _ in range(n_mod):
        cc = rng.uniform(-half, half)
        ww = rng.uniform(0.5, 2.0)
        om = rng.uniform(1.0, 3.0)
        g = np.cos(om * (x - cc)) * np.exp(-((x - cc) ** 2) / (2.0 * ww * ww))
        env = np.exp(-((x - cc) ** 2) / (2.0 * (3.0 * ww) ** 2))
        g -= env * (g.sum() / env.sum())
        cols.append(g / math.sqrt((g * g).sum() * h))
    return np.array(cols).T


def family_spectral_band(F: np.ndarray, grid: GridSpec, frac: float = 1e-7):
    """[lam_lo, lam_hi] holding all but ``frac`` of every member's energy."""
    h = grid.spacings[0]
    xi = 2.0 * np.pi * np.fft.rfftfreq(F.shape[0], d=h)
    lam_lo, lam_hi = math.inf, 0.0
    for k in range(F.shape[1]):
        w = np.abs(np.fft.rfft(F[:, k])) ** 2
        cw = np.cumsum(w)
        cw /= cw[-1]
        ilo = int(np.searchsorted(cw, frac))
        ihi = int(np.searchsorted(cw, 1.0 - frac))
        lam_lo = min(lam_lo, max(xi[max(ilo, 1)], xi[1]) ** 2)
        lam_hi = max(lam_hi, xi[min(ihi + 1, len(xi) - 1)] ** 2)
    return lam_lo, lam_hi


# ------------------------------------------------------------------ reporting


@dataclass
class FrameReport:
    a: float
    b_list: list
    A_hat: list            # raw Rayleigh minima of <Sf,f>/||f||^2
    B_hat: list
    ratio: list            # B_hat / A_hat per b
    normalized_A: list     # V b^Q A_hat, comparable to the spectral A
    normalized_B: list
    A_spectral: float
    B_spectral: float
    deviation: dict = field(default_factory=dict)   # b -> D(b)
    fitted_C: float = float("nan")
    fitted_slope: float = float("nan")
    implied_b0: float = float("nan")
    j_window: tuple = (0, 0)
    seed: int = 0
    family_size: int = 0
    gram: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def trend_ok(self, tie_tol: float = 1e-6) -> bool:
        r = self.ratio
        return all(r[i + 1] <= r[i] * (1.0 + tie_tol) for i in range(len(r) - 1))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def empirical_frame_ratio(grid: GridSpec, psi_eval, a: float, b_list, j_window,
                          family: np.ndarray, A_spectral: float, B_spectral: float,
                          seed: int = 0) -> FrameReport:
    """Rayleigh-quotient extremes of S over the family for each b."""
    h = grid.spacings[0]
    norms = (family * family).sum(axis=0) * h
    rep = FrameReport(a=float(a), b_list=[float(b) for b in b_list],
                      A_hat=[], B_hat=[], ratio=[], normalized_A=[], normalized_B=[],
                      A_spectral=A_spectral, B_spectral=B_spectral,
                      j_window=tuple(j_window), seed=seed, family_size=family.shape[1])
    Q = grid.group.Q
    for b in b_list:
        sys = LineWaveletSystem(grid, psi_eval, a, b, j_window)
        q = sys.quadform_batch(family) / norms
        rep.A_hat.append(float(q.min()))
        rep.B_hat.append(float(q.max()))
        rep.ratio.append(float(q.max() / q.min()) if q.min() > 0 else math.inf)
        rep.normalized_A.append(float(q.min() * b ** Q))
        rep.normalized_B.append(float(q.max() * b ** Q))
    return rep


def deviation_scan(grid: GridSpec, psi_eval, a: float, b_list, j_window,
                   test_set: np.ndarray):
    """D(b) = max_f ||V b^Q S_b f - R f||_2 / ||f||_2 and its log-log fit."""
    b_list = [float(b) for b in b_list]
    if len(b_list) < 2:
        raise ValueError("need at least two b values")
    h = grid.spacings[0]
    Q = grid.group.Q
    R = np.stack([r_apply_line(grid, psi_eval, a, test_set[:, k], j_window)
                  for k in range(test_set.shape[1])], axis=1)
    norms = np.sqrt((test_set * test_set).sum(axis=0) * h)
    D = {}
    for b in b_list:
        sys = LineWaveletSystem(grid, psi_eval, a, b, j_window)
        worst = 0.0
        for k in range(test_set.shape[1]):
            Sf = sys.apply(test_set[:, k]) * b ** Q
            worst = max(worst, float(np.sqrt(((Sf - R[:, k]) ** 2).sum() * h) / norms[k]))
        D[b] = worst
    lb = np.log(np.array(b_list))
    ld = np.log(np.maximum(np.array([D[b] for b in b_list]), 1e-300))
    slope, intercept = np.polyfit(lb, ld, 1)
    # D(b) <= C V b  =>  C from the most binding point (V = 1 for the unit tile)
    C = max(D[b] / b for b in b_list)
    return {"D": D, "slope": float(slope), "intercept": float(intercept), "C": float(C)}


def gram_extremes(grid: GridSpec, psi_eval, a: float, b: float, j_window,
                  gamma_range) -> dict:
    """Eigen-extremes of the small-window Gram matrix and the Rayleigh
    quotients of the corresponding mapped eigenvectors under the restricted
    frame operator (two computational paths that must agree)."""
    sys = LineWaveletSystem(grid, psi_eval, a, b, j_window)
    W, index = sys.system_columns(j_window, gamma_range)
    h = grid.spacings[0]
    G = (W.T @ W) * h
    evals, evecs = np.linalg.eigh(G)
    pos = evals > 1e-9 * evals.max()
    lam_min, lam_max = float(evals[pos].min()), float(evals.max())
    out = {"gram_min": lam_min, "gram_max": lam_max, "size": len(index)}
    # map extreme eigenvectors back to functions, push through the operator
    quotients = []
    for which in (np.nonzero(pos)[0][0], len(evals) - 1):
        v = evecs[:, which]
        fvec = W @ v
        nrm = (fvec * fvec).sum() * h
        # restricted quadratic form over the same (j, gamma) set
        qf = 0.0
        for j in range(j_window[0], j_window[1] + 1):
            gs = np.asarray(gamma_range) * b
            P = psi_eval(sys.x[:, None] * a ** (-j) - gs[None, :])
            c = a ** (-j / 2.0) * h * (P.T @ fvec)
            qf += (c * c).sum()
        quotients.append(float(qf / nrm))
    out["rayleigh_min"], out["rayleigh_max"] = min(quotients), max(quotients)
    return out


def cz_decay_check(grid_reach, psi_eval, a: float, b: float, pairs, j_window,
                   Q: int = 1) -> dict:
    """Normalized Calderon-Zygmund size of the truncated kernel:
    sup over pairs of |K_{psi,psi,b}(x,y)| |x - y|^Q b^Q (line version)."""
    vals = []
    reach = getattr(psi_eval, "reach", 10.0)
    for (xp, yp) in pairs:
        tot = 0.0
        for j in range(int(j_window[0]), int(j_window[1]) + 1):
            s = a ** (-j)
            vx, vy = xp * s, yp * s
            lo = int(math.ceil((min(vx, vy) - reach) / b))
            hi = int(math.floor((max(vx, vy) + reach) / b))
            if hi < lo:
                continue
            gs = np.arange(lo, hi + 1) * b
            tot += a ** (-float(j) * Q) * float(psi_eval(vx - gs) @ psi_eval(vy - gs))
        vals.append(abs(tot) * abs(xp - yp) ** Q * b ** Q)
    return {"max": float(np.max(vals)), "values": vals}


# ------------------------------------------------------- decay envelope lemma


def decay_envelope_g(N: float, norm_vals):
    return (1.0 + np.asarray(norm_vals, dtype=float)) ** (-float(N))


def decay_envelope_check(M: float, N: float, L: float, Q: int = 1,
                         extent: float = 120.0, n: int = 24001,
                         inner: float = 30.0) -> float:
    """sup_x (g_M * g_N)(x) / g_L(x) on the line (Q = 1 geometry).

    Preconditions from the convolution lemma: M, N > Q/2 and
    0 < L < min(M, N) - Q/2.
    """
    if not (M > Q / 2.0 and N > Q / 2.0):
        raise ValueError("need M, N > Q/2")
    if not (0.0 < L < min(M, N) - Q / 2.0):
        raise ValueError("need 0 < L < min(M, N) - Q/2")
    if Q != 1:
        raise ValueError("grid check implemented for the line")
    y = np.linspace(-extent, extent, n)
    h = y[1] - y[0]
    gm = decay_envelope_g(M, np.abs(y))
    gn = decay_envelope_g(N, np.abs(y))
    xs = np.linspace(-inner, inner, 601)
    conv = np.array([float(gm @ decay_envelope_g(N, np.abs(xv - y))) * h for xv in xs])
    ratio = conv / decay_envelope_g(L, np.abs(xs))
    return float(ratio.max())


# ------------------------------------------------------------------ H^1 system


class H1WaveletSystem:
    """Truncated system on H^1 with grid-aligned lattice points.

    Analysis coefficients come from one group convolution per scale,
    c_j(gamma) = a^{jQ/2} (f(a^j .) * psi~)(b gamma), read off at lattice
    nodes; synthesis places the coefficients as point masses and convolves
    with psi.  Test inputs are supplied as point evaluators so dilated
    samples need no interpolation.
    """

    def __init__(self, grid: GridSpec, psi: SampledKernel, a: float, b: float, j_window):
        if grid.group.name != "heisenberg":
            raise ValueError("H1WaveletSystem needs an H^1 grid")
        self.grid = grid
        self.psi = psi
        self.psi_t = psi.reflected()
        self.a = float(a)
        self.b = float(b)
        self.j_lo, self.j_hi = int(j_window[0]), int(j_window[1])
        hx, hy, hu = grid.spacings
        for spacing, step in ((hx, b), (hy, b), (hu, b * b)):
            ratio = step / spacing
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                raise ValueError("lattice must be grid-aligned: b (resp. b^2) "
                                 "must be integer multiples of the spacings")
        self._strides = (int(round(b / hx)), int(round(b / hy)), int(round(b * b / hu)))

    def _lattice_indices(self):
        sx, sy, su = self._strides
        nx, ny, nu = self.grid.counts
        ox = (-int(round(self.grid.axis(0)[0] / self.grid.spacings[0]))) % sx
        oy = (-int(round(self.grid.axis(1)[0] / self.grid.spacings[1]))) % sy
        ou = (-int(round(self.grid.axis(2)[0] / self.grid.spacings[2]))) % su
        return (np.arange(ox, nx, sx), np.arange(oy, ny, sy), np.arange(ou, nu, su))

    def _dilated_sample(self, f_eval, j):
        P = self.grid.points()
        d = np.array(self.grid.group.weights, dtype=float)
        scale = self.a ** (j * d)
        vals = f_eval(P * scale[None, :])
        return vals.reshape(self.grid.counts)

    def quadform(self, f_eval, f_samples=None) -> float:
        """<S f, f> = sum_j sum_gamma |<f, psi_{j, b gamma}>|^2."""
        Q = self.grid.group.Q
        ix, iy, iu = self._lattice_indices()
        tot = 0.0
        for j in range(self.j_lo, self.j_hi + 1):
            gj = SampledKernel(grid=self.grid, values=self._dilated_sample(f_eval, j))
            conv = twisted_convolve(gj, self.psi_t)
            cj = conv.values[np.ix_(ix, iy, iu)] * self.a ** (j * Q / 2.0)
            tot += float((cj ** 2).sum())
        return tot

    def apply(self, f_eval) -> SampledKernel:
        """S f on the grid."""
        Q = self.grid.group.Q
        ix, iy, iu = self._lattice_indices()
        out = np.zeros(self.grid.counts)
        vol = self.grid.cell_volume
        hxs = self.grid.spacings
        for j in range(self.j_lo, self.j_hi + 1):
            gj = SampledKernel(grid=self.grid, values=self._dilated_sample(f_eval, j))
            conv = twisted_convolve(gj, self.psi_t)
            cj = conv.values[np.ix_(ix, iy, iu)] * self.a ** (j * Q / 2.0)
            mass = np.zeros(self.grid.counts)
            mass[np.ix_(ix, iy, iu)] = cj / vol
            syn = twisted_convolve(SampledKernel(grid=self.grid, values=mass), self.psi)
            # resample at v = a^{-j} x
            coords = []
            for ax in range(3):
                xv = self.grid.axis(ax) * self.a ** (-j * self.grid.group.weights[ax])
                coords.append((xv - self.grid.axis(ax)[0]) / hxs[ax])
            mesh = np.meshgrid(*coords, indexing="ij")
            vals = map_coordinates(syn.values, np.stack([m.ravel() for m in mesh]),
                                   order=3, mode="constant", cval=0.0)
            out += self.a ** (-j * Q / 2.0) * vals.reshape(self.grid.counts)
        return SampledKernel(grid=self.grid, values=out)
