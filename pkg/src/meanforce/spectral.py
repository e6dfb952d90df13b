"""Bath spectral densities and the integrals built on them.

Provides J(omega) for four families, the reorganization energy
Q = int J/omega, the overlap kernel K(u) that exponentiates in the coherence
corrections, and the correlation objects c_B(s) and G(tau) used by the
master-equation comparator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedOperationError, ValidationError
from .special import (
    _EULER_GAMMA,
    QuadratureSettings,
    exp1,
    integrate_finite,
    integrate_semi_infinite,
)

__all__ = [
    "SpectralDensity",
    "LorentzDrude",
    "OhmicHardCutoff",
    "DiscreteModes",
    "Tabulated",
    "BathParams",
    "j_of_omega",
    "reorganization_energy",
    "overlap_kernel",
    "bath_correlation",
    "g_double_integral",
    "cutoff_scale",
]


class SpectralDensity:
    """Marker base class; concrete densities are the frozen variants below."""


@dataclass(frozen=True)
class LorentzDrude(SpectralDensity):
    """J(w) = (2Q/pi) * w_c * w / (w_c^2 + w^2); Q is the reorganization energy."""

    Q: float
    omega_c: float

    def __post_init__(self):
        if not (self.Q > 0 and self.omega_c > 0):
            raise ValidationError("LorentzDrude requires Q > 0 and omega_c > 0")


@dataclass(frozen=True)
class OhmicHardCutoff(SpectralDensity):
    """J(w) = eta * w for w < omega_c, zero above."""

    eta: float
    omega_c: float

    def __post_init__(self):
        if not (self.eta > 0 and self.omega_c > 0):
            raise ValidationError("OhmicHardCutoff requires eta > 0 and omega_c > 0")


@dataclass(frozen=True)
class DiscreteModes(SpectralDensity):
    """J(w) = sum_k g_k^2 delta(w - w_k); modes is a sequence of (g_k, w_k)."""

    modes: tuple

    def __init__(self, modes):
        modes = tuple((float(g), float(w)) for g, w in modes)
        if not modes:
            raise ValidationError("DiscreteModes requires at least one mode")
        if any(w <= 0 for _, w in modes):
            raise ValidationError("all mode frequencies must be positive")
        object.__setattr__(self, "modes", modes)

    @property
    def couplings(self) -> np.ndarray:
        return np.array([g for g, _ in self.modes])

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([w for _, w in self.modes])


@dataclass(frozen=True)
class Tabulated(SpectralDensity):
    """J given on a strictly increasing frequency grid, linearly interpolated.

    J is zero below the first grid point and beyond the last. A grid starting
    at omega=0 must have J(0)=0, or int J/omega would diverge.
    """

    omega: np.ndarray
    j: np.ndarray

    def __init__(self, omega, j):
        omega = np.asarray(omega, dtype=float)
        j = np.asarray(j, dtype=float)
        if omega.ndim != 1 or omega.shape != j.shape or omega.size < 2:
            raise ValidationError("Tabulated requires matching 1-D grids, >= 2 points")
        if not (np.all(np.diff(omega) > 0) and omega[0] >= 0):
            raise ValidationError("frequency grid must be strictly increasing and >= 0")
        if np.any(j < 0):
            raise ValidationError("J(omega) must be nonnegative")
        if omega[0] == 0 and j[0] != 0:
            raise ValidationError("J(0) must be 0 for a grid starting at omega=0")
        omega.flags.writeable = False
        j.flags.writeable = False
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "j", j)

    @classmethod
    def from_file(cls, path) -> "Tabulated":
        """Load from a two-column text file (omega, J); '#' starts a comment."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] < 2:
            raise ValidationError(f"{path}: expected two columns (omega, J)")
        return cls(data[:, 0], data[:, 1])


@dataclass(frozen=True)
class BathParams:
    """Inverse temperature and the dimensionless coupling scale."""

    beta: float
    lam: float

    def __post_init__(self):
        if not self.beta > 0:
            raise ValidationError("beta must be positive")
        if not self.lam >= 0:
            raise ValidationError("lambda must be nonnegative")


def j_of_omega(sd: SpectralDensity, omega):
    """Pointwise J(omega); accepts a scalar or an array of frequencies."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValidationError("j_of_omega requires omega >= 0")
    if isinstance(sd, LorentzDrude):
        out = (2.0 * sd.Q / np.pi) * sd.omega_c * w / (sd.omega_c**2 + w**2)
    elif isinstance(sd, OhmicHardCutoff):
        out = np.where(w < sd.omega_c, sd.eta * w, 0.0)
    elif isinstance(sd, Tabulated):
        out = np.interp(w, sd.omega, sd.j, left=0.0, right=0.0)
    elif isinstance(sd, DiscreteModes):
        raise UnsupportedOperationError(
            "DiscreteModes has no pointwise J(omega); use the mode-sum operations"
        )
    else:
        raise ValidationError(f"unknown spectral density {type(sd).__name__}")
    return out if np.ndim(omega) else float(out)


def reorganization_energy(sd: SpectralDensity) -> float:
    """Q = int_0^inf J(omega)/omega domega, in closed form where available."""
    if isinstance(sd, LorentzDrude):
        return sd.Q
    if isinstance(sd, OhmicHardCutoff):
        return sd.eta * sd.omega_c
    if isinstance(sd, DiscreteModes):
        g, w = sd.couplings, sd.frequencies
        return float(np.sum(g**2 / w))
    if isinstance(sd, Tabulated):
        # Exact integral of the linear interpolant: on each cell J = c + d*w,
        # int J/w dw = c*ln(w1/w0) + d*(w1 - w0).
        w0, w1 = sd.omega[:-1], sd.omega[1:]
        j0, j1 = sd.j[:-1], sd.j[1:]
        d = (j1 - j0) / (w1 - w0)
        c = j0 - d * w0
        out = np.sum(d * (w1 - w0))
        nz = w0 > 0
        out += np.sum(c[nz] * np.log(w1[nz] / w0[nz]))
        return float(out)
    raise ValidationError(f"unknown spectral density {type(sd).__name__}")


def cutoff_scale(sd: SpectralDensity) -> float:
    """Characteristic bath frequency used by the regime diagnostics."""
    if isinstance(sd, (LorentzDrude, OhmicHardCutoff)):
        return sd.omega_c
    if isinstance(sd, DiscreteModes):
        return float(np.max(sd.frequencies))
    if isinstance(sd, Tabulated):
        return float(sd.omega[-1])
    raise ValidationError(f"unknown spectral density {type(sd).__name__}")


# ----------------------------------------------------------------------------
# Overlap kernel K(u)
# ----------------------------------------------------------------------------

def _kernel_factor(w: np.ndarray, u: np.ndarray, beta: float) -> np.ndarray:
    """The dimensionless factor r(w; u) with K(u) = int J/w^2 * r.

    The u <-> beta-u symmetric form
    r = (1 + e^{-wb} - e^{-w(b-u)} - e^{-wu}) / (1 - e^{-wb})
    has a numerator that factors as (1 - e^{-wu})(1 - e^{-w(b-u)}), so expm1
    evaluates it to full relative precision for any w*u, with no branch
    switching and no cancellation; the symmetry then holds to rounding,
    which is what makes the detailed-balance identity on f hold tightly.
    r is bounded by tanh(w*beta/4).
    """
    w = np.asarray(w, dtype=float)
    u = np.asarray(u, dtype=float)
    y = w[:, None] * beta  # (m, 1)
    x = w[:, None] * u[None, :]  # (m, n)
    return -np.expm1(-x) * np.expm1(x - y) / np.expm1(-y)


def _overlap_kernel_batch(
    sd: SpectralDensity, beta: float, u: np.ndarray, settings: QuadratureSettings
) -> np.ndarray:
    """K(u) for a batch of u values in [0, beta]; one quadrature per batch."""
    u = np.asarray(u, dtype=float)
    if isinstance(sd, DiscreteModes):
        g, w = sd.couplings, sd.frequencies
        r = _kernel_factor(w, u, beta)
        return (g**2 / w**2) @ r

    def integrand(w):
        w = np.asarray(w, dtype=float)
        jw = j_of_omega(sd, w)
        return (jw / w**2)[:, None] * _kernel_factor(w, u, beta)

    if isinstance(sd, LorentzDrude):
        # r <= tanh(w*beta/4) <= min(1, w*beta/4) gives an integrable envelope.
        def envelope(w):
            return j_of_omega(sd, w) / w**2 * min(1.0, 0.25 * w * beta)

        res = integrate_semi_infinite(
            integrand, 0.0, envelope, settings, omega_ref=sd.omega_c
        )
    else:
        res = integrate_finite(integrand, 0.0, cutoff_scale(sd), settings)
    return np.atleast_1d(np.asarray(res.value, dtype=float))


def overlap_kernel(
    sd: SpectralDensity, beta: float, u: float, settings: QuadratureSettings | None = None
) -> float:
    """K(u) = int_0^inf dw J(w)/w^2 * r(w; u, beta), for 0 <= u <= beta.

    Vanishes at u=0 and u=beta, symmetric about beta/2, nonnegative, and
    approaches u(1-u/beta)*Q in the high-temperature regime.
    """
    beta = float(beta)
    u = float(u)
    if not beta > 0:
        raise ValidationError("beta must be positive")
    if not 0.0 <= u <= beta:
        raise ValidationError(f"u={u} outside [0, beta={beta}]")
    if u == 0.0 or u == beta:
        return 0.0
    s = settings or QuadratureSettings()
    return float(_overlap_kernel_batch(sd, beta, np.array([u]), s)[0])


# ----------------------------------------------------------------------------
# Bath correlation function c_B(s) and its double integral G(tau)
# ----------------------------------------------------------------------------

_MATSUBARA_N = 3000


def _one_minus_cos(x: np.ndarray) -> np.ndarray:
    return 2.0 * np.sin(0.5 * x) ** 2


def _x_minus_sin(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.where(
        np.abs(x) < 1e-4,
        (x**3 / 6.0) * (1.0 - x**2 / 20.0),
        x - np.sin(x),
    )
    return out


def _coth(x: np.ndarray) -> np.ndarray:
    return 1.0 / np.tanh(x)


def _matsubara_coefficients(sd: LorentzDrude, beta: float):
    """Pole and Matsubara expansion coefficients for the Lorentz-Drude bath.

    When beta*omega_c sits on a Matsubara frequency the cot pole and the
    matching sum term cancel; rather than implementing that cancellation, beta
    is nudged by one part in 1e9 (c_B and G are smooth across the point).
    """
    wc, q = sd.omega_c, sd.Q
    ratio = beta * wc / (2.0 * math.pi)
    if abs(ratio - round(ratio)) < 1e-8 and round(ratio) >= 1:
        beta = beta * (1.0 + 1e-9)
    n = np.arange(1.0, _MATSUBARA_N + 1)
    nu = 2.0 * math.pi * n / beta
    c_pole = q * wc * (1.0 / math.tan(beta * wc / 2.0) - 1j)
    c_mats = (4.0 * q * wc / beta) * nu / (nu**2 - wc**2)
    nu_star = 2.0 * math.pi * (_MATSUBARA_N + 0.5) / beta
    return c_pole, c_mats, nu, nu_star


def _tail_r(x: np.ndarray) -> np.ndarray:
    """R(x) = int_x^inf (e^{-t} - 1 + t)/t^3 dt for x > 0.

    Closed form R = e^{-x}/(2x^2) - e^{-x}/(2x) + E1(x)/2 + 1/x - 1/(2x^2);
    below x = 0.35 the 1/x^2 pieces cancel catastrophically, so a power
    series around 0 (with the log from the 1/(2t) part of the integrand)
    takes over.
    """
    x = np.asarray(x, dtype=float)
    small = x < 0.35
    xs = np.where(small, np.where(x > 0.0, x, 1.0), 1.0)
    r_series = 0.75 - 0.5 * _EULER_GAMMA - 0.5 * np.log(xs)
    fact = 2.0
    for m in range(3, 14):
        fact *= m
        term = xs ** (m - 2) / ((m - 2) * fact)
        r_series = r_series + (term if m % 2 else -term)
    xl = np.where(small, 1.0, x)
    ex = np.exp(-xl)
    r_closed = (
        ex / (2.0 * xl**2) - ex / (2.0 * xl) + 0.5 * exp1(xl)
        + 1.0 / xl - 1.0 / (2.0 * xl**2)
    )
    return np.where(small, r_series, r_closed)


def _mu_exp(kappa: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """mu(kappa, tau) = (e^{-kt} - 1 + kt)/kappa^2, stable for small kt."""
    kappa = np.asarray(kappa, dtype=float)
    tau = np.asarray(tau, dtype=float)
    kt = kappa[:, None] * tau[None, :]
    t2 = np.broadcast_to(tau[None, :] ** 2, kt.shape)
    series = t2 * (0.5 - kt / 6.0 + kt**2 / 24.0 - kt**3 / 120.0)
    k2 = np.broadcast_to(kappa[:, None] ** 2, kt.shape)
    with np.errstate(invalid="ignore"):
        direct = np.where(kt > 1e-4, (np.expm1(-kt) + kt) / np.where(k2 > 0, k2, 1.0), 0.0)
    return np.where(kt > 1e-4, direct, series)


def _g_batch(sd: SpectralDensity, beta: float, tau: np.ndarray, settings: QuadratureSettings) -> np.ndarray:
    """G(tau) for a batch of tau >= 0."""
    tau = np.asarray(tau, dtype=float)
    if isinstance(sd, DiscreteModes):
        g, w = sd.couplings, sd.frequencies
        wt = w[:, None] * tau[None, :]
        re = _coth(0.5 * beta * w)[:, None] * _one_minus_cos(wt)
        im = -_x_minus_sin(wt)
        return (g**2 / w**2) @ (re + 1j * im)
    if isinstance(sd, LorentzDrude):
        c_pole, c_mats, nu, nu_star = _matsubara_coefficients(sd, beta)
        g = c_pole * _mu_exp(np.array([sd.omega_c]), tau)[0]
        g = g + c_mats @ _mu_exp(nu, tau)
        # Euler-Maclaurin midpoint correction for the truncated Matsubara
        # tail: sum_{k>N} c_k mu(nu_k, tau) ~ (2Q w_c/pi) tau^2 R(nu* tau).
        # R's large-x form tau/nu* - 1/(2 nu*^2) is off by ~1/(2 nu*^2) for
        # nu* tau < 1, which breaks G(0) = 0 and small-tau monotonicity.
        x = nu_star * tau
        tail = np.zeros_like(tau)
        pos = x > 0.0
        tail[pos] = tau[pos] ** 2 * _tail_r(x[pos])
        g = g + (2.0 * sd.Q * sd.omega_c / math.pi) * tail
        return g

    def integrand(w):
        w = np.asarray(w, dtype=float)
        jw = j_of_omega(sd, w)
        wt = w[:, None] * tau[None, :]
        re = _coth(0.5 * beta * w)[:, None] * _one_minus_cos(wt)
        im = -_x_minus_sin(wt)
        return (jw / w**2)[:, None] * (re + 1j * im)

    res = integrate_finite(integrand, 0.0, cutoff_scale(sd), settings)
    return np.atleast_1d(np.asarray(res.value))


def g_double_integral(
    sd: SpectralDensity, beta: float, tau: float, settings: QuadratureSettings | None = None
) -> complex:
    """G(tau) = int_0^tau (tau - s) c_B(s) ds, reduced to a single w-integral.

    G(0) = 0; Re G is nondecreasing; Im G -> -Q*tau + const for large tau.
    """
    beta = float(beta)
    tau = float(tau)
    if not beta > 0:
        raise ValidationError("beta must be positive")
    if tau < 0:
        raise ValidationError("tau must be nonnegative")
    if tau == 0.0:
        return 0j
    s = settings or QuadratureSettings()
    return complex(_g_batch(sd, beta, np.array([tau]), s)[0])


def bath_correlation(
    sd: SpectralDensity, beta: float, s: float, settings: QuadratureSettings | None = None
) -> complex:
    """c_B(s) = int_0^inf dw J(w)[coth(beta*w/2) cos(ws) - i sin(ws)].

    For DiscreteModes this is the exact finite sum; compact-support densities
    integrate over their support. For LorentzDrude the real part at s=0
    diverges logarithmically (J*coth falls off only as 1/w), so inf+0j is
    returned there; s > 0 uses the Matsubara representation, accurate for
    s down to about beta/1000.
    """
    beta = float(beta)
    s = float(s)
    if not beta > 0:
        raise ValidationError("beta must be positive")
    if s < 0:
        raise ValidationError("s must be nonnegative")
    q = settings or QuadratureSettings()
    if isinstance(sd, DiscreteModes):
        g, w = sd.couplings, sd.frequencies
        val = np.sum(g**2 * (_coth(0.5 * beta * w) * np.cos(w * s) - 1j * np.sin(w * s)))
        return complex(val)
    if isinstance(sd, LorentzDrude):
        if s == 0.0:
            return complex(math.inf, 0.0)
        c_pole, c_mats, nu, _ = _matsubara_coefficients(sd, beta)
        val = c_pole * math.exp(-sd.omega_c * s) + np.sum(c_mats * np.exp(-nu * s))
        return complex(val)

    def integrand(w):
        w = np.asarray(w, dtype=float)
        jw = j_of_omega(sd, w)
        return jw * (_coth(0.5 * beta * w) * np.cos(w * s) - 1j * np.sin(w * s))

    res = integrate_finite(integrand, 0.0, cutoff_scale(sd), q)
    return complex(res.value)
