"""Sign certification for the derivative-family coefficients.

Every family member splits as an Eisenstein second derivative plus cusp
content,

    f_w = s_w·E''_{w−4} + α̃''_{w−4} + β'_{w−2} + γ_w,

with cusp forms α̃, β, γ.  The Eisenstein channel contributes
s_w·(−2(w−4)/B_{w−4})·n²σ_{w−5}(n) ≍ n^{w−3} with a positive sign in both
parity classes, while the cusp channels are O(n^{(w−1)/2}σ₀(n)).  Comparing
the two with explicit cusp-coefficient bounds (Deligne for one-dimensional
cusp spaces, Jenkins–Rouse in general) yields a certified threshold beyond
which every coefficient is positive; the finitely many below it are checked
by exact scan.  All bound arithmetic is done in interval arithmetic and
rounded outward, so thresholds are conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .forms import QuasiForm, bernoulli, dim_cusp, eisenstein, gen, serre_modular
from .qseries import QSeries, rational


class BadWeight(ValueError):
    """Weight outside the family range (odd, or below the first member)."""


class DecompositionFailure(RuntimeError):
    """Input does not have the family's Eisenstein/cusp structure."""


def _double_factorial(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def mu(w: int) -> Fraction:
    """Leading Eisenstein proportion of the weight-w member."""
    if w % 2 or w < 8 or (w % 4 == 2 and w < 10):
        raise BadWeight(f"no family member of weight {w}")
    if w % 4 == 0:
        k = w // 4 - 2
        den = 80**k * _double_factorial(w - 7) * _double_factorial(w // 2 - 1)
    else:
        k = (w - 10) // 4
        den = 80**k * _double_factorial(w - 7) * _double_factorial(w // 2 - 4)
    return Fraction(3 * math.factorial(k), den)


@dataclass(frozen=True)
class Decomposition:
    w: int
    eisenstein_scale: Fraction
    alpha_cusp: QSeries
    beta_cusp: QSeries
    gamma_cusp: QSeries


def decompose(f_w: QuasiForm) -> Decomposition:
    """Split a family member into the Eisenstein channel and cusp remainders.

    The (A, B, C) components are converted to the derivative representation
    α'' + β' + γ; the multiple of E_{w−4} dictated by the constant-coefficient
    pattern (1, −2, 1)·(−1)^{w/2}·μ_w is removed from α.  β and γ must come
    out cuspidal — a nonzero constant term means the input is not a family
    member in family normalisation.
    """
    w = f_w.weight
    A, B, C = f_w.A, f_w.B, f_w.C
    m = mu(w)
    sign = -1 if w % 4 else 1
    pattern = (sign * m, -2 * sign * m, sign * m)
    got = tuple(Fraction(x.coef(0)) if not x.is_zero() else Fraction(0) for x in (A, B, C))
    if got != pattern:
        raise DecompositionFailure(
            f"constant coefficients {got} do not match the (1,-2,1)·μ pattern at weight {w}"
        )

    alpha = C.scale(Fraction(144, (w - 3) * (w - 4)))
    dC = serre_modular(C, w - 4)
    beta = (B - dC.scale(Fraction(24, w - 4))).scale(Fraction(12, w - 2))
    e4 = gen("E4", C.trunc2 // 2 + 2)
    gamma = (
        A
        - serre_modular(B, w - 2).scale(Fraction(12, w - 2))
        + (e4 * C).scale(Fraction(1, w - 3))
        + serre_modular(dC, w - 2).scale(Fraction(144, (w - 2) * (w - 3)))
    )

    full = f_w.full_series()
    t2 = min(alpha.trunc2, beta.trunc2, gamma.trunc2, full.trunc2)
    reassembled = (
        alpha.derive().derive().truncate2(t2)
        + beta.derive().truncate2(t2)
        + gamma.truncate2(t2)
    )
    if not (reassembled - full.truncate2(t2)).is_zero():
        raise DecompositionFailure(f"derivative representation does not reassemble at weight {w}")

    scale = Fraction(144, (w - 3) * (w - 4)) * sign * m
    alpha_cusp = alpha - eisenstein(w - 4, alpha.trunc2 // 2 + 1).scale(scale)
    for name, part in (("alpha", alpha_cusp), ("beta", beta), ("gamma", gamma)):
        v = part.valuation2()
        if v is not None and v < 2:
            raise DecompositionFailure(f"{name} remainder of weight {w} is not a cusp form")
    return Decomposition(w, scale, alpha_cusp, beta, gamma)


def _iv(x) -> mpmath.iv.mpf:
    f = Fraction(x)
    return mpmath.iv.mpf(f.numerator) / mpmath.iv.mpf(f.denominator)


def jenkins_rouse(g: QSeries, w: int, ell_dim: int):
    """Upper bound constant c with |g(n)| ≤ c·n^{(w−1)/2}·σ₀(n) for a cusp
    form g of weight w; outward-rounded interval endpoint."""
    if g.is_zero():
        return mpmath.mpf(0)
    square_sum = mpmath.iv.mpf(0)
    exp_sum = mpmath.iv.mpf(0)
    for m in range(1, ell_dim + 1):
        c = _iv(g.coef(m))
        square_sum += c * c / mpmath.iv.mpf(m) ** (w - 1)
        exp_sum += c * mpmath.iv.exp(mpmath.iv.mpf("-7.288") * m)
    root = mpmath.iv.sqrt(square_sum)
    tail = (
        mpmath.iv.exp(mpmath.iv.mpf("18.72"))
        * mpmath.iv.mpf("41.41") ** _iv(Fraction(w, 2))
        / mpmath.iv.mpf(w) ** _iv(Fraction(w - 1, 2))
        * abs(exp_sum)
    )
    bound = mpmath.iv.sqrt(mpmath.iv.log(w)) * (11 * root + tail)
    return bound.b


def _first_index(w: int) -> int:
    return w // 4 - 1 if w % 4 == 0 else (w - 6) // 4


def _cusp_constant(part: QSeries, wk: int):
    """Per-channel constant for |g(n)| ≤ c·n^{(wk−1)/2}σ₀(n)."""
    if part.is_zero():
        return mpmath.mpf(0)
    if dim_cusp(wk) <= 1:
        # one-dimensional cusp space: multiple of the normalised eigenform,
        # so Deligne's bound applies with c = |coefficient of q|
        return abs(_iv(part.coef(1))).b
    return jenkins_rouse(part, wk, dim_cusp(wk))


def threshold(w: int, dec: Decomposition) -> int:
    """Least certified n₀: every coefficient with index ≥ n₀ is positive.

    Uses σ_{w−5}(n) ≥ n^{w−5} against σ₀(n) < 2√n, so the Eisenstein channel
    L·n^{w−3} dominates 2(C_α+C_β+C_γ)·n^{(w−1)/2}·√n beyond
    (2C/L)^{2/(w−6)}; rounded upward."""
    c_total = (
        _cusp_constant(dec.alpha_cusp, w - 4)
        + _cusp_constant(dec.beta_cusp, w - 2)
        + _cusp_constant(dec.gamma_cusp, w)
    )
    m0 = _first_index(w)
    if c_total == 0:
        return m0
    L = dec.eisenstein_scale * Fraction(-2 * (w - 4)) / Fraction(bernoulli(w - 4))
    if L <= 0:
        raise DecompositionFailure(f"Eisenstein channel at weight {w} is not positive")
    ratio = 2 * mpmath.iv.mpf(c_total) / _iv(L)
    n0 = mpmath.iv.exp(mpmath.iv.log(ratio) * _iv(Fraction(2, w - 6))).b
    return max(m0, int(mpmath.floor(n0)) + 1)


@dataclass(frozen=True)
class PositivityReport:
    w: int
    threshold_n: int
    scanned_to: int
    first_nonpositive: int | None
    verdict: str

    def to_json(self) -> dict:
        out = {
            "w": self.w,
            "threshold": self.threshold_n,
            "scanned_to": self.scanned_to,
            "verdict": self.verdict,
        }
        if self.first_nonpositive is not None:
            out["first_nonpositive"] = self.first_nonpositive
        return out


def scan(f_w: QuasiForm, up_to: int) -> PositivityReport:
    """Exact sign check of the coefficients from the first claimed-positive
    index through up_to, combined with the certified threshold.

    The input must carry at least up_to coefficients; thresholds for the
    desk-scale weights stay well under the documented 3300 ceiling."""
    w = f_w.weight
    dec = decompose(f_w)
    n0 = threshold(w, dec)
    full = f_w.full_series()
    first_bad = None
    for n in range(_first_index(w), up_to + 1):
        if full.coef(n) <= 0:
            first_bad = n
            break
    if first_bad is not None:
        verdict = "nonpositive-found"
    elif up_to >= n0:
        verdict = "positive-beyond-threshold"
    else:
        verdict = "scan-incomplete"
    return PositivityReport(w, n0, up_to, first_bad, verdict)
