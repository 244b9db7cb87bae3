"""Symbolic scalar tags and the assembled eigenfunction seed.

The radial eigenfunction comes from a seed ψ(z) = z²·(…) + z·(…) + (…) whose
series components are exact but whose prefactors mix powers of π, the
imaginary unit from the z-monomials, and ln 2 (from the constant term of
log λ).  Those factors stay symbolic until the evaluator substitutes numbers
at a configured precision, so assembly and principal-part extraction remain
exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from qeigen.qseries import QSeries, rational


def _as_fraction(x) -> Fraction:
    r = rational(x)
    return Fraction(int(r.numerator), int(r.denominator))


@dataclass(frozen=True)
class SymbolicScalar:
    """Exact value r·π^p + s·ln 2 with rational r, s and p ∈ {-2, -1, 0, 1}."""

    pi_coeff: Fraction = Fraction(0)
    pi_pow: int = 0
    ln2_coeff: Fraction = Fraction(0)

    def __post_init__(self):
        if not -2 <= self.pi_pow <= 1:
            raise ValueError(f"unsupported power of π: {self.pi_pow}")
        object.__setattr__(self, "pi_coeff", _as_fraction(self.pi_coeff))
        object.__setattr__(self, "ln2_coeff", _as_fraction(self.ln2_coeff))

    def is_zero(self) -> bool:
        return not self.pi_coeff and not self.ln2_coeff

    def scale(self, r) -> "SymbolicScalar":
        r = _as_fraction(r)
        return SymbolicScalar(self.pi_coeff * r, self.pi_pow, self.ln2_coeff * r)

    def numeric(self):
        """Value as an mpmath float at the active working precision."""
        import mpmath

        out = mpmath.mpf(0)
        if self.pi_coeff:
            out += (
                mpmath.mpf(self.pi_coeff.numerator)
                / self.pi_coeff.denominator
                * mpmath.pi ** self.pi_pow
            )
        if self.ln2_coeff:
            out += mpmath.mpf(self.ln2_coeff.numerator) / self.ln2_coeff.denominator * mpmath.ln2
        return out

    def __str__(self) -> str:
        parts = []
        if self.pi_coeff:
            parts.append(f"{self.pi_coeff}·π^{self.pi_pow}" if self.pi_pow else str(self.pi_coeff))
        if self.ln2_coeff:
            parts.append(f"{self.ln2_coeff}·ln2")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class TaggedSeries:
    """One z-monomial contribution to ψ: (r·π^p·i^m·[ln 2]) × series."""

    series: QSeries
    r: Fraction = Fraction(1)
    pi_pow: int = 0
    i_pow: int = 0
    ln2: bool = False

    def __post_init__(self):
        object.__setattr__(self, "r", _as_fraction(self.r))

    def numeric_factor(self):
        """Scalar prefactor (without the series) as an mpmath complex."""
        import mpmath

        out = mpmath.mpc(mpmath.mpf(self.r.numerator) / self.r.denominator)
        if self.pi_pow:
            out *= mpmath.pi ** self.pi_pow
        if self.i_pow % 4:
            out *= mpmath.mpc(0, 1) ** (self.i_pow % 4)
        if self.ln2:
            out *= mpmath.ln2
        return out


@dataclass(frozen=True)
class PsiExpansion:
    """Assembled seed of a radial Fourier eigenfunction in dimension d.

    ``sign`` selects the family: the eigenvalue is sign·(−1)^{d/4}.  The
    principal lists hold a_0..a_n and b_0..b_n from
    ψ(z) = Σ a_k q^{-k} − iz·Σ b_k q^{-k} + O(e^{iCz}), and ``S_series`` is
    the q-expansion of z^{d/2−2}ψ(Sz) used on the z → 0 path.
    """

    d: int
    sign: int
    z2_part: tuple
    z1_part: tuple
    z0_part: tuple
    principal_a: tuple
    principal_b: tuple
    S_series: QSeries
    c_over_pi: Fraction

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be ±1, got {self.sign}")
        if len(self.principal_a) != len(self.principal_b):
            raise ValueError("principal part lists must have equal length")
        if not 0 < self.c_over_pi < 2:
            raise ValueError(f"decay constant {self.c_over_pi}·π outside (0, 2π)")
        v = self.S_series.valuation2()
        if v is None or v <= 0:
            raise ValueError("S-transformed series must vanish at the cusp")

    @property
    def eigenvalue(self) -> int:
        return self.sign * (-1 if (self.d // 4) % 2 else 1)

    @property
    def depth(self) -> int:
        """Largest index m with (a_m, b_m) ≠ (0, 0)."""
        for m in range(len(self.principal_a) - 1, -1, -1):
            if not self.principal_a[m].is_zero() or not self.principal_b[m].is_zero():
                return m
        return 0
