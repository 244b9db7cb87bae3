"""Eigenfunctions for eigenvalue (−1)^{d/4+1} (the "minus" family).

Here the seed has the shape ψ = f·log λ + ω with f = ω_k·X(j)/Δ^ℓ a weakly
holomorphic form of weight 2 − d/2 on the full modular group, and

    ω = (χ1·Y(j) + χ2·Z(j)) / Δ^ℓ,        ℓ = ⌈(d−4)/24⌉,  k = 6ℓ − (d−4)/4,

where χ1, χ2 are the catalogued weight-2k solutions of the level-two cocycle
equation χ(z) = z^{−2k}χ(Sz) + χ(Tz).  Two pole-order conditions pin the
polynomial coefficients: the direct side χ1·Y + χ2·Z must be O(q^{−n−1}),
and the S-transformed combination

    z^{−2k}·(X·ω_k(Sz)·log λ(Sz) + χ1(Sz)·Y + χ2(Sz)·Z)

— a series in half-integer powers of q only — must vanish to the maximal
achievable order 2n + b(k)/2.  Dimensions in the extra-freedom congruence
classes keep a second basis vector when only the required order ℓ + 1/2 is
imposed, which feeds the origin-constrained variant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expansion import PsiExpansion, SymbolicScalar, TaggedSeries
from .forms import IdentityViolation, chi_fraction, gen, log_lambda, log_lambda_S
from .linalg import kernel_basis, primitive_integer_vector
from .plus import BadDimension, ConstraintUnavailable, NoSolution
from .qseries import QSeries, rational, rational_str

B_OF_K = (3, 3, 5, 5, 7, 7)
# (deg X, deg Y, deg Z) as offsets from n; negative degree means a zero slot
DEG_OFFSETS_MINUS = {
    0: (0, 0, -1),
    1: (-1, 0, 0),
    2: (0, 1, 0),
    3: (0, 1, 0),
    4: (0, 2, 1),
    5: (0, 2, 1),
}
EXTRA_RESIDUES_MINUS = {0, 4, 16, 20, 32, 36}


@dataclass(frozen=True)
class MinusParams:
    d: int
    ell: int
    k: int
    b_k: int
    n: int
    n_minus: int
    extra_dof: bool


def minus_params(d: int) -> MinusParams:
    if d < 4 or d % 4:
        raise BadDimension(f"need d ≡ 0 (mod 4) and d ≥ 4, got {d}")
    ell = -(-(d - 4) // 24)
    k = 6 * ell - (d - 4) // 4
    b_k = B_OF_K[k]
    n = -(-(2 * ell - b_k) // 4)
    n_minus = d // 16 + 1
    if n + ell + 1 != n_minus:
        raise NoSolution(f"bookkeeping mismatch for d={d}: n+ell+1={n+ell+1}, n_minus={n_minus}")
    if not 4 * n + b_k > 2 * ell:
        raise NoSolution(f"d={d}: maximal order 2n+b/2 does not clear the cusp gap ℓ")
    return MinusParams(d, ell, k, b_k, n, n_minus, d % 48 in EXTRA_RESIDUES_MINUS)


@dataclass(frozen=True)
class MinusSolution:
    params: MinusParams
    X: tuple  # ascending rational coefficients in w = j, trailing zeros dropped
    Y: tuple
    Z: tuple
    f_series: QSeries  # ω_k X(j) / Δ^ℓ
    omega_series: QSeries  # (χ1 Y + χ2 Z) / Δ^ℓ
    psiS_series: QSeries  # z^{d/2−2} ψ(Sz), half-integer exponents only
    relaxed_basis: tuple | None = None


# ---------------------------------------------------------------------------
# λ-power reduction
# ---------------------------------------------------------------------------


def _pnorm(c) -> tuple:
    if isinstance(c, (tuple, list)):
        return tuple(rational(x) for x in c)
    return (rational(c),)


def _padd(a, b) -> tuple:
    out = []
    for i in range(max(len(a), len(b))):
        x = a[i] if i < len(a) else rational(0)
        y = b[i] if i < len(b) else rational(0)
        out.append(x + y)
    return tuple(out)


def _pscale(p, c) -> tuple:
    c = rational(c)
    return tuple(c * x for x in p)


def _jshift(p) -> tuple:
    return (rational(0),) + tuple(p)


def _lambda_poly_series(polys, n: int) -> QSeries:
    """Expansion of Σ_m c_m(j)·λ^m to window O(q^n)."""
    jdeg = max((len(t) - 1 for t in polys if any(t)), default=0)
    m = n + 2 * jdeg + 6
    lam = gen("Lambda", m)
    js = gen("J", m)
    jpow = [QSeries.one(2 * m)]
    for _ in range(jdeg):
        jpow.append(jpow[-1] * js)
    lampow = QSeries.one(lam.trunc2)
    acc = QSeries.zero(2 * n, 1)
    for t in polys:
        if any(t):
            term = None
            for c, jp in zip(t, jpow):
                if c:
                    piece = jp.scale(c)
                    term = piece if term is None else term + piece
            acc = acc + term * lampow
        lampow = lampow * lam
    return acc.truncate2(2 * n)


def reduce_lambda_powers(p, n_check: int = 24):
    """Rewrite Σ_i c_i(j)·λ^i with powers λ^m, m ≤ 5, using the degree-six
    relation between λ and j = 256(1−λ+λ²)³/(λ²(1−λ)²):

        λ^6 = 3λ^5 − (6 − j/256)λ^4 + (7 − j/128)λ^3 − (6 − j/256)λ^2 + 3λ − 1.

    Coefficients may be scalars or ascending j-polynomials.  The rewrite is
    re-verified by series substitution to order n_check; a mismatch raises
    IdentityViolation (it would mean the relation itself is corrupted)."""
    cs = [_pnorm(c) for c in p]
    original = [tuple(t) for t in cs]
    q256 = rational(Fraction(1, 256))
    q128 = rational(Fraction(1, 128))
    while len(cs) > 6:
        top = cs.pop()
        if not any(top):
            continue
        deg = len(cs)  # the power just removed
        near = _padd(_pscale(top, -6), _jshift(_pscale(top, q256)))  # −(6 − j/256)·top
        cs[deg - 1] = _padd(cs[deg - 1], _pscale(top, 3))
        cs[deg - 2] = _padd(cs[deg - 2], near)
        cs[deg - 3] = _padd(cs[deg - 3], _padd(_pscale(top, 7), _jshift(_pscale(top, -q128))))
        cs[deg - 4] = _padd(cs[deg - 4], near)
        cs[deg - 5] = _padd(cs[deg - 5], _pscale(top, 3))
        cs[deg - 6] = _padd(cs[deg - 6], _pscale(top, -1))
    while len(cs) < 6:
        cs.append(())
    out = [tuple(t) for t in cs]
    diff = _lambda_poly_series(original, n_check) - _lambda_poly_series(out, n_check)
    if not diff.is_zero():
        raise IdentityViolation(
            f"λ-power reduction fails substitution check at q^{diff.valuation2()}/2"
        )
    return out


# ---------------------------------------------------------------------------
# series building blocks
# ---------------------------------------------------------------------------


def _degrees(params: MinusParams) -> tuple[int, int, int]:
    dx, dy, dz = DEG_OFFSETS_MINUS[params.k]
    return params.n + dx, params.n + dy, params.n + dz


def _work_order(params: MinusParams, n_trunc: int) -> int:
    degx, degy, degz = _degrees(params)
    top = max(degx, degy, degz, 0)
    return n_trunc + 2 * top + 2 * params.ell + 8


def _poly_at(coeffs, x: QSeries) -> QSeries:
    acc = QSeries.const(coeffs[-1], x.trunc2)
    for c in reversed(coeffs[:-1]):
        acc = acc * x + QSeries.const(c, x.trunc2)
    return acc


@dataclass(frozen=True)
class _Pieces:
    """Shared series inputs for one (k, degree) configuration."""

    k: int
    chi1: QSeries
    chi2: QSeries
    chiS1: QSeries  # z^{−2k} χ1(Sz) = (−1)^k θ00^{4k} R1(1−λ)
    chiS2: QSeries
    omega_k: QSeries
    logS: QSeries  # log λ(Sz)
    jpow: tuple


def _pieces(k: int, top: int, n_work: int) -> _Pieces:
    m = n_work + 10
    th = gen("Theta00_4", m)
    lam = gen("Lambda", m)
    lam1 = QSeries.one(lam.trunc2) - lam
    thk = th**k if k else QSeries.one(2 * m)
    sgn = -1 if k % 2 else 1
    chis = []
    for i in (1, 2):
        num, a, b = chi_fraction(i, k)
        s = _poly_at(num, lam1)
        if a:
            s = s / lam1**a
        if b:
            s = s / lam**b
        chis.append((s * thk).scale(sgn))
    js = gen("J", n_work)
    jpow = [QSeries.one(2 * n_work)]
    for _ in range(top):
        jpow.append(jpow[-1] * js)
    return _Pieces(
        k,
        gen("Chi", n_work, 1, k),
        gen("Chi", n_work, 2, k),
        chis[0],
        chis[1],
        gen("Omega", n_work, k),
        log_lambda_S(n_work),
        tuple(jpow),
    )


def _s_columns(pieces: _Pieces, degs) -> tuple[list, list, list]:
    degx, degy, degz = degs
    base_x = pieces.omega_k * pieces.logS
    cols = (
        [base_x * pieces.jpow[i] for i in range(degx + 1)],
        [pieces.chiS1 * pieces.jpow[i] for i in range(degy + 1)],
        [pieces.chiS2 * pieces.jpow[i] for i in range(degz + 1)],
    )
    for block in cols:
        for col in block:
            if not col.even_part().is_zero():
                raise IdentityViolation(
                    f"S-side column for k={pieces.k} has integer-exponent terms"
                )
    return cols


def _direct_columns(pieces: _Pieces, degs) -> tuple[list, list]:
    _, degy, degz = degs
    return (
        [pieces.chi1 * pieces.jpow[i] for i in range(degy + 1)],
        [pieces.chi2 * pieces.jpow[i] for i in range(degz + 1)],
    )


def _lincomb(coeffs, series, fallback_t2: int, step: int = 2) -> QSeries:
    out = None
    for c, s in zip(coeffs, series):
        if c:
            term = s.scale(c)
            out = term if out is None else out + term
    return QSeries.zero(fallback_t2, step) if out is None else out


def _split(vec, degs):
    nx, ny, nz = (max(deg + 1, 0) for deg in degs)
    return tuple(vec[:nx]), tuple(vec[nx : nx + ny]), tuple(vec[nx + ny : nx + ny + nz])


def _system_rows(pieces: _Pieces, degs, n: int, s_target2: int):
    """One row per killed Laurent coefficient: the direct side below q^{−n−1}
    and the S side below q^(s_target2/2)."""
    degx = degs[0]
    nx = max(degx + 1, 0)
    ycols, zcols = _direct_columns(pieces, degs)
    sx, sy, sz = _s_columns(pieces, degs)
    rows = []
    direct = ycols + zcols
    lows = [v for c in direct if (v := c.valuation2()) is not None]
    for e2 in range(min(lows, default=0), -2 * n - 2):
        rows.append([rational(0)] * nx + [c.coef2(e2) for c in direct])
    scols = sx + sy + sz
    lows = [v for c in scols if (v := c.valuation2()) is not None]
    for e2 in range(min(lows, default=s_target2), s_target2):
        rows.append([c.coef2(e2) for c in scols])
    return rows, nx + len(ycols) + len(zcols)


def _fix_sign(x, y, z, vec):
    for poly in (x, y, z):
        lead = next((c for c in reversed(poly) if c), None)
        if lead is not None:
            return [-t for t in vec] if lead < 0 else list(vec)
    raise NoSolution("zero vector escaped the kernel computation")


def _trim(poly) -> tuple:
    out = list(poly)
    while out and not out[-1]:
        out.pop()
    return tuple(out)


def s_transform_minus(k: int, x, y, z, n: int) -> QSeries:
    """q-expansion of z^{−2k}(X(j)·ω_k(Sz)·log λ(Sz) + χ1(Sz)·Y(j) + χ2(Sz)·Z(j))
    to window O(q^n).  ω_k(Sz) picks up exactly z^{2k} (it is modular of weight
    2k on the full group), χ_i(Sz)·z^{−2k} substitutes λ ↦ 1−λ with a (−θ00^4)^k
    prefactor, and log λ(Sz) has the pure half-integer expansion
    −16 Σ σ1(2k+1)/(2k+1)·q^{k+1/2}; the result carries half-integer exponents
    only."""
    x, y, z = _pnorm(x) if x else (), _pnorm(y) if y else (), _pnorm(z) if z else ()
    degs = (len(x) - 1, len(y) - 1, len(z) - 1)
    top = max(*degs, 0)
    n_work = n + 2 * top + 4
    pieces = _pieces(k, top, n_work)
    sx, sy, sz = _s_columns(pieces, degs)
    t2 = 2 * n_work
    out = _lincomb(x, sx, t2, 1) + _lincomb(y, sy, t2, 1) + _lincomb(z, sz, t2, 1)
    return out.truncate2(2 * n)


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


def solve_minus(d: int, n_trunc: int | None = None) -> MinusSolution:
    """Solve the pole-order system for dimension d; the representative is the
    primitive-integer generator with leading coefficient positive in the first
    nonzero slot among X, Y, Z.  When d has the extra degree of freedom, the
    relaxed two-dimensional space is retained for apply_origin_constraint."""
    params = minus_params(d)
    if n_trunc is None:
        n_trunc = max(2 * params.n + params.b_k + params.ell + 8, 16)
    n_work = _work_order(params, n_trunc)
    degs = _degrees(params)
    pieces = _pieces(params.k, max(*degs, 0), n_work)

    rows, nunk = _system_rows(pieces, degs, params.n, 4 * params.n + params.b_k)
    kern = kernel_basis(rows, nunk)
    if len(kern) != 1:
        raise NoSolution(f"d={d}: tight system has kernel dimension {len(kern)}, expected 1")
    vec = [rational(t) for t in primitive_integer_vector(list(kern[0]))]
    vec = _fix_sign(*_split(vec, degs), vec)

    relaxed = None
    if params.extra_dof:
        relaxed_rows, _ = _system_rows(pieces, degs, params.n, 2 * params.ell + 1)
        rk = kernel_basis(relaxed_rows, nunk)
        if len(rk) != 2:
            raise NoSolution(
                f"d={d}: relaxed system has kernel dimension {len(rk)}, expected 2"
            )
        relaxed = tuple(tuple(v) for v in rk)

    return _build_solution(params, vec, pieces, n_work, n_trunc, relaxed, tight=True)


def _build_solution(
    params, vec, pieces, n_work, n_trunc, relaxed, *, tight: bool
) -> MinusSolution:
    degs = _degrees(params)
    x, y, z = _split(vec, degs)
    ycols, zcols = _direct_columns(pieces, degs)
    sx, sy, sz = _s_columns(pieces, degs)
    t2w = 2 * n_work

    f_num = _lincomb(x, [pieces.omega_k * jp for jp in pieces.jpow], t2w)
    w_num = _lincomb(y, ycols, t2w) + _lincomb(z, zcols, t2w)
    s_num = _lincomb(x, sx, t2w, 1) + _lincomb(y, sy, t2w, 1) + _lincomb(z, sz, t2w, 1)

    vw = w_num.valuation2()
    if vw is not None and vw < -2 * params.n - 2:
        raise NoSolution(f"d={params.d}: direct side violates O(q^{-params.n - 1})")
    vs = s_num.valuation2()
    if tight:
        target2 = 4 * params.n + params.b_k
        if vs is None or vs != target2:
            raise NoSolution(
                f"d={params.d}: S-side valuation {vs} ≠ maximal order {target2} (half-steps)"
            )
    else:
        if vs is not None and vs < 2 * params.ell + 1:
            raise NoSolution(f"d={params.d}: S-side violates the required order ℓ+1/2")

    dinv = QSeries.one(t2w) if params.ell == 0 else (gen("Delta", n_work) ** params.ell).invert()
    t2 = 2 * n_trunc

    def cut(s: QSeries) -> QSeries:
        if s.trunc2 < t2:
            raise NoSolution(
                f"d={params.d}: internal window {s.trunc2} fell below requested {t2}"
            )
        return s.truncate2(t2)

    f = cut(f_num * dinv)
    omega = cut(w_num * dinv)
    psiS = cut(s_num * dinv)

    if f.coef(-params.n_minus):
        raise NoSolution(f"d={params.d}: log-term form has a pole of full depth {params.n_minus}")
    if tight and not omega.coef(-params.n_minus):
        raise NoSolution(f"d={params.d}: ω has zero coefficient at q^-{params.n_minus}")

    return MinusSolution(params, _trim(x), _trim(y), _trim(z), f, omega, psiS, relaxed)


def apply_origin_constraint(sol: MinusSolution, n_trunc: int | None = None) -> MinusSolution:
    """Within the relaxed two-dimensional space, return the unique (up to
    scalar) element whose eigenfunction vanishes at the origin: b_0 = 0, i.e.
    the constant coefficient of the log-term form f is zero."""
    params = sol.params
    if not params.extra_dof:
        raise ConstraintUnavailable(
            f"d={params.d} has no extra degree of freedom (d mod 48 = {params.d % 48})"
        )
    if sol.relaxed_basis is None:
        raise ConstraintUnavailable("solution lacks the relaxed basis; re-run solve_minus")
    if n_trunc is None:
        n_trunc = max(2 * params.n + params.b_k + params.ell + 8, 16)
    n_work = _work_order(params, n_trunc)
    degs = _degrees(params)
    pieces = _pieces(params.k, max(*degs, 0), n_work)
    dinv = QSeries.one(2 * n_work) if params.ell == 0 else (
        gen("Delta", n_work) ** params.ell
    ).invert()
    fcols = [pieces.omega_k * jp for jp in pieces.jpow]

    def b0_functional(vec):
        x, _, _ = _split(vec, degs)
        return (_lincomb(x, fcols, 2 * n_work) * dinv).coef(0)

    v1, v2 = sol.relaxed_basis
    c1, c2 = b0_functional(v1), b0_functional(v2)
    if not c1 and not c2:
        raise NoSolution(f"d={params.d}: origin constraint is degenerate on the space")
    combo = [c2 * a - c1 * b for a, b in zip(v1, v2)]
    vec = [rational(t) for t in primitive_integer_vector(combo)]
    vec = _fix_sign(*_split(vec, degs), vec)
    out = _build_solution(params, vec, pieces, n_work, n_trunc, sol.relaxed_basis, tight=False)
    if out.f_series.coef(0):
        raise NoSolution(f"d={params.d}: constrained combination still has b_0 ≠ 0")
    return out


# ---------------------------------------------------------------------------
# assembly and checks
# ---------------------------------------------------------------------------


def assemble_psi_minus(sol: MinusSolution, n_trunc: int | None = None) -> PsiExpansion:
    """Expand the solved data into the eigenfunction seed

        ψ(z) = z·(πi·f) + (4 ln2·f + f·tail(log λ) + ω),

    splitting log λ = πiz + 4 ln2 + tail.  The principal part reads off as
    b_m = −π·[q^{-m}]f and a_m = [q^{-m}](f·tail + ω) + 4 ln2·[q^{-m}]f — the
    tail product feeds back into integer exponents above the pole of f, so the
    a-side must be read from the assembled constant part, not from ω alone;
    its half-integer exponents must all sit above q^0 or the seed is invalid.
    The non-principal remainder decays like e^{iπz/2}.  ``n_trunc`` only trims
    the stored windows."""
    params = sol.params
    f, omega, psiS = sol.f_series, sol.omega_series, sol.psiS_series
    if n_trunc is not None:
        t2 = 2 * n_trunc
        f, omega, psiS = f.truncate2(t2), omega.truncate2(t2), psiS.truncate2(t2)
    tail = log_lambda(f.trunc2 // 2 + params.n_minus + 2).tail
    const_part = f * tail + omega
    odd = const_part.odd_part()
    ov = odd.valuation2()
    if ov is not None and ov < 1:
        raise NoSolution(
            f"d={params.d}: principal part has a half-integer exponent at q^{ov}/2"
        )

    a = tuple(
        SymbolicScalar(pi_coeff=const_part.coef(-m), ln2_coeff=rational(4) * f.coef(-m))
        for m in range(params.n_minus + 1)
    )
    b = tuple(
        SymbolicScalar(pi_coeff=-f.coef(-m), pi_pow=1) for m in range(params.n_minus + 1)
    )
    if not b[params.n_minus].is_zero():
        raise NoSolution(f"d={params.d}: deepest z-coefficient b_{params.n_minus} ≠ 0")
    return PsiExpansion(
        d=params.d,
        sign=-1,
        z2_part=(),
        z1_part=(TaggedSeries(f, r=1, pi_pow=1, i_pow=1),),
        z0_part=(TaggedSeries(const_part), TaggedSeries(f, r=4, ln2=True)),
        principal_a=a,
        principal_b=b,
        S_series=psiS,
        c_over_pi=Fraction(1, 2),
    )


def _proportional_series(a: QSeries, b: QSeries) -> bool:
    ratio = None
    for e2 in range(min(a.lo2, b.lo2), min(a.trunc2, b.trunc2)):
        ca, cb = a.coef2(e2), b.coef2(e2)
        if not ca and not cb:
            continue
        if not ca or not cb:
            return False
        r = cb / ca
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True


def chi_functional_check(k: int, n: int = 48) -> dict:
    """Verify by dual routes that both catalogued χ_i^(k) satisfy
    χ(z) − χ(Tz) − z^{−2k}χ(Sz) = 0 up to O(q^n): the T-side flips the sign
    of half-integer exponents on the direct expansion, while the S-side is
    built independently through the λ ↦ 1−λ substitution.  Also certifies the
    pair is not proportional.  Raises IdentityViolation on any failure."""
    pieces = _pieces(k, 0, n)
    report = {"k": k, "order": n}
    for i, chi, chiS in ((1, pieces.chi1, pieces.chiS1), (2, pieces.chi2, pieces.chiS2)):
        resid = chi - chi.t_map() - chiS
        if not resid.is_zero():
            raise IdentityViolation(
                f"χ_{i}^({k}) fails the cocycle equation first at q^{resid.valuation2()}/2"
            )
        report[f"chi{i}"] = "ok"
    if _proportional_series(pieces.chi1, pieces.chi2):
        raise IdentityViolation(f"χ_1^({k}) and χ_2^({k}) are proportional on the window")
    report["independent"] = True
    return report


def to_record(sol: MinusSolution) -> dict:
    """JSON-ready record of a solved dimension."""
    p = sol.params
    return {
        "d": p.d,
        "ell": p.ell,
        "k": p.k,
        "n": p.n,
        "n_minus": p.n_minus,
        "X": [rational_str(c) for c in sol.X],
        "Y": [rational_str(c) for c in sol.Y],
        "Z": [rational_str(c) for c in sol.Z],
        "chi_basis": "table-4",
    }
