"""Formal q-expansions over an abstract coefficient module, the formal
Shimura lift, the reindexing operators U_d / B_d / phi_d, and the
numeric Gauss-sum machinery for the constant-term cross-check.

Coefficients may be exact rationals (fractions.Fraction / int) or any
value with add/scalar-multiply semantics exposed through `add`,
`scale`, and `is_zero` duck typing (the symbolic divisors of the
identity module).  Series are sparse with an explicit truncation
bound; reading past the bound is a checked error, never a silent zero.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from cyclelift.errors import HypothesisError, TruncationInsufficientError
from cyclelift.numth import divisors, is_squarefree, kronecker
from cyclelift.quadfield import lvalue_closed_form, make_field

# -- coefficient-module helpers ----------------------------------------------


def _is_zero(c) -> bool:
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


def _add(a, b):
    if hasattr(a, "add"):
        return a.add(b)
    return a + b


def _scale(c, n):
    """n * c for an integer or rational scalar n."""
    if hasattr(c, "scale"):
        return c.scale(n)
    return c * n


# -- series ------------------------------------------------------------------


class FormalSeries:
    """Sparse q-expansion sum_n a(n) q^n with a hard truncation bound.

    Exponents above max_exponent are unknown: coefficient() raises
    TruncationInsufficientError there.  Absent exponents below the
    bound are zero.
    """

    __slots__ = ("coeffs", "max_exponent")

    def __init__(self, coeffs: dict, max_exponent: int):
        if max_exponent < 0:
            raise ValueError("max_exponent must be >= 0")
        clean = {}
        for n, c in coeffs.items():
            if n < 0:
                raise ValueError(f"negative exponent {n}")
            if n > max_exponent:
                raise ValueError(f"exponent {n} above truncation {max_exponent}")
            if not _is_zero(c):
                clean[n] = c
        self.coeffs = clean
        self.max_exponent = max_exponent

    @classmethod
    def zero(cls, max_exponent: int) -> "FormalSeries":
        return cls({}, max_exponent)

    def coefficient(self, n: int):
        if n > self.max_exponent:
            raise TruncationInsufficientError(
                f"coefficient {n} beyond truncation {self.max_exponent}"
            )
        return self.coeffs.get(n, 0)

    def support(self) -> list[int]:
        return sorted(self.coeffs)

    def add(self, other: "FormalSeries") -> "FormalSeries":
        bound = min(self.max_exponent, other.max_exponent)
        out = dict((n, c) for n, c in self.coeffs.items() if n <= bound)
        for n, c in other.coeffs.items():
            if n > bound:
                continue
            out[n] = _add(out[n], c) if n in out else c
        return FormalSeries(out, bound)

    def scale(self, scalar) -> "FormalSeries":
        return FormalSeries(
            {n: _scale(c, scalar) for n, c in self.coeffs.items()}, self.max_exponent
        )

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.max_exponent == other.max_exponent and self.coeffs == other.coeffs

    def __repr__(self):
        terms = ", ".join(f"{n}: {c}" for n, c in sorted(self.coeffs.items())[:6])
        return f"FormalSeries({{{terms}, ...}}, O(q^{self.max_exponent + 1}))"


def series_difference_support(a: FormalSeries, b: FormalSeries) -> list[int]:
    """Exponents (up to the common bound) where the two series differ."""
    bound = min(a.max_exponent, b.max_exponent)
    exps = {n for n in a.coeffs if n <= bound} | {n for n in b.coeffs if n <= bound}
    out = []
    for n in sorted(exps):
        ca, cb = a.coefficient(n), b.coefficient(n)
        if not _is_zero(_add(ca, _scale(cb, -1))):
            out.append(n)
    return out


# -- Shimura parameters and characters ----------------------------------------

PRINCIPAL = "principal"


@dataclass(frozen=True)
class ShimuraParams:
    """Lift parameters (kappa, N, t, chi).

    chi is either the principal character mod 4N (chi_kind='principal')
    or the real character given by a Kronecker-symbol discriminant
    (chi_kind='kronecker', chi_disc=D).
    """

    kappa: int
    level_N: int
    t: int
    chi_kind: str = PRINCIPAL
    chi_disc: int | None = None

    def __post_init__(self):
        if self.kappa < 3 or self.kappa % 2 == 0:
            raise HypothesisError(f"kappa must be odd and >= 3, got {self.kappa}")
        if self.level_N < 1:
            raise HypothesisError(f"N must be positive, got {self.level_N}")
        if self.t < 1 or not is_squarefree(self.t):
            raise HypothesisError(f"t must be positive squarefree, got {self.t}")
        if self.chi_kind not in (PRINCIPAL, "kronecker"):
            raise HypothesisError(f"unsupported character kind {self.chi_kind!r}")
        if self.chi_kind == "kronecker" and not self.chi_disc:
            raise HypothesisError("kronecker character needs a discriminant")

    @property
    def lam(self) -> int:
        return (self.kappa - 1) // 2

    @property
    def modulus(self) -> int:
        """The modulus 4*N*t of the shifted character chi_t."""
        return 4 * self.level_N * self.t

    def chi(self, n: int) -> int:
        if self.chi_kind == PRINCIPAL:
            from math import gcd

            return 1 if gcd(n, 4 * self.level_N) == 1 else 0
        return kronecker(self.chi_disc, n)


def chi_t(params: ShimuraParams, n: int) -> int:
    """The shifted character chi_t(n) = chi(n) (-1|n)^lam (t|n)."""
    if n < 1:
        raise ValueError(f"chi_t requires n >= 1, got {n}")
    value = params.chi(n)
    if value == 0:
        return 0
    if params.lam % 2 == 1:
        value *= kronecker(-1, n)
    return value * kronecker(params.t, n)


# -- the formal Shimura lift ---------------------------------------------------


@dataclass(frozen=True)
class ConstantTermMarker:
    """Placeholder for a constant term outside the exact closed-form
    case: a rational multiple of a(0) whose value this artifact does
    not evaluate (non-contractual path)."""

    a0: object
    params: ShimuraParams


def _closed_form_lvalue(params: ShimuraParams) -> Fraction | None:
    """The exact rational (i/2pi) L(1, check chi_t) when the parameters
    are the paper's (kappa=3, principal chi, t=|Delta|, N=D_B), else
    None."""
    if params.kappa != 3 or params.chi_kind != PRINCIPAL:
        return None
    if params.t % 2 != 0:
        return None
    try:
        field = make_field(-params.t)
        return lvalue_closed_form(field, params.level_N)
    except HypothesisError:
        return None


def shimura_lift(
    series: FormalSeries, params: ShimuraParams, mmax: int | None = None
) -> FormalSeries:
    """The formal Shimura lift: output coefficient at t*m is

        b(m) = sum_{n | m} chi_t(n) n^((kappa-3)/2) a(t m^2 / n^2),

    supported on exponents divisible by t.  The output truncation is
    the largest t*M with t*M^2 within the input truncation (or the
    requested mmax, validated against it).

    The constant term is -a(0) (i/2pi) L(1, check chi_t), evaluated by
    the exact closed form when the parameters admit one; otherwise a
    ConstantTermMarker is stored (and omitted when a(0) = 0).
    """
    t = params.t
    m_reachable = isqrt(series.max_exponent // t)
    if mmax is None:
        m_top = m_reachable
    else:
        if mmax > m_reachable:
            raise TruncationInsufficientError(
                f"lift to m={mmax} needs input through q^{t * mmax * mmax}, "
                f"have {series.max_exponent}"
            )
        m_top = mmax
    power = (params.kappa - 3) // 2
    out: dict[int, object] = {}
    for m in range(1, m_top + 1):
        acc = None
        for n in divisors(m):
            ch = chi_t(params, n)
            if ch == 0:
                continue
            a = series.coefficient(t * (m // n) ** 2)
            if _is_zero(a):
                continue
            term = _scale(a, ch * n**power)
            acc = term if acc is None else _add(acc, term)
        if acc is not None and not _is_zero(acc):
            out[t * m] = acc
    a0 = series.coefficient(0)
    if not _is_zero(a0):
        lrat = _closed_form_lvalue(params)
        if lrat is not None:
            out[0] = _scale(a0, -lrat)
        else:
            out[0] = ConstantTermMarker(a0=a0, params=params)
    return FormalSeries(out, t * m_top)


# -- reindexing operators -------------------------------------------------------


def op_U(d: int, series: FormalSeries) -> FormalSeries:
    """U_d: sum a(n) q^n -> sum a(dn) q^n."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    bound = series.max_exponent // d
    out = {n // d: c for n, c in series.coeffs.items() if n % d == 0 and n // d <= bound}
    return FormalSeries(out, bound)


def op_B(d: int, series: FormalSeries) -> FormalSeries:
    """B_d: sum a(n) q^n -> sum a(n) q^(dn).

    Exponents strictly between multiples of d are known zeros, so the
    bound extends to d*(max_exponent + 1) - 1.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return FormalSeries(
        {d * n: c for n, c in series.coeffs.items()},
        d * (series.max_exponent + 1) - 1,
    )


def op_phi(d: int, series: FormalSeries) -> FormalSeries:
    """phi_d = B_d (1 - U_d): coefficient a(n) - a(dn) at q^(dn)."""
    diff = series.add(op_U(d, series).scale(-1))
    return op_B(d, diff)


def op_phi_set(primes, series: FormalSeries) -> FormalSeries:
    """phi_I for a set of distinct primes (composition; the factors
    commute for coprime indices)."""
    from cyclelift.numth import is_prime

    ps = sorted(primes)
    if len(set(ps)) != len(ps):
        raise ValueError("op_phi_set requires distinct primes")
    if not all(is_prime(d) for d in ps):
        raise ValueError("op_phi_set requires prime indices")
    out = series
    for d in ps:
        out = op_phi(d, out)
    return out


# -- Gauss sums and the numeric L-value -----------------------------------------


def gauss_sum(params: ShimuraParams, a: int) -> complex:
    """check chi_t(a) = sum_{h mod 4Nt} chi_t(h) exp(2 pi i a h / 4Nt)."""
    mod = params.modulus
    total = 0j
    for h in range(1, mod):
        ch = chi_t(params, h)
        if ch:
            total += ch * cmath.exp(2j * cmath.pi * a * h / mod)
    return total


def lvalue_numeric(params: ShimuraParams, s: int, terms: int) -> complex:
    """Cesaro-averaged partial sums of sum_m m^-s check chi_t(m).

    Conditionally convergent at s = 1; the Cesaro mean of the partial
    sums converges to the analytic value.  Numeric cross-check only --
    the contract-bearing value is the exact rational closed form.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    mod = params.modulus
    table = [gauss_sum(params, r) for r in range(mod)]
    partial = 0j
    cesaro = 0j
    for m in range(1, terms + 1):
        partial += table[m % mod] / m**s
        cesaro += partial
    return cesaro / terms


def lvalue_numeric_scaled(params: ShimuraParams, terms: int) -> complex:
    """(i / 2 pi) L(1, check chi_t), numerically."""
    return 1j / (2 * cmath.pi) * lvalue_numeric(params, 1, terms)


# -- JSON series format -----------------------------------------------------------


def rational_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def series_to_json_dict(series: FormalSeries) -> dict:
    """The interchange form: rational coefficients as "num/den", symbolic
    coefficients as lists of {"sym": name, "w": weight} entries."""
    entries = []
    for n in series.support():
        c = series.coeffs[n]
        if isinstance(c, (int, Fraction)):
            entries.append({"n": n, "c": rational_str(c)})
        elif hasattr(c, "to_json_entries"):
            entries.append({"n": n, "c": c.to_json_entries()})
        else:
            raise TypeError(f"coefficient at {n} is not serializable: {c!r}")
    return {"max_exponent": series.max_exponent, "coeffs": entries}


def series_from_json_dict(data: dict, symbolic_parser=None) -> FormalSeries:
    try:
        bound = int(data["max_exponent"])
        coeffs = {}
        for entry in data["coeffs"]:
            n = int(entry["n"])
            c = entry["c"]
            if isinstance(c, str):
                coeffs[n] = Fraction(c)
            elif symbolic_parser is not None:
                coeffs[n] = symbolic_parser(c)
            else:
                raise ValueError(f"symbolic coefficient at {n} not supported here")
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed series data: {exc}") from exc
    return FormalSeries(coeffs, bound)
