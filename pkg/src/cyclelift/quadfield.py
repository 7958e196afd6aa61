"""Invariants of the imaginary quadratic field k = Q(sqrt(Delta)) for
squarefree even Delta < 0: class number by reduced-form enumeration,
the splitting character, ideal-norm counts, embedding counts, the
exact L-value product, and the auxiliary split prime.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from cyclelift.errors import HypothesisError, SearchBoundExhaustedError
from cyclelift.numth import (
    INFINITY,
    divisors,
    factorize,
    hilbert_symbol,
    is_prime,
    kronecker,
)


@dataclass(frozen=True)
class QuadField:
    """Immutable record of invariants of k = Q(sqrt(delta)), delta even.

    For even squarefree delta the ring of integers is Z[sqrt(delta)],
    of discriminant 4*delta, and the unit group is {+-1}.
    """

    delta: int
    disc: int
    class_number: int
    unit_order: int


def _reduced_forms(disc: int) -> list[tuple[int, int, int]]:
    """Primitive reduced binary quadratic forms (a, b, c) of negative
    discriminant: |b| <= a <= c, b^2 - 4ac = disc, gcd(a,b,c) = 1, with
    b >= 0 whenever |b| = a or a = c."""
    from math import gcd

    forms = []
    a_bound = isqrt(abs(disc) // 3)
    for a in range(1, a_bound + 1):
        for b in range(-a, a + 1):
            num = b * b - disc
            if num % (4 * a) != 0:
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and (a == -b or a == c):
                continue
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            forms.append((a, b, c))
    return forms


def make_field(delta: int) -> QuadField:
    """Build the QuadField record, enumerating reduced forms of
    discriminant 4*delta for the class number.

    Raises HypothesisError unless delta is negative, even, squarefree.
    """
    if delta >= 0:
        raise HypothesisError(f"delta must be negative, got {delta}")
    if delta % 2 != 0:
        raise HypothesisError(f"delta must be even, got {delta}")
    if not factorize(-delta).is_squarefree():
        raise HypothesisError(f"delta must be squarefree, got {delta}")
    disc = 4 * delta
    h = len(_reduced_forms(disc))
    return QuadField(delta=delta, disc=disc, class_number=h, unit_order=2)


def chi_k(field: QuadField, n: int) -> int:
    """The quadratic splitting character of k at n >= 1: on primes this
    is +1 split, -1 inert, 0 ramified; extended completely
    multiplicatively (equals the Kronecker symbol (4*Delta | n))."""
    if n <= 0:
        raise ValueError(f"chi_k requires n >= 1, got {n}")
    return kronecker(field.disc, n)


def rho(field: QuadField, n: int) -> int:
    """Number of integral ideals of k of norm n, by local factors:
    split p^e contributes e+1, inert contributes 1 for even e and 0 for
    odd e, ramified contributes 1."""
    if n <= 0:
        raise ValueError(f"rho requires n >= 1, got {n}")
    count = 1
    for p, e in factorize(n):
        chi = chi_k(field, p)
        if chi == 1:
            count *= e + 1
        elif chi == -1:
            if e % 2 == 1:
                return 0
        # ramified: factor 1
    return count


def rho_divisor_sum(field: QuadField, n: int) -> int:
    """The divisor-sum expression sum_{a | n} chi_k(a); provably equal
    to rho(n) and kept as an independent code path on purpose."""
    if n <= 0:
        raise ValueError(f"rho_divisor_sum requires n >= 1, got {n}")
    return sum(chi_k(field, a) for a in divisors(n))


def check_discriminant_hypotheses(field: QuadField, d_b: int) -> tuple[int, ...]:
    """Validate the standing hypotheses on a quaternion discriminant:
    squarefree, an even number of prime factors, every factor inert in
    k.  Returns the prime factors."""
    if d_b <= 1:
        raise HypothesisError(f"discriminant must exceed 1, got {d_b}")
    fac = factorize(d_b)
    if not fac.is_squarefree():
        raise HypothesisError(f"discriminant {d_b} is not squarefree")
    if len(fac) % 2 != 0:
        raise HypothesisError(
            f"discriminant {d_b} has an odd number of prime factors"
        )
    for p in fac.primes:
        if chi_k(field, p) != -1:
            raise HypothesisError(
                f"prime {p} dividing {d_b} is not inert in Q(sqrt({field.delta}))"
            )
    return fac.primes


def optimal_embedding_count(field: QuadField, d_b: int) -> int:
    """Number of conjugacy classes of optimal embeddings of o_k into a
    maximal order of the quaternion algebra of discriminant d_b:
    h(k) * 2^(number of prime factors of d_b)."""
    primes = check_discriminant_hypotheses(field, d_b)
    return field.class_number * 2 ** len(primes)


def lvalue_closed_form(field: QuadField, d_b: int) -> Fraction:
    """The contract-bearing exact rational for (i/2pi) L(1, induced
    character): the displayed product

        -(h(k) / |o_k^x|) * prod_{l | d_b} (2 l^2 + l - 1) / l^2.

    Both generating-series constant terms consume this value, so the
    main identity is insensitive to it; see lvalue_series_rational for
    the directly derived value of the underlying series.
    """
    primes = check_discriminant_hypotheses(field, d_b)
    value = Fraction(-field.class_number, field.unit_order)
    for ell in primes:
        value *= Fraction(2 * ell * ell + ell - 1, ell * ell)
    return value


def lvalue_series_rational(field: QuadField, d_b: int) -> Fraction:
    """(i/2pi) L(1, induced character) evaluated directly: expanding the
    induced-character Gauss sums over divisors of d_b gives

        tau(chi) L(1, chi) * prod_{l | d_b} (1 - chi_k(l)),

    and with every l | d_b inert the product is 2^(number of prime
    factors); the class number formula turns the prefactor into
    -h(k)/|o_k^x|.  This is the value the Cesaro-averaged partial sums
    converge to; it differs from lvalue_closed_form."""
    primes = check_discriminant_hypotheses(field, d_b)
    return Fraction(-field.class_number * 2 ** len(primes), field.unit_order)


def auxiliary_prime_profile_ok(field: QuadField, p: int, q: int) -> bool:
    """Check the full Hilbert-symbol profile of (-p*q, Delta): the
    symbol must be -1 exactly at infinity and p, and +1 at every other
    place (only 2, q and primes dividing Delta can be nontrivial)."""
    a = -p * q
    b = field.delta
    places = {2, p, q}
    places.update(factorize(-field.delta).primes)
    if hilbert_symbol(a, b, INFINITY) != -1:
        return False
    for ell in sorted(places):
        expected = -1 if ell == p else 1
        if hilbert_symbol(a, b, ell) != expected:
            return False
    return True


def auxiliary_split_prime(field: QuadField, p: int, bound: int = 10**5) -> int:
    """Smallest prime q, split in k, such that (-p*q, Delta)_l = -1
    exactly for l in {infinity, p}: the existence condition for an
    antilinear endomorphism of norm p*q on the base CM curve.

    Requires p odd and inert in k.  Raises SearchBoundExhaustedError if
    no q <= bound works.
    """
    if p == 2 or not is_prime(p):
        raise HypothesisError(f"p must be an odd prime, got {p}")
    if chi_k(field, p) != -1:
        raise HypothesisError(f"{p} is not inert in Q(sqrt({field.delta}))")
    q = 2
    while q <= bound:
        if is_prime(q) and chi_k(field, q) == 1 and auxiliary_prime_profile_ok(field, p, q):
            return q
        q += 1
    raise SearchBoundExhaustedError(
        f"no auxiliary prime below {bound} for p={p}, delta={field.delta}"
    )
