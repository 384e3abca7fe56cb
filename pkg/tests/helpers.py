"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from jameslab.james_core import (
    CertTerm,
    Cycle,
    DualBallCertificate,
    DualFunctional,
    JVector,
    functional_from_certificate,
    james_norm_sq_upper_bound,
)
from jameslab.scalars import ceil_sqrt_rational


def random_vector(
    rng: random.Random, K: int, max_num: int = 8, max_den: int = 6
) -> JVector:
    den = rng.randint(1, max_den)
    return JVector(
        K, tuple(Fraction(rng.randint(-max_num, max_num), den) for _ in range(K + 1))
    )


def random_chain(rng: random.Random, top: int, length: int) -> tuple[int, ...]:
    """Strictly increasing indices drawn from 0..top."""
    chosen: set[int] = set()
    while len(chosen) < length:
        chosen.add(rng.randrange(top + 1))
    return tuple(sorted(chosen))


def rescale_into_unit_ball(x: JVector) -> JVector:
    """Divide by an integer exceeding the certified norm bound."""
    bound = james_norm_sq_upper_bound(x)
    if bound <= 1:
        return x
    return x.scale(Fraction(1, ceil_sqrt_rational(bound)))


def planted_violator(
    chain: tuple[int, ...], eps: Fraction
) -> tuple[DualFunctional, DualBallCertificate, Fraction]:
    """Dual-ball certificate whose chain gaps all equal sqrt(2)/t, scaled
    by the integer t > 1 so every gap becomes sqrt(2) >= eps.

    Returns (scaled functional, unscaled certificate, scale factor).
    """
    m = len(chain)
    t = ceil_sqrt_rational(Fraction(m))
    u = tuple(Fraction((-1) ** i, t) for i in range(m))
    cert = DualBallCertificate((CertTerm(Fraction(1), Cycle(tuple(chain)), u),))
    y0 = functional_from_certificate(cert, max(chain))
    scale = Fraction(t)
    return y0.scale(scale), cert, scale


def zigzag_functional(k: int, gap: Fraction) -> DualFunctional:
    """Rational functional whose values on d_0..d_k zigzag by exactly gap."""
    coeffs = [Fraction(0)]
    for i in range(k):
        coeffs.append(gap if i % 2 == 0 else -gap)
    return DualFunctional.from_rationals(k, tuple(coeffs))
