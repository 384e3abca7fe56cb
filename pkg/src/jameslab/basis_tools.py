"""Candidate bases of J_K, dual bases, moduli, and unconditional-constant
lower bounds.

Everything that certifies a bound is exact; the only floating point lives
inside the search heuristic of :func:`uc_lower_bound`, whose winning
candidate is snapped back to rationals and replayed exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .james_core import (
    DimensionMismatch,
    DualFunctional,
    JVector,
    eval_functional,
    james_norm_sq,
    james_norm_sq_float,
)
from .scalars import Root2Scalar, fmt_rational


class SingularBasis(ValueError):
    pass


class ZeroVector(ValueError):
    pass


class DimensionTooLargeForPatterns(ValueError):
    pass


def invert_rational_matrix(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Gauss-Jordan over the rationals; pivot on the first nonzero entry."""
    n = len(rows)
    a = [[Fraction(v) for v in row] for row in rows]
    if any(len(row) != n for row in a):
        raise ValueError("matrix must be square")
    inv = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise SingularBasis(f"no pivot in column {col}")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        inv[col] = [v / p for v in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                inv[r] = [v - f * w for v, w in zip(inv[r], inv[col])]
    return inv


class Basis:
    """Basis (w_0..w_K) of J_K given by columns in canonical coordinates.

    Invertibility is checked exactly at construction.
    """

    def __init__(self, K: int, columns: tuple[tuple[Fraction, ...], ...]) -> None:
        self.K = int(K)
        self.columns = tuple(tuple(Fraction(v) for v in col) for col in columns)
        if len(self.columns) != self.K + 1 or any(
            len(col) != self.K + 1 for col in self.columns
        ):
            raise DimensionMismatch("basis must be a (K+1) x (K+1) matrix")
        # rows[j][i] = canonical coordinate j of w_i
        rows = [
            [self.columns[i][j] for i in range(self.K + 1)] for j in range(self.K + 1)
        ]
        self._inverse_rows = invert_rational_matrix(rows)

    @classmethod
    def canonical(cls, K: int) -> Basis:
        return cls(
            K,
            tuple(
                tuple(Fraction(1 if i == j else 0) for j in range(K + 1))
                for i in range(K + 1)
            ),
        )

    def vector(self, i: int) -> JVector:
        if not 0 <= i <= self.K:
            raise IndexError(i)
        return JVector(self.K, self.columns[i])

    def combine(self, alpha: tuple[Fraction, ...]) -> JVector:
        """The vector sum_i alpha_i * w_i in canonical coordinates."""
        if len(alpha) != self.K + 1:
            raise DimensionMismatch("one coefficient per basis vector required")
        coeffs = [Fraction(0)] * (self.K + 1)
        for i, a in enumerate(alpha):
            if a == 0:
                continue
            col = self.columns[i]
            for j in range(self.K + 1):
                coeffs[j] += a * col[j]
        return JVector(self.K, tuple(coeffs))

    def to_json_obj(self) -> dict:
        return {
            "K": self.K,
            "columns": [[fmt_rational(v) for v in col] for col in self.columns],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> Basis:
        return cls(
            int(obj["K"]),
            tuple(tuple(Fraction(s) for s in col) for col in obj["columns"]),
        )


@dataclass(frozen=True)
class DualBasis:
    """Rows g*_i over e*_j with g*_i(w_j) = 1 exactly when i == j."""

    K: int
    rows: tuple[tuple[Fraction, ...], ...]

    def coords_of(self, x: JVector) -> tuple[Fraction, ...]:
        """Basis coordinates (g*_0(x), ..., g*_K(x))."""
        if x.K != self.K:
            raise DimensionMismatch((x.K, self.K))
        return tuple(
            sum((r * c for r, c in zip(row, x.coeffs)), Fraction(0))
            for row in self.rows
        )

    def functional(self, i: int) -> DualFunctional:
        return DualFunctional.from_rationals(self.K, self.rows[i])


def dual_basis(basis: Basis) -> DualBasis:
    """Exact inverse-transpose rows; biorthogonality is re-verified."""
    rows = tuple(tuple(row) for row in basis._inverse_rows)
    dual = DualBasis(basis.K, rows)
    for i in range(basis.K + 1):
        coords = dual.coords_of(basis.vector(i))
        for j, c in enumerate(coords):
            if c != (1 if i == j else 0):
                raise SingularBasis("biorthogonality check failed")
    return dual


def modulus_vector(basis: Basis, x: JVector, dual: DualBasis | None = None) -> JVector:
    """|x| = sum_i |g*_i(x)| w_i, exactly, in canonical coordinates."""
    dual = dual or dual_basis(basis)
    coords = dual.coords_of(x)
    return basis.combine(tuple(abs(c) for c in coords))


def modulus_functional(
    basis: Basis, x_star: DualFunctional, dual: DualBasis | None = None
) -> DualFunctional:
    """|x*| = sum_i |x*(w_i)| g*_i, exactly, with coefficients over e*_j."""
    if x_star.K != basis.K:
        raise DimensionMismatch((x_star.K, basis.K))
    dual = dual or dual_basis(basis)
    K = basis.K
    acc = DualFunctional.zero(K)
    for i in range(K + 1):
        v = abs(eval_functional(x_star, basis.vector(i)))
        if v == Root2Scalar.zero():
            continue
        acc = acc + dual.functional(i).scale(v)
    return acc


def sign_align(
    basis: Basis, x: JVector, x_star: DualFunctional, dual: DualBasis | None = None
) -> tuple[JVector, Root2Scalar]:
    """Flip basis coordinates of x so every term pairs nonnegatively.

    Returns x' = sum_i eps_i g*_i(x) w_i (ties resolved to +1) and the
    pairing x*(x') = |x*|(|x|), which is nonnegative by construction.
    """
    if x.K != basis.K or x_star.K != basis.K:
        raise DimensionMismatch((x.K, x_star.K, basis.K))
    dual = dual or dual_basis(basis)
    coords = dual.coords_of(x)
    flipped = []
    for i, c in enumerate(coords):
        term = eval_functional(x_star, basis.vector(i)) * c
        flipped.append(-c if term.sign() < 0 else c)
    x_prime = basis.combine(tuple(flipped))
    pairing = eval_functional(x_star, x_prime)
    return x_prime, pairing


@dataclass(frozen=True)
class SignPattern:
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(e not in (-1, 1) for e in self.entries):
            raise ValueError("sign pattern entries must be -1 or +1")


@dataclass(frozen=True)
class UCEstimate:
    """Certified lower bound on the squared unconditional constant."""

    lower_bound_sq: Fraction
    sign_pattern: SignPattern
    alpha: tuple[Fraction, ...]

    def to_json_obj(self) -> dict:
        return {
            "lower_bound_sq": fmt_rational(self.lower_bound_sq),
            "sign_pattern": list(self.sign_pattern.entries),
            "alpha": [fmt_rational(a) for a in self.alpha],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> UCEstimate:
        return cls(
            Fraction(obj["lower_bound_sq"]),
            SignPattern(tuple(int(e) for e in obj["sign_pattern"])),
            tuple(Fraction(a) for a in obj["alpha"]),
        )


def ratio_sq(
    basis: Basis, eps: SignPattern, alpha: tuple[Fraction, ...]
) -> Fraction:
    """Exact squared norm ratio of the sign-flipped combination to the
    original combination."""
    if len(eps.entries) != basis.K + 1 or len(alpha) != basis.K + 1:
        raise DimensionMismatch("sign pattern and alpha must match the basis")
    base = basis.combine(tuple(alpha))
    if base.is_zero():
        raise ZeroVector("denominator combination is zero")
    flipped = basis.combine(tuple(e * a for e, a in zip(eps.entries, alpha)))
    num, _ = james_norm_sq(flipped)
    den, _ = james_norm_sq(base)
    return num / den


EXHAUSTIVE_MAX_DIMENSION = 12


def _ascend_alpha(
    cols_float: list[list[float]], eps: tuple[int, ...], alpha: list[float]
) -> list[float]:
    """Coordinate ascent on the float norm ratio; heuristic only."""
    K = len(alpha) - 1

    def combine(scales: list[float]) -> list[float]:
        out = [0.0] * (K + 1)
        for i, s in enumerate(scales):
            col = cols_float[i]
            for j in range(K + 1):
                out[j] += s * col[j]
        return out

    def objective(a: list[float]) -> float:
        den = james_norm_sq_float(combine(a))
        if den <= 1e-12:
            return 0.0
        num = james_norm_sq_float(combine([e * v for e, v in zip(eps, a)]))
        return num / den

    best = objective(alpha)
    for _sweep in range(4):
        improved = False
        for i in range(K + 1):
            base = alpha[i]
            for delta in (-0.6, -0.15, 0.15, 0.6):
                alpha[i] = base + delta
                obj = objective(alpha)
                if obj > best * (1 + 1e-12):
                    best = obj
                    base = alpha[i]
                    improved = True
            alpha[i] = base
        if not improved:
            break
    return alpha


def uc_lower_bound(
    basis: Basis,
    strategy: str = "exhaustive",
    budget: int = 2,
    seed: int = 0,
) -> UCEstimate:
    """Best certified squared ratio found over sign patterns and coefficient
    vectors.

    Sign patterns are enumerated exhaustively (needs K <= 12) or sampled
    ("anneal").  Per pattern, the coefficient search seeds the all-ones
    vector and then runs `budget` float coordinate-ascent restarts; each
    candidate is snapped to rationals and replayed exactly, so the result
    is always a valid lower bound and is nondecreasing in `budget`.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    K = basis.K
    ones = SignPattern((1,) * (K + 1))
    alpha0 = (Fraction(1),) + (Fraction(0),) * K
    best = UCEstimate(ratio_sq(basis, ones, alpha0), ones, alpha0)

    if strategy == "exhaustive":
        if K > EXHAUSTIVE_MAX_DIMENSION:
            raise DimensionTooLargeForPatterns(
                f"exhaustive sign enumeration limited to K <= {EXHAUSTIVE_MAX_DIMENSION}"
            )
        patterns = _all_patterns(K)
    elif strategy == "anneal":
        patterns = _sampled_patterns(K, seed, 2 ** min(K + 1, 7))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    cols_float = [[float(v) for v in col] for col in basis.columns]

    def consider(eps: SignPattern, alpha: tuple[Fraction, ...]) -> None:
        nonlocal best
        try:
            r = ratio_sq(basis, eps, alpha)
        except ZeroVector:
            return
        if r > best.lower_bound_sq:
            best = UCEstimate(r, eps, alpha)

    for p_index, entries in enumerate(patterns):
        eps = SignPattern(entries)
        consider(eps, (Fraction(1),) * (K + 1))
        for restart in range(budget):
            rng = random.Random(f"{seed}:{p_index}:{restart}")
            start = [rng.uniform(-1.0, 1.0) for _ in range(K + 1)]
            tuned = _ascend_alpha(cols_float, entries, start)
            snapped = tuple(
                Fraction(v).limit_denominator(10**6) for v in tuned
            )
            consider(eps, snapped)
    return best


def _all_patterns(K: int) -> list[tuple[int, ...]]:
    out = []
    for mask in range(2 ** (K + 1)):
        out.append(tuple(1 if mask & (1 << i) else -1 for i in range(K + 1)))
    out.sort()
    return out


def _sampled_patterns(K: int, seed: int, count: int) -> list[tuple[int, ...]]:
    rng = random.Random(f"{seed}:patterns")
    seen = {(1,) * (K + 1)}
    out = [(1,) * (K + 1)]
    while len(out) < count:
        p = tuple(rng.choice((-1, 1)) for _ in range(K + 1))
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def random_invertible_basis(K: int, rng: random.Random) -> Basis:
    """Rejection-sample a basis with small rational entries; exact
    invertibility is enforced by the Basis constructor."""
    while True:
        cols = tuple(
            tuple(Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(K + 1))
            for _ in range(K + 1)
        )
        try:
            return Basis(K, cols)
        except SingularBasis:
            continue
