"""Metastable convergence and bounded-fluctuation machinery.

A sequence has bounded fluctuations with budget f(eps) when, starting
from any index and chasing deviations of eps/2 through windows [m, F(m)],
a stable window appears within f(eps) re-anchorings.  The finder here
implements exactly that iteration and re-verifies every interval it
returns by direct scan.  The harnesses run it against the product
sequences of a measure-space model, and the conclusion search probes the
one exact consequence the product matrix rules out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .measure_space import (
    MeasureSpaceModel,
    StepFunction,
    atom_subsets,
    integrate_over,
    l1_norm,
    mu_of,
    product_matrix,
)
from .reporting import Report, ReportEntry
from .scalars import ceil_inverse, ceil_rational, fmt_rational


class BudgetExceeded(Exception):
    """The deviation chase used up the claimed fluctuation budget."""

    def __init__(self, iterations: int, last_anchor: int) -> None:
        super().__init__(f"no stable interval within {iterations} iterations")
        self.iterations = iterations
        self.last_anchor = last_anchor


@dataclass(frozen=True)
class IndexFunction:
    """Total index map, tabulated up to a horizon.

    Beyond the table the value is max(n, tail_floor); plain tabulated
    functions use tail_floor = 0, which is the identity extension.
    """

    table: tuple[int, ...]
    tail_floor: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if any(v < 0 for v in self.table):
            raise ValueError("index functions map into nonnegative indices")

    def __call__(self, n: int) -> int:
        if n < 0:
            raise IndexError(n)
        if n < len(self.table):
            return self.table[n]
        return max(n, self.tail_floor)

    @classmethod
    def from_callable(cls, fn, horizon: int) -> IndexFunction:
        return cls(tuple(int(fn(n)) for n in range(horizon + 1)))


@dataclass(frozen=True)
class SequenceOracle:
    """Total rational sequence, constant beyond its tabulated horizon."""

    values: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(Fraction(v) for v in self.values))
        if not self.values:
            raise ValueError("sequence needs at least one tabulated value")

    def __call__(self, n: int) -> Fraction:
        if n < 0:
            raise IndexError(n)
        return self.values[min(n, len(self.values) - 1)]


@dataclass(frozen=True)
class StableInterval:
    """Window [m, end] on which the sequence stays within eps."""

    m: int
    end: int
    fluctuations_used: int


def monotonize(F: IndexFunction) -> IndexFunction:
    """Running maximum; dominates F pointwise and is nondecreasing."""
    table = []
    running = 0
    for v in F.table:
        running = max(running, v)
        table.append(running)
    return IndexFunction(tuple(table), tail_floor=max(running, F.tail_floor))


def count_fluctuations(
    seq: SequenceOracle, eps: Fraction, index_range: tuple[int, int]
) -> int:
    """Greedy eps-jump count over [start, end]: re-anchor at each index
    whose value strays at least eps from the current anchor."""
    eps = Fraction(eps)
    start, end = index_range
    if start > end or start < 0:
        raise ValueError("empty or invalid index range")
    anchor = seq(start)
    count = 0
    for j in range(start + 1, end + 1):
        v = seq(j)
        if abs(v - anchor) >= eps:
            count += 1
            anchor = v
    return count


def find_stable_interval(
    seq: SequenceOracle,
    eps: Fraction,
    F: IndexFunction,
    n: int,
    budget: int,
) -> StableInterval:
    """Chase eps/2 deviations through windows until one window is stable.

    Starting from m_0 = n, each step either finds the least index in
    [m_i, F(m_i)] deviating from the anchor by at least eps/2 (and
    re-anchors there) or declares the window stable.  A returned interval
    is re-verified by direct scan: any two values in it differ by less
    than eps.  Raises :class:`BudgetExceeded` after `budget` re-anchorings.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    F = monotonize(F)
    half = eps / 2
    m = n
    for used in range(budget + 1):
        top = max(F(m), m)
        anchor = seq(m)
        deviation = None
        for j in range(m + 1, top + 1):
            if abs(seq(j) - anchor) >= half:
                deviation = j
                break
        if deviation is None:
            lo = min(seq(j) for j in range(m, top + 1))
            hi = max(seq(j) for j in range(m, top + 1))
            if not hi - lo < eps:  # pragma: no cover - implied by the chase
                raise AssertionError("stable interval failed direct verification")
            return StableInterval(m=m, end=top, fluctuations_used=used)
        m = deviation
    raise BudgetExceeded(budget, m)


def fluctuation_budget(B_hat: Fraction, eps: Fraction) -> int:
    """8 * B^2 * ceil(1/eps)^2, rounded up to an integer iteration count."""
    B_hat = Fraction(B_hat)
    if B_hat <= 0:
        raise ValueError("the stand-in bound must be positive")
    return ceil_rational(8 * B_hat**2 * ceil_inverse(Fraction(eps)) ** 2)


def _product_sequence(
    model: MeasureSpaceModel,
    sigma: tuple[int, ...],
    mode: str,
    fixed: int,
    fs: list[StepFunction],
    gs: list[StepFunction],
) -> SequenceOracle:
    """n -> integral over sigma of f_n g_p (fix_p) or p -> same (fix_n).

    In the K-dimensional shadow d_n is constant from n = K on, while e*_p
    vanishes for p > K, so both sequences are tabulated to eventual
    constancy.
    """
    K = model.K
    if mode == "fix_p":
        gp = gs[fixed]
        vals = [integrate_over(model, fn * gp, sigma) for fn in fs]
    elif mode == "fix_n":
        fn = fs[fixed]
        vals = [integrate_over(model, fn * gp, sigma) for gp in gs] + [
            Fraction(0)
        ]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SequenceOracle(tuple(vals))


def fluctuation_harness(
    model: MeasureSpaceModel,
    B_hat: Fraction,
    eps: Fraction,
    F: IndexFunction,
    mode: str,
    sigma_family: list[tuple[int, ...]],
) -> Report:
    """Run the stable-interval finder on every (sigma, fixed index) pair.

    The budget is the claimed fluctuation bound for B_hat; results are
    reported, never asserted, because B_hat stands in for an
    unconditionality bound that can only be certified from below.
    """
    budget = fluctuation_budget(B_hat, eps)
    failures: dict[str, str] = {}
    runs = 0
    max_used = 0
    worst_interval = ""
    fs = [model.f(n) for n in range(model.K + 1)]
    gs = [model.g(p) for p in range(model.K + 1)]
    for sigma in sigma_family:
        for fixed in range(model.K + 1):
            seq = _product_sequence(model, sigma, mode, fixed, fs, gs)
            runs += 1
            try:
                interval = find_stable_interval(seq, eps, F, 0, budget)
                if interval.fluctuations_used >= max_used:
                    max_used = interval.fluctuations_used
                    worst_interval = (
                        f"sigma={sigma} fixed={fixed} "
                        f"[{interval.m}, {interval.end}] used={max_used}"
                    )
            except BudgetExceeded as exc:
                failures[f"sigma_{sigma}_fixed_{fixed}"] = str(exc)
    entry = ReportEntry(
        name=f"bounded_fluctuations_{mode}",
        passed=not failures,
        advisory=True,
        details={
            "runs": str(runs),
            "budget": str(budget),
            "max_fluctuations_used": str(max_used),
            "witness_interval": worst_interval,
            **failures,
        },
    )
    return Report((entry,))


def hypothesis_report(
    model: MeasureSpaceModel, B_hat: Fraction, eps: Fraction
) -> Report:
    """Evaluate each hypothesis clause of the fluctuation theorem exactly.

    Clauses: L1 bounds on the embedded d_n and e*_p, small-set continuity
    for both families, and bounded fluctuations of the product sequences
    (checked against a small family of index functions and every atom
    subset at desk scale).
    """
    B_hat = Fraction(B_hat)
    eps = Fraction(eps)
    K = model.K
    entries: list[ReportEntry] = []

    fs = [model.f(n) for n in range(K + 1)]
    gs = [model.g(p) for p in range(K + 1)]

    l1_f = {f"f_{n}": fmt_rational(l1_norm(model, fn)) for n, fn in enumerate(fs)}
    entries.append(
        ReportEntry(
            "l1_bound_f",
            all(l1_norm(model, fn) <= B_hat for fn in fs),
            details=l1_f,
        )
    )
    l1_g = {f"g_{p}": fmt_rational(l1_norm(model, gp)) for p, gp in enumerate(gs)}
    entries.append(
        ReportEntry(
            "l1_bound_g",
            all(l1_norm(model, gp) <= B_hat for gp in gs),
            details=l1_g,
        )
    )

    sigmas = atom_subsets(K)

    def small_set_ok(hs: list[StepFunction]) -> bool:
        for sigma in sigmas:
            m = mu_of(model, sigma)
            for idx, h in enumerate(hs):
                if m < eps / (B_hat * 2**idx):
                    if integrate_over(model, h.abs(), sigma) >= eps:
                        return False
        return True

    entries.append(ReportEntry("small_set_continuity_f", small_set_ok(fs)))
    entries.append(ReportEntry("small_set_continuity_g", small_set_ok(gs)))

    index_functions = [
        IndexFunction.from_callable(lambda n: n + 1, 4 * K + 8),
        IndexFunction.from_callable(lambda n: 2 * n + 1, 4 * K + 8),
    ]
    for mode in ("fix_p", "fix_n"):
        ok = True
        details: dict[str, str] = {}
        for fi, F in enumerate(index_functions):
            sub = fluctuation_harness(model, B_hat, eps, F, mode, sigmas)
            details[f"index_function_{fi}"] = (
                "pass" if sub.entries[0].passed else "fail"
            )
            ok = ok and sub.entries[0].passed
        entries.append(
            ReportEntry(f"bounded_fluctuations_{mode}", ok, details=details)
        )
    return Report(tuple(entries))


@dataclass(frozen=True)
class FoundPair:
    m: int
    s: int
    q: int
    l: int
    gap: Fraction


def conclusion_search(model: MeasureSpaceModel, eps: Fraction) -> FoundPair | None:
    """Search for m < s and q < l with |M[m][s] - M[l][q]| < 20*eps.

    Exact comparison against the actually-integrated product matrix;
    returns the lexicographically least (m, s, q, l) or None.  At
    eps = 1/80 the gap is d*(d) >= 1/4 = 20*eps for every model, so the
    search comes back empty: the finite-exact form of the contradiction.
    """
    eps = Fraction(eps)
    M = product_matrix(model).entries
    K = model.K
    threshold = 20 * eps
    for m in range(K + 1):
        for s in range(m + 1, K + 1):
            for q in range(K + 1):
                for l in range(q + 1, K + 1):
                    gap = abs(M[m][s] - M[l][q])
                    if gap < threshold:
                        return FoundPair(m=m, s=s, q=q, l=l, gap=gap)
    return None
