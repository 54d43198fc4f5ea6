"""Power-image ratio tables, windowed liminf proxies, rank ratios and verdicts.

Approximability asks that for every eps there is a p0 such that for p >= p0
the ratio dim S^n B_p / dim B_{np} eventually stays above 1 - eps. A finite
computation can only see a truncated table, so the verdict is one of

* ``ConsistentWithApproximable`` -- every scheduled eps is met by some tested
  p >= p0 on the whole n-window;
* ``Violated`` -- a structural certificate exists (see :func:`degenerate_power_certificate`);
* ``Inconclusive`` -- anything else.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .algebra import GradedAlgebraModel, power_chain
from .errors import TruncationError

CONSISTENT = "ConsistentWithApproximable"
VIOLATED = "Violated"
INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Cond3Entry:
    p: int
    n: int
    power_dim: int
    piece_dim: int

    @property
    def ratio(self) -> Fraction | None:
        if self.piece_dim == 0:
            return None
        return Fraction(self.power_dim, self.piece_dim)


@dataclass
class Cond3Table:
    model: str
    p_values: list
    n_values: list
    entries: dict = field(default_factory=dict)  # (p, n) -> Cond3Entry

    def ratio(self, p: int, n: int):
        return self.entries[(p, n)].ratio

    def row(self, p: int) -> list:
        return [self.entries[(p, n)] for n in self.n_values if (p, n) in self.entries]


def condition3_table(model: GradedAlgebraModel, P, N: int) -> Cond3Table:
    """Exact dims of S^n B_p and B_{np} for p in P and 1 <= n <= N."""
    P = sorted(set(int(p) for p in P))
    for p in P:
        if p * N > model.truncation:
            raise TruncationError(f"degree {p * N} exceeds truncation {model.truncation} of {model.name}")
    table = Cond3Table(model.name, P, list(range(1, N + 1)))
    for p in P:
        if model.rank(p) == 0:
            # S^n of the zero space is zero in every degree
            for n in table.n_values:
                table.entries[(p, n)] = Cond3Entry(p, n, 0, model.rank(n * p))
            continue
        for n, power in enumerate(power_chain(model, p, N), start=1):
            table.entries[(p, n)] = Cond3Entry(p, n, power.dim, model.rank(n * p))
    return table


def liminf_estimate(seq, window: int) -> Fraction:
    """Minimum over the last ``window`` entries: a finite proxy, not a limit."""
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    if window < 1 or window > len(seq):
        raise ValueError(f"window {window} outside 1..{len(seq)}")
    return min(seq[-window:])


def limsup_estimate(seq, window: int) -> Fraction:
    seq = list(seq)
    if not seq:
        raise ValueError("empty sequence")
    if window < 1 or window > len(seq):
        raise ValueError(f"window {window} outside 1..{len(seq)}")
    return max(seq[-window:])


@dataclass
class RankRatioReport:
    model: str
    r: int
    ratios: list  # (n, Fraction or None); None marks rk B_n = 0 < rk B_{n+r}
    window: tuple
    max_deviation: Fraction | None
    argmax: int | None
    infinite_witnesses: list

    def value(self, n: int):
        return dict(self.ratios)[n]


def rank_ratio_check(model: GradedAlgebraModel, r: int, N: int, start: int = 1,
                     window: tuple | None = None) -> RankRatioReport:
    """rk B_{n+r} / rk B_n for start <= n <= N.

    ``window`` (lo, hi) selects the tail over which max |ratio - 1| is taken;
    by default the last quarter of the range.
    """
    if N + r > model.truncation:
        raise TruncationError(f"degree {N + r} exceeds truncation {model.truncation} of {model.name}")
    ratios, inf = [], []
    for n in range(start, N + 1):
        a, b = model.rank(n), model.rank(n + r)
        if a == 0:
            ratios.append((n, None if b else Fraction(1)))
            if b:
                inf.append(n)
        else:
            ratios.append((n, Fraction(b, a)))
    if window is None:
        window = (max(start, N - (N - start + 1) // 4), N)
    lo, hi = window
    best, arg = None, None
    for n, q in ratios:
        if lo <= n <= hi and q is not None:
            dev = abs(q - 1)
            if best is None or dev > best:
                best, arg = dev, n
    return RankRatioReport(model.name, r, ratios, (lo, hi), best, arg,
                           [n for n in inf if lo <= n <= hi] or inf)


def default_schedule(N: int, epsilons=(Fraction(1, 2), Fraction(1, 4), Fraction(1, 8))) -> list:
    """(eps, p0, n-window) with p0 = 2/eps rounded to a power of two and the last quarter of n."""
    out = []
    for eps in epsilons:
        eps = Fraction(eps)
        target = 2 / eps
        p0 = 1
        while p0 * 2 <= target:
            p0 *= 2
        if target - p0 > 2 * p0 - target:
            p0 *= 2
        lo = N - max(1, N // 4) + 1
        out.append((eps, p0, (lo, N)))
    return out


@dataclass
class Verdict:
    status: str
    witness: dict | None = None
    notes: list = field(default_factory=list)
    per_epsilon: list = field(default_factory=list)

    def lines(self) -> list:
        out = [f"verdict: {self.status}"]
        for rec in self.per_epsilon:
            out.append("epsilon {eps}: p0={p0} window={lo}..{hi} met_by={met}".format(**rec))
        if self.witness:
            out.extend(f"witness {k}: {v}" for k, v in self.witness.items())
        out.extend(f"note: {n}" for n in self.notes)
        return out


def degenerate_power_certificate(model: GradedAlgebraModel, table: Cond3Table, p: int, window: tuple):
    """Certificate that liminf_n of the (p, n) ratio stays small, or None.

    Exact conditions: dim B_p = 1, so S^n B_p is one-dimensional for every n
    (B is a domain) and the ratio is 1 / dim B_np. Inside the n-window the
    degrees with dim B_np >= 2 must form an arithmetic progression along
    which dim B_np strictly increases; the ratio on that progression is then
    bounded by its first value and only decreases.
    """
    lo, hi = window
    if model.rank(p) != 1:
        return None
    row = [e for e in table.row(p) if lo <= e.n <= hi]
    if any(e.power_dim != 1 for e in row):
        return None
    bad = [e for e in row if e.piece_dim >= 2]
    if len(bad) < 2:
        return None
    step = bad[1].n - bad[0].n
    if any(b.n - a.n != step for a, b in zip(bad, bad[1:])):
        return None
    if bad[0].n - step >= lo or bad[-1].n + step <= hi:
        return None  # progression does not cover the window
    if any(b.piece_dim <= a.piece_dim for a, b in zip(bad, bad[1:])):
        return None
    return {"p": p, "n_window": (lo, hi), "progression": (bad[0].n, step),
            "bound": bad[0].ratio,
            "reason": "dim B_p = 1, so dim S^n B_p = 1 for all n; along the progression "
                      "dim B_np strictly increases and the ratio 1/dim B_np decreases"}


def approximability_verdict(model: GradedAlgebraModel, schedule=None, P=None, N: int = 16,
                            table: Cond3Table | None = None) -> Verdict:
    """Fold the truncated table into a verdict.

    ``schedule`` lists (eps, p0, (n_lo, n_hi)); by default :func:`default_schedule`.
    ``P`` defaults to the scheduled p0 values together with 3, 5, 7, since
    odd degrees are where degenerate powers tend to appear.
    """
    schedule = schedule or default_schedule(N)
    if table is None:
        if P is None:
            P = sorted({p0 for _, p0, _ in schedule} | {3, 5, 7})
        P = [p for p in P if p * N <= model.truncation]
        table = condition3_table(model, P, N)
    verdict = Verdict(INCONCLUSIVE)
    all_met = True
    for eps, p0, (lo, hi) in schedule:
        met = None
        for p in table.p_values:
            if p < p0:
                continue
            row = [e for e in table.row(p) if lo <= e.n <= hi]
            if row and all(e.ratio is not None and e.ratio > 1 - eps for e in row):
                met = p
                break
        verdict.per_epsilon.append({"eps": eps, "p0": p0, "lo": lo, "hi": hi, "met": met})
        all_met = all_met and met is not None

    # a certificate must recur on every tested p of the same parity above it,
    # otherwise a larger p0 could escape it
    window = schedule[-1][2]
    certs = {p: degenerate_power_certificate(model, table, p, window) for p in table.p_values}
    for p in table.p_values:
        same = [q for q in table.p_values if q >= p and q % 2 == p % 2]
        if len(same) >= 2 and all(certs[q] for q in same):
            bound = max(certs[q]["bound"] for q in same)
            verdict.status = VIOLATED
            verdict.witness = dict(certs[p], certified_p=same, bound=bound,
                                   violates_eps_below=1 - bound)
            verdict.notes.append("for every certified p, liminf over n of the ratio is at most the bound")
            return verdict
    if all_met:
        verdict.status = CONSISTENT
    verdict.notes.append("verdicts are statements about the truncated table only")
    return verdict


@dataclass
class GrowthProxies:
    window: int
    liminf: Fraction
    limsup: Fraction
    sequence: list


def growth_proxies(model: GradedAlgebraModel, M: int, window: int | None = None) -> GrowthProxies:
    """Windowed liminf/limsup of d! rk B_m / m^d; both reported, neither preferred."""
    d = model.dimension
    seq = [(m, Fraction(factorial(d) * model.rank(m), m ** d)) for m in range(1, M + 1)]
    window = window or max(1, M // 4)
    vals = [v for _, v in seq]
    return GrowthProxies(window, liminf_estimate(vals, window), limsup_estimate(vals, window), seq)
