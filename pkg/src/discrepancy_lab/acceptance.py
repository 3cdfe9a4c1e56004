"""The thirteen acceptance checks, each returning a pass/fail result with a detail line.

Growth statements are checked as band stability: a constant is fixed from the
small-``n`` runs named in each check and the remaining ``n`` are tested
against it.  Exact identities are compared as exact rationals.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable

import numpy as np

from . import bmo, haar, norms, riesz
from .discrepancy import (CellGrid, closed_form_mean, eval_discrepancy, exact_mean,
                          general_n_delta, general_n_grid)
from .dyadic import DigitString, Dyadic
from .pointset import DyadicRectangle, general_n_set, generate_vdc, rectangle_counts


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} [{status}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def sigma_battery(n: int, seeds: int = 5) -> list[DigitString]:
    return ([DigitString.zeros(n), DigitString.balanced(n)]
            + [DigitString.random(n, seed) for seed in range(seeds)])


def ratio_band(values: list[float], factor: float = 4.0) -> tuple[float, float]:
    """A band of width ``factor`` centred geometrically on the observed range."""
    centre = math.sqrt(min(values) * max(values))
    half = math.sqrt(factor)
    return centre / half, centre * half


def _timed(number: int, name: str, fn: Callable[[], tuple[bool, str]]) -> CriterionResult:
    t0 = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


# 1 -------------------------------------------------------------------------------

def mean_identity() -> tuple[bool, str]:
    bad = []
    checked = 0
    for n in range(2, 15):
        for sigma in sigma_battery(n, seeds=20):
            ps = generate_vdc(n, sigma)
            if exact_mean(ps) != closed_form_mean(n, sigma):
                bad.append((n, str(sigma)))
            checked += 1
        if exact_mean(generate_vdc(n, DigitString.zeros(n))) != Fraction(n, 8):
            bad.append((n, "zeros != n/8"))
        if n % 2 == 0 and exact_mean(generate_vdc(n, DigitString.balanced(n))) != 0:
            bad.append((n, "balanced != 0"))
    return not bad, f"{checked} sets, mismatches: {bad or 'none'}"


# 2 -------------------------------------------------------------------------------

def net_property(samples: int = 100_000, seed: int = 0) -> tuple[bool, str]:
    bad = 0
    rects = 0
    for n in range(1, 11):
        for sigma in sigma_battery(n):
            ps = generate_vdc(n, sigma)
            for k in range(n + 1):
                counts = rectangle_counts(ps, k, n - k)
                bad += int(np.count_nonzero(counts != 1))
                rects += counts.size
    rng = np.random.default_rng(seed)
    sampled = 0
    for n in range(11, 15):
        ps = generate_vdc(n, DigitString.balanced(n))
        ks = rng.integers(0, n + 1, size=samples)
        keys = rng.integers(0, 1 << n, size=samples)
        for k in range(n + 1):
            sel = ks == k
            counts = rectangle_counts(ps, k, n - k).reshape(-1)
            bad += int(np.count_nonzero(counts[keys[sel]] != 1))
        sampled += samples
    return bad == 0, f"{rects} rectangles exhaustively, {sampled} sampled, violations {bad}"


# 3 -------------------------------------------------------------------------------

def haar_bound(samples: int = 1_000_000, seed: int = 0) -> tuple[bool, str]:
    M = {}
    for n in range(1, 9):
        ps = generate_vdc(n, DigitString.balanced(n))
        M[n] = haar.max_scaled_coefficient(ps, haar.shapes_up_to(2 * n))
    bound = 2 * max(M[n] for n in range(4, 9))
    for n in range(9, 15):
        ps = generate_vdc(n, DigitString.balanced(n))
        M[n] = haar.sampled_max_scaled_coefficient(ps, 2 * n, samples, seed)
    ok = all(v <= bound for v in M.values())
    shown = ", ".join(f"{n}:{v}" for n, v in M.items())
    return ok, f"M* = 2 max M(4..8) = {bound}; M(n) = {shown}"


# 4 -------------------------------------------------------------------------------

def quadruple_cancellation() -> tuple[bool, str]:
    worst = Fraction(0)
    quads = 0
    for n in range(2, 9):
        for sigma in sigma_battery(n):
            ps = generate_vdc(n, sigma)
            for m in range(n - 1):
                for k, l in haar.shapes_with_volume(m):
                    ratio, count = haar.quadruple_worst_ratio(ps, k, l)
                    worst = max(worst, ratio)
                    quads += count
    return worst <= 1, f"{quads} quadruples, max residual * N^2 |R| = {worst}"


# 5 -------------------------------------------------------------------------------

def linf_ratios(ns=range(4, 14)) -> dict:
    out = {}
    for label in ("zeros", "balanced"):
        for n in ns:
            sigma = DigitString.zeros(n) if label == "zeros" else DigitString.balanced(n)
            out[(label, n)] = float(norms.linf_norm(generate_vdc(n, sigma))) / n
    return out


def linf_band(ratios: dict | None = None) -> tuple[float, float]:
    """Factor-4 band centred on the ``n = 4..6`` ratios of both shifts."""
    ratios = ratios or linf_ratios(range(4, 7))
    return ratio_band([v for (_, n), v in ratios.items() if 4 <= n <= 6])


def linf_growth() -> tuple[bool, str]:
    r = linf_ratios()
    c1, c2 = linf_band(r)
    ok = all(c1 <= v <= c2 for v in r.values())
    lo, hi = min(r.values()), max(r.values())
    return ok, f"linf/n in [{lo:.4f}, {hi:.4f}], band [{c1:.4f}, {c2:.4f}]"


# 6 -------------------------------------------------------------------------------

def l2_growth() -> tuple[bool, str]:
    r = {}
    for n in range(4, 13):
        ps = generate_vdc(n, DigitString.balanced(n))
        r[n] = norms.lp_norm(ps, 2, "exact").value / math.sqrt(n)
    c1, c2 = ratio_band([r[n] for n in (4, 5, 6)])
    band_ok = all(c1 <= v <= c2 for v in r.values())
    jensen_ok = True
    for n in range(4, 13):
        power = norms.lp_power_exact(generate_vdc(n, DigitString.zeros(n)), 2)
        jensen_ok &= power >= Fraction(n * n, 64)
    return band_ok and jensen_ok, (f"l2/sqrt(n) in [{min(r.values()):.4f}, {max(r.values()):.4f}], "
                                   f"band [{c1:.4f}, {c2:.4f}]; zeros l2 >= n/8: {jensen_ok}")


# 7 -------------------------------------------------------------------------------

def exp_proxy_growth() -> tuple[bool, str]:
    proxy, khin = {}, {}
    for n in range(4, 11):
        ps = generate_vdc(n, DigitString.balanced(n))
        lp = {p: norms.lp_norm(ps, p).value for p in norms.DEFAULT_PGRID}
        proxy[n] = norms.proxy_from_lp(lp, 2.0)[0] / math.sqrt(n)
        khin[n] = max(v / (math.sqrt(p) * math.sqrt(n)) for p, v in lp.items())
    c1, c2 = ratio_band([proxy[n] for n in (4, 5, 6)])
    K = 2 * max(khin[n] for n in (4, 5, 6))
    ok = all(c1 <= v <= c2 for v in proxy.values()) and all(v <= K for v in khin.values())
    return ok, (f"proxy/sqrt(n) in [{min(proxy.values()):.4f}, {max(proxy.values()):.4f}], "
                f"band [{c1:.4f}, {c2:.4f}]; max_p ||D||_p/sqrt(pn) <= {max(khin.values()):.4f} "
                f"(constant {K:.4f})")


# 8 -------------------------------------------------------------------------------

def riesz_certificate(ns=range(4, 11), a: int = 3) -> tuple[bool, str]:
    structure_ok = True
    per_g, ratios = {}, {2.0: {}, 4.0: {}}
    for n in ns:
        ps = generate_vdc(n, DigitString.balanced(n))
        run = riesz.riesz_run(ps, a)
        structure_ok &= run.structure.ok
        per_g[n] = float(run.pairing) / len(run.G)
        for alpha in ratios:
            ratios[alpha][n] = riesz.lower_bound_ratio(run.certificate(alpha), n)
    c = per_g[min(ns)] / 2
    pairing_ok = c > 0 and all(v >= c for v in per_g.values())
    band_ok = True
    parts = []
    for alpha, r in ratios.items():
        lo, hi = ratio_band([r[n] for n in ns if n <= 6])
        band_ok &= all(lo <= v <= hi for v in r.values())
        parts.append(f"alpha={alpha:g}: [{min(r.values()):.4f}, {max(r.values()):.4f}] in "
                     f"[{lo:.4f}, {hi:.4f}]")
    return structure_ok and pairing_ok and band_ok, (
        f"structure {structure_ok}; pairing/g >= {c:.4f}: {pairing_ok}; " + "; ".join(parts))


# 9 -------------------------------------------------------------------------------

def _product_rule_1d(max_level: int = 8) -> int:
    """Violations of ``h_I h_J = h_I(J) h_J`` (``J`` strictly inside ``I``, else 0) on a fine grid."""
    m = max_level + 1

    def rows(level: int) -> np.ndarray:
        return np.stack([haar.haar_values(DyadicRectangle.of(level, i, 0, 0), m, 0, (0, 1))[:, 0]
                         for i in range(1 << level)]).astype(np.int64)

    bad = 0
    for a in range(max_level + 1):
        Ha = rows(a)
        for b in range(a + 1, max_level + 1):
            Hb = rows(b)
            prod = Ha[:, None, :] * Hb[None, :, :]
            # h_I is constant on the finer J: read it at J's first cell
            c = Ha[:, np.arange(1 << b) << (m - b)]
            bad += int(np.count_nonzero(prod != c[:, :, None] * Hb[None, :, :]))
            nested = (np.arange(1 << b)[None, :] >> (b - a)) == np.arange(1 << a)[:, None]
            bad += int(np.count_nonzero(np.abs(c) != nested))
    return bad


def _product_rule_2d(max_level: int = 8, seed: int = 0) -> tuple[int, int]:
    rng = np.random.default_rng(seed)
    m = max_level + 1
    bad = pairs = 0
    levels = range(max_level + 1)
    for k, l, k2, l2 in itertools.product(levels, repeat=4):
        if k == k2 or l == l2:
            continue
        i, j = int(rng.integers(0, 1 << k)), int(rng.integers(0, 1 << l))
        # pick R' meeting R
        i2 = (i >> (k - k2)) if k2 < k else (i << (k2 - k)) + int(rng.integers(0, 1 << (k2 - k)))
        j2 = (j >> (l - l2)) if l2 < l else (j << (l2 - l)) + int(rng.integers(0, 1 << (l2 - l)))
        R, R2 = DyadicRectangle.of(k, i, l, j), DyadicRectangle.of(k2, i2, l2, j2)
        prod = haar.haar_values(R, m, m) * haar.haar_values(R2, m, m)
        inter = DyadicRectangle(R.rx if k > k2 else R2.rx, R.ry if l > l2 else R2.ry)
        h = haar.haar_values(inter, m, m)
        if not (np.array_equal(prod, h) or np.array_equal(prod, -h)):
            bad += 1
        pairs += 1
    return bad, pairs


def combinatorics() -> tuple[bool, str]:
    mismatches = []
    cases = 0
    for n in range(2, 9):
        if len(haar.hyperbolic_vectors(n)) != n + 1:
            mismatches.append(("|H_n|", n))
        for v in range(2, min(4, n) + 1):
            for s1 in range(n + 1):
                for s2 in range(n + 1):
                    if s1 + s2 < n + v - 1:
                        continue
                    got = haar.count_products(n, (s1, s2), v)
                    cases += 1
                    if got != comb(s1 + s2 - n - 1, v - 2):
                        mismatches.append((n, (s1, s2), v, got))
    bad1 = _product_rule_1d()
    bad2, pairs = _product_rule_2d()
    ok = not mismatches and bad1 == 0 and bad2 == 0
    return ok, (f"{cases} (n, s, v) counts, mismatches {mismatches or 'none'}; product rule: "
                f"1-d exhaustive violations {bad1}, 2-d {pairs} shape pairs violations {bad2}")


# 10 ------------------------------------------------------------------------------

def bmo_bracket(ns=range(4, 11)) -> tuple[bool, str]:
    low, high = {}, {}
    for n in ns:
        ps = generate_vdc(n, DigitString.balanced(n))
        low[n] = math.sqrt(bmo.global_square_sum(ps, 2 * n)) / math.sqrt(n)
        high[n] = math.sqrt(bmo.bmo_estimate(ps, depth=2 * n + 4).estimate) / math.sqrt(n)
    c1 = min(low[n] for n in (4, 5, 6)) / 2
    c2 = 2 * max(high[n] for n in (4, 5, 6))
    ok = all(v >= c1 for v in low.values()) and all(v <= c2 for v in high.values())
    return ok, (f"global^(1/2)/sqrt(n) in [{min(low.values()):.4f}, {max(low.values()):.4f}] >= c1 = {c1:.4f}; "
                f"estimate^(1/2)/sqrt(n) in [{min(high.values()):.4f}, {max(high.values()):.4f}] <= c2 = {c2:.4f}")


# 11 ------------------------------------------------------------------------------

#: ``|<D, f_s>| 2^|s| / N`` never exceeds this when ``|s| > n`` (at most one point per rectangle).
HIGH_INDEX_CONSTANT = Fraction(5, 16)


def high_index_decay(patterns: int = 1000, seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = Fraction(0)
    for n in range(2, 9):
        ps = generate_vdc(n, DigitString.balanced(n))
        for size in range(n + 1, n + 7):
            s1 = rng.integers(0, size + 1, size=patterns)
            for r1 in np.unique(s1).tolist():
                c = haar.shape_coeffs(ps, r1, size - r1)
                nums = c.dense_nums().astype(np.int64)
                count = int(np.count_nonzero(s1 == r1))
                for lo in range(0, count, 64):
                    hi = min(count, lo + 64)
                    signs = rng.choice(np.array([-1, 1], dtype=np.int64), size=(hi - lo, c.size))
                    best = int(np.max(np.abs(signs @ nums)))
                    worst = max(worst, Fraction(best << size, (1 << c.exponent) * ps.N))
    return worst <= HIGH_INDEX_CONSTANT, f"max |<D,f_s>| 2^|s|/N = {float(worst):.5f} <= {HIGH_INDEX_CONSTANT}"


# 12 ------------------------------------------------------------------------------

def general_n(values: int = 20, points: int = 1000, seed: int = 0) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    c1, c2 = linf_band()
    mismatches = 0
    ratios = []
    for q in range(values):
        n = 5 + q % 8
        N = int(rng.integers((1 << (n - 1)) + 1, 1 << n))
        sigma = DigitString.random(n, q)
        trunc = general_n_set(n, sigma, N)
        grid = general_n_grid(n, sigma, N)
        full = generate_vdc(n, sigma)
        own = CellGrid(trunc)
        t = Dyadic(2 * N + 1, n + 1)
        X = rng.integers(0, 1 << 16, size=(points, 2))
        for a, b in X.tolist():
            x = (Dyadic(a, 16), Dyadic(b, 16))
            if own.evaluate(x) != eval_discrepancy(trunc, x).value.as_fraction():
                mismatches += 1
            delta = general_n_delta(trunc, x)
            stretched = eval_discrepancy(full, (t * x[0], x[1])).value.as_fraction() \
                + (x[0] * x[1]).as_fraction() / 2
            if not (delta == grid.evaluate(x) == stretched):
                mismatches += 1
        ratios.append(float(norms.linf_norm(grid)) / math.log2(N))
    ok = mismatches == 0 and all(c1 <= r <= c2 for r in ratios)
    return ok, (f"{values} values of N x {points} points, mismatches {mismatches}; "
                f"linf/log2 N in [{min(ratios):.4f}, {max(ratios):.4f}], band [{c1:.4f}, {c2:.4f}]")


# 13 ------------------------------------------------------------------------------

def orlicz_machinery() -> tuple[bool, str]:
    rel = []
    v = norms.orlicz_norm([1.0], [1.0], norms.OrliczSpec(1.0))
    rel.append(abs(v.value - 1 / math.log(2)) * math.log(2))
    widths = [v.width / v.value]
    for g in range(1, 21):
        v = norms.orlicz_norm([2.0 ** g], [2.0 ** -g], norms.OrliczSpec(1.0))
        exact = 2.0 ** g / math.log1p(2.0 ** g)
        rel.append(abs(v.value - exact) / exact)
        widths.append(v.width / v.value)
    band = []
    for alpha in (1.0, 2.0, 4.0):
        for g in range(1, 21):
            band.append(norms.indicator_llog_norm(g, alpha).value / norms.indicator_reference(g, alpha))
    ok = max(rel) <= 1e-9 and max(widths) <= 1e-9 and all(0.25 <= b <= 4 for b in band)
    return ok, (f"closed forms max rel error {max(rel):.2e}, bracket {max(widths):.2e}; "
                f"indicator ratio in [{min(band):.4f}, {max(band):.4f}]")


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]]]] = [
    (1, "mean identity", mean_identity),
    (2, "net property", net_property),
    (3, "Haar coefficient bound", haar_bound),
    (4, "quadruple cancellation", quadruple_cancellation),
    (5, "L-infinity growth band", linf_growth),
    (6, "L2 growth", l2_growth),
    (7, "exp(L^2) proxy", exp_proxy_growth),
    (8, "Riesz certificate", riesz_certificate),
    (9, "combinatorics", combinatorics),
    (10, "BMO bracket", bmo_bracket),
    (11, "high-index decay", high_index_decay),
    (12, "general N", general_n),
    (13, "Orlicz machinery", orlicz_machinery),
]


def run_criterion(number: int) -> CriterionResult:
    for num, name, fn in CRITERIA:
        if num == number:
            return _timed(num, name, fn)
    raise KeyError(number)


def run_all() -> list[CriterionResult]:
    return [_timed(num, name, fn) for num, name, fn in CRITERIA]
