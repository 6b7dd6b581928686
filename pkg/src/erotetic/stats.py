"""Statistical analysis of run stores: fallacy rates, correlations against
capability proxies, exponential fits, and premise-reversal z-tests.

p-values use in-house normal and Student-t distribution functions
(documented series/continued-fraction approximations, absolute error
below 1e-8) so the package needs no statistics dependency.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence


class StatsError(Exception):
    pass


class UndefinedRateError(StatsError):
    pass


class DegenerateVarianceError(StatsError):
    pass


# ---------------------------------------------------------------------------
# Distribution functions


def normal_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz)."""
    MAXIT, EPS, FPMIN = 300, 3e-16, 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < FPMIN:
        d = FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < FPMIN:
            d = FPMIN
        c = 1.0 + aa / c
        if abs(c) < FPMIN:
            c = FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise StatsError("incomplete beta did not converge")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided tail probability P(|T| >= t) for Student's t."""
    if df <= 0:
        raise StatsError("degrees of freedom must be positive")
    return betainc(df / 2.0, 0.5, df / (df + t * t))


# ---------------------------------------------------------------------------
# Core statistics


def _corr_p(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    t = abs(r) * math.sqrt((n - 2) / (1.0 - r * r))
    return student_t_sf2(t, n - 2)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> tuple:
    n = len(xs)
    if n != len(ys) or n < 3:
        raise StatsError("need at least 3 paired observations")
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateVarianceError("zero variance input")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    return r, _corr_p(r, n)


def average_ranks(values: Sequence[float]) -> list:
    """1-based ranks, ties sharing their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> tuple:
    return pearson(average_ranks(xs), average_ranks(ys))


def two_proportion_z(k1: int, n1: int, k2: int, n2: int) -> tuple:
    """Pooled two-proportion z-test, two-sided p."""
    if n1 <= 0 or n2 <= 0:
        raise StatsError("sample sizes must be positive")
    p1, p2 = k1 / n1, k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        return 0.0, 1.0  # degenerate by convention
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    z = (p1 - p2) / se
    p = 2.0 * (1.0 - normal_cdf(abs(z)))
    return z, p


def exp_fit(xs: Sequence[float], ys: Sequence[float]) -> tuple:
    """Least-squares fit of ln y = slope*x + intercept."""
    if any(y <= 0 for y in ys):
        raise StatsError("exponential fit requires positive y values")
    logs = [math.log(y) for y in ys]
    n = len(xs)
    if n != len(ys) or n < 3:
        raise StatsError("need at least 3 paired observations")
    mx, my = sum(xs) / n, sum(logs) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        raise DegenerateVarianceError("zero variance in x")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, logs))
    slope = sxy / sxx
    intercept = my - slope * mx
    syy = sum((y - my) ** 2 for y in logs)
    if syy == 0.0:
        return slope, intercept, 0.0, 1.0
    r = sxy / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    return slope, intercept, r, _corr_p(r, n)


# ---------------------------------------------------------------------------
# Run-store aggregation


@dataclass
class ModelStats:
    model: str
    n_answered: int
    n_incorrect: int
    n_fallacy: int

    @property
    def fallacy_rate(self) -> float:
        if self.n_incorrect == 0:
            raise UndefinedRateError(f"{self.model}: no incorrect answers")
        return self.n_fallacy / self.n_incorrect

    @property
    def correctness_rate(self) -> float:
        if self.n_answered == 0:
            raise UndefinedRateError(f"{self.model}: no answered records")
        return 1.0 - self.n_incorrect / self.n_answered


def _judged(records):
    return [r for r in records if r.verdict is not None]


def model_stats(records, model: Optional[str] = None) -> ModelStats:
    """Aggregate one model's parse-valid records."""
    rows = [r for r in _judged(records) if model is None or r.model == model]
    name = model or (rows[0].model if rows else "all")
    n_incorrect = sum(1 for r in rows if not r.verdict["logically_correct"])
    n_fallacy = sum(1 for r in rows if r.verdict["human_like_fallacy"])
    return ModelStats(name, len(rows), n_incorrect, n_fallacy)


def fallacy_rate(records) -> float:
    """Human-like fallacies over logically incorrect answers."""
    return model_stats(records).fallacy_rate


@dataclass
class ReversalRow:
    model: str
    n_pairs: int
    n_fallacy_original: int
    n_fallacy_reversed: int
    n_blocked: int
    z: float
    p: float

    @property
    def blocked_fraction(self) -> float:
        if self.n_fallacy_original == 0:
            return 0.0
        return self.n_blocked / self.n_fallacy_original


def reversal_effect(records) -> list:
    """Per model: among original-order fallacies, the fraction made
    logically correct by reversing premise order, plus a z-test comparing
    fallacy counts across the two orders."""
    by_model: dict = {}
    for r in _judged(records):
        by_model.setdefault(r.model, {}).setdefault(r.problem_id, {})[r.order] = r
    rows = []
    for model, problems in sorted(by_model.items()):
        pairs = {
            pid: d for pid, d in problems.items() if "original" in d and "reversed" in d
        }
        if not pairs:
            continue
        fall_orig = fall_rev = blocked = 0
        for d in pairs.values():
            orig, rev = d["original"], d["reversed"]
            if orig.verdict["human_like_fallacy"]:
                fall_orig += 1
                if rev.verdict["logically_correct"]:
                    blocked += 1
            if rev.verdict["human_like_fallacy"]:
                fall_rev += 1
        n = len(pairs)
        z, p = two_proportion_z(fall_orig, n, fall_rev, n)
        rows.append(ReversalRow(model, n, fall_orig, fall_rev, blocked, z, p))
    return rows


# ---------------------------------------------------------------------------
# Capability tables and reports


def load_capability_table(path) -> dict:
    """CSV rows of (model_id, metric, value) -> {metric: {model: value}}."""
    table: dict = {}
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#"):
                continue
            if len(row) != 3:
                raise StatsError(f"bad capability row: {row}")
            model, metric, value = row[0].strip(), row[1].strip(), row[2].strip()
            if metric.lower() == "metric" and model.lower() in ("model", "model_id"):
                continue  # header
            slot = table.setdefault(metric, {})
            if model in slot:
                raise StatsError(f"duplicate capability entry {model}/{metric}")
            slot[model] = float(value)
    return table


def correlate_capability(stats: Sequence[ModelStats], capability: dict) -> dict:
    """Pearson and Spearman of fallacy rate against each capability metric."""
    out = {}
    for metric, values in sorted(capability.items()):
        xs, ys, models = [], [], []
        for st in stats:
            if st.model in values and st.n_incorrect > 0:
                xs.append(values[st.model])
                ys.append(st.fallacy_rate)
                models.append(st.model)
        if len(xs) < 3:
            continue
        r, rp = pearson(xs, ys)
        rho, sp = spearman(xs, ys)
        out[metric] = {
            "n": len(xs),
            "models": models,
            "pearson_r": r,
            "pearson_p": rp,
            "spearman_rho": rho,
            "spearman_p": sp,
        }
    return out


def write_model_csv(stats: Sequence[ModelStats], path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["model", "n_answered", "n_incorrect", "n_fallacy", "fallacy_rate"])
        for st in sorted(stats, key=lambda s: s.model):
            rate = "" if st.n_incorrect == 0 else f"{st.fallacy_rate:.6f}"
            w.writerow([st.model, st.n_answered, st.n_incorrect, st.n_fallacy, rate])


def write_results_json(results: dict, path):
    with open(path, "w") as fh:
        json.dump(results, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_scatter_svg(xs, ys, labels, path, xlabel="capability", ylabel="fallacy rate"):
    """Static scatter plot with a least-squares line."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.scatter(xs, ys)
    for x, y, label in zip(xs, ys, labels):
        ax.annotate(label, (x, y), fontsize=6)
    if len(xs) >= 3 and len(set(xs)) > 1:
        mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
        sxx = sum((x - mx) ** 2 for x in xs)
        slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
        intercept = my - slope * mx
        lo, hi = min(xs), max(xs)
        ax.plot([lo, hi], [slope * lo + intercept, slope * hi + intercept])
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.savefig(path, format="svg")
    plt.close(fig)


def analyze(records, capability: Optional[dict] = None) -> dict:
    """Full analysis bundle over parse-valid records."""
    models = sorted({r.model for r in _judged(records)})
    stats = [model_stats(records, m) for m in models]
    result = {
        "models": {
            st.model: {
                "n_answered": st.n_answered,
                "n_incorrect": st.n_incorrect,
                "n_fallacy": st.n_fallacy,
                "fallacy_rate": (
                    st.fallacy_rate if st.n_incorrect > 0 else None
                ),
            }
            for st in stats
        },
        "reversal": [
            {
                "model": row.model,
                "n_pairs": row.n_pairs,
                "n_fallacy_original": row.n_fallacy_original,
                "n_fallacy_reversed": row.n_fallacy_reversed,
                "blocked_fraction": row.blocked_fraction,
                "z": row.z,
                "p": row.p,
            }
            for row in reversal_effect(records)
        ],
    }
    if capability:
        result["capability_correlations"] = correlate_capability(stats, capability)
    return result
