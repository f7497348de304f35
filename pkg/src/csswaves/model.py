"""Nonlinearities f(x, t) = b(x) g(t) with weight b(x) = (1 + |x|^2)^(-gamma),
and sample-based probes of the structural hypotheses placed on f and F.

Shipped families (``kind``):

* ``pure_power``      g = |t|^(p-2) t,                     G = |t|^p / p
* ``weighted_power``  as ``pure_power`` but requires gamma > 0
* ``log_enhanced``    G = |t|^6 log(1 + t^2) / 6,          g = G'

A probe never raises on a violated hypothesis; it returns a verdict together
with a witness that reproduces the violation when re-evaluated.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import HypothesisError, UsageError

MODEL_KINDS = ("pure_power", "log_enhanced", "weighted_power")

HOLDS = "holds-on-samples"
VIOLATED = "violated"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class NonlinearityModel:
    kind: str = "pure_power"
    p: float = 8.0
    gamma: float = 0.0

    def weight(self, r2):
        r2 = np.asarray(r2, dtype=float)
        if self.gamma == 0.0:
            return np.ones_like(r2)
        return (1.0 + r2) ** (-self.gamma)

    # --- t-profiles -------------------------------------------------------
    def g(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "log_enhanced":
            a = np.abs(t)
            a2 = a * a
            # evaluated on |t| so that g is odd bit for bit
            return np.sign(t) * (a**5 * np.log1p(a2) + a**7 / (3.0 * (1.0 + a2)))
        return np.abs(t) ** (self.p - 2.0) * t

    def G(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "log_enhanced":
            return t**6 * np.log1p(t * t) / 6.0
        return np.abs(t) ** self.p / self.p

    def dg(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "log_enhanced":
            t2 = t * t
            return (
                5.0 * t**4 * np.log1p(t2)
                + 2.0 * t**6 / (1.0 + t2)
                + (7.0 * t**6 + 5.0 * t**8) / (3.0 * (1.0 + t2) ** 2)
            )
        return (self.p - 1.0) * np.abs(t) ** (self.p - 2.0)

    # --- f(x, t), F(x, t) with x given through |x|^2 -----------------------
    def f(self, t, r2=0.0):
        return self.weight(r2) * self.g(t)

    def F(self, t, r2=0.0):
        return self.weight(r2) * self.G(t)

    def growth_bound(self):
        """``(s, c)`` with ``|g(t)| <= c |t|^(s-1)``; the linear coefficient is 0."""
        if self.kind == "log_enhanced":
            # log(1 + t^2) <= t^2 and t^2 / (1 + t^2) <= 1
            return 8.0, 4.0 / 3.0
        return float(self.p), 1.0


def make_model(kind="pure_power", p=8.0, gamma=None):
    if kind not in MODEL_KINDS:
        raise UsageError(f"unknown nonlinearity kind {kind!r}")
    if gamma is None:
        gamma = 1.0 if kind == "weighted_power" else 0.0
    if gamma < 0:
        raise UsageError("gamma must be >= 0")
    if kind == "weighted_power" and gamma == 0:
        raise UsageError("weighted_power needs gamma > 0")
    if kind == "log_enhanced":
        p = 8.0
    elif p < 6:
        raise HypothesisError(f"exponent p = {p} < 6 cannot satisfy 0 < 6F <= t f")
    return NonlinearityModel(kind=kind, p=float(p), gamma=float(gamma))


# --------------------------------------------------------------------------- probes


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: dict | None = None
    detail: str = ""


@dataclass
class HypothesisReport:
    verdicts: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)

    def status(self, name):
        return self.verdicts[name].status

    def to_dict(self):
        return {
            name: {"status": v.status, "witness": v.witness, "detail": v.detail}
            for name, v in self.verdicts.items()
        }


def antiderivative_defect(model, t_values, r2_values):
    """``max |F(x, t) - int_0^t f(x, s) ds|`` by adaptive quadrature."""
    worst = 0.0
    for t, r2 in zip(np.ravel(t_values), np.ravel(r2_values)):
        val, _ = quad(lambda s: float(model.f(s, r2)), 0.0, float(t), epsabs=1e-13, epsrel=1e-13)
        worst = max(worst, abs(float(model.F(t, r2)) - val))
    return worst


def probe_f1(model, t_small=None, t_large=None, mu=1.0):
    """f(x,t)/t -> 0 at t = 0 and f(x,t) e^(-mu t^2) -> 0 at infinity."""
    t_small = np.geomspace(1e-1, 1e-6, 6) if t_small is None else np.asarray(t_small)
    t_large = np.linspace(5.0, 25.0, 5) if t_large is None else np.asarray(t_large)
    report = HypothesisReport(samples={"t_small": t_small.tolist(), "t_large": t_large.tolist()})
    small = np.abs(model.f(t_small) / t_small)
    large = np.abs(model.f(t_large)) * np.exp(-mu * t_large**2)
    if not np.all(np.diff(small) < 0):
        k = int(np.argmax(np.diff(small) >= 0))
        report.verdicts["f1_origin"] = Verdict(VIOLATED, {"t": float(t_small[k + 1])}, "|f/t| not decreasing")
    else:
        report.verdicts["f1_origin"] = Verdict(HOLDS, detail=f"|f/t| at t={t_small[-1]:.1e}: {small[-1]:.3e}")
    if not np.all(np.diff(large) < 0):
        k = int(np.argmax(np.diff(large) >= 0))
        report.verdicts["f1_infinity"] = Verdict(VIOLATED, {"t": float(t_large[k + 1])}, "growth faster than e^(mu t^2)")
    else:
        report.verdicts["f1_infinity"] = Verdict(HOLDS)
    return report


def probe_f2(model, t_grid, x_samples):
    """Check ``0 < 6F <= t f`` on samples and growth of ``F / t^6`` along the largest t."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid == 0.0):
        raise UsageError("t_grid must exclude 0")
    x_samples = np.atleast_2d(np.asarray(x_samples, dtype=float))
    r2s = np.sum(x_samples**2, axis=1)
    report = HypothesisReport(samples={"t_grid": t_grid.tolist(), "x_samples": x_samples.tolist()})

    for x, r2 in zip(x_samples, r2s):
        F = model.F(t_grid, r2)
        tf = t_grid * model.f(t_grid, r2)
        bad = (6.0 * F > tf + 1e-12 * np.abs(tf)) | (F <= 0.0)
        if np.any(bad):
            k = int(np.argmax(bad))
            report.verdicts["f2"] = Verdict(
                VIOLATED,
                {"x": x.tolist(), "t": float(t_grid[k]), "6F": float(6 * F[k]), "tf": float(tf[k])},
                "0 < 6F <= t f fails",
            )
            return report

    mags = np.sort(np.abs(t_grid))
    # +-T pairs give the same |T| up to round-off; keep one of each
    mags = mags[np.concatenate([[True], np.diff(mags) > 1e-12 * mags[1:]])]
    top = mags[-3:]
    for x, r2 in zip(x_samples, r2s):
        ratio = model.F(top, r2) / top**6
        # equal ratios up to round-off count as no growth
        stalled = np.diff(ratio) <= 1e-12 * np.abs(ratio[1:])
        if np.any(stalled):
            k = int(np.argmax(stalled))
            report.verdicts["f2"] = Verdict(
                VIOLATED,
                {"x": x.tolist(), "T_pair": [float(top[k]), float(top[k + 1])],
                 "F_over_T6": [float(ratio[k]), float(ratio[k + 1])]},
                "F/t^6 does not grow along the largest samples",
            )
            return report
    report.verdicts["f2"] = Verdict(HOLDS)
    return report


def probe_f3(model, t_small=None):
    """Report both alternatives of the small-|t| sign condition.

    For any model that also satisfies ``0 < 6F`` the second alternative is
    violated outright; the first needs ``F >= C0 |t|^nu`` with ``nu < 6``.
    """
    t_small = np.geomspace(1e-1, 1e-4, 4) if t_small is None else np.asarray(t_small)
    report = HypothesisReport(samples={"t_small": t_small.tolist()})
    F = model.F(t_small)
    pos = F > 0
    if np.any(pos):
        k = int(np.argmax(pos))
        report.verdicts["f3_nonpositive_near_0"] = Verdict(
            VIOLATED, {"t": float(t_small[k]), "F": float(F[k])}, "F > 0 arbitrarily close to 0"
        )
    else:
        report.verdicts["f3_nonpositive_near_0"] = Verdict(HOLDS)
    # F >= C0 |t|^nu for some nu < 6: F / |t|^nu must stay bounded below as t -> 0.
    nu = 5.999
    ratio = F / np.abs(t_small) ** nu
    if ratio[-1] < 0.5 * ratio[0] or ratio[-1] <= 0:
        report.verdicts["f3_lower_power_bound"] = Verdict(
            VIOLATED,
            {"t": float(t_small[-1]), "F_over_t_nu": float(ratio[-1]), "nu": nu},
            "F decays faster than |t|^nu near 0 for every nu < 6",
        )
    else:
        report.verdicts["f3_lower_power_bound"] = Verdict(HOLDS, detail=f"nu={nu}")
    return report


def _sup_f_over_t(model, r, r2, n_t=200):
    t = np.linspace(r / n_t, r, n_t)
    return float(np.max(np.abs(model.f(t, r2) / t)))


def probe_f4_f5(model, r, radius_grid, q_values=(1.0, 1.25, 1.5, 2.0, 4.0)):
    """Spatial decay of ``sup_{0<|t|<=r} |f/t|`` and the growth bound with weight b."""
    if r <= 0:
        raise UsageError("r must be positive")
    radii = np.sort(np.asarray(radius_grid, dtype=float))
    sups = np.array([_sup_f_over_t(model, r, rad * rad) for rad in radii])
    report = HypothesisReport(samples={"radii": radii.tolist(), "sup_f_over_t": sups.tolist()})

    decreasing = np.all(np.diff(sups) < 0)
    exponent = float(np.log(sups[-1] / sups[-2]) / np.log(radii[-1] / radii[-2])) if sups[-2] > 0 else 0.0
    if decreasing and exponent < 0:
        report.verdicts["f4"] = Verdict(HOLDS, {"decay_exponent": exponent}, "sup|f/t| ~ |x|^exponent")
    else:
        report.verdicts["f4"] = Verdict(
            VIOLATED,
            {"radius": float(radii[-1]), "sup_f_over_t": float(sups[-1]), "decay_exponent": exponent},
            "sup|f/t| does not decay in |x|",
        )

    s, coef = model.growth_bound()
    t = np.linspace(-4.0, 4.0, 161)
    worst = 0.0
    for rad in radii:
        b = model.weight(rad * rad)
        lhs = np.abs(model.f(t, rad * rad))
        rhs = coef * b * np.abs(t) ** (s - 1.0)
        worst = max(worst, float(np.max(lhs - rhs)))
    integrable = _weight_integrability(model, radii, q_values)
    detail = {"s": s, "a": 0.0, "b_coefficient": coef, "integrability": integrable}
    if worst > 1e-12:
        report.verdicts["f5"] = Verdict(VIOLATED, {**detail, "excess": worst}, "growth bound fails")
    elif not any(v["summable"] for v in integrable.values()):
        report.verdicts["f5"] = Verdict(VIOLATED, detail, "b is in no L^q with q > 1")
    else:
        report.verdicts["f5"] = Verdict(HOLDS, detail)
    return report


def _weight_integrability(model, radii, q_values):
    """Tail test for ``b in L^q``: mass of ``b^q`` in dyadic annuli must shrink.

    The measured annulus ratio is compared with the closed form of
    ``int (1 + r^2)^(-gamma q) r dr`` over the same annuli.
    """
    R = float(radii[-1])
    inner_r = np.linspace(R / 4.0, R / 2.0, 2001)
    outer_r = np.linspace(R / 2.0, R, 2001)
    out = {}
    for q in q_values:
        inner_mass = np.trapezoid(model.weight(inner_r**2) ** q * inner_r, inner_r)
        outer_mass = np.trapezoid(model.weight(outer_r**2) ** q * outer_r, outer_r)
        measured = inner_mass / outer_mass
        e = 1.0 - model.gamma * q

        def prim(x):
            return np.log1p(x * x) / 2.0 if e == 0 else (1.0 + x * x) ** e / (2.0 * e)

        exact = (prim(R / 2.0) - prim(R / 4.0)) / (prim(R) - prim(R / 2.0))
        out[str(q)] = {
            "annulus_ratio": float(measured),
            "annulus_ratio_exact": float(exact),
            "summable": bool(q > 1.0 and measured > 1.02),
        }
    return out
