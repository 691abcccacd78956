"""Iteration-lemma bounds as numeric utilities, plus synthetic test families.

Two level-set bootstrapping lemmas are realized as closed-form evaluations:
a Kolodziej-type lower bound for a monotone increasing level function, and a
De Giorgi vanishing threshold for a nonincreasing one.  The certification
helper finds, by exhaustive search over sampled pairs, the minimal constant
for which the lemma hypothesis holds on the data; the synthetic generators
produce power-law families whose extremal pairs land exactly on the sample
grid, so the lemma conclusions can be asserted with zero tolerance slack.

The De Giorgi lemma is stated in the literature for increasing functions,
but every use here is a level-set mass s -> measure{phi < -s}, which is
nonincreasing; the hypothesis is therefore certified for nonincreasing
samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

KOLODZIEJ = "kolodziej"
DEGIORGI = "degiorgi"


def kolodziej_bound(C0: float, delta0: float, s0: float) -> float:
    """Lower bound (s0 (1 - 2^-delta0) / (2 C0))^(1/delta0) for phi(s0)."""
    if min(C0, delta0, s0) <= 0:
        raise DomainError("C0, delta0, s0 must be positive")
    return (s0 * (1.0 - 2.0 ** -delta0) / (2.0 * C0)) ** (1.0 / delta0)


def degiorgi_threshold(C: float, alpha: float, delta: float, phi_s0: float) -> float:
    """Vanishing threshold d = C^(1/alpha) phi(s0)^(delta/alpha) 2^((1+delta)/delta)."""
    if min(C, alpha, delta) <= 0:
        raise DomainError("C, alpha, delta must be positive")
    if phi_s0 < 0:
        raise DomainError("phi(s0) must be nonnegative")
    return C ** (1.0 / alpha) * phi_s0 ** (delta / alpha) * 2.0 ** ((1.0 + delta) / delta)


def certify_iteration_hypothesis(s_values, phi_values, form: str, *,
                                 delta0: float | None = None,
                                 alpha: float | None = None,
                                 delta: float | None = None):
    """Minimal constant making the lemma hypothesis hold on sampled pairs.

    Returns ``(C_min, feasible)``; ``feasible`` is False when the samples
    violate the monotonicity/sign requirements of the chosen form.

    * ``kolodziej``: phi increasing and positive on (0, s0); pairs are
      t phi(s - t) <= C phi(s)^(1 + delta0) over sampled 0 < s - t < s < s0
      where s0 is the largest sample.
    * ``degiorgi``: phi nonnegative and nonincreasing on [s0, inf); pairs
      are (s')^alpha phi(s + s') <= C phi(s)^(1 + delta).
    """
    s = np.asarray(s_values, dtype=float)
    phi = np.asarray(phi_values, dtype=float)
    if s.size != phi.size or s.size < 3:
        raise DomainError("need at least 3 matching samples")
    order = np.argsort(s)
    s, phi = s[order], phi[order]

    if form == KOLODZIEJ:
        if delta0 is None or delta0 <= 0:
            raise DomainError("kolodziej form needs delta0 > 0")
        if np.any(np.diff(phi) < -1e-14) or np.any(phi <= 0):
            return 0.0, False
        inner = s < s.max()
        si, pi = s[inner], phi[inner]
        # pair (i, j), i < j: t = s_j - s_i, phi(s - t) = phi_i, so the
        # hypothesis ratio is (s_j - s_i) phi_i / phi_j^(1+delta0)
        tt = np.maximum(si[None, :] - si[:, None], 0.0)
        ratio = tt * pi[:, None] / pi[None, :] ** (1.0 + delta0)
        c_min = float(ratio.max())
        return c_min, True

    if form == DEGIORGI:
        if alpha is None or alpha <= 0 or delta is None or delta <= 0:
            raise DomainError("degiorgi form needs alpha > 0 and delta > 0")
        if np.any(np.diff(phi) > 1e-14) or np.any(phi < 0):
            return 0.0, False
        gap = np.maximum(s[None, :] - s[:, None], 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(
                (gap > 0) & (phi[:, None] > 0),
                gap**alpha * phi[None, :] / np.where(phi[:, None] > 0,
                                                     phi[:, None], 1.0) ** (1.0 + delta),
                0.0,
            )
        c_min = float(ratio.max())
        return c_min, True

    raise DomainError(f"unknown hypothesis form {form!r}")


# ---------------------------------------------------------------------------
# synthetic families for the lemma assertions


@dataclass
class SyntheticFamily:
    """One sampled level function together with its lemma parameters."""

    form: str
    s: np.ndarray
    phi: np.ndarray
    params: dict
    s0: float


def synthetic_kolodziej_family(rng: np.random.Generator,
                               num_samples: int = 240) -> SyntheticFamily:
    """Power family phi(s) = a s^theta on a uniform grid ending at s0.

    Half the draws sit exactly on the equality case theta * delta0 = 1
    whose extremal pair (s, s * theta / (1 + theta)) lies on the grid, the
    rest keep a strict gap; both kinds satisfy the certified hypothesis
    continuously, so the lower bound assertion has no sampling loophole.
    """
    delta0 = float(rng.choice([0.5, 1.0, 2.0]))
    tight = bool(rng.integers(0, 2))
    theta = 1.0 / delta0 if tight else (1.0 / delta0) * float(rng.uniform(0.4, 0.8))
    a = float(rng.uniform(0.5, 2.0))
    s0 = float(rng.uniform(0.5, 2.0))
    k = num_samples - num_samples % 6  # divisible by 2 and 3
    s = s0 * np.arange(1, k + 1) / k
    phi = a * s**theta
    return SyntheticFamily(
        form=KOLODZIEJ, s=s, phi=phi,
        params={"delta0": delta0, "a": a, "theta": theta, "tight": tight},
        s0=s0,
    )


def synthetic_degiorgi_family(rng: np.random.Generator,
                              num_samples: int = 240) -> SyntheticFamily:
    """Family phi(s) = c max(0, s1 - s)^gamma sampled on [s0, s0 + 3 u0].

    Parameter triples keep alpha >= gamma * delta so the hypothesis holds
    continuously, with the extremal pair (s0, s0 + u0 alpha / (alpha +
    gamma)) on the grid; the threshold then lands at or beyond the true
    vanishing point s1 = s0 + u0.
    """
    alpha, gamma, delta = [
        (1.0, 1.0, 1.0),   # exactly tight: threshold equals u0
        (2.0, 1.0, 1.0),
        (1.0, 1.0, 0.5),
        (2.0, 1.0, 2.0),
    ][int(rng.integers(0, 4))]
    c = float(rng.uniform(0.5, 2.0))
    s0 = float(rng.uniform(0.0, 1.0))
    u0 = float(rng.uniform(0.5, 1.5))
    k = num_samples - num_samples % 6
    s = s0 + 3.0 * u0 * np.arange(0, k + 1) / k
    s1 = s0 + u0
    # keep s1 and the extremal offset on the grid: 3 u0 / k steps divide u0
    # when k is a multiple of 3, and u0 alpha/(alpha+gamma) needs k mult of 6
    phi = c * np.maximum(0.0, s1 - s) ** gamma
    return SyntheticFamily(
        form=DEGIORGI, s=s, phi=phi,
        params={"alpha": alpha, "gamma": gamma, "delta": delta, "c": c, "u0": u0},
        s0=s0,
    )


def assert_kolodziej_family(fam: SyntheticFamily, tol: float = 1e-12):
    """Certify the hypothesis and check phi(s0) against the lower bound.

    Returns ``(gap, c_min)`` with gap = phi(s0) - bound >= -tol expected.
    """
    delta0 = fam.params["delta0"]
    c_min, feasible = certify_iteration_hypothesis(
        fam.s, fam.phi, KOLODZIEJ, delta0=delta0
    )
    if not feasible:
        raise DomainError("synthetic family failed certification")
    bound = kolodziej_bound(c_min, delta0, fam.s0)
    phi_s0 = float(fam.phi[np.argmin(np.abs(fam.s - fam.s0))])
    return phi_s0 - bound, c_min


def assert_degiorgi_family(fam: SyntheticFamily, tol: float = 1e-12):
    """Certify the hypothesis and check vanishing beyond the threshold.

    Returns ``(max_phi_beyond, d, c_min)``; the first entry is the largest
    sampled phi value at s >= s0 + d - tol and should be zero.
    """
    alpha, delta = fam.params["alpha"], fam.params["delta"]
    c_min, feasible = certify_iteration_hypothesis(
        fam.s, fam.phi, DEGIORGI, alpha=alpha, delta=delta
    )
    if not feasible:
        raise DomainError("synthetic family failed certification")
    phi_s0 = float(fam.phi[np.argmin(np.abs(fam.s - fam.s0))])
    d = degiorgi_threshold(c_min, alpha, delta, phi_s0)
    beyond = fam.s >= fam.s0 + d - tol
    max_beyond = float(fam.phi[beyond].max()) if np.any(beyond) else 0.0
    return max_beyond, d, c_min
