"""Single-shot synthesis and the full state-discrimination pipeline.

Noise enters the model here and only here: each synthesized heterodyne
record is the averaged output envelope of its prepared state plus white
circular Gaussian quadrature noise, calibrated so the integrated score
of the unit-normalized matched filter has a chosen standard deviation
sigma_det.  Preparation and decay errors are modeled by exchanging the
underlying envelope: ground-state shots flip to the excited envelope
with the thermal excitation probability (plus an optional
readout-induced rate), excited shots decay to the ground envelope at an
exponentially distributed random time, which produces the characteristic
asymmetric tail between the two score distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .errors import DegenerateWeightError, FitError, GridError

__all__ = [
    "WeightFunction", "weight_function", "ShotRecord", "ShotSet",
    "simulate_shots", "integrate_shot", "DoubleGaussianFit",
    "fit_double_gaussian", "FidelityReport", "assignment_fidelity",
    "QNDReport", "qnd_metric", "simulate_qnd_experiment",
    "QuantumEfficiency", "quantum_efficiency", "OperatingPoint",
    "REFERENCE_OPERATING_POINTS", "calibrate_shot_config",
]


# ---------------------------------------------------------------------------
# matched filter

@dataclass(frozen=True)
class WeightFunction:
    """Integration weight f(t) and quadrature rotation angle theta."""

    f: np.ndarray
    theta: float
    dt: float

    def __post_init__(self):
        peak = np.max(np.abs(self.f)) if self.f.size else 0.0
        if not np.isclose(peak, 1.0, rtol=1e-9):
            raise ValueError("weight function must be normalized to max|f| = 1")

    def rotate(self, z: np.ndarray) -> np.ndarray:
        """In-phase quadrature of a complex record in the rotated frame."""
        return np.real(np.exp(-1j * self.theta) * z)


def weight_function(avg_g, avg_e, dt: float) -> WeightFunction:
    """Matched filter from the averaged envelopes of the two states.

    The rotation angle maximizes the integrated squared in-phase
    difference (closed form: half the angle of sum((e-g)^2 dt)); the
    weight is the rotated envelope difference normalized to peak 1.  By
    construction the mean score separation mu_e - mu_g is positive.
    """
    avg_g = np.asarray(avg_g, dtype=complex)
    avg_e = np.asarray(avg_e, dtype=complex)
    if avg_g.shape != avg_e.shape:
        raise GridError("averaged envelopes live on different grids")
    d = avg_e - avg_g
    scale = max(np.max(np.abs(avg_g)), np.max(np.abs(avg_e)), 1e-300)
    if np.max(np.abs(d)) <= 1e-12 * scale:
        raise DegenerateWeightError(
            "averaged envelopes coincide; no separation to weight")
    theta = 0.5 * np.angle(np.sum(d * d) * dt)
    f_raw = np.real(np.exp(-1j * theta) * d)
    return WeightFunction(f=f_raw / np.max(np.abs(f_raw)), theta=float(theta),
                          dt=float(dt))


# ---------------------------------------------------------------------------
# shot synthesis

@dataclass(frozen=True)
class ShotRecord:
    """One synthesized heterodyne record."""

    i: np.ndarray
    q: np.ndarray
    label: str
    seed: tuple
    dt: float

    @property
    def z(self) -> np.ndarray:
        return self.i + 1j * self.q


@dataclass
class ShotSet:
    """A batch of shot records with their preparation bookkeeping.

    ``prepared`` is the alternating preparation label; ``envelope_label``
    records which envelope each record actually follows after error
    flips: 'g', 'e', or 'tail' for excited shots that decayed inside the
    window.  Records with envelope_label != 'tail' are the pure shots
    used for empirical overlap-error counting.
    """

    t: np.ndarray
    dt: float
    iq: np.ndarray                 # (n, nt) complex
    prepared: np.ndarray           # (n,) '<U1'
    envelope_label: np.ndarray     # (n,) '<U4'
    decay_time: np.ndarray         # (n,) seconds, nan if no in-window decay
    seed: int
    sigma_det: float
    weight: WeightFunction
    config_hash: str = ""

    def __len__(self) -> int:
        return self.iq.shape[0]

    def __getitem__(self, index: int) -> ShotRecord:
        return ShotRecord(i=np.real(self.iq[index]), q=np.imag(self.iq[index]),
                          label=str(self.prepared[index]),
                          seed=(self.seed, index), dt=self.dt)

    def records(self) -> list[ShotRecord]:
        return [self[i] for i in range(len(self))]

    def scores(self, weight: WeightFunction | None = None) -> np.ndarray:
        w = weight if weight is not None else self.weight
        if w.f.shape[0] != self.iq.shape[1]:
            raise GridError("weight grid does not match the shot grid")
        return (w.rotate(self.iq) @ w.f) * self.dt

    def class_scores(self, weight: WeightFunction | None = None):
        s = self.scores(weight)
        return s[self.prepared == "g"], s[self.prepared == "e"]


def simulate_shots(avg_g, avg_e, dt: float, sigma_det: float, n_shots: int,
                   seed: int = 0, *, t1: float | None = None,
                   thermal_excitation: float = 0.0, induced_ge: float = 0.0,
                   induced_eg: float = 0.0,
                   weight: WeightFunction | None = None,
                   config_hash: str = "") -> ShotSet:
    """Synthesize alternately prepared single-shot records.

    The per-sample quadrature noise is set so the matched-filter score
    variance equals sigma_det**2.  Each shot consumes its own RNG
    substream derived from (seed, shot index), so the set is
    reproducible bit for bit regardless of batching.
    """
    avg_g = np.asarray(avg_g, dtype=complex)
    avg_e = np.asarray(avg_e, dtype=complex)
    if avg_g.shape != avg_e.shape:
        raise GridError("averaged envelopes live on different grids")
    if sigma_det < 0:
        raise ValueError("sigma_det must be >= 0")
    if weight is None:
        weight = weight_function(avg_g, avg_e, dt)
    elif weight.f.shape != avg_g.shape:
        raise GridError("weight grid does not match the envelope grid")

    nt = avg_g.shape[0]
    t = dt * np.arange(nt)
    window = dt * nt
    # Var(score) = sum(f^2) * dt^2 * sigma_sample^2
    sigma_sample = sigma_det / (dt * math.sqrt(float(np.sum(weight.f ** 2))))

    iq = np.empty((n_shots, nt), dtype=complex)
    prepared = np.empty(n_shots, dtype="<U1")
    env_label = np.empty(n_shots, dtype="<U4")
    decay_time = np.full(n_shots, np.nan)

    streams = np.random.SeedSequence(seed).spawn(n_shots)
    for idx in range(n_shots):
        rng = np.random.Generator(np.random.PCG64(streams[idx]))
        label = "g" if idx % 2 == 0 else "e"
        prepared[idx] = label
        if label == "g":
            flipped = rng.uniform() < thermal_excitation
            flipped = flipped or rng.uniform() < induced_ge
            env = avg_e if flipped else avg_g
            env_label[idx] = "e" if flipped else "g"
        else:
            if rng.uniform() < induced_eg:
                env = avg_g
                env_label[idx] = "g"
            else:
                t_d = rng.exponential(t1) if t1 is not None else math.inf
                if t_d < window:
                    env = np.where(t < t_d, avg_e, avg_g)
                    env_label[idx] = "tail"
                    decay_time[idx] = t_d
                else:
                    env = avg_e
                    env_label[idx] = "e"
        noise = rng.standard_normal((2, nt))
        iq[idx] = env + sigma_sample * (noise[0] + 1j * noise[1])

    return ShotSet(t=t, dt=dt, iq=iq, prepared=prepared,
                   envelope_label=env_label, decay_time=decay_time,
                   seed=seed, sigma_det=sigma_det, weight=weight,
                   config_hash=config_hash)


def integrate_shot(shot: ShotRecord, weight: WeightFunction) -> float:
    """Matched-filter score: sum over t of f(t) * I_rot(t) * dt."""
    if shot.i.shape != weight.f.shape:
        raise GridError("shot and weight grids do not match")
    i_rot = weight.rotate(shot.i + 1j * shot.q)
    return float(np.sum(weight.f * i_rot) * shot.dt)


# ---------------------------------------------------------------------------
# double-Gaussian fit (expectation-maximization)

@dataclass(frozen=True)
class DoubleGaussianFit:
    """Two-component Gaussian mixture of a score histogram.

    Components are canonicalized to mu_g < mu_e.  ``class_stats`` holds
    the labeled per-class (mean, std) pairs when calibration labels were
    supplied.  ``degenerate`` flags overlapping components
    (|mu_e - mu_g| smaller than the larger sigma).
    """

    mu_g: float
    mu_e: float
    sigma_g: float
    sigma_e: float
    w_g: float
    w_e: float
    threshold: float
    converged: bool
    n_iter: int
    degenerate: bool
    class_stats: dict | None = None

    @property
    def separation(self) -> float:
        return self.mu_e - self.mu_g

    @property
    def sigma_mean(self) -> float:
        return 0.5 * (self.sigma_g + self.sigma_e)


def _loglik(x, mu, sigma, w):
    pdf = w / (np.sqrt(2.0 * np.pi) * sigma) * np.exp(
        -0.5 * ((x[:, None] - mu) / sigma) ** 2)
    return float(np.sum(np.log(np.maximum(pdf.sum(axis=1), 1e-300))))


def equal_likelihood_threshold(mu1, sigma1, w1, mu2, sigma2, w2) -> float:
    """Point between the means where the two weighted Gaussians cross."""
    if mu1 > mu2:
        mu1, sigma1, w1, mu2, sigma2, w2 = mu2, sigma2, w2, mu1, sigma1, w1
    a = 0.5 * (1.0 / sigma1 ** 2 - 1.0 / sigma2 ** 2)
    b = mu2 / sigma2 ** 2 - mu1 / sigma1 ** 2
    c = (0.5 * (mu1 ** 2 / sigma1 ** 2 - mu2 ** 2 / sigma2 ** 2)
         + math.log((w1 * sigma2) / (w2 * sigma1)))
    if abs(a) < 1e-300:
        if b == 0.0:
            return 0.5 * (mu1 + mu2)
        return -c / b
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return 0.5 * (mu1 + mu2)
    roots = ((-b + math.sqrt(disc)) / (2.0 * a), (-b - math.sqrt(disc)) / (2.0 * a))
    inside = [r for r in roots if mu1 <= r <= mu2]
    if inside:
        return inside[0]
    return min(roots, key=lambda r: abs(r - 0.5 * (mu1 + mu2)))


def fit_double_gaussian(scores, labels=None, *, max_iter: int = 500,
                        tol: float = 1e-9) -> DoubleGaussianFit:
    """Fit a two-component Gaussian mixture by expectation-maximization.

    Initialization is a moment-based two-quantile split at the median.
    Convergence requires the log-likelihood change to drop below ``tol``
    within ``max_iter`` iterations; a non-degenerate fit that fails to
    converge raises FitError carrying the log-likelihood trace.
    """
    x = np.asarray(scores, dtype=float).ravel()
    if x.size < 100:
        raise ValueError(f"need at least 100 scores, got {x.size}")

    med = np.median(x)
    lower, upper = x[x <= med], x[x > med]
    spread = max(float(np.std(x)), 1e-300)
    mu = np.array([np.mean(lower), np.mean(upper)])
    sigma = np.maximum(np.array([np.std(lower), np.std(upper)]), 1e-6 * spread)
    w = np.array([0.5, 0.5])

    trace = []
    ll_prev = _loglik(x, mu, sigma, w)
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        # E step
        resp = w / (np.sqrt(2.0 * np.pi) * sigma) * np.exp(
            -0.5 * ((x[:, None] - mu) / sigma) ** 2)
        total = np.maximum(resp.sum(axis=1, keepdims=True), 1e-300)
        resp /= total
        # M step
        nk = np.maximum(resp.sum(axis=0), 1e-12)
        mu = (resp * x[:, None]).sum(axis=0) / nk
        var = (resp * (x[:, None] - mu) ** 2).sum(axis=0) / nk
        sigma = np.maximum(np.sqrt(var), 1e-9 * spread)
        w = nk / x.size
        ll = _loglik(x, mu, sigma, w)
        trace.append(ll)
        if abs(ll - ll_prev) < tol:
            converged = True
            break
        ll_prev = ll

    order = np.argsort(mu)
    mu, sigma, w = mu[order], sigma[order], w[order]
    degenerate = abs(mu[1] - mu[0]) < max(sigma[0], sigma[1])
    if not converged and not degenerate:
        raise FitError(f"EM did not converge after {max_iter} iterations",
                       trace=trace)

    threshold = equal_likelihood_threshold(mu[0], sigma[0], w[0],
                                           mu[1], sigma[1], w[1])
    class_stats = None
    if labels is not None:
        labels = np.asarray(labels)
        class_stats = {}
        for lab in ("g", "e"):
            sel = x[labels == lab]
            if sel.size:
                class_stats[lab] = (float(np.mean(sel)), float(np.std(sel)))

    return DoubleGaussianFit(mu_g=float(mu[0]), mu_e=float(mu[1]),
                             sigma_g=float(sigma[0]), sigma_e=float(sigma[1]),
                             w_g=float(w[0]), w_e=float(w[1]),
                             threshold=float(threshold), converged=converged,
                             n_iter=n_iter, degenerate=degenerate,
                             class_stats=class_stats)


# ---------------------------------------------------------------------------
# fidelity, QND, efficiency

@dataclass(frozen=True)
class FidelityReport:
    """Assignment statistics of one calibration run."""

    fidelity: float
    p_e_given_g: float
    p_g_given_e: float
    eps_g: float
    eps_e: float
    eps_overlap: float
    threshold: float
    integration_time: float | None = None


def overlap_error(separation: float, sigma_mean: float) -> float:
    """Analytic misassignment from Gaussian overlap alone."""
    if sigma_mean <= 0:
        return 0.0
    return 0.5 * float(erfc(abs(separation) / (2.0 * math.sqrt(2.0) * sigma_mean)))


def assignment_fidelity(scores_g, scores_e, threshold: float | None = None,
                        integration_time: float | None = None,
                        fit: DoubleGaussianFit | None = None) -> FidelityReport:
    """Empirical misassignment probabilities by threshold counting.

    Scores at or below the threshold are assigned 'g' (ties break toward
    the ground state).  Without an explicit threshold the equal-likelihood
    point of the per-class Gaussian moments is used.  The analytic
    overlap error comes from the mixture fit when one is supplied;
    otherwise from the per-class moments, which overestimate it whenever
    preparation/decay errors contaminate the classes.
    """
    scores_g = np.asarray(scores_g, dtype=float)
    scores_e = np.asarray(scores_e, dtype=float)
    if scores_g.size == 0 or scores_e.size == 0:
        raise ValueError("both score lists must be non-empty")
    mu_g, sigma_g = float(np.mean(scores_g)), float(np.std(scores_g))
    mu_e, sigma_e = float(np.mean(scores_e)), float(np.std(scores_e))
    if threshold is None:
        if fit is not None:
            threshold = fit.threshold
        elif sigma_g > 0 and sigma_e > 0:
            threshold = equal_likelihood_threshold(mu_g, sigma_g, 0.5,
                                                   mu_e, sigma_e, 0.5)
        else:
            threshold = 0.5 * (mu_g + mu_e)
    p_eg = float(np.mean(scores_g > threshold))
    p_ge = float(np.mean(scores_e <= threshold))
    if fit is not None:
        eps_ol = overlap_error(fit.separation, fit.sigma_mean)
    else:
        eps_ol = overlap_error(mu_e - mu_g, 0.5 * (sigma_g + sigma_e))
    return FidelityReport(
        fidelity=1.0 - 0.5 * (p_eg + p_ge), p_e_given_g=p_eg, p_g_given_e=p_ge,
        eps_g=p_eg, eps_e=p_ge, eps_overlap=eps_ol,
        threshold=float(threshold), integration_time=integration_time)


@dataclass(frozen=True)
class QNDReport:
    """Agreement statistics of two consecutive measurements."""

    q: float
    p_gg: float
    p_ee: float


def qnd_metric(first, second) -> QNDReport:
    """Conditional agreement frequencies of consecutive outcome lists."""
    first = np.asarray(first)
    second = np.asarray(second)
    if first.size == 0:
        raise ValueError("outcome lists must be non-empty")
    if first.shape != second.shape:
        raise ValueError("outcome lists must have equal length")
    for arr in (first, second):
        bad = set(np.unique(arr)) - {"g", "e"}
        if bad:
            raise ValueError(f"outcomes must be 'g' or 'e', found {bad}")
    g1 = first == "g"
    e1 = first == "e"
    if not g1.any() or not e1.any():
        raise ValueError("need at least one 'g' and one 'e' first outcome")
    p_gg = float(np.mean(second[g1] == "g"))
    p_ee = float(np.mean(second[e1] == "e"))
    return QNDReport(q=0.5 * (p_gg + p_ee), p_gg=p_gg, p_ee=p_ee)


def simulate_qnd_experiment(mu_g: float, mu_e: float, sigma_det: float,
                            n_pairs: int, gap: float, t1: float,
                            thermal_excitation: float = 0.015,
                            seed: int = 0) -> tuple[np.ndarray, np.ndarray, QNDReport]:
    """Two consecutive measurements with decay and thermal flips in between.

    Works at score level (each assignment draws a Gaussian score around
    its state's clean mean): between the measurements an excited qubit
    decays with probability 1 - exp(-gap/t1) and a ground-state qubit is
    thermally excited with the configured probability.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    threshold = 0.5 * (mu_g + mu_e)
    prepared = np.where(np.arange(n_pairs) % 2 == 0, "g", "e")

    def measure(states):
        means = np.where(states == "e", mu_e, mu_g)
        s = means + sigma_det * rng.standard_normal(n_pairs)
        return np.where(s > threshold, "e", "g")

    first = measure(prepared)
    decayed = rng.uniform(size=n_pairs) < 1.0 - math.exp(-gap / t1)
    excited = rng.uniform(size=n_pairs) < thermal_excitation
    after = prepared.copy()
    after[(prepared == "e") & decayed] = "g"
    after[(prepared == "g") & excited] = "e"
    second = measure(after)
    return first, second, qnd_metric(first, second)


@dataclass(frozen=True)
class QuantumEfficiency:
    """Detection-chain efficiency from the scaled histogram variance."""

    sigma_det: float
    eta_det: float


def quantum_efficiency(fit: DoubleGaussianFit, n_meas_sqrt: float) -> QuantumEfficiency:
    """eta_det = sigma_0^2 / sigma_det^2 with sigma_0^2 = 0.5.

    The histogram sigma is rescaled so the class separation corresponds
    to the readout amplitude sqrt(n_meas): sigma_det =
    sigma_mean * n_meas_sqrt / |mu_e - mu_g|.
    """
    if fit.separation == 0:
        raise ValueError("fit has zero separation; cannot scale the histogram")
    sigma_det = fit.sigma_mean * n_meas_sqrt / abs(fit.separation)
    if sigma_det <= 0:
        raise ValueError("scaled sigma_det must be > 0")
    return QuantumEfficiency(sigma_det=sigma_det, eta_det=0.5 / sigma_det ** 2)


# ---------------------------------------------------------------------------
# reference operating points

@dataclass(frozen=True)
class OperatingPoint:
    """Measured error budget of one readout scheme on the reference device.

    ``snr`` is the ratio of the clean score separation to sigma_det;
    the eps targets are the total misassignment probabilities the flip
    model is calibrated to reproduce.
    """

    snr: float
    eps_g_target: float = 0.07
    eps_e_target: float = 0.15
    t1: float = 33e-6
    integration_time: float = 1.8e-6
    thermal_excitation: float = 0.015
    n_meas_sqrt: float = 122.0


REFERENCE_OPERATING_POINTS = {
    "mw-mw": OperatingPoint(snr=13.0),
    "mw-opt": OperatingPoint(snr=4.11),
    "opt-opt": OperatingPoint(snr=3.03, n_meas_sqrt=116.0),
}


@dataclass(frozen=True)
class ShotConfig:
    """Resolved synthesis parameters for one operating point."""

    sigma_det: float
    t1: float
    thermal_excitation: float
    induced_ge: float
    induced_eg: float
    threshold_clean: float
    t_half: float
    separation: float
    weight: WeightFunction = field(repr=False, default=None)


def calibrate_shot_config(point: OperatingPoint, avg_g, avg_e,
                          dt: float) -> ShotConfig:
    """Resolve an operating point against concrete averaged envelopes.

    sigma_det is set from the clean score separation and the target SNR.
    The whole-shot flip probabilities are solved so the total error per
    prepared state matches the operating point's targets after the
    thermal and in-window-decay contributions: the decay contribution is
    the probability that the decay happens before the time where the
    weighted separation reaches half its final value.
    """
    w = weight_function(avg_g, avg_e, dt)
    i_g = w.rotate(np.asarray(avg_g, dtype=complex))
    i_e = w.rotate(np.asarray(avg_e, dtype=complex))
    mu_g = float(np.sum(w.f * i_g) * dt)
    mu_e = float(np.sum(w.f * i_e) * dt)
    separation = mu_e - mu_g

    growth = np.cumsum(w.f * (i_e - i_g)) * dt
    idx = int(np.searchsorted(growth, 0.5 * separation))
    t_half = dt * min(idx, growth.size - 1)
    p_decay = 1.0 - math.exp(-t_half / point.t1)

    th = point.thermal_excitation
    induced_ge = max(0.0, (point.eps_g_target - th) / (1.0 - th))
    induced_eg = max(0.0, (point.eps_e_target - p_decay) / (1.0 - p_decay))

    return ShotConfig(sigma_det=separation / point.snr, t1=point.t1,
                      thermal_excitation=th, induced_ge=induced_ge,
                      induced_eg=induced_eg,
                      threshold_clean=0.5 * (mu_g + mu_e), t_half=t_half,
                      separation=separation, weight=w)
