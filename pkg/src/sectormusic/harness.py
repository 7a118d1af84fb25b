"""Monte Carlo resolution experiments and table/figure datasets.

A trial draws one snapshot set, runs MUSIC on a fixed angle grid and applies
the beamwidth-window resolution test. Trial ``t`` at SNR ``s`` draws from
``SeedSequence([base_seed, snr_key(s), t])``: every SNR point is an
independent set of runs, and any single trial can be recomputed on its own.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import curve_fit

from .array_model import ArrayGeometry, beamwidth_deg, delta_separation, BEAMWIDTH_CONSTANT
from .beamspace import array_gain, build_weighting
from .dpss import compute_bank
from .music import angle_grid, eig_hermitian, evaluate_grid, find_peaks, grid_manifold, resolved
from .signal_sim import Scenario, generate_snapshots, sample_covariance, trial_rng
from .theory import EXPANSION_VALIDITY_DELTA, threshold_beamspace, threshold_element, to_db

DEFAULT_B = 0.0781
DEFAULT_DIM = 3
DEFAULT_TRIALS = 30

# (N, separation in degrees) -> {K: (theory dB, simulated dB)} as published
# for n = 3, B = 0.0781, sector centred between the sources.
REFERENCE_THRESHOLDS = {
    (8, 0.8): {100: (36.0, 37), 1000: (27.19, 27), 10000: (20.32, 19)},
    (8, 2.0): {100: (20.88, 23), 1000: (13.62, 15), 10000: (7.81, 8)},
    (8, 4.0): {100: (10.26, 12), 1000: (4.0, 6), 10000: (-1.41, -1)},
    (8, 13.0): {100: (-6.34, -3), 1000: (-11.74, -8), 10000: (-16.87, -13)},
    (16, 0.4): {100: (36.61, 38), 1000: (27.78, 30), 10000: (20.90, 21)},
    (16, 1.0): {100: (21.47, 23), 1000: (14.21, 16), 10000: (8.40, 8)},
    (16, 2.0): {100: (10.84, 14), 1000: (4.59, 6), 10000: (-0.83, 1)},
    (16, 6.0): {100: (-4.69, -1), 1000: (-10.12, -7), 10000: (-15.26, -12)},
}


def reference_rows():
    """The 24 published settings as ``(N, n, B, alpha_d_deg, K)`` tuples."""
    return [
        (N, DEFAULT_DIM, DEFAULT_B, ad, K)
        for (N, ad), by_k in REFERENCE_THRESHOLDS.items()
        for K in by_k
    ]


@dataclass(frozen=True)
class McConfig:
    """One two-source Monte Carlo experiment.

    Angles are degrees, SNRs are array SNR in dB. ``snr_start_db`` /
    ``snr_stop_db`` default to the theoretical threshold -/+ 15 dB, rounded to
    whole dB. ``gain_mode`` chooses where the prefilter gain entering the
    theoretical threshold is evaluated: ``"center"`` (sector center) or
    ``"sources"`` (mean over the two source directions).
    """

    num_sensors: int
    alphas_deg: tuple
    num_snapshots: int
    dim: int = DEFAULT_DIM
    half_bandwidth: float = DEFAULT_B
    spacing_ratio: float = 0.5
    sector_center_deg: object = None
    noise_power: float = 1.0
    space: str = "beamspace"
    snr_start_db: object = None
    snr_stop_db: object = None
    snr_step_db: float = 1.0
    trials: int = DEFAULT_TRIALS
    bw_constant: float = BEAMWIDTH_CONSTANT
    grid_step_deg: object = None
    grid_half_span_bw: float = 2.0
    gain_mode: str = "center"
    base_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alphas_deg", tuple(float(a) for a in self.alphas_deg))
        if len(self.alphas_deg) != 2:
            raise ValueError("threshold experiments need exactly 2 sources")
        if self.alphas_deg[0] == self.alphas_deg[1]:
            raise ValueError("zero separation")
        if self.num_snapshots < 1:
            raise ValueError("K >= 1 required")
        if self.trials < 1:
            raise ValueError("trials >= 1 required")
        if not self.snr_step_db > 0:
            raise ValueError("snr_step_db must be positive")
        if self.space not in ("element", "beamspace"):
            raise ValueError("space must be 'element' or 'beamspace'")
        if self.gain_mode not in ("center", "sources"):
            raise ValueError("gain_mode must be 'center' or 'sources'")

    @property
    def geom(self):
        return ArrayGeometry(self.num_sensors, self.spacing_ratio)

    @property
    def alphas(self):
        return tuple(np.deg2rad(self.alphas_deg))

    @property
    def center_deg(self):
        if self.sector_center_deg is None:
            return 0.5 * sum(self.alphas_deg)
        return float(self.sector_center_deg)

    @property
    def separation_deg(self):
        return abs(self.alphas_deg[0] - self.alphas_deg[1])

    def weighting(self):
        bank = compute_bank(self.num_sensors, self.half_bandwidth, self.dim)
        return build_weighting(self.geom, bank, np.deg2rad(self.center_deg))

    def snr_grid(self):
        theory_db = theoretical_threshold(self)["tau_db"]
        start = round(theory_db) - 15 if self.snr_start_db is None else self.snr_start_db
        stop = round(theory_db) + 15 if self.snr_stop_db is None else self.snr_stop_db
        count = int(np.floor((stop - start) / self.snr_step_db + 1e-9)) + 1
        if count < 1:
            raise ValueError("empty SNR grid")
        return start + self.snr_step_db * np.arange(count)


@dataclass
class McResult:
    config: McConfig
    snr_grid_db: np.ndarray
    probabilities: np.ndarray
    empirical_threshold_db: object
    status: str
    theoretical_threshold_db: float
    crossing50_db: object = None
    trial_log: list = field(default_factory=list)

    @property
    def reached(self):
        return self.status == "ok"


def snr_key(asnr_db):
    """Non-negative integer identifying an SNR value to millidecibel precision."""
    return int(round((float(asnr_db) + 1000.0) * 1000.0))


def theoretical_threshold(config):
    """Theoretical threshold for a config plus the quantities it depends on."""
    geom = config.geom
    a1, a2 = config.alphas
    delta = delta_separation(geom, a1, a2)
    if config.space == "element":
        tau = threshold_element(geom.num_sensors, config.num_snapshots, delta)
        gain = 1.0
    else:
        W = config.weighting()
        if config.gain_mode == "center":
            gain = array_gain(W, geom)[0]
        else:
            gain = 0.5 * (array_gain(W, geom, a1)[0] + array_gain(W, geom, a2)[0])
        tau = threshold_beamspace(config.dim, config.num_snapshots, delta, gain)
    return {
        "tau": tau,
        "tau_db": to_db(tau),
        "gain": gain,
        "gain_db": to_db(gain),
        "delta": delta,
        "within_validity": delta <= EXPANSION_VALIDITY_DELTA,
    }


class _TrialRunner:
    """Precomputed prefilter and grid shared by every trial of a config."""

    def __init__(self, config):
        self.config = config
        self.geom = config.geom
        self.W = config.weighting() if config.space == "beamspace" else None
        bw = beamwidth_deg(self.geom, config.bw_constant)
        step = config.grid_step_deg or bw / 200.0
        self.angles = angle_grid(config.center_deg, config.grid_half_span_bw * bw, step)
        self.manifold = grid_manifold(self.geom, self.angles, self.W)

    def run(self, asnr_db, trial):
        cfg = self.config
        scenario = Scenario.from_asnr(
            self.geom, cfg.alphas, asnr_db, noise_power=cfg.noise_power,
            num_snapshots=cfg.num_snapshots, seed=cfg.base_seed,
        )
        seed = [int(cfg.base_seed), snr_key(asnr_db), int(trial)]
        X = generate_snapshots(scenario, trial_rng(seed))
        if self.W is not None:
            cov = sample_covariance(self.W.H @ X, "beamspace")
        else:
            cov = sample_covariance(X, "element")
        grid = evaluate_grid(eig_hermitian(cov), self.geom, 2, self.angles,
                             self.W, self.manifold)
        peaks = find_peaks(grid)
        a1, a2 = cfg.alphas
        ok = resolved(peaks, a1, a2, self.geom, cfg.bw_constant)
        return {
            "asnr_db": float(asnr_db),
            "trial": int(trial),
            "seed": seed,
            "peaks_deg": [round(a, 9) for a, _ in peaks[:4]],
            "resolved": bool(ok),
        }

    def run_point(self, asnr_db):
        return [self.run(asnr_db, t) for t in range(self.config.trials)]


def _run_point(args):
    config, asnr_db = args
    return _TrialRunner(config).run_point(asnr_db)


def resolution_probability(config, asnr_db, runner=None):
    """Fraction of ``config.trials`` trials resolved at ``asnr_db``."""
    runner = runner or _TrialRunner(config)
    log = runner.run_point(asnr_db)
    return sum(r["resolved"] for r in log) / config.trials


def _logistic(x, x0, s):
    return 1.0 / (1.0 + np.exp(-(x - x0) / s))


def crossing_50(snr_db, probabilities):
    """SNR where a logistic fit to the curve crosses 0.5 (None if no fit)."""
    x = np.asarray(snr_db, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    if p.min() >= 0.5 or p.max() <= 0.5:
        return None
    x0 = x[np.argmin(np.abs(p - 0.5))]
    try:
        (c, s), _ = curve_fit(_logistic, x, p, p0=(x0, 2.0), maxfev=5000)
    except RuntimeError:
        return None
    if not (x[0] <= c <= x[-1]):
        return None
    return float(c)


def find_empirical_threshold(config, workers=1, keep_log=True):
    """Smallest grid SNR at which every trial resolves the two sources.

    ``status`` is ``"ok"``, ``"not reached"`` (no grid point reaches
    probability 1) or ``"not bracketed"`` (the lowest grid point already does,
    so the true threshold may lie below the grid).
    """
    grid = config.snr_grid()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            logs = list(pool.map(_run_point, [(config, s) for s in grid]))
    else:
        runner = _TrialRunner(config)
        logs = [runner.run_point(s) for s in grid]
    probs = np.array([sum(r["resolved"] for r in log) for log in logs]) / config.trials

    threshold, status = None, "not reached"
    for snr, p in zip(grid, probs):
        if p == 1.0:
            threshold, status = float(snr), "ok"
            break
    if status == "ok" and threshold == grid[0]:
        status = "not bracketed"

    return McResult(
        config=config,
        snr_grid_db=grid,
        probabilities=probs,
        empirical_threshold_db=threshold,
        status=status,
        theoretical_threshold_db=theoretical_threshold(config)["tau_db"],
        crossing50_db=crossing_50(grid, probs),
        trial_log=[r for log in logs for r in log] if keep_log else [],
    )


def row_config(N, n, B, alpha_d_deg, K, **overrides):
    """Config for a table row: sources at +/- alpha_d/2 around broadside."""
    half = alpha_d_deg / 2.0
    return McConfig(num_sensors=N, alphas_deg=(-half, half), num_snapshots=K,
                    dim=n, half_bandwidth=B, **overrides)


def build_table(rows, simulate=True, workers=1, **overrides):
    """Theory (and optionally simulated) thresholds for ``(N, n, B, alpha_d, K)`` rows."""
    table = []
    for N, n, B, ad, K in rows:
        cfg = row_config(N, n, B, ad, K, **overrides)
        th = theoretical_threshold(cfg)
        entry = {
            "N": N, "n": n, "B": B, "alpha_d_deg": ad, "K": K,
            "tau_theory_db": th["tau_db"],
            "tau_sim_db": None,
            "gain_db": th["gain_db"],
            "delta": th["delta"],
            "within_validity": th["within_validity"],
        }
        if simulate:
            res = find_empirical_threshold(cfg, workers=workers, keep_log=False)
            entry["tau_sim_db"] = res.empirical_threshold_db
            entry["sim_status"] = res.status
            entry["crossing50_db"] = res.crossing50_db
        table.append(entry)
    return table


def build_figure_sweep(N, dims, B, snapshot_counts, alpha_d_grid_deg, spacing_ratio=0.5):
    """Theoretical threshold curves versus separation, one per ``(n, K)``.

    Returns rows ``{"alpha_d_deg", "tau_n_db", "curve_id"}``.
    """
    geom = ArrayGeometry(N, spacing_ratio)
    rows = []
    for n in dims:
        W = build_weighting(geom, compute_bank(N, B, n), 0.0)
        gain = array_gain(W, geom)[0]
        for K in snapshot_counts:
            curve = f"N{N}_n{n}_K{K}"
            for ad in alpha_d_grid_deg:
                half = np.deg2rad(ad / 2.0)
                delta = delta_separation(geom, -half, half)
                tau = threshold_beamspace(n, K, delta, gain)
                rows.append({"alpha_d_deg": float(ad), "tau_n_db": float(to_db(tau)),
                             "curve_id": curve})
    return rows


def config_dict(config):
    return asdict(config)
