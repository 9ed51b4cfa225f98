"""Synthetic sensing environments and signal machinery.

An environment fixes per-frequency-bin steering matrices, source powers
and sensor self-noise, from which exact theoretical spatial covariance
matrices (SCMs) follow. Gated Gaussian signals plus a square-root-Hann
WOLA STFT pair provide the online-estimation path.
"""
from dataclasses import dataclass, asdict

import numpy as np

from .errors import ConfigInvalid, DimensionMismatch, SignalTooShort
from .topology import place_nodes, PLACEMENT_ATTEMPTS
from .utils import as_rng, complex_normal

SPEED_OF_SOUND = 343.0
STEERING_COND_MAX = 1e6
GATE_PERIOD = 20


@dataclass
class ScenarioConfig:
    """Parameters of a synthetic sensing environment."""

    k_nodes: int = 10
    sensors_per_node: object = 3  # int, or one int per node
    q_dim: int = 1
    s_sources: int = 1
    n_noise_sources: int = 3
    n_bins: int = 4
    desired_powers: object = None  # defaults to ones
    noise_powers: object = None  # defaults to ones
    self_noise_power: object = None  # defaults to 1e-2 * mean desired power
    steering_mode: str = "random-gaussian"
    area: float = 5.0
    min_node_dist: float = 0.1
    min_source_dist: float = 0.5
    sensor_radius: float = 0.1
    sample_rate: float = 16000.0

    def sensor_counts(self):
        if np.isscalar(self.sensors_per_node):
            return [int(self.sensors_per_node)] * self.k_nodes
        return [int(m) for m in self.sensors_per_node]


@dataclass
class Geometry:
    node_positions: np.ndarray  # (K, 2)
    sensor_positions: list  # per node (M_q, 2)
    desired_positions: np.ndarray  # (S, 2)
    noise_positions: np.ndarray  # (J, 2)


@dataclass
class SensingEnvironment:
    """Ground truth for an experiment: steering, powers, and selections."""

    config: ScenarioConfig
    seed: int
    sensors_per_node: list
    n_bins: int
    desired_steering: np.ndarray  # (F, M, S)
    noise_steering: np.ndarray  # (F, M, J)
    desired_powers: np.ndarray  # (S,)
    noise_powers: np.ndarray  # (J,)
    self_noise_power: float
    target_selection: list  # per node (M_q, Q) 0/1
    geometry: Geometry

    @property
    def k_nodes(self):
        return len(self.sensors_per_node)

    @property
    def q_dim(self):
        return self.target_selection[0].shape[1]

    @property
    def m_total(self):
        return int(sum(self.sensors_per_node))

    def node_slice(self, q):
        """Row range of node q's sensors in the centralized stacking."""
        start = int(sum(self.sensors_per_node[:q]))
        return slice(start, start + self.sensors_per_node[q])

    def psi_bar(self, q):
        """Per-bin target-channel steering E_qq^T Psi_q, shape (F, Q, S)."""
        psi_q = self.desired_steering[:, self.node_slice(q), :]
        return np.matmul(self.target_selection[q].T[None, :, :], psi_q)

    def global_selection(self, q):
        """(M, Q) matrix selecting node q's target channels from y."""
        e = np.zeros((self.m_total, self.q_dim))
        e[self.node_slice(q), :] = self.target_selection[q]
        return e

    def to_json(self):
        cfg = asdict(self.config)
        if not np.isscalar(cfg["sensors_per_node"]):
            cfg["sensors_per_node"] = list(cfg["sensors_per_node"])
        return {"config": cfg, "seed": self.seed}

    @classmethod
    def from_json(cls, data):
        return build_environment(ScenarioConfig(**data["config"]), data["seed"])


@dataclass
class ScmSet:
    """Per-bin centralized SCMs; ryy = rss + rnn by construction."""

    ryy: np.ndarray  # (F, M, M)
    rnn: np.ndarray
    rss: np.ndarray


@dataclass
class SignalBlock:
    """Synthesized multichannel signals with ground-truth VAD.

    Time-domain per-node arrays (M_q, T) decompose as y = desired +
    noise; the STFT-domain views used for synthesis are kept alongside.
    """

    y: list
    desired: list
    noise: list
    vad: np.ndarray  # (n_frames,) bool
    y_frames: list  # per node (F, M_q, n_frames)
    desired_frames: list
    noise_frames: list
    latent_frames: np.ndarray  # (F, S, n_frames)


def _validate(config):
    counts = config.sensor_counts()
    if config.s_sources < 1:
        raise ConfigInvalid("need at least one desired source")
    if config.q_dim < 1 or config.q_dim > min(counts):
        raise ConfigInvalid(
            f"q_dim={config.q_dim} must be in [1, min sensors_per_node]"
        )
    if config.n_bins < 1:
        raise ConfigInvalid("n_bins must be >= 1")
    if config.steering_mode not in ("random-gaussian", "free-field"):
        raise ConfigInvalid(f"unknown steering mode {config.steering_mode!r}")
    des = _powers(config.desired_powers, config.s_sources)
    noi = _powers(config.noise_powers, config.n_noise_sources)
    if np.any(des <= 0) or np.any(noi <= 0):
        raise ConfigInvalid("source powers must be positive")
    sn = config.self_noise_power
    if sn is None:
        sn = 1e-2 * float(des.mean())
    if sn <= 0:
        raise ConfigInvalid("self_noise_power must be positive")
    return counts, des, noi, float(sn)


def _powers(value, n):
    if value is None:
        return np.ones(n)
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.size != n:
        raise ConfigInvalid(f"expected {n} powers, got {arr.size}")
    return arr


def _place_sources(n, sensor_stack, config, rng):
    positions = np.empty((n, 2))
    attempts = 0
    placed = 0
    while placed < n:
        if attempts >= PLACEMENT_ATTEMPTS:
            raise ConfigInvalid(
                "could not place sources at the required sensor distance"
            )
        attempts += 1
        candidate = rng.uniform(0.0, config.area, size=2)
        if sensor_stack.size and (
            np.linalg.norm(sensor_stack - candidate, axis=1).min()
            < config.min_source_dist
        ):
            continue
        positions[placed] = candidate
        placed += 1
    return positions


def free_field_steering(sensor_positions, source_positions, n_bins, sample_rate):
    """Free-field (direct path) steering entries exp(-j 2 pi f d / c) / d.

    Distances are floored at 0.1 m; bin b maps to frequency
    b * sample_rate / n_bins.
    """
    d = np.linalg.norm(
        sensor_positions[:, None, :] - source_positions[None, :, :], axis=-1
    )
    freqs = np.arange(n_bins) * sample_rate / n_bins
    delay = d[None, :, :] / SPEED_OF_SOUND
    return np.exp(-2j * np.pi * freqs[:, None, None] * delay) / np.maximum(
        d[None, :, :], 0.1
    )


def build_environment(config, seed=0):
    """Construct a sensing environment deterministically from a seed.

    In "random-gaussian" mode, steering entries are i.i.d. circular
    Gaussians; any node/bin block whose target-channel steering is
    ill-conditioned (cond > 1e6) is redrawn. "free-field" mode derives
    steering from source/sensor geometry instead.
    """
    counts, desired_powers, noise_powers, self_noise = _validate(config)
    rng = np.random.default_rng(seed)
    k, f_bins = config.k_nodes, config.n_bins
    s, j = config.s_sources, config.n_noise_sources
    m_total = sum(counts)

    node_positions = place_nodes(
        k, area=config.area, min_dist=config.min_node_dist, rng=rng
    )
    sensor_positions = []
    for q, m_q in enumerate(counts):
        angles = 2 * np.pi * np.arange(m_q) / max(m_q, 1)
        offsets = config.sensor_radius * np.stack(
            [np.cos(angles), np.sin(angles)], axis=1
        )
        sensor_positions.append(node_positions[q] + offsets)
    sensor_stack = np.concatenate(sensor_positions, axis=0)
    desired_positions = _place_sources(s, sensor_stack, config, rng)
    noise_positions = _place_sources(j, sensor_stack, config, rng)

    target_selection = [np.eye(m_q, config.q_dim) for m_q in counts]

    if config.steering_mode == "free-field":
        desired_steering = free_field_steering(
            sensor_stack, desired_positions, f_bins, config.sample_rate
        )
        noise_steering = free_field_steering(
            sensor_stack, noise_positions, f_bins, config.sample_rate
        )
    else:
        desired_steering = complex_normal(rng, (f_bins, m_total, s))
        noise_steering = complex_normal(rng, (f_bins, m_total, j))
        offset = 0
        for q, m_q in enumerate(counts):
            rows = slice(offset, offset + m_q)
            sel = target_selection[q].T
            for f in range(f_bins):
                while _cond(sel @ desired_steering[f, rows, :]) > STEERING_COND_MAX:
                    desired_steering[f, rows, :] = complex_normal(rng, (m_q, s))
            offset += m_q

    return SensingEnvironment(
        config=config,
        seed=seed,
        sensors_per_node=counts,
        n_bins=f_bins,
        desired_steering=desired_steering,
        noise_steering=noise_steering,
        desired_powers=desired_powers,
        noise_powers=noise_powers,
        self_noise_power=self_noise,
        target_selection=target_selection,
        geometry=Geometry(
            node_positions=node_positions,
            sensor_positions=sensor_positions,
            desired_positions=desired_positions,
            noise_positions=noise_positions,
        ),
    )


def _cond(mat):
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv[-1] == 0.0:
        return np.inf
    return sv[0] / sv[-1]


def theoretical_scms(env):
    """Exact per-bin centralized SCMs implied by the environment."""
    m = env.m_total
    psi = env.desired_steering
    rss = np.matmul(psi * env.desired_powers[None, None, :], _ht(psi))
    rss = _hermitianize(rss)
    psi_n = env.noise_steering
    rnn = np.matmul(psi_n * env.noise_powers[None, None, :], _ht(psi_n))
    rnn = _hermitianize(rnn) + env.self_noise_power * np.eye(m)[None, :, :]
    return ScmSet(ryy=rss + rnn, rnn=rnn, rss=rss)


def _ht(a):
    return a.conj().transpose(0, 2, 1)


def _hermitianize(a):
    return (a + _ht(a)) / 2.0


def _sqrt_hann(frame_len):
    n = np.arange(frame_len)
    return np.sqrt(0.5 - 0.5 * np.cos(2 * np.pi * n / frame_len))


def stft(signal, frame_len):
    """Square-root-Hann STFT with 50% overlap, orthonormal DFT.

    Accepts (T,) or (C, T) input; returns (frame_len, n_frames) or
    (frame_len, C, n_frames) complex frames.
    """
    x = np.asarray(signal)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    t = x.shape[-1]
    if t < frame_len:
        raise SignalTooShort(f"{t} samples < frame length {frame_len}")
    hop = frame_len // 2
    window = _sqrt_hann(frame_len)
    segs = np.lib.stride_tricks.sliding_window_view(x, frame_len, axis=-1)
    segs = segs[:, ::hop, :] * window  # (C, n_frames, L)
    frames = np.fft.fft(segs, axis=-1, norm="ortho")
    frames = frames.transpose(2, 0, 1)  # (L, C, n_frames)
    return frames[:, 0, :] if single else frames


def istft(frames):
    """Weighted overlap-add inverse of :func:`stft`.

    Reconstruction is exact (within 1e-10 relative) on the fully
    overlapped interior; the first and last half frames taper.
    """
    x = np.asarray(frames)
    single = x.ndim == 2
    if single:
        x = x[:, None, :]
    frame_len, channels, n_frames = x.shape
    hop = frame_len // 2
    window = _sqrt_hann(frame_len)
    segs = np.fft.ifft(x.transpose(1, 2, 0), axis=-1, norm="ortho") * window
    total = (n_frames - 1) * hop + frame_len
    out = np.zeros((channels, total), dtype=complex)
    for t in range(n_frames):
        out[:, t * hop: t * hop + frame_len] += segs[:, t, :]
    return out[0] if single else out


def vad_gate(n_frames, activity_duty):
    """Periodic on/off activity pattern (period 20 frames)."""
    if not 0.0 < activity_duty < 1.0:
        raise ConfigInvalid("activity_duty must lie strictly between 0 and 1")
    on = round(activity_duty * GATE_PERIOD)
    pattern = np.arange(GATE_PERIOD) < on
    reps = int(np.ceil(n_frames / GATE_PERIOD))
    return np.tile(pattern, reps)[:n_frames]


def synthesize_signals(env, duration_frames, activity_duty=0.5, rng=None):
    """Gated Gaussian signals observed through the environment steering.

    Latent desired sources are circular Gaussians gated by the periodic
    VAD pattern; localized noise and sensor self-noise are stationary.
    Per-bin frames map to the time domain through :func:`istft`.
    """
    rng = as_rng(rng)
    f_bins, s = env.n_bins, env.desired_powers.size
    j = env.noise_powers.size
    vad = vad_gate(duration_frames, activity_duty)
    latent = complex_normal(rng, (f_bins, s, duration_frames)) * np.sqrt(
        env.desired_powers
    )[None, :, None]
    latent = latent * vad[None, None, :]
    noise_lat = complex_normal(rng, (f_bins, j, duration_frames)) * np.sqrt(
        env.noise_powers
    )[None, :, None]

    y, des, noi = [], [], []
    y_frames, des_frames, noi_frames = [], [], []
    for q in range(env.k_nodes):
        rows = env.node_slice(q)
        s_q = np.matmul(env.desired_steering[:, rows, :], latent)
        n_q = np.matmul(env.noise_steering[:, rows, :], noise_lat)
        n_q = n_q + complex_normal(
            rng, (f_bins, env.sensors_per_node[q], duration_frames),
            power=env.self_noise_power,
        )
        y_q = s_q + n_q
        y_frames.append(y_q)
        des_frames.append(s_q)
        noi_frames.append(n_q)
        y.append(istft(y_q))
        des.append(istft(s_q))
        noi.append(istft(n_q))
    return SignalBlock(
        y=y, desired=des, noise=noi, vad=vad,
        y_frames=y_frames, desired_frames=des_frames, noise_frames=noi_frames,
        latent_frames=latent,
    )


@dataclass
class OnlineScmEstimator:
    """VAD-gated exponential averaging of one per-bin SCM pair."""

    ryy: np.ndarray
    rnn: np.ndarray
    beta: float
    count_yy: int = 0
    count_nn: int = 0

    @classmethod
    def zeros(cls, dim, beta):
        return cls(
            ryy=np.zeros((dim, dim), dtype=complex),
            rnn=np.zeros((dim, dim), dtype=complex),
            beta=beta,
        )

    def update(self, frame, vad_on):
        frame = np.asarray(frame, dtype=complex)
        if frame.shape != (self.ryy.shape[0],):
            raise DimensionMismatch(
                f"frame length {frame.shape} does not match SCM dim "
                f"{self.ryy.shape[0]}"
            )
        outer = np.outer(frame, frame.conj())
        outer = (outer + outer.conj().T) / 2.0  # exactly Hermitian under FMA
        if vad_on:
            self.ryy = self.beta * self.ryy + (1.0 - self.beta) * outer
            self.count_yy += 1
        else:
            self.rnn = self.beta * self.rnn + (1.0 - self.beta) * outer
            self.count_nn += 1
        return self

    def corrected(self):
        """Estimates rescaled by 1 / (1 - beta^count) to undo startup bias."""
        ryy = self.ryy / _bias(self.beta, self.count_yy)
        rnn = self.rnn / _bias(self.beta, self.count_nn)
        return ryy, rnn


def _bias(beta, count):
    if count == 0:
        return 1.0
    factor = 1.0 - beta**count
    return factor if factor > 0.0 else 1.0


def online_scm_update(est, frame, vad_on):
    """Apply one VAD-gated update to ``est`` and return it."""
    return est.update(frame, vad_on)
