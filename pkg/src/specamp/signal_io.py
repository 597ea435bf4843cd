"""Mono signal ingest and calibrated synthetic test signals.

WAV support is deliberately narrow: 16-bit PCM mono, the capture profile the
analysis assumes. Anything else is rejected rather than converted so the
provenance of analyzed data stays unambiguous.
"""

from __future__ import annotations

import json
import wave
from dataclasses import dataclass

import numpy as np

NOISE_KINDS = ("white_gaussian", "filtered_gaussian", "constant_tone", "model_based")

# Gaussian generators scale so 3.5 sigma hits full scale; anything beyond is
# hard-clipped and counted.
CLIP_SIGMA = 3.5

# Long enough for >= 20000 frames at the default 512/256 grid.
DEFAULT_DURATION_S = 330.0


@dataclass(frozen=True, eq=False)
class Signal:
    """Mono float samples, nominally in [-1, 1], plus their sample rate.

    ``clip_count`` is a generation diagnostic: how many raw samples exceeded
    full scale and were hard-clipped before storage.
    """

    samples: np.ndarray
    sample_rate_hz: int
    clip_count: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "samples", np.ascontiguousarray(self.samples, dtype=np.float64)
        )
        if self.samples.ndim != 1:
            raise ValueError("samples must be one-dimensional")
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    @property
    def peak_amplitude(self) -> float:
        return float(np.abs(self.samples).max()) if len(self.samples) else 0.0

    def scaled(self, factor: float) -> "Signal":
        return Signal(self.samples * factor, self.sample_rate_hz)


@dataclass(frozen=True)
class NoiseSpec:
    """Recipe for a deterministic synthetic signal.

    ``envelope`` is the per-bin gain sequence used by filtered_gaussian and
    model_based; its length fixes the one-sided bin count (and therefore the
    implied frame length 2*(len-1)). ``freq_hz``/``amplitude`` apply to
    constant_tone only.
    """

    kind: str
    duration_s: float = DEFAULT_DURATION_S
    seed: int = 0
    envelope: tuple[float, ...] | None = None
    freq_hz: float = 1000.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.duration_s <= 0:
            raise ValueError(f"duration_s must be positive, got {self.duration_s}")
        if self.kind in ("filtered_gaussian", "model_based"):
            if self.envelope is None:
                raise ValueError(f"{self.kind} requires an envelope")
            env = np.asarray(self.envelope, dtype=np.float64)
            if env.ndim != 1 or len(env) < 2:
                raise ValueError("envelope must be a 1-D sequence of at least 2 gains")
            if env.min() < 0:
                raise ValueError("envelope gains must be non-negative")

    def envelope_array(self) -> np.ndarray:
        return np.asarray(self.envelope, dtype=np.float64)

    def to_json(self) -> str:
        d = {
            "kind": self.kind,
            "duration_s": self.duration_s,
            "seed": self.seed,
            "envelope": list(self.envelope) if self.envelope is not None else None,
        }
        if self.kind == "constant_tone":
            d["freq_hz"] = self.freq_hz
            d["amplitude"] = self.amplitude
        return json.dumps(d)

    @classmethod
    def from_json(cls, text: str) -> "NoiseSpec":
        d = json.loads(text)
        if not isinstance(d, dict) or "kind" not in d:
            raise ValueError("noise spec JSON must be an object with a 'kind' key")
        env = d.get("envelope")
        return cls(
            kind=d["kind"],
            duration_s=float(d.get("duration_s", DEFAULT_DURATION_S)),
            seed=int(d.get("seed", 0)),
            envelope=tuple(float(g) for g in env) if env is not None else None,
            freq_hz=float(d.get("freq_hz", 1000.0)),
            amplitude=float(d.get("amplitude", 1.0)),
        )


def read_wav(path) -> Signal:
    """Read a 16-bit PCM mono WAV; integer samples are mapped to [-1, 1) by /32768."""
    try:
        with wave.open(str(path), "rb") as wf:
            n_channels = wf.getnchannels()
            sample_width = wf.getsampwidth()
            rate = wf.getframerate()
            n = wf.getnframes()
            raw = wf.readframes(n)
            comp = wf.getcomptype()
    except (wave.Error, EOFError) as exc:
        raise ValueError(f"{path}: not a readable PCM WAV file ({exc})") from exc
    if comp != "NONE":
        raise ValueError(f"{path}: compressed WAV ({comp}) is not supported, need plain PCM")
    if n_channels != 1:
        raise ValueError(f"{path}: expected mono, got {n_channels} channels")
    if sample_width != 2:
        raise ValueError(f"{path}: expected 16-bit samples, got {8 * sample_width}-bit")
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return Signal(samples, rate)


def write_wav(path, signal: Signal) -> int:
    """Write 16-bit PCM mono; returns how many samples clipped at full scale."""
    x = np.rint(signal.samples * 32768.0)
    clipped = int(np.count_nonzero((x < -32768) | (x > 32767)))
    pcm = np.clip(x, -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(signal.sample_rate_hz)
        wf.writeframes(pcm.tobytes())
    return clipped


def _clip_full_scale(x: np.ndarray) -> tuple[np.ndarray, int]:
    count = int(np.count_nonzero(np.abs(x) > 1.0))
    if count:
        x = np.clip(x, -1.0, 1.0)
    return x, count


def generate_noise(spec: NoiseSpec, sample_rate_hz: int) -> Signal:
    """Deterministically synthesize the signal described by ``spec``.

    The same spec (seed included) always produces bit-identical samples.
    """
    if sample_rate_hz <= 0:
        raise ValueError(f"sample_rate_hz must be positive, got {sample_rate_hz}")
    n = int(round(spec.duration_s * sample_rate_hz))
    frame_len = 2 * (len(spec.envelope) - 1) if spec.envelope is not None else 512
    if n < frame_len:
        raise ValueError(
            f"duration {spec.duration_s}s gives {n} samples; need at least one "
            f"analysis frame of {frame_len}"
        )
    rng = np.random.default_rng(spec.seed)

    if spec.kind == "white_gaussian":
        x = rng.standard_normal(n) / CLIP_SIGMA
        x, clipped = _clip_full_scale(x)
        return Signal(x, sample_rate_hz, clip_count=clipped)

    if spec.kind == "filtered_gaussian":
        env = spec.envelope_array()
        white = rng.standard_normal(n)
        bin_freqs = np.arange(len(env)) * (sample_rate_hz / frame_len)
        gains = np.interp(np.fft.rfftfreq(n, 1.0 / sample_rate_hz), bin_freqs, env)
        shaped = np.fft.irfft(np.fft.rfft(white) * gains, n=n)
        sigma = shaped.std()
        if sigma == 0.0:
            return Signal(shaped, sample_rate_hz)
        x = shaped / (CLIP_SIGMA * sigma)
        x, clipped = _clip_full_scale(x)
        return Signal(x, sample_rate_hz, clip_count=clipped)

    if spec.kind == "constant_tone":
        t = np.arange(n, dtype=np.float64) / sample_rate_hz
        return Signal(spec.amplitude * np.sin(2.0 * np.pi * spec.freq_hz * t), sample_rate_hz)

    # model_based: per-bin scaling of a unit-mean Rayleigh prototype
    from specamp.reference import unit_rayleigh_prototype
    from specamp.spectral import StftConfig
    from specamp.synthesis import ScalingModel, synthesize

    config = StftConfig(
        frame_len=frame_len, hop=frame_len // 2, window="hamming", sample_rate_hz=sample_rate_hz
    )
    model = ScalingModel(
        envelope=spec.envelope_array(), prototype=unit_rayleigh_prototype(), config=config
    )
    # enough frames that overlap-add covers the requested duration
    n_frames = max(1, -((n - frame_len) // -config.hop) + 1)
    produced = synthesize(model, n_frames, spec.seed)
    x, clipped = _clip_full_scale(produced.samples[:n])
    return Signal(x, sample_rate_hz, clip_count=clipped)
