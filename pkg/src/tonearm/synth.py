"""DTMF tone synthesis.

Each keypad symbol maps to one "row" and one "column" frequency per the
ITU-T Q.23 grid; a key press is the superposition of those two sines.
This module owns the canonical 16-key map (including A-D) and produces
the normalized-float audio buffers everything downstream consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Row-major keypad layout: rows 123A / 456B / 789C / *0#D.
KEYS = "123A456B789C*0#D"

ROW_FREQS_HZ = (697, 770, 852, 941)
COL_FREQS_HZ = (1209, 1336, 1477, 1633)

KEY_TONES: dict[str, tuple[int, int]] = {
    key: (ROW_FREQS_HZ[i // 4], COL_FREQS_HZ[i % 4]) for i, key in enumerate(KEYS)
}

# Other rates are rejected rather than resampled.
SUPPORTED_RATES = (8000, 16000, 44100)

# No-noise sentinel for mix_noise.
NO_NOISE_DB = math.inf


class SampleRateTooLow(ValueError):
    """Sample rate violates Nyquist for the highest column tone."""


class UnsupportedSampleRate(ValueError):
    """Sample rate is not one of SUPPORTED_RATES."""


class AmplitudeOverflow(ValueError):
    """The two-tone sum would exceed full scale (silent clipping is not allowed)."""


class InvalidKey(ValueError):
    """Symbol is not one of the 16 keypad keys."""


@dataclass(frozen=True)
class ToneParams:
    """Synthesis knobs for one key press.

    amplitude   linear peak of the low-band tone, in [0, 1] (0 is silence)
    twist_db    high-band level minus low-band level, dB
    duration_ms tone-on time per key
    pause_ms    inter-digit silence
    """

    amplitude: float = 0.4
    twist_db: float = 0.0
    duration_ms: float = 80.0
    pause_ms: float = 80.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.amplitude <= 1.0:
            raise ValueError(f"amplitude must be in [0, 1], got {self.amplitude}")
        if self.duration_ms <= 0:
            raise ValueError(f"duration_ms must be > 0, got {self.duration_ms}")
        if self.pause_ms < 0:
            raise ValueError(f"pause_ms must be >= 0, got {self.pause_ms}")


@dataclass(frozen=True)
class SampleBuffer:
    """Mono PCM audio: normalized float amplitudes plus a sample rate."""

    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate


def validate_key(key: str) -> str:
    if key not in KEY_TONES:
        raise InvalidKey(f"not a DTMF key: {key!r}")
    return key


def key_tone_pair(key: str) -> tuple[int, int]:
    """Return the (row, column) frequency pair in Hz for a keypad symbol."""
    return KEY_TONES[validate_key(key)]


def _check_rate(sample_rate: int) -> None:
    if sample_rate < 2 * COL_FREQS_HZ[-1] * 1.1:
        raise SampleRateTooLow(
            f"{sample_rate} Hz cannot carry a {COL_FREQS_HZ[-1]} Hz tone"
        )
    if sample_rate not in SUPPORTED_RATES:
        raise UnsupportedSampleRate(
            f"{sample_rate} Hz not in supported set {SUPPORTED_RATES}"
        )


def _n_samples(duration_ms: float, sample_rate: int) -> int:
    return int(round(duration_ms * sample_rate / 1000.0))


def synthesize_key(key: str, params: ToneParams, sample_rate: int) -> SampleBuffer:
    """Synthesize one key press as the sum of its two band tones.

    The low tone has peak ``params.amplitude``; the high tone is offset by
    ``params.twist_db``. Both start at phase zero. Raises AmplitudeOverflow
    if the worst-case sum of the two peaks exceeds 1.0.
    """
    validate_key(key)
    _check_rate(sample_rate)

    a_low = params.amplitude
    a_high = a_low * 10.0 ** (params.twist_db / 20.0)
    if a_low + a_high > 1.0 + 1e-12:
        raise AmplitudeOverflow(
            f"tone peaks sum to {a_low + a_high:.4f} > 1.0 "
            f"(amplitude={a_low}, twist={params.twist_db} dB)"
        )

    f_low, f_high = KEY_TONES[key]
    n = _n_samples(params.duration_ms, sample_rate)
    t = np.arange(n) / sample_rate
    samples = a_low * np.sin(2.0 * np.pi * f_low * t) + a_high * np.sin(
        2.0 * np.pi * f_high * t
    )
    return SampleBuffer(samples, sample_rate)


def silence(duration_ms: float, sample_rate: int) -> SampleBuffer:
    return SampleBuffer(np.zeros(_n_samples(duration_ms, sample_rate)), sample_rate)


def synthesize_sequence(
    keys: str | list[str], params: ToneParams, sample_rate: int
) -> SampleBuffer:
    """Synthesize a key sequence with inter-digit pauses.

    Layout: pause, tone, pause, tone, ..., pause. The leading and trailing
    pauses give the detector clean onsets, so total length is
    ``n*duration + (n+1)*pause``.
    """
    if not keys:
        raise ValueError("key sequence must be non-empty")
    gap = silence(params.pause_ms, sample_rate).samples
    parts: list[np.ndarray] = [gap]
    for key in keys:
        parts.append(synthesize_key(key, params, sample_rate).samples)
        parts.append(gap)
    return SampleBuffer(np.concatenate(parts), sample_rate)


def mix_noise(buffer: SampleBuffer, snr_db: float, seed: int) -> SampleBuffer:
    """Add seeded zero-mean white noise at the requested signal-to-noise ratio.

    ``snr_db = math.inf`` is the no-noise sentinel and returns the input
    unchanged. Output for a fixed seed is deterministic. Note the mixed
    buffer may exceed [-1, 1]; only synthesis guarantees that bound.
    """
    if snr_db == NO_NOISE_DB:
        return SampleBuffer(buffer.samples.copy(), buffer.sample_rate)
    signal_power = float(np.mean(buffer.samples**2))
    noise_power = signal_power / 10.0 ** (snr_db / 10.0)
    rng = np.random.default_rng(seed)
    noise = math.sqrt(noise_power) * rng.standard_normal(len(buffer.samples))
    return SampleBuffer(buffer.samples + noise, buffer.sample_rate)
