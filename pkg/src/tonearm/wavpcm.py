"""WAV file I/O for mono 16-bit PCM.

Float buffers convert to ints by multiplying by 32768 with symmetric
clamping at +/-32767, and back by dividing by 32768. Files use the
canonical 44-byte RIFF/WAVE header; anything else is rejected.
"""

from __future__ import annotations

import wave

import numpy as np

from .synth import SampleBuffer


class UnsupportedFormat(ValueError):
    """Not a mono 16-bit PCM WAV file at a rate we accept."""


def float_to_pcm16(samples: np.ndarray) -> np.ndarray:
    scaled = np.rint(samples * 32768.0)
    return np.clip(scaled, -32767, 32767).astype(np.int16)


def pcm16_to_float(pcm: np.ndarray) -> np.ndarray:
    return pcm.astype(np.float64) / 32768.0


def write_wav(path: str, buffer: SampleBuffer) -> None:
    """Write a SampleBuffer as mono 16-bit PCM."""
    pcm = float_to_pcm16(buffer.samples)
    with wave.open(path, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(buffer.sample_rate)
        wf.writeframes(pcm.tobytes())


def read_wav(path: str) -> SampleBuffer:
    """Read a mono 16-bit PCM WAV file into normalized floats.

    Raises UnsupportedFormat for stereo, non-16-bit, or compressed files.
    """
    try:
        wf = wave.open(path, "rb")
    except (wave.Error, EOFError) as exc:
        raise UnsupportedFormat(f"not a readable WAV file: {exc}") from exc
    with wf:
        if wf.getnchannels() != 1:
            raise UnsupportedFormat(f"expected mono, got {wf.getnchannels()} channels")
        if wf.getsampwidth() != 2:
            raise UnsupportedFormat(
                f"expected 16-bit samples, got {8 * wf.getsampwidth()}-bit"
            )
        if wf.getcomptype() != "NONE":
            raise UnsupportedFormat(f"expected PCM, got {wf.getcomptype()}")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    pcm = np.frombuffer(raw, dtype="<i2")
    return SampleBuffer(pcm16_to_float(pcm), rate)
