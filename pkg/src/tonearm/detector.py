"""MT8870-style DTMF receiver.

A Goertzel filter bank measures the eight band frequencies per analysis
block; steering logic validates a tone over consecutive blocks before
latching it, and requires a quiet gap before re-arming, so one sustained
press emits exactly one event. Each detected key is reported with its
4-bit output code.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .synth import COL_FREQS_HZ, KEYS, ROW_FREQS_HZ, SampleBuffer, validate_key

BAND_FREQS_HZ = ROW_FREQS_HZ + COL_FREQS_HZ

# 4-bit output map, indexed by code value: D is 0000, the digits 1-9 count
# up from 0001, and 0 is 1010 (not 0000).
_CODE_TO_KEY = "D1234567890*#ABC"
_KEY_TO_CODE = {key: code for code, key in enumerate(_CODE_TO_KEY)}

# Goertzel power of a full-scale on-bin sine: amplitude 1.0 over N samples
# has |X[k]|^2 = (N/2)^2. The silence floor is expressed relative to this.
_REFERENCE_BLOCK_SIZE = 205
_REFERENCE_RATE = 8000


class FrequencyAboveNyquist(ValueError):
    pass


class BlockSizeMismatch(ValueError):
    pass


class SampleRateMismatch(ValueError):
    pass


def key_to_code(key: str) -> int:
    """Map a keypad symbol to its 4-bit receiver output code."""
    return _KEY_TO_CODE[validate_key(key)]


def code_to_key(code: int) -> str:
    """Inverse of key_to_code, total over [0, 15]."""
    if not 0 <= code <= 15:
        raise ValueError(f"code out of range [0, 15]: {code}")
    return _CODE_TO_KEY[code]


def code_bits(code: int) -> str:
    """Render a code as its 4-bit binary string, e.g. 5 -> '0101'."""
    if not 0 <= code <= 15:
        raise ValueError(f"code out of range [0, 15]: {code}")
    return format(code, "04b")


def default_block_size(sample_rate: int) -> int:
    """205 samples at 8 kHz, scaled proportionally at other rates.

    That length puts every band frequency near an integral DFT bin, which
    keeps scalloping loss (and hence twist estimation error) small.
    """
    return int(round(_REFERENCE_BLOCK_SIZE * sample_rate / _REFERENCE_RATE))


@dataclass(frozen=True)
class DetectorConfig:
    """Steering and validity thresholds for the receiver.

    block_size      samples per analysis block
    accept_blocks   consecutive agreeing blocks to declare a digit
    release_blocks  consecutive non-agreeing blocks to re-arm
    rel_threshold   min fraction of total band energy in the winning pair
    twist_limit_db  max |high - low| level difference accepted
    silence_floor   min pair energy, as a fraction of a full-scale block
    tie_margin_db   two row (or column) bins closer than this is ambiguous
    """

    block_size: int
    accept_blocks: int = 2
    release_blocks: int = 2
    rel_threshold: float = 0.8
    twist_limit_db: float = 8.0
    silence_floor: float = 1e-6
    tie_margin_db: float = 1.0

    def __post_init__(self) -> None:
        if self.block_size <= 0:
            raise ValueError("block_size must be positive")
        if self.accept_blocks < 1 or self.release_blocks < 1:
            raise ValueError("accept_blocks and release_blocks must be >= 1")
        if not 0.0 < self.rel_threshold < 1.0:
            raise ValueError("rel_threshold must be in (0, 1)")
        if self.twist_limit_db < 0:
            raise ValueError("twist_limit_db must be >= 0")

    @classmethod
    def for_rate(cls, sample_rate: int, **overrides) -> "DetectorConfig":
        overrides.setdefault("block_size", default_block_size(sample_rate))
        return cls(**overrides)


@dataclass(frozen=True)
class DecoderEvent:
    """One validated key press."""

    key: str
    code: int
    onset_sample: int
    duration_samples: int


def event_to_json(event: DecoderEvent) -> str:
    """One event as a single JSON line (the event-log wire format)."""
    return json.dumps(
        {
            "onset_sample": event.onset_sample,
            "key": event.key,
            "code_binary": code_bits(event.code),
            "duration_samples": event.duration_samples,
        }
    )


def event_from_json(line: str) -> DecoderEvent:
    rec = json.loads(line)
    return DecoderEvent(
        key=rec["key"],
        code=int(rec["code_binary"], 2),
        onset_sample=rec["onset_sample"],
        duration_samples=rec["duration_samples"],
    )


def goertzel_power(block: SampleBuffer, target_hz: float) -> float:
    """Squared DFT magnitude at the bin nearest target_hz, via Goertzel.

    Runs the second-order recurrence s[n] = x[n] + 2cos(w)s[n-1] - s[n-2]
    with w = 2*pi*k/N, k = round(N*target/rate), and returns
    s[N-1]^2 + s[N-2]^2 - 2cos(w)s[N-1]s[N-2].
    """
    x = block.samples
    n_len = len(x)
    if n_len < 2:
        raise ValueError("block must hold at least 2 samples")
    if target_hz >= block.sample_rate / 2:
        raise FrequencyAboveNyquist(
            f"{target_hz} Hz >= Nyquist for {block.sample_rate} Hz"
        )
    k = round(n_len * target_hz / block.sample_rate)
    coeff = 2.0 * math.cos(2.0 * math.pi * k / n_len)
    s1 = 0.0
    s2 = 0.0
    for sample in x:
        s1, s2 = sample + coeff * s1 - s2, s1
    return s1 * s1 + s2 * s2 - coeff * s1 * s2


def _band_coeffs(block_size: int, sample_rate: int) -> np.ndarray:
    ks = np.round(block_size * np.asarray(BAND_FREQS_HZ) / sample_rate)
    return 2.0 * np.cos(2.0 * np.pi * ks / block_size)


def _band_powers(blocks: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Goertzel power per (block, band frequency).

    blocks has shape (n_blocks, block_size); the recurrence is run for all
    blocks and all eight bands in lockstep, so the Python loop is only
    block_size long.
    """
    n_blocks = blocks.shape[0]
    s1 = np.zeros((n_blocks, len(coeffs)))
    s2 = np.zeros((n_blocks, len(coeffs)))
    for n in range(blocks.shape[1]):
        s1, s2 = blocks[:, n : n + 1] + coeffs * s1 - s2, s1
    return s1 * s1 + s2 * s2 - coeffs * s1 * s2


def _classify_powers(powers: np.ndarray, cfg: DetectorConfig) -> str | None:
    """Apply the validity checks to one block's eight band powers.

    Returns the key, or None for anything that fails dual-tone validity,
    the relative-energy threshold, the twist limit, the silence floor, or
    the row/column ambiguity margin.
    """
    rows = powers[:4]
    cols = powers[4:]
    row_i = int(np.argmax(rows))
    col_i = int(np.argmax(cols))
    p_row = float(rows[row_i])
    p_col = float(cols[col_i])
    if p_row <= 0.0 or p_col <= 0.0:
        return None

    pair = p_row + p_col
    floor = cfg.silence_floor * (cfg.block_size / 2.0) ** 2
    if pair < floor:
        return None
    if pair < cfg.rel_threshold * float(np.sum(powers)):
        return None

    twist_db = 10.0 * math.log10(p_col / p_row)
    if abs(twist_db) > cfg.twist_limit_db:
        return None

    # Prefer a miss over a guess: a near-tie within the band group means
    # the block does not name a single key.
    tie_ratio = 10.0 ** (cfg.tie_margin_db / 10.0)
    second_row = float(np.partition(rows, -2)[-2])
    second_col = float(np.partition(cols, -2)[-2])
    if second_row > 0 and p_row < second_row * tie_ratio:
        return None
    if second_col > 0 and p_col < second_col * tie_ratio:
        return None

    return KEYS[row_i * 4 + col_i]


def classify_block(block: SampleBuffer, cfg: DetectorConfig) -> str | None:
    """Classify one full analysis block as a key or no-tone (None)."""
    if len(block) != cfg.block_size:
        raise BlockSizeMismatch(f"expected {cfg.block_size} samples, got {len(block)}")
    coeffs = _band_coeffs(cfg.block_size, block.sample_rate)
    powers = _band_powers(block.samples.reshape(1, -1), coeffs)[0]
    return _classify_powers(powers, cfg)


class DtmfDetector:
    """Streaming receiver: push arbitrary chunks, collect key-press events.

    Blocks are cut at fixed absolute positions in the sample stream, so the
    emitted events do not depend on how the stream is chunked. The steering
    machine runs Armed -> Qualifying -> Latched -> Releasing: a candidate
    must win accept_blocks consecutive blocks before its single event is
    emitted, and the latch only clears after release_blocks consecutive
    blocks without that key. A block that interrupts a latched key is
    consumed by the release count; it never seeds the next candidate.
    """

    def __init__(self, sample_rate: int, config: DetectorConfig | None = None):
        self.sample_rate = sample_rate
        self.config = config or DetectorConfig.for_rate(sample_rate)
        self._coeffs = _band_coeffs(self.config.block_size, sample_rate)
        self._residual = np.zeros(0)
        self._blocks_seen = 0
        self._phase = "armed"  # armed | qualifying | latched | releasing
        self._candidate: str | None = None
        self._count = 0
        self._onset_block = 0
        self.events_emitted = 0

    def push(self, chunk: SampleBuffer) -> list[DecoderEvent]:
        """Consume a chunk of audio; return events completed within it."""
        if chunk.sample_rate != self.sample_rate:
            raise SampleRateMismatch(
                f"detector runs at {self.sample_rate} Hz, chunk is "
                f"{chunk.sample_rate} Hz"
            )
        data = np.concatenate([self._residual, chunk.samples])
        size = self.config.block_size
        n_blocks = len(data) // size
        self._residual = data[n_blocks * size :]
        if n_blocks == 0:
            return []

        blocks = data[: n_blocks * size].reshape(n_blocks, size)
        powers = _band_powers(blocks, self._coeffs)
        events: list[DecoderEvent] = []
        for i in range(n_blocks):
            key = _classify_powers(powers[i], self.config)
            event = self._step(key)
            if event is not None:
                events.append(event)
            self._blocks_seen += 1
        return events

    def _step(self, key: str | None) -> DecoderEvent | None:
        cfg = self.config
        if self._phase == "armed":
            if key is not None:
                self._candidate = key
                self._count = 1
                self._onset_block = self._blocks_seen
                self._phase = "qualifying"
                return self._try_latch()
        elif self._phase == "qualifying":
            if key == self._candidate:
                self._count += 1
                return self._try_latch()
            if key is None:
                self._phase = "armed"
                self._candidate = None
            else:
                self._candidate = key
                self._count = 1
                self._onset_block = self._blocks_seen
                return self._try_latch()
        elif self._phase == "latched":
            if key != self._candidate:
                self._count = 1
                self._phase = "releasing"
                self._finish_release_if_done()
        elif self._phase == "releasing":
            if key == self._candidate:
                self._phase = "latched"
            else:
                self._count += 1
                self._finish_release_if_done()
        return None

    def _try_latch(self) -> DecoderEvent | None:
        if self._count < self.config.accept_blocks:
            return None
        self._phase = "latched"
        size = self.config.block_size
        event = DecoderEvent(
            key=self._candidate,
            code=key_to_code(self._candidate),
            onset_sample=self._onset_block * size,
            duration_samples=self._count * size,
        )
        self.events_emitted += 1
        return event

    def _finish_release_if_done(self) -> None:
        if self._count >= self.config.release_blocks:
            self._phase = "armed"
            self._candidate = None
            self._count = 0


def decode_buffer(
    buffer: SampleBuffer, config: DetectorConfig | None = None
) -> list[DecoderEvent]:
    """One-shot decode of a whole buffer (drains a trailing partial block)."""
    det = DtmfDetector(buffer.sample_rate, config)
    events = det.push(buffer)
    # Zero-pad one block so a tone ending flush with the buffer still
    # finishes qualifying.
    tail = SampleBuffer(np.zeros(det.config.block_size), buffer.sample_rate)
    events.extend(det.push(tail))
    return events
