"""Receiver tests.

The Goertzel implementation is checked against a direct DFT at the same
bin (numpy's FFT, an independent path). Streaming behavior is checked by
re-chunking one buffer many ways and by loopback through the synthesizer.
"""

import json
import math

import numpy as np
import pytest

from tonearm.detector import (
    BAND_FREQS_HZ,
    BlockSizeMismatch,
    DecoderEvent,
    DetectorConfig,
    DtmfDetector,
    FrequencyAboveNyquist,
    SampleRateMismatch,
    classify_block,
    code_bits,
    code_to_key,
    decode_buffer,
    default_block_size,
    event_from_json,
    event_to_json,
    goertzel_power,
    key_to_code,
)
from tonearm.synth import (
    KEYS,
    SUPPORTED_RATES,
    SampleBuffer,
    ToneParams,
    key_tone_pair,
    mix_noise,
    synthesize_key,
    synthesize_sequence,
)

RATE = 8000
N = 205


def dft_bin_power(x: np.ndarray, rate: int, target: float) -> float:
    """|X[k]|^2 at the bin nearest target, via full DFT (the oracle)."""
    k = round(len(x) * target / rate)
    return abs(np.fft.rfft(x)[k]) ** 2


def sine_block(freq: float, amplitude: float = 0.5, n: int = N, rate: int = RATE):
    t = np.arange(n) / rate
    return SampleBuffer(amplitude * np.sin(2 * np.pi * freq * t), rate)


class TestOutputMap:
    # The full receiver output table; 0 maps to 1010, not 0000.
    TABLE = {
        "1": "0001", "2": "0010", "3": "0011", "4": "0100",
        "5": "0101", "6": "0110", "7": "0111", "8": "1000",
        "9": "1001", "0": "1010", "*": "1011", "#": "1100",
        "A": "1101", "B": "1110", "C": "1111", "D": "0000",
    }

    def test_full_table(self):
        for key, bits in self.TABLE.items():
            assert code_bits(key_to_code(key)) == bits, key

    def test_zero_is_not_0000(self):
        assert key_to_code("0") == 0b1010
        assert key_to_code("D") == 0b0000

    def test_round_trip_bijection(self):
        assert sorted(key_to_code(k) for k in KEYS) == list(range(16))
        for k in KEYS:
            assert code_to_key(key_to_code(k)) == k

    def test_code_range(self):
        with pytest.raises(ValueError):
            code_to_key(16)
        with pytest.raises(ValueError):
            code_bits(-1)


class TestGoertzel:
    def test_matches_dft_on_pure_tone(self):
        block = sine_block(697)
        power = goertzel_power(block, 697)
        oracle = dft_bin_power(block.samples, RATE, 697)
        assert abs(power - oracle) / oracle < 1e-9

    def test_zero_block_zero_power(self):
        block = SampleBuffer(np.zeros(N), RATE)
        for freq in BAND_FREQS_HZ:
            assert goertzel_power(block, freq) == 0.0

    def test_off_bin_leakage_bound(self):
        # Frozen regression: a 697 Hz probe leaks only ~4.7e-5 of its
        # on-bin power into the 1633 Hz bin at N=205.
        block = sine_block(697)
        on = goertzel_power(block, 697)
        off = goertzel_power(block, 1633)
        assert off < 1e-4 * on

    def test_matches_dft_on_random_tone_blocks(self):
        rng = np.random.default_rng(42)
        t = np.arange(N) / RATE
        worst = 0.0
        for _ in range(1000):
            amp = rng.uniform(0.05, 0.45)
            x = amp * np.sin(2 * np.pi * rng.uniform(600, 1700) * t + rng.uniform(0, 2 * np.pi))
            if rng.random() < 0.5:
                x = x + amp * np.sin(
                    2 * np.pi * rng.uniform(600, 1700) * t + rng.uniform(0, 2 * np.pi)
                )
            target = rng.choice(BAND_FREQS_HZ)
            power = goertzel_power(SampleBuffer(x, RATE), target)
            oracle = dft_bin_power(x, RATE, target)
            if oracle > 1e-12:
                worst = max(worst, abs(power - oracle) / oracle)
        assert worst < 1e-6

    def test_nyquist_guard(self):
        with pytest.raises(FrequencyAboveNyquist):
            goertzel_power(sine_block(697), 4000)

    def test_tiny_block_rejected(self):
        with pytest.raises(ValueError):
            goertzel_power(SampleBuffer(np.zeros(1), RATE), 697)


class TestClassifyBlock:
    CFG = DetectorConfig(block_size=N)

    def tone_block(self, key: str, **params) -> SampleBuffer:
        buf = synthesize_key(key, ToneParams(duration_ms=30, **params), RATE)
        return SampleBuffer(buf.samples[:N], RATE)

    def test_clean_key(self):
        assert classify_block(self.tone_block("7"), self.CFG) == "7"

    def test_every_key(self):
        for key in KEYS:
            assert classify_block(self.tone_block(key), self.CFG) == key

    def test_silence_is_no_tone(self):
        assert classify_block(SampleBuffer(np.zeros(N), RATE), self.CFG) is None

    @pytest.mark.parametrize("freq", BAND_FREQS_HZ)
    def test_single_tone_is_no_tone(self, freq):
        # Dual-tone validity: one band group alone never names a key.
        assert classify_block(sine_block(freq, 0.4), self.CFG) is None

    def test_excess_twist_rejected(self):
        block = self.tone_block("5", amplitude=0.1, twist_db=12.0)
        assert classify_block(block, self.CFG) is None

    def test_below_silence_floor_rejected(self):
        block = self.tone_block("5")
        quiet = SampleBuffer(block.samples * 1e-5, RATE)
        assert classify_block(quiet, self.CFG) is None

    def test_block_size_mismatch(self):
        with pytest.raises(BlockSizeMismatch):
            classify_block(SampleBuffer(np.zeros(N + 1), RATE), self.CFG)


class TestStreaming:
    def test_loopback_every_key_every_rate(self):
        for rate in SUPPORTED_RATES:
            for key in KEYS:
                buf = synthesize_sequence([key], ToneParams(), rate)
                events = decode_buffer(buf)
                assert [e.key for e in events] == [key], (key, rate)
                assert events[0].code == key_to_code(key)

    def test_sequence_order(self):
        buf = synthesize_sequence(["1", "2", "3"], ToneParams(), RATE)
        det = DtmfDetector(RATE)
        events = []
        for start in range(0, len(buf), 64):
            chunk = SampleBuffer(buf.samples[start : start + 64], RATE)
            events.extend(det.push(chunk))
        assert [e.key for e in events] == ["1", "2", "3"]

    @pytest.mark.parametrize("chunk_size", [1, 7, 64, 1024, None])
    def test_chunk_size_invariance(self, chunk_size):
        buf = synthesize_sequence(["4", "0", "#", "D"], ToneParams(), RATE)
        whole = decode_buffer(buf)
        if chunk_size is None:
            events = whole
        else:
            det = DtmfDetector(RATE)
            events = []
            for start in range(0, len(buf), chunk_size):
                chunk = SampleBuffer(buf.samples[start : start + chunk_size], RATE)
                events.extend(det.push(chunk))
        assert events == whole

    def test_onsets_non_decreasing(self):
        buf = synthesize_sequence(list("159D"), ToneParams(), RATE)
        events = decode_buffer(buf)
        onsets = [e.onset_sample for e in events]
        assert onsets == sorted(onsets)

    def test_short_tone_rejected(self):
        # One block worth of tone cannot survive accept_blocks=2.
        buf = synthesize_sequence(["5"], ToneParams(duration_ms=25), RATE)
        assert decode_buffer(buf) == []

    def test_long_hold_single_event(self):
        buf = synthesize_sequence(["5"], ToneParams(duration_ms=800), RATE)
        events = decode_buffer(buf)
        assert [e.key for e in events] == ["5"]

    def test_repeated_key_re_arms(self):
        buf = synthesize_sequence(["5", "5", "5"], ToneParams(), RATE)
        assert [e.key for e in decode_buffer(buf)] == ["5", "5", "5"]

    def test_sample_rate_mismatch(self):
        det = DtmfDetector(RATE)
        with pytest.raises(SampleRateMismatch):
            det.push(SampleBuffer(np.zeros(100), 16000))

    def test_default_block_size_scaling(self):
        assert default_block_size(8000) == 205
        assert default_block_size(16000) == 410
        assert default_block_size(44100) == 1130


class TestRobustness:
    def test_all_keys_at_20_db_snr(self):
        for key in KEYS:
            buf = synthesize_sequence([key], ToneParams(), RATE)
            noisy = mix_noise(buf, 20.0, seed=7)
            assert [e.key for e in decode_buffer(noisy)] == [key], key

    @pytest.mark.parametrize("twist_db", [-6.0, 6.0])
    def test_all_keys_at_six_db_twist(self, twist_db):
        params = ToneParams(amplitude=0.3, twist_db=twist_db)
        for key in KEYS:
            buf = synthesize_sequence([key], params, RATE)
            assert [e.key for e in decode_buffer(buf)] == [key], key

    def test_no_events_on_noise_only(self):
        # 5 s of white noise at -20 dBFS must not produce a single digit.
        rng = np.random.default_rng(123)
        noise = SampleBuffer(0.1 * rng.standard_normal(5 * RATE), RATE)
        assert decode_buffer(noise) == []

    def test_no_events_on_speechy_sweep(self):
        t = np.arange(3 * RATE) / RATE
        sweep = 0.3 * np.sin(2 * np.pi * (300 + 400 * t) * t)
        assert decode_buffer(SampleBuffer(sweep, RATE)) == []


class TestEventLog:
    def test_json_line_round_trip(self):
        event = DecoderEvent(key="*", code=key_to_code("*"), onset_sample=820, duration_samples=410)
        line = event_to_json(event)
        rec = json.loads(line)
        assert rec == {
            "onset_sample": 820,
            "key": "*",
            "code_binary": "1011",
            "duration_samples": 410,
        }
        assert event_from_json(line) == event

    def test_stream_log_fields(self):
        buf = synthesize_sequence(["9"], ToneParams(), RATE)
        (event,) = decode_buffer(buf)
        assert event.code == key_to_code("9")
        assert event.duration_samples == 2 * N
        # Tone starts after the leading pause (80 ms = 640 samples), so the
        # first fully-toned block is the fourth (sample 615).
        assert 410 <= event.onset_sample <= 820
