"""Tone synthesis tests. Spectral claims are checked against a
full-resolution DFT of the whole buffer, independent of the detector."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tonearm.synth import (
    COL_FREQS_HZ,
    KEYS,
    NO_NOISE_DB,
    ROW_FREQS_HZ,
    SUPPORTED_RATES,
    AmplitudeOverflow,
    InvalidKey,
    SampleRateTooLow,
    ToneParams,
    UnsupportedSampleRate,
    key_tone_pair,
    mix_noise,
    synthesize_key,
    synthesize_sequence,
)


def dft_top_two_freqs(samples: np.ndarray, rate: int) -> tuple[float, float]:
    """Frequencies of the two largest DFT magnitude peaks (the oracle)."""
    spectrum = np.abs(np.fft.rfft(samples))
    freqs = np.fft.rfftfreq(len(samples), d=1.0 / rate)
    top = np.argsort(spectrum)[-2:]
    return tuple(sorted(freqs[top]))


class TestKeyToneMap:
    def test_examples(self):
        assert key_tone_pair("1") == (697, 1209)
        assert key_tone_pair("5") == (770, 1336)
        assert key_tone_pair("D") == (941, 1633)

    def test_bijection_over_16_keys(self):
        pairs = {key_tone_pair(k) for k in KEYS}
        assert len(KEYS) == 16
        assert len(pairs) == 16
        for low, high in pairs:
            assert low in ROW_FREQS_HZ
            assert high in COL_FREQS_HZ

    def test_invalid_key(self):
        for bad in ("E", "10", "", "d", "%"):
            with pytest.raises(InvalidKey):
                key_tone_pair(bad)


class TestSynthesizeKey:
    def test_buffer_length(self):
        assert len(synthesize_key("5", ToneParams(duration_ms=100), 8000)) == 800
        assert len(synthesize_key("1", ToneParams(duration_ms=40), 8000)) == 320

    def test_two_dominant_bins_match_key_pair(self):
        buf = synthesize_key("5", ToneParams(amplitude=0.4, duration_ms=100), 8000)
        low, high = dft_top_two_freqs(buf.samples, 8000)
        bin_width = 8000 / len(buf)
        assert abs(low - 770) <= bin_width
        assert abs(high - 1336) <= bin_width

    @pytest.mark.parametrize("rate", SUPPORTED_RATES)
    @pytest.mark.parametrize("key", list(KEYS))
    def test_spectrum_every_key_every_rate(self, key, rate):
        buf = synthesize_key(key, ToneParams(), rate)
        f_low, f_high = key_tone_pair(key)
        low, high = dft_top_two_freqs(buf.samples, rate)
        bin_width = rate / len(buf)
        assert abs(low - f_low) <= bin_width
        assert abs(high - f_high) <= bin_width

    def test_zero_amplitude_gives_silence(self):
        buf = synthesize_key("7", ToneParams(amplitude=0.0, duration_ms=50), 8000)
        assert len(buf) == 400
        assert not np.any(buf.samples)

    def test_amplitude_overflow(self):
        with pytest.raises(AmplitudeOverflow):
            synthesize_key("1", ToneParams(amplitude=0.8), 8000)
        with pytest.raises(AmplitudeOverflow):
            # 0.4 + 0.4 * 10^(6/20) ~ 1.2
            synthesize_key("1", ToneParams(amplitude=0.4, twist_db=6.0), 8000)

    def test_sample_rate_rejection(self):
        with pytest.raises(SampleRateTooLow):
            synthesize_key("1", ToneParams(), 3000)
        with pytest.raises(UnsupportedSampleRate):
            synthesize_key("1", ToneParams(), 12000)

    @given(
        amplitude=st.floats(0.01, 1.0),
        twist_db=st.floats(-12.0, 12.0),
        key=st.sampled_from(KEYS),
    )
    def test_peak_never_exceeds_one(self, amplitude, twist_db, key):
        params = ToneParams(amplitude=amplitude, twist_db=twist_db, duration_ms=30)
        try:
            buf = synthesize_key(key, params, 8000)
        except AmplitudeOverflow:
            return
        assert np.max(np.abs(buf.samples)) <= 1.0


class TestSynthesizeSequence:
    def test_layout_length(self):
        params = ToneParams(duration_ms=60, pause_ms=60)
        buf = synthesize_sequence(["1", "2"], params, 8000)
        # pause + tone + pause + tone + pause
        assert len(buf) == 2400

    def test_single_key_is_padded_tone(self):
        params = ToneParams()
        seq = synthesize_sequence(["5"], params, 8000)
        key = synthesize_key("5", params, 8000)
        pad = int(round(params.pause_ms * 8000 / 1000))
        assert len(seq) == len(key) + 2 * pad
        assert not np.any(seq.samples[:pad])
        assert not np.any(seq.samples[-pad:])
        np.testing.assert_array_equal(seq.samples[pad : pad + len(key)], key.samples)

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValueError):
            synthesize_sequence([], ToneParams(), 8000)


class TestMixNoise:
    def test_no_noise_sentinel_is_identity(self):
        buf = synthesize_key("3", ToneParams(), 8000)
        out = mix_noise(buf, NO_NOISE_DB, seed=1)
        np.testing.assert_array_equal(out.samples, buf.samples)
        assert out.samples is not buf.samples

    def test_measured_snr_within_half_db(self):
        buf = synthesize_key("8", ToneParams(duration_ms=1000), 8000)
        for requested in (0.0, 10.0, 20.0, 30.0):
            mixed = mix_noise(buf, requested, seed=99)
            noise = mixed.samples - buf.samples
            measured = 10.0 * math.log10(
                np.mean(buf.samples**2) / np.mean(noise**2)
            )
            assert abs(measured - requested) <= 0.5

    def test_same_seed_bit_identical(self):
        buf = synthesize_key("8", ToneParams(), 8000)
        a = mix_noise(buf, 15.0, seed=7)
        b = mix_noise(buf, 15.0, seed=7)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_different_seed_differs(self):
        buf = synthesize_key("8", ToneParams(), 8000)
        a = mix_noise(buf, 15.0, seed=7)
        b = mix_noise(buf, 15.0, seed=8)
        assert np.any(a.samples != b.samples)


class TestToneParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            ToneParams(amplitude=1.5)
        with pytest.raises(ValueError):
            ToneParams(amplitude=-0.1)
        with pytest.raises(ValueError):
            ToneParams(duration_ms=0)
        with pytest.raises(ValueError):
            ToneParams(pause_ms=-1)
