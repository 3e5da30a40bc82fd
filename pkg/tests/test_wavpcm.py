"""WAV round-trip and format rejection tests."""

import struct
import wave

import numpy as np
import pytest

from tonearm.synth import SampleBuffer, ToneParams, synthesize_key
from tonearm.wavpcm import (
    UnsupportedFormat,
    float_to_pcm16,
    pcm16_to_float,
    read_wav,
    write_wav,
)


def test_round_trip_within_quantization(tmp_path):
    buf = synthesize_key("6", ToneParams(), 8000)
    path = str(tmp_path / "tone.wav")
    write_wav(path, buf)
    back = read_wav(path)
    assert back.sample_rate == 8000
    assert len(back) == len(buf)
    assert np.max(np.abs(back.samples - buf.samples)) <= 1.0 / 32768


def test_round_trip_exact_for_pcm_grid(tmp_path):
    pcm = np.array([-32767, -1, 0, 1, 12345, 32767], dtype=np.int16)
    buf = SampleBuffer(pcm16_to_float(pcm), 16000)
    path = str(tmp_path / "grid.wav")
    write_wav(path, buf)
    np.testing.assert_array_equal(read_wav(path).samples, buf.samples)


def test_symmetric_clamp():
    out = float_to_pcm16(np.array([1.0, -1.0, 2.0, -2.0, 0.0]))
    np.testing.assert_array_equal(out, [32767, -32767, 32767, -32767, 0])


def test_canonical_44_byte_header(tmp_path):
    path = str(tmp_path / "hdr.wav")
    write_wav(path, SampleBuffer(np.zeros(100), 8000))
    raw = open(path, "rb").read()
    assert len(raw) == 44 + 200
    assert raw[:4] == b"RIFF"
    assert raw[8:12] == b"WAVE"
    assert raw[12:16] == b"fmt "
    fmt_size, audio_fmt, channels, rate = struct.unpack("<IHHI", raw[16:28])
    assert (fmt_size, audio_fmt, channels, rate) == (16, 1, 1, 8000)
    bits = struct.unpack("<H", raw[34:36])[0]
    assert bits == 16
    assert raw[36:40] == b"data"


def test_rejects_stereo(tmp_path):
    path = str(tmp_path / "stereo.wav")
    with wave.open(path, "wb") as wf:
        wf.setnchannels(2)
        wf.setsampwidth(2)
        wf.setframerate(8000)
        wf.writeframes(b"\x00" * 400)
    with pytest.raises(UnsupportedFormat, match="mono"):
        read_wav(path)


def test_rejects_8_bit(tmp_path):
    path = str(tmp_path / "8bit.wav")
    with wave.open(path, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(1)
        wf.setframerate(8000)
        wf.writeframes(b"\x80" * 100)
    with pytest.raises(UnsupportedFormat, match="16-bit"):
        read_wav(path)


def test_rejects_non_wav(tmp_path):
    path = str(tmp_path / "junk.wav")
    with open(path, "wb") as fh:
        fh.write(b"not a wav file at all")
    with pytest.raises(UnsupportedFormat):
        read_wav(path)
