"""Plain-text key-value configuration.

One ``dotted.key = value`` pair per line, ``#`` comments. Every tunable
ships with a default, so an empty config is the stock rig: desk-scale
geometry, telephony tone timing, and the phone-keypad command map.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .detector import DetectorConfig, default_block_size
from .kinematics import ArmGeometry, JointState
from .statics import LinkMasses, StaticsConstants, default_motor_limits
from .synth import ToneParams


class ConfigError(ValueError):
    """Malformed config text; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


DEFAULT_KEY_MAP = {
    "2": "base_forward",
    "8": "base_backward",
    "4": "turn_left",
    "6": "turn_right",
    "1": "arm_up",
    "7": "arm_down",
    "3": "grip_close",
    "9": "grip_open",
    "5": "stop",
    "0": "home",
    "*": "emergency_stop",
    "#": "speed_toggle",
    "A": "reserved_a",
    "B": "reserved_b",
    "C": "reserved_c",
    "D": "reserved_d",
}


@dataclass(frozen=True)
class Config:
    """Resolved configuration for one simulation session."""

    sample_rate: int = 8000
    dt: float = 0.02
    snapshot_hz: float = 20.0

    geometry: ArmGeometry = field(default_factory=ArmGeometry)
    tone: ToneParams = field(default_factory=ToneParams)

    rel_threshold: float = 0.8
    twist_limit_db: float = 8.0
    accept_blocks: int = 2
    release_blocks: int = 2
    silence_floor: float = 1e-6
    tie_margin_db: float = 1.0
    block_size: int | None = None  # None derives from sample_rate

    wheel_rate_m_s: float = 0.2
    track_width_m: float = 0.2
    shoulder_slew_deg_s: float = 90.0
    gripper_slew_per_s: float = 2.0
    wheel_demand_ma: float = 200.0
    speed_low_factor: float = 0.5

    link_mass_shoulder_kg: float = 0.0
    link_mass_arm_kg: float = 0.0
    link_mass_gripper_kg: float = 0.0
    motor_limit_shoulder: float | None = None  # None sizes for the 10 kg gate
    motor_limit_elbow: float | None = None
    motor_limit_wrist: float | None = None

    payload_staged_kg: float = 1.0
    payload_grab_aperture: float = 0.2
    payload_release_aperture: float = 0.5

    noise_snr_db: float | None = None  # None means clean audio
    noise_seed: int = 0

    key_map: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_KEY_MAP))

    def detector_config(self) -> DetectorConfig:
        return DetectorConfig(
            block_size=self.block_size or default_block_size(self.sample_rate),
            accept_blocks=self.accept_blocks,
            release_blocks=self.release_blocks,
            rel_threshold=self.rel_threshold,
            twist_limit_db=self.twist_limit_db,
            silence_floor=self.silence_floor,
            tie_margin_db=self.tie_margin_db,
        )

    def link_masses(self) -> LinkMasses:
        return LinkMasses(
            shoulder=self.link_mass_shoulder_kg,
            arm=self.link_mass_arm_kg,
            gripper=self.link_mass_gripper_kg,
        )

    def motor_limits(self) -> dict[str, float]:
        limits = default_motor_limits(self.geometry, StaticsConstants())
        if self.motor_limit_shoulder is not None:
            limits["shoulder"] = self.motor_limit_shoulder
        if self.motor_limit_elbow is not None:
            limits["elbow"] = self.motor_limit_elbow
        if self.motor_limit_wrist is not None:
            limits["wrist"] = self.motor_limit_wrist
        return limits

    def home_joints(self) -> JointState:
        return JointState()


# (config key, Config field or handler, type)
_SCALAR_KEYS = {
    "audio.sample_rate": ("sample_rate", int),
    "sim.dt": ("dt", float),
    "service.snapshot_hz": ("snapshot_hz", float),
    "detector.rel_threshold": ("rel_threshold", float),
    "detector.twist_limit_db": ("twist_limit_db", float),
    "detector.accept_blocks": ("accept_blocks", int),
    "detector.release_blocks": ("release_blocks", int),
    "detector.silence_floor": ("silence_floor", float),
    "detector.tie_margin_db": ("tie_margin_db", float),
    "detector.block_size": ("block_size", int),
    "motor.wheel_rate_m_s": ("wheel_rate_m_s", float),
    "motor.track_width_m": ("track_width_m", float),
    "motor.shoulder_slew_deg_s": ("shoulder_slew_deg_s", float),
    "motor.gripper_slew_per_s": ("gripper_slew_per_s", float),
    "motor.wheel_demand_ma": ("wheel_demand_ma", float),
    "session.speed_low_factor": ("speed_low_factor", float),
    "statics.link_mass_shoulder_kg": ("link_mass_shoulder_kg", float),
    "statics.link_mass_arm_kg": ("link_mass_arm_kg", float),
    "statics.link_mass_gripper_kg": ("link_mass_gripper_kg", float),
    "statics.motor_limit_shoulder": ("motor_limit_shoulder", float),
    "statics.motor_limit_elbow": ("motor_limit_elbow", float),
    "statics.motor_limit_wrist": ("motor_limit_wrist", float),
    "payload.staged_kg": ("payload_staged_kg", float),
    "payload.grab_aperture": ("payload_grab_aperture", float),
    "payload.release_aperture": ("payload_release_aperture", float),
    "noise.snr_db": ("noise_snr_db", float),
    "noise.seed": ("noise_seed", int),
}

_GEOMETRY_KEYS = {f"geometry.{n}": n for n in ("l1", "l2", "l3", "l4")}
_TONE_KEYS = {
    "tone.amplitude": "amplitude",
    "tone.twist_db": "twist_db",
    "tone.duration_ms": "duration_ms",
    "tone.pause_ms": "pause_ms",
}

VALID_COMMAND_NAMES = set(DEFAULT_KEY_MAP.values())


def parse_config(text: str) -> Config:
    """Parse config text into a Config, reporting errors by line number."""
    cfg = Config()
    geometry = dict(l1=cfg.geometry.l1, l2=cfg.geometry.l2, l3=cfg.geometry.l3, l4=cfg.geometry.l4)
    tone = dict(
        amplitude=cfg.tone.amplitude,
        twist_db=cfg.tone.twist_db,
        duration_ms=cfg.tone.duration_ms,
        pause_ms=cfg.tone.pause_ms,
    )
    scalars: dict[str, object] = {}
    key_map = dict(DEFAULT_KEY_MAP)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line_no, f"expected 'key = value', got {raw.strip()!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if not key or not value:
            raise ConfigError(line_no, f"expected 'key = value', got {raw.strip()!r}")

        try:
            if key in _SCALAR_KEYS:
                attr, cast = _SCALAR_KEYS[key]
                scalars[attr] = cast(value)
            elif key in _GEOMETRY_KEYS:
                geometry[_GEOMETRY_KEYS[key]] = float(value)
            elif key in _TONE_KEYS:
                tone[_TONE_KEYS[key]] = float(value)
            elif key.startswith("key."):
                symbol = key[4:]
                if symbol not in DEFAULT_KEY_MAP:
                    raise ConfigError(line_no, f"unknown keypad symbol {symbol!r}")
                if value not in VALID_COMMAND_NAMES:
                    raise ConfigError(line_no, f"unknown command {value!r}")
                key_map[symbol] = value
            else:
                raise ConfigError(line_no, f"unknown config key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(line_no, f"bad value for {key}: {exc}") from exc

    try:
        return replace(
            cfg,
            geometry=ArmGeometry(**geometry),
            tone=ToneParams(**tone),
            key_map=key_map,
            **scalars,
        )
    except ValueError as exc:
        raise ConfigError(0, str(exc)) from exc


def load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
