"""Command interpretation and the teleoperation session.

Decoded 4-bit codes become arm commands through a configurable key map
(default mirrors phone-keypad arrow conventions: 2/8 drive, 4/6 turn).
Motion commands latch: a press is an event, not a held signal, so the
base keeps moving until Stop or a contradicting command. EmergencyStop
zeroes every drive and latches the session; only Stop or Home recover it.

run_episode wires the whole pipeline end to end: a timed key script is
synthesized to audio, streamed through the receiver, interpreted here,
and integrated on the plant, producing a deterministic snapshot trace.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import actuation
from .actuation import (
    BRAKE_BRIDGE,
    FORWARD_BRIDGE,
    IDLE_BRIDGE,
    REVERSE_BRIDGE,
    ArmState,
    PlantCommands,
    step_plant,
)
from .config import DEFAULT_KEY_MAP, Config
from .detector import DecoderEvent, DtmfDetector, code_bits, code_to_key
from .kinematics import JointState, forward_kinematics
from .synth import SampleBuffer, mix_noise, synthesize_key, validate_key


class ArmCommand(enum.Enum):
    BASE_FORWARD = "base_forward"
    BASE_BACKWARD = "base_backward"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    ARM_UP = "arm_up"
    ARM_DOWN = "arm_down"
    GRIP_CLOSE = "grip_close"
    GRIP_OPEN = "grip_open"
    STOP = "stop"
    HOME = "home"
    EMERGENCY_STOP = "emergency_stop"
    SPEED_TOGGLE = "speed_toggle"
    RESERVED_A = "reserved_a"
    RESERVED_B = "reserved_b"
    RESERVED_C = "reserved_c"
    RESERVED_D = "reserved_d"


RECOVERY_COMMANDS = (ArmCommand.STOP, ArmCommand.HOME)

_BASE_MOTION_COMMANDS = {
    ArmCommand.BASE_FORWARD: (FORWARD_BRIDGE, FORWARD_BRIDGE),
    ArmCommand.BASE_BACKWARD: (REVERSE_BRIDGE, REVERSE_BRIDGE),
    ArmCommand.TURN_LEFT: (REVERSE_BRIDGE, FORWARD_BRIDGE),
    ArmCommand.TURN_RIGHT: (FORWARD_BRIDGE, REVERSE_BRIDGE),
}


class SessionMode(enum.Enum):
    IDLE = "idle"
    CONNECTED = "connected"
    ESTOPPED = "estopped"


class SpeedLevel(enum.Enum):
    LOW = "low"
    HIGH = "high"


class SessionNotConnected(RuntimeError):
    pass


def map_code_to_command(code: int, key_map: dict[str, str] | None = None) -> ArmCommand:
    """Map a 4-bit receiver code to an arm command, total over [0, 15]."""
    key = code_to_key(code)
    name = (key_map or DEFAULT_KEY_MAP)[key]
    return ArmCommand(name)

IGNORED_IN_ESTOP = "ignored_estop"
APPLIED = "applied"


@dataclass(frozen=True)
class LogEntry:
    """One decoded key press as the session saw it."""

    time_s: float
    key: str
    code: int
    command: ArmCommand
    status: str = APPLIED


@dataclass(frozen=True)
class ReleaseRecord:
    """Payload let go: when and where the gripper tip was."""

    time_s: float
    x: float
    y: float
    z: float


class Session:
    """One teleoperation session ("one call"): detector, plant, and the
    latched motion setpoints between them. Single-owner; step() is strictly
    sequential."""

    def __init__(self, config: Config | None = None, connected: bool = True):
        self.config = config or Config()
        cfg = self.config
        self.detector = DtmfDetector(cfg.sample_rate, cfg.detector_config())
        self.home_joints: JointState = cfg.home_joints()
        self.arm: ArmState = actuation.initial_state(
            joints=self.home_joints,
            wheel_rate=cfg.wheel_rate_m_s,
            shoulder_slew=math.radians(cfg.shoulder_slew_deg_s),
            gripper_slew=cfg.gripper_slew_per_s,
        )
        self.arm = replace(self.arm, track_width=cfg.track_width_m)
        self.mode = SessionMode.CONNECTED if connected else SessionMode.IDLE
        self.speed_level = SpeedLevel.HIGH
        self.clock = 0.0
        self.command_log: list[LogEntry] = []
        self.releases: list[ReleaseRecord] = []
        self.payload_held = False
        # Latched setpoints. None holds the servo where it is.
        self._base_bridges: tuple = (IDLE_BRIDGE, IDLE_BRIDGE)
        self._base_moving = False
        self._shoulder_target: float | None = None
        self._gripper_target: float | None = None

    # -- event handling ----------------------------------------------------

    def handle_event(self, event: DecoderEvent) -> LogEntry:
        """Interpret one decoded key press; returns the log entry."""
        if self.mode == SessionMode.IDLE:
            raise SessionNotConnected("no call in progress")
        command = map_code_to_command(event.code, self.config.key_map)
        event_time = (event.onset_sample + event.duration_samples) / self.config.sample_rate
        if self.mode == SessionMode.ESTOPPED and command not in RECOVERY_COMMANDS:
            entry = LogEntry(event_time, event.key, event.code, command, IGNORED_IN_ESTOP)
            self.command_log.append(entry)
            return entry
        self._apply(command)
        entry = LogEntry(event_time, event.key, event.code, command)
        self.command_log.append(entry)
        return entry

    def _apply(self, command: ArmCommand) -> None:
        if command in _BASE_MOTION_COMMANDS:
            self._base_bridges = _BASE_MOTION_COMMANDS[command]
            self._base_moving = True
        elif command == ArmCommand.ARM_UP:
            self._shoulder_target = actuation.SHOULDER_MAX_RAD
        elif command == ArmCommand.ARM_DOWN:
            self._shoulder_target = actuation.SHOULDER_MIN_RAD
        elif command == ArmCommand.GRIP_CLOSE:
            self._gripper_target = 0.0
        elif command == ArmCommand.GRIP_OPEN:
            self._gripper_target = 1.0
        elif command == ArmCommand.STOP:
            self._halt()
            self.mode = SessionMode.CONNECTED
        elif command == ArmCommand.HOME:
            self._halt()
            self._shoulder_target = self.home_joints.theta_shoulder
            self._gripper_target = self.home_joints.aperture
            self.mode = SessionMode.CONNECTED
        elif command == ArmCommand.EMERGENCY_STOP:
            self._halt()
            self.mode = SessionMode.ESTOPPED
        elif command == ArmCommand.SPEED_TOGGLE:
            self._toggle_speed()
        # Reserved A-D: logged, no actuation.

    def _halt(self) -> None:
        self._base_bridges = (BRAKE_BRIDGE, BRAKE_BRIDGE)
        self._base_moving = False
        self._shoulder_target = None
        self._gripper_target = None

    def _toggle_speed(self) -> None:
        if self.speed_level == SpeedLevel.HIGH:
            self.speed_level = SpeedLevel.LOW
            factor = self.config.speed_low_factor
        else:
            self.speed_level = SpeedLevel.HIGH
            factor = 1.0
        self.arm = replace(self.arm, wheel_rate=self.config.wheel_rate_m_s * factor)

    # -- audio + time ------------------------------------------------------

    def push_audio(self, chunk: SampleBuffer) -> list[DecoderEvent]:
        """Run a chunk through the receiver and interpret its events."""
        events = self.detector.push(chunk)
        for event in events:
            self.handle_event(event)
        return events

    def plant_commands(self) -> PlantCommands:
        if self.mode == SessionMode.ESTOPPED:
            return PlantCommands(left=BRAKE_BRIDGE, right=BRAKE_BRIDGE)
        demand = self.config.wheel_demand_ma if self._base_moving else 0.0
        return PlantCommands(
            left=self._base_bridges[0],
            right=self._base_bridges[1],
            left_demand_ma=demand,
            right_demand_ma=demand,
            shoulder_target=self._shoulder_target,
            gripper_target=self._gripper_target,
        )

    def step(self, dt: float) -> None:
        """Advance the plant by dt under the latched setpoints."""
        self.arm = step_plant(self.arm, self.plant_commands(), dt)
        self.clock += dt
        self._update_payload()

    def _update_payload(self) -> None:
        cfg = self.config
        aperture = self.arm.joints.aperture
        if not self.payload_held:
            if cfg.payload_staged_kg > 0 and aperture <= cfg.payload_grab_aperture:
                self.payload_held = True
        elif aperture >= cfg.payload_release_aperture:
            self.payload_held = False
            tip = self.tip_pose()
            self.releases.append(ReleaseRecord(self.clock, tip.x, tip.y, tip.z))

    def tip_pose(self):
        """World-frame gripper tip pose (base position plus chain FK)."""
        local = forward_kinematics(self.arm.joints, self.config.geometry)
        return replace(local, x=self.arm.base_x + local.x, y=self.arm.base_y + local.y)

    def snapshot(self, step_index: int) -> dict:
        """Immutable telemetry record of the current state."""
        arm = self.arm
        tip = self.tip_pose()
        last = self.command_log[-1] if self.command_log else None
        return {
            "step": step_index,
            "t": round(self.clock, 9),
            "mode": self.mode.value,
            "speed": self.speed_level.value,
            "base": {"x": arm.base_x, "y": arm.base_y, "heading": arm.heading},
            "joints": {
                "base": arm.joints.theta_base,
                "shoulder": arm.joints.theta_shoulder,
                "elbow": arm.joints.theta_elbow,
                "gripper_angle": arm.joints.g,
                "aperture": arm.joints.aperture,
            },
            "tip": {"x": tip.x, "y": tip.y, "z": tip.z},
            "drives": {
                "left": {"mode": arm.left_drive.mode.value, "ma": arm.left_drive.current_ma},
                "right": {"mode": arm.right_drive.mode.value, "ma": arm.right_drive.current_ma},
            },
            "payload_held": self.payload_held,
            "overcurrent_count": arm.overcurrent_count,
            "last_event": None
            if last is None
            else {"key": last.key, "code": code_bits(last.code), "command": last.command.value},
            "events_emitted": self.detector.events_emitted,
        }


# -- scripted episodes -----------------------------------------------------


class ScriptError(ValueError):
    """Malformed episode script; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def parse_script(text: str) -> list[tuple[float, str]]:
    """Parse '<time_s> <key>' lines into a press schedule."""
    presses: list[tuple[float, str]] = []
    last_time = -math.inf
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ScriptError(line_no, f"expected '<time_s> <key>', got {raw.strip()!r}")
        try:
            t = float(parts[0])
        except ValueError as exc:
            raise ScriptError(line_no, f"bad time {parts[0]!r}") from exc
        if t < 0:
            raise ScriptError(line_no, "time must be >= 0")
        if t < last_time:
            raise ScriptError(line_no, "times must be non-decreasing")
        try:
            key = validate_key(parts[1])
        except ValueError as exc:
            raise ScriptError(line_no, str(exc)) from exc
        presses.append((t, key))
        last_time = t
    return presses


def render_script_audio(
    presses: list[tuple[float, str]], config: Config, duration_s: float
) -> SampleBuffer:
    """Lay the scripted key tones onto a silent timeline."""
    rate = config.sample_rate
    timeline = np.zeros(int(round(duration_s * rate)))
    for t, key in presses:
        tone = synthesize_key(key, config.tone, rate).samples
        start = int(round(t * rate))
        end = min(start + len(tone), len(timeline))
        if start < len(timeline):
            timeline[start:end] += tone[: end - start]
    buffer = SampleBuffer(timeline, rate)
    if config.noise_snr_db is not None:
        buffer = mix_noise(buffer, config.noise_snr_db, config.noise_seed)
    return buffer


@dataclass
class EpisodeTrace:
    """Deterministic record of one scripted run."""

    snapshots: list[dict] = field(default_factory=list)
    command_log: list[LogEntry] = field(default_factory=list)
    releases: list[ReleaseRecord] = field(default_factory=list)

    def to_jsonl(self) -> str:
        return "\n".join(json.dumps(snap, sort_keys=True) for snap in self.snapshots) + "\n"


def run_episode(
    script: list[tuple[float, str]] | str,
    config: Config | None = None,
    duration_s: float | None = None,
    dt: float | None = None,
) -> tuple[EpisodeTrace, Session]:
    """Run a timed key script through the full audio-to-plant pipeline.

    The script is synthesized to one audio timeline, streamed into the
    receiver in dt-sized slices, and each step's decoded events are applied
    before the plant integrates. Identical inputs give identical traces.
    """
    config = config or Config()
    dt = dt or config.dt
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"dt must be in (0, 0.1] s, got {dt}")
    presses = parse_script(script) if isinstance(script, str) else list(script)
    if duration_s is None:
        last_press = presses[-1][0] if presses else 0.0
        tone_s = (config.tone.duration_ms + config.tone.pause_ms) / 1000.0
        duration_s = last_press + tone_s + 1.0

    audio = render_script_audio(presses, config, duration_s)
    session = Session(config)
    rate = config.sample_rate
    n_steps = int(round(duration_s / dt))
    trace = EpisodeTrace()
    for i in range(n_steps):
        start = int(round(i * dt * rate))
        end = int(round((i + 1) * dt * rate))
        session.push_audio(SampleBuffer(audio.samples[start:end], rate))
        session.step(dt)
        trace.snapshots.append(session.snapshot(i))
    trace.command_log = list(session.command_log)
    trace.releases = list(session.releases)
    return trace, session
