"""DTMF-steered pick-and-place arm simulator.

Audio carrying dual-tone key presses is decoded into 4-bit codes, the
codes are interpreted into arm commands, and the commands drive a
simulated differential base and servo arm with static torque checks. A
CLI (``tonearm``) and a WebSocket session service expose the pipeline for
live keypad teleoperation.
"""

from .actuation import (
    ArmState,
    DriveMode,
    DriveState,
    HBridgeInput,
    MotorKind,
    MotorModel,
    PlantCommands,
    hbridge_output,
    step_dc_motor,
    step_plant,
    step_servo,
)
from .config import Config, ConfigError, load_config, parse_config
from .controller import (
    ArmCommand,
    EpisodeTrace,
    LogEntry,
    ScriptError,
    Session,
    SessionMode,
    map_code_to_command,
    parse_script,
    run_episode,
)
from .detector import (
    DecoderEvent,
    DetectorConfig,
    DtmfDetector,
    classify_block,
    code_bits,
    code_to_key,
    decode_buffer,
    goertzel_power,
    key_to_code,
)
from .kinematics import (
    ArmGeometry,
    JointState,
    PlanarTarget,
    Pose,
    Unreachable,
    decompose_target,
    forward_kinematics,
    inverse_kinematics,
    reachable,
)
from .statics import (
    LinkMasses,
    PayloadReport,
    StaticsConstants,
    balance_solve,
    force_from_mass,
    holding_torque,
    joint_load_torques,
    payload_check,
)
from .synth import (
    KEYS,
    SampleBuffer,
    ToneParams,
    key_tone_pair,
    mix_noise,
    synthesize_key,
    synthesize_sequence,
)
from .wavpcm import UnsupportedFormat, read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "ArmCommand",
    "ArmGeometry",
    "ArmState",
    "Config",
    "ConfigError",
    "DecoderEvent",
    "DetectorConfig",
    "DriveMode",
    "DriveState",
    "DtmfDetector",
    "EpisodeTrace",
    "HBridgeInput",
    "JointState",
    "KEYS",
    "LinkMasses",
    "LogEntry",
    "MotorKind",
    "MotorModel",
    "PayloadReport",
    "PlanarTarget",
    "PlantCommands",
    "Pose",
    "SampleBuffer",
    "ScriptError",
    "Session",
    "SessionMode",
    "StaticsConstants",
    "ToneParams",
    "Unreachable",
    "UnsupportedFormat",
    "balance_solve",
    "classify_block",
    "code_bits",
    "code_to_key",
    "decode_buffer",
    "decompose_target",
    "force_from_mass",
    "forward_kinematics",
    "goertzel_power",
    "hbridge_output",
    "holding_torque",
    "inverse_kinematics",
    "joint_load_torques",
    "key_to_code",
    "key_tone_pair",
    "load_config",
    "map_code_to_command",
    "mix_noise",
    "parse_config",
    "parse_script",
    "payload_check",
    "reachable",
    "read_wav",
    "run_episode",
    "step_dc_motor",
    "step_plant",
    "step_servo",
    "synthesize_key",
    "synthesize_sequence",
    "write_wav",
]
