"""Drive electronics and plant integration.

The H-bridge truth table turns enable/input bits into forward, reverse,
brake, or coast, with the driver's 600 mA per-channel ceiling enforced as
a hard clamp. Motors are kinematic: DC motors integrate displacement at a
constant rate, servos slew toward a target; no inertia or back-EMF is
modeled, so integration is exact and a step splits cleanly into substeps.

The plant is a differential-drive base (two DC wheel motors) carrying the
arm, whose shoulder and gripper are the two servos.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from .kinematics import JointState

CURRENT_LIMIT_MA = 600.0

SUPPLY_VOLTS = 36.0
SUPPLY_AMPS = 12.0

WHEEL_RATE_M_S = 0.2
TRACK_WIDTH_M = 0.2
SHOULDER_SLEW_RAD_S = math.radians(90.0)
GRIPPER_SLEW_PER_S = 2.0  # aperture fraction per second (90 deg throw at 180 deg/s)

SHOULDER_MIN_RAD = -math.pi / 2
SHOULDER_MAX_RAD = math.pi / 2


class KindMismatch(TypeError):
    pass


class DriveMode(enum.Enum):
    FORWARD = "forward"
    REVERSE = "reverse"
    BRAKE = "brake"
    COAST = "coast"


@dataclass(frozen=True)
class HBridgeInput:
    """Enable plus the two direction inputs of one half of the driver."""

    enable: int = 0
    in1: int = 0
    in2: int = 0

    def __post_init__(self) -> None:
        for name in ("enable", "in1", "in2"):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"{name} must be 0 or 1")


IDLE_BRIDGE = HBridgeInput(0, 0, 0)
FORWARD_BRIDGE = HBridgeInput(1, 1, 0)
REVERSE_BRIDGE = HBridgeInput(1, 0, 1)
BRAKE_BRIDGE = HBridgeInput(1, 0, 0)


@dataclass(frozen=True)
class DriveState:
    mode: DriveMode
    current_ma: float = 0.0
    over_current: bool = False


def hbridge_output(inp: HBridgeInput, demand_ma: float = 0.0) -> DriveState:
    """Resolve the bridge truth table and clamp channel current.

    Disabled is coast regardless of the inputs; equal inputs while enabled
    brake. Only the driven modes draw current, clamped at 600 mA with the
    over-current flag raised when the clamp engages.
    """
    if demand_ma < 0:
        raise ValueError(f"demand_ma must be >= 0, got {demand_ma}")
    if not inp.enable:
        return DriveState(DriveMode.COAST)
    if inp.in1 == inp.in2:
        return DriveState(DriveMode.BRAKE)
    mode = DriveMode.FORWARD if inp.in1 else DriveMode.REVERSE
    clamped = demand_ma > CURRENT_LIMIT_MA
    return DriveState(mode, min(demand_ma, CURRENT_LIMIT_MA), clamped)


class MotorKind(enum.Enum):
    DC = "dc"
    SERVO = "servo"


@dataclass(frozen=True)
class MotorModel:
    """A constant-rate motor: rate is rad/s (or m/s) at full drive for DC,
    slew limit for servos; position accumulates displacement or holds the
    servo angle."""

    kind: MotorKind
    rate: float
    position: float = 0.0

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ValueError("rate must be positive")


def drive_sign(mode: DriveMode) -> int:
    if mode == DriveMode.FORWARD:
        return 1
    if mode == DriveMode.REVERSE:
        return -1
    return 0


def step_dc_motor(m: MotorModel, d: DriveState, dt: float) -> MotorModel:
    """Integrate a DC motor for dt seconds under the given drive."""
    if m.kind != MotorKind.DC:
        raise KindMismatch("step_dc_motor needs a DC motor")
    if dt <= 0:
        raise ValueError("dt must be positive")
    return replace(m, position=m.position + drive_sign(d.mode) * m.rate * dt)


def step_servo(m: MotorModel, target: float, dt: float) -> MotorModel:
    """Slew a servo toward target, landing exactly once within reach."""
    if m.kind != MotorKind.SERVO:
        raise KindMismatch("step_servo needs a servo")
    if dt <= 0:
        raise ValueError("dt must be positive")
    delta = target - m.position
    step = m.rate * dt
    if abs(delta) <= step:
        return replace(m, position=target)
    return replace(m, position=m.position + math.copysign(step, delta))


@dataclass(frozen=True)
class SupplyLimits:
    """Power-rail ratings, recorded for telemetry; the only behavioral
    electrical limit is the per-channel current clamp."""

    volts: float = SUPPLY_VOLTS
    amps: float = SUPPLY_AMPS


@dataclass(frozen=True)
class PlantCommands:
    """One step's worth of drive inputs: bridge bits per wheel motor plus
    servo targets."""

    left: HBridgeInput = IDLE_BRIDGE
    right: HBridgeInput = IDLE_BRIDGE
    left_demand_ma: float = 0.0
    right_demand_ma: float = 0.0
    shoulder_target: float | None = None  # None holds position
    gripper_target: float | None = None


IDLE_COMMANDS = PlantCommands()


def _wrap_angle(theta: float) -> float:
    wrapped = math.remainder(theta, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


@dataclass(frozen=True)
class ArmState:
    """Full plant state.

    heading is the unwrapped base yaw used for integration; joints mirrors
    it wrapped to (-pi, pi]. Over-current clamps accumulate as a count.
    """

    joints: JointState = JointState()
    base_x: float = 0.0
    base_y: float = 0.0
    heading: float = 0.0
    left_drive: DriveState = DriveState(DriveMode.COAST)
    right_drive: DriveState = DriveState(DriveMode.COAST)
    shoulder_motor: MotorModel = MotorModel(MotorKind.SERVO, SHOULDER_SLEW_RAD_S)
    gripper_motor: MotorModel = MotorModel(
        MotorKind.SERVO, GRIPPER_SLEW_PER_S, position=1.0
    )
    wheel_rate: float = WHEEL_RATE_M_S
    track_width: float = TRACK_WIDTH_M
    supply: SupplyLimits = field(default=SupplyLimits())
    overcurrent_count: int = 0


def initial_state(
    joints: JointState | None = None,
    wheel_rate: float = WHEEL_RATE_M_S,
    shoulder_slew: float = SHOULDER_SLEW_RAD_S,
    gripper_slew: float = GRIPPER_SLEW_PER_S,
) -> ArmState:
    j = joints or JointState()
    return ArmState(
        joints=j,
        heading=j.theta_base,
        shoulder_motor=MotorModel(MotorKind.SERVO, shoulder_slew, j.theta_shoulder),
        gripper_motor=MotorModel(MotorKind.SERVO, gripper_slew, j.aperture),
        wheel_rate=wheel_rate,
    )


def step_plant(s: ArmState, commands: PlantCommands, dt: float) -> ArmState:
    """Advance the plant by dt seconds under the given commands.

    Equal wheel drives translate along the heading; opposite drives rotate
    in place; a mixed pair follows the exact circular arc, so splitting dt
    into substeps reproduces the full step.
    """
    if not 0.0 < dt <= 0.1:
        raise ValueError(f"dt must be in (0, 0.1] s, got {dt}")

    left = hbridge_output(commands.left, commands.left_demand_ma)
    right = hbridge_output(commands.right, commands.right_demand_ma)
    overcurrent = s.overcurrent_count + left.over_current + right.over_current

    v_left = drive_sign(left.mode) * s.wheel_rate
    v_right = drive_sign(right.mode) * s.wheel_rate
    v = (v_left + v_right) / 2.0
    omega = (v_right - v_left) / s.track_width

    heading = s.heading + omega * dt
    if omega == 0.0:
        base_x = s.base_x + v * math.cos(s.heading) * dt
        base_y = s.base_y + v * math.sin(s.heading) * dt
    else:
        # Exact arc integration keeps dt-splitting exact for mixed drives.
        base_x = s.base_x + (v / omega) * (math.sin(heading) - math.sin(s.heading))
        base_y = s.base_y - (v / omega) * (math.cos(heading) - math.cos(s.heading))

    shoulder = s.shoulder_motor
    if commands.shoulder_target is not None:
        target = min(max(commands.shoulder_target, SHOULDER_MIN_RAD), SHOULDER_MAX_RAD)
        shoulder = step_servo(shoulder, target, dt)
    gripper = s.gripper_motor
    if commands.gripper_target is not None:
        target = min(max(commands.gripper_target, 0.0), 1.0)
        gripper = step_servo(gripper, target, dt)

    joints = replace(
        s.joints,
        theta_base=_wrap_angle(heading),
        theta_shoulder=shoulder.position,
        aperture=gripper.position,
    )
    return replace(
        s,
        joints=joints,
        base_x=base_x,
        base_y=base_y,
        heading=heading,
        left_drive=left,
        right_drive=right,
        shoulder_motor=shoulder,
        gripper_motor=gripper,
        overcurrent_count=overcurrent,
    )
