"""Static torque analysis for the arm.

Torque about a pivot is force times perpendicular arm length, force is
mass times gravity, and an object's weight is the same quantity; the
balance condition sum(T) = 0 makes any one of torque, force, and length
recoverable from the other two. Gravity is 9.81 m/s^2 by default.

For the whole chain, each in-plane joint must hold the gravity moments of
everything distal to it: link masses lumped at link midpoints, plus the
payload at the gripper tip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .kinematics import ArmGeometry, JointState, planar_chain_points

GRAVITY_M_S2 = 9.81

PLANAR_JOINTS = ("shoulder", "elbow", "wrist")


class NegativeMass(ValueError):
    pass


class NegativeInput(ValueError):
    pass


class DivisionByZeroMomentArm(ZeroDivisionError):
    pass


class DivisionByZeroForce(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class StaticsConstants:
    gravity: float = GRAVITY_M_S2

    def __post_init__(self) -> None:
        if self.gravity <= 0:
            raise ValueError("gravity must be positive")


@dataclass(frozen=True)
class LinkMasses:
    """Masses of the moving links (kg): shoulder link, arm link, gripper link.

    The base link never loads an in-plane joint, so it has no entry here.
    """

    shoulder: float = 0.0
    arm: float = 0.0
    gripper: float = 0.0

    def __post_init__(self) -> None:
        for name in ("shoulder", "arm", "gripper"):
            if getattr(self, name) < 0:
                raise NegativeMass(f"{name} link mass must be >= 0")


def force_from_mass(mass_kg: float, c: StaticsConstants = StaticsConstants()) -> float:
    """Weight of a mass in newtons: F = M*g."""
    if mass_kg < 0:
        raise NegativeMass(f"mass must be >= 0, got {mass_kg}")
    return mass_kg * c.gravity


def torque_from_force(force_n: float, arm_m: float) -> float:
    """T = F*L."""
    if force_n < 0 or arm_m < 0:
        raise NegativeInput("force and arm length must be >= 0")
    return force_n * arm_m


def holding_torque(
    mass_kg: float, arm_m: float, c: StaticsConstants = StaticsConstants()
) -> float:
    """Torque needed to hold a mass at a perpendicular distance: T = M*g*L."""
    if arm_m < 0:
        raise NegativeInput(f"arm length must be >= 0, got {arm_m}")
    return torque_from_force(force_from_mass(mass_kg, c), arm_m)


def balance_solve(
    torque: float | None = None,
    force: float | None = None,
    arm: float | None = None,
) -> float:
    """Solve F*L - T = 0 for whichever of the three is omitted."""
    known = [v is not None for v in (torque, force, arm)]
    if sum(known) != 2:
        raise ValueError("provide exactly two of torque, force, arm")
    for name, value in (("torque", torque), ("force", force), ("arm", arm)):
        if value is not None and value < 0:
            raise NegativeInput(f"{name} must be >= 0, got {value}")
    if torque is None:
        return force * arm
    if arm is None:
        if force == 0:
            raise DivisionByZeroForce("cannot solve arm length with zero force")
        return torque / force
    if arm == 0:
        raise DivisionByZeroMomentArm("cannot solve force with zero moment arm")
    return torque / arm


def joint_load_torques(
    j: JointState,
    geo: ArmGeometry,
    link_masses: LinkMasses,
    payload_kg: float,
    c: StaticsConstants = StaticsConstants(),
) -> dict[str, float]:
    """Gravity torque each in-plane joint must hold, in N*m.

    Signed: positive means the load pulls the distal chain downward on the
    +r side of the joint. Each joint carries every mass distal to it, with
    link masses at link midpoints and the payload at the tip; the moment
    arm is the horizontal (radial) offset from joint to mass.
    """
    if payload_kg < 0:
        raise NegativeMass(f"payload must be >= 0, got {payload_kg}")
    shoulder, elbow, wrist, tip = planar_chain_points(j, geo)
    mass_points = [
        (link_masses.shoulder, (shoulder[0] + elbow[0]) / 2.0),
        (link_masses.arm, (elbow[0] + wrist[0]) / 2.0),
        (link_masses.gripper, (wrist[0] + tip[0]) / 2.0),
        (payload_kg, tip[0]),
    ]
    joint_r = {"shoulder": shoulder[0], "elbow": elbow[0], "wrist": wrist[0]}
    # Distal sets: the shoulder sees everything, the elbow loses the
    # shoulder link, the wrist holds only the gripper link and payload.
    distal = {"shoulder": mass_points, "elbow": mass_points[1:], "wrist": mass_points[2:]}
    return {
        joint: sum(m * c.gravity * (r_mass - joint_r[joint]) for m, r_mass in masses)
        for joint, masses in distal.items()
    }


@dataclass(frozen=True)
class JointMargin:
    joint: str
    required: float
    limit: float

    @property
    def margin(self) -> float:
        return self.limit - self.required


@dataclass(frozen=True)
class PayloadReport:
    """Verdict of the payload gate at one specific joint configuration.

    The check is orientation dependent: a vertical arm has zero moment
    arms and passes for any finite payload, which says nothing about
    other poses. ``joints`` records the configuration that was checked.
    """

    passed: bool
    margins: list[JointMargin] = field(default_factory=list)
    joints: JointState = field(default=JointState())

    def worst(self) -> JointMargin:
        return min(self.margins, key=lambda m: m.margin)


def payload_check(
    j: JointState,
    geo: ArmGeometry,
    link_masses: LinkMasses,
    payload_kg: float,
    motor_limits: dict[str, float],
    c: StaticsConstants = StaticsConstants(),
) -> PayloadReport:
    """Can the motors hold this payload in this configuration?

    Passes when every in-plane joint's required torque magnitude is within
    its motor limit. ``motor_limits`` maps joint name to N*m and must be
    positive for each of shoulder, elbow, wrist.
    """
    for joint in PLANAR_JOINTS:
        if motor_limits.get(joint, 0.0) <= 0:
            raise ValueError(f"motor limit for {joint} must be positive")
    required = joint_load_torques(j, geo, link_masses, payload_kg, c)
    margins = [
        JointMargin(joint, abs(required[joint]), motor_limits[joint])
        for joint in PLANAR_JOINTS
    ]
    return PayloadReport(
        passed=all(m.margin >= 0 for m in margins), margins=margins, joints=j
    )


def default_motor_limits(geo: ArmGeometry, c: StaticsConstants = StaticsConstants()) -> dict[str, float]:
    """Limits sized so the stock arm holds 10 kg at full horizontal reach."""
    gate_kg = 10.0
    return {
        "shoulder": gate_kg * c.gravity * geo.max_radius,
        "elbow": gate_kg * c.gravity * (geo.l3 + geo.l4),
        "wrist": gate_kg * c.gravity * geo.l4,
    }


def format_payload_report(report: PayloadReport, payload_kg: float) -> str:
    """Per-joint required/limit/margin as structured text."""
    lines = [
        f"payload check: {'PASS' if report.passed else 'FAIL'} "
        f"(payload {payload_kg:g} kg, orientation dependent)",
        f"  configuration: shoulder={math.degrees(report.joints.theta_shoulder):.1f} deg, "
        f"elbow={math.degrees(report.joints.theta_elbow):.1f} deg",
    ]
    for m in report.margins:
        lines.append(
            f"  {m.joint:<8} required={m.required:9.4f} N*m  "
            f"limit={m.limit:9.4f} N*m  margin={m.margin:9.4f} N*m"
        )
    return "\n".join(lines)
