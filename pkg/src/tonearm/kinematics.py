"""Forward and inverse kinematics for the base-shoulder-arm-gripper chain.

The 3-D problem splits into a base rotation about the vertical axis plus a
two-link problem in the vertical (r, z) plane, with the gripper treated as
a fixed-orientation offset: its angle against the horizontal is an input,
not a solved variable. All angles are radians; degrees belong at the CLI
and UI boundaries only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# |D| may exceed 1 by float noise for boundary poses; treat this much
# overshoot as exactly reachable.
_D_CLAMP_TOL = 1e-9


class Unreachable(ValueError):
    """Target outside the arm's workspace."""

    def __init__(self, reason: str, detail: str):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason


BEYOND_TOTAL_REACH = "beyond-total-reach"
OUTSIDE_ANNULUS = "outside-annulus"


@dataclass(frozen=True)
class ArmGeometry:
    """Link lengths in meters: base, shoulder, arm, gripper."""

    l1: float = 0.10
    l2: float = 0.20
    l3: float = 0.20
    l4: float = 0.10

    def __post_init__(self) -> None:
        for name in ("l1", "l2", "l3", "l4"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def max_radius(self) -> float:
        return self.l2 + self.l3 + self.l4


@dataclass(frozen=True)
class Pose:
    """End-effector target: position plus gripper angle from horizontal."""

    x: float
    y: float
    z: float
    g: float = 0.0

    def __post_init__(self) -> None:
        if not -math.pi / 2 <= self.g <= math.pi / 2:
            raise ValueError(f"gripper angle must be in [-pi/2, pi/2], got {self.g}")


@dataclass(frozen=True)
class JointState:
    """Joint-space state of the chain.

    theta_shoulder is measured from horizontal; theta_elbow is the elbow's
    contribution on top of it (elbow-up positive). aperture is the gripper
    opening fraction.
    """

    theta_base: float = 0.0
    theta_shoulder: float = 0.0
    theta_elbow: float = 0.0
    g: float = 0.0
    aperture: float = 1.0

    def __post_init__(self) -> None:
        if not -math.pi < self.theta_base <= math.pi:
            raise ValueError("theta_base must be in (-pi, pi]")
        if not 0.0 <= self.aperture <= 1.0:
            raise ValueError("aperture must be in [0, 1]")


@dataclass(frozen=True)
class PlanarTarget:
    """Target in the vertical working plane: radius and height above the
    shoulder pivot."""

    r: float
    z_rel: float

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("r must be >= 0")


def decompose_target(p: Pose, geo: ArmGeometry) -> tuple[float, PlanarTarget]:
    """Split a 3-D pose into base rotation plus a planar (r, z) target.

    The shoulder pivot sits at height l1, so z_rel = z - l1. On the axis
    (x = y = 0) the stateless convention is theta_base = 0.
    """
    if p.x == 0.0 and p.y == 0.0:
        theta_base = 0.0
    else:
        theta_base = math.atan2(p.y, p.x)
    return theta_base, PlanarTarget(math.hypot(p.x, p.y), p.z - geo.l1)


def _planar_ik(target: PlanarTarget, g: float, geo: ArmGeometry, elbow_up: bool):
    # Gripper offset first: the two-link problem ends at the wrist.
    w_r = target.r - geo.l4 * math.cos(g)
    w_z = target.z_rel - geo.l4 * math.sin(g)
    d = (w_r * w_r + w_z * w_z - geo.l2**2 - geo.l3**2) / (2.0 * geo.l2 * geo.l3)
    if abs(d) > 1.0:
        if abs(d) > 1.0 + _D_CLAMP_TOL:
            raise Unreachable(
                OUTSIDE_ANNULUS,
                f"wrist at ({w_r:.4f}, {w_z:.4f}) m outside annulus "
                f"[{abs(geo.l2 - geo.l3):.4f}, {geo.l2 + geo.l3:.4f}] m",
            )
        d = math.copysign(1.0, d)
    sin_e = math.sqrt(1.0 - d * d)
    theta_elbow = math.atan2(sin_e if elbow_up else -sin_e, d)
    theta_shoulder = math.atan2(w_z, w_r) - math.atan2(
        geo.l3 * math.sin(theta_elbow), geo.l2 + geo.l3 * math.cos(theta_elbow)
    )
    return theta_shoulder, theta_elbow


def inverse_kinematics(
    p: Pose, geo: ArmGeometry, elbow_up: bool = True, aperture: float = 1.0
) -> JointState:
    """Solve joint angles for a reachable pose.

    Raises Unreachable with reason beyond-total-reach when the radius
    exceeds l2+l3+l4, or outside-annulus when the wrist point cannot be
    bridged by the shoulder and arm links.
    """
    theta_base, planar = decompose_target(p, geo)
    if planar.r > geo.max_radius:
        raise Unreachable(
            BEYOND_TOTAL_REACH,
            f"radius {planar.r:.4f} m exceeds total reach {geo.max_radius:.4f} m",
        )
    theta_shoulder, theta_elbow = _planar_ik(planar, p.g, geo, elbow_up)
    return JointState(
        theta_base=theta_base,
        theta_shoulder=theta_shoulder,
        theta_elbow=theta_elbow,
        g=p.g,
        aperture=aperture,
    )


def planar_chain_points(
    j: JointState, geo: ArmGeometry
) -> list[tuple[float, float]]:
    """Joint positions in the (r, z_rel) plane: shoulder, elbow, wrist, tip."""
    shoulder = (0.0, 0.0)
    elbow = (
        geo.l2 * math.cos(j.theta_shoulder),
        geo.l2 * math.sin(j.theta_shoulder),
    )
    reach_angle = j.theta_shoulder + j.theta_elbow
    wrist = (
        elbow[0] + geo.l3 * math.cos(reach_angle),
        elbow[1] + geo.l3 * math.sin(reach_angle),
    )
    tip = (wrist[0] + geo.l4 * math.cos(j.g), wrist[1] + geo.l4 * math.sin(j.g))
    return [shoulder, elbow, wrist, tip]


def forward_kinematics(j: JointState, geo: ArmGeometry) -> Pose:
    """End-effector pose from joint angles."""
    tip_r, tip_z = planar_chain_points(j, geo)[-1]
    return Pose(
        x=tip_r * math.cos(j.theta_base),
        y=tip_r * math.sin(j.theta_base),
        z=tip_z + geo.l1,
        g=j.g,
    )


def reachable(p: Pose, geo: ArmGeometry) -> tuple[bool, str | None]:
    """Whether inverse_kinematics would succeed, and if not, why."""
    try:
        inverse_kinematics(p, geo)
    except Unreachable as exc:
        return False, exc.reason
    return True, None
