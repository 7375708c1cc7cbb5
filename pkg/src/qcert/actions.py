"""Action alphabet for the certification protocol.

An action is either a two-outcome projective measurement along sigma_x or
sigma_y, or the identity: iterate the channel once more without measuring.
A batch is an ordered sequence of such actions; within a batch the quantum
state is not reset between actions.
"""

from __future__ import annotations

import enum

import numpy as np

from .qstate import PovmElement, projector_pair


class Action(enum.Enum):
    MEASURE_X = "x"
    MEASURE_Y = "y"
    IDENTITY = "i"

    @property
    def is_measurement(self) -> bool:
        return self is not Action.IDENTITY

    @property
    def povm(self) -> tuple[PovmElement, PovmElement]:
        return _POVMS[self]

    @property
    def collapse_coherence(self) -> complex:
        """Transverse Bloch component (rx + i ry) of the outcome-'+' projector state."""
        return 1.0 + 0.0j if self is Action.MEASURE_X else 1.0j


_POVMS = {
    Action.MEASURE_X: projector_pair(np.array([1.0, 0.0, 0.0]), ("x+", "x-")),
    Action.MEASURE_Y: projector_pair(np.array([0.0, 1.0, 0.0]), ("y+", "y-")),
}

# Canonical ordering of the action alphabet; fixes the lexicographic base used
# for sequence enumeration and hence for deterministic tie-breaking.
DEFAULT_ACTION_SET = (Action.MEASURE_X, Action.MEASURE_Y, Action.IDENTITY)

ActionSequence = tuple[Action, ...]


def n_measurements(seq: ActionSequence) -> int:
    return sum(1 for a in seq if a.is_measurement)


def sequence_label(seq: ActionSequence) -> str:
    return "".join(a.value for a in seq)


def sequence_from_label(label: str) -> ActionSequence:
    return tuple(Action(ch) for ch in label)
