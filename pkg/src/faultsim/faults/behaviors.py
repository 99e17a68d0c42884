"""The fifteen fault behaviors and their fixed priority levels.

Level 1 behaviors are triggered by the clock, level 2 modify or remove a
message, level 3 act on a message whose content is final. Lower levels are
always resolved first.
"""

from enum import Enum


class Behavior(str, Enum):
    MSG_LOSS = "msg-loss"
    TAMPERING = "tampering"
    EQUIVOCATION = "equivocation"
    PART_TIME = "part-time"
    PART_MSG = "part-msg"
    PART_DROP = "part-drop"
    RECOVER_TIME = "recover-time"
    RECOVER_MSG = "recover-msg"
    CRASH_TIME = "crash-time"
    CRASH_MSG = "crash-msg"
    CRASH_DROP = "crash-drop"
    REBOOT_TIME = "reboot-time"
    REBOOT_MSG = "reboot-msg"
    DUPLICATION = "duplication"
    ABNORMAL_DELAY = "abnormal-delay"

    def __str__(self):
        return self.value

    @property
    def level(self):
        return LEVELS[self]

    @property
    def description(self):
        return DESCRIPTIONS[self]

    @property
    def section(self):
        """Name of the handler config section this behavior reads."""
        return SECTIONS[self]


B = Behavior

LEVELS = {
    B.MSG_LOSS: 2,
    B.TAMPERING: 2,
    B.EQUIVOCATION: 2,
    B.PART_TIME: 1,
    B.PART_MSG: 3,
    B.PART_DROP: 2,
    B.RECOVER_TIME: 1,
    B.RECOVER_MSG: 3,
    B.CRASH_TIME: 1,
    B.CRASH_MSG: 3,
    B.CRASH_DROP: 2,
    B.REBOOT_TIME: 1,
    B.REBOOT_MSG: 3,
    B.DUPLICATION: 3,
    B.ABNORMAL_DELAY: 3,
}

DESCRIPTIONS = {
    B.MSG_LOSS: "drop an in-transit message",
    B.TAMPERING: "modify the message content",
    B.EQUIVOCATION: "send different message copies to different receivers",
    B.PART_TIME: "partition the network once the global time reaches a set point",
    B.PART_MSG: "partition the network right before a specific message is delivered",
    B.PART_DROP: "drop a message that crosses the partition",
    B.RECOVER_TIME: "heal the partition once the global time reaches a set point",
    B.RECOVER_MSG: "heal the partition right before a specific message is delivered",
    B.CRASH_TIME: "crash a node once the global time reaches a set point",
    B.CRASH_MSG: "crash a node right before a specific message is delivered",
    B.CRASH_DROP: "drop a message destined for a crashed node",
    B.REBOOT_TIME: "reboot a crashed node once the global time reaches a set point",
    B.REBOOT_MSG: "reboot a crashed node right before a specific message is delivered",
    B.DUPLICATION: "create extra copies of the message",
    B.ABNORMAL_DELAY: "add an extra delay to the message",
}

SECTIONS = {
    B.MSG_LOSS: "msg-loss",
    B.TAMPERING: "tampering",
    B.EQUIVOCATION: "equivocation",
    B.PART_TIME: "partition",
    B.PART_MSG: "partition",
    B.PART_DROP: "partition",
    B.RECOVER_TIME: "partition",
    B.RECOVER_MSG: "partition",
    B.CRASH_TIME: "crash",
    B.CRASH_MSG: "crash",
    B.CRASH_DROP: "crash",
    B.REBOOT_TIME: "crash",
    B.REBOOT_MSG: "crash",
    B.DUPLICATION: "duplication",
    B.ABNORMAL_DELAY: "abnormal-delay",
}

# behaviors that rewrite or re-route the envelope and then send it back for
# another control pass; each may act on a given envelope at most once
GUARDED = frozenset(
    {
        B.TAMPERING,
        B.EQUIVOCATION,
        B.PART_MSG,
        B.RECOVER_MSG,
        B.CRASH_MSG,
        B.REBOOT_MSG,
        B.DUPLICATION,
        B.ABNORMAL_DELAY,
    }
)


def parse_behavior(name):
    try:
        return Behavior(name)
    except ValueError:
        raise ValueError(f"unknown fault behavior {name!r}") from None


def priority_map(behaviors):
    return {b: LEVELS[b] for b in behaviors}
