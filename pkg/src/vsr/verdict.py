from __future__ import annotations

import enum


class Verdict(enum.Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    # The acknowledgement names a segment the sender never tagged.
    UNKNOWN_INDEX = "unknown-index"

    @property
    def accepted(self) -> bool:
        return self is Verdict.ACCEPT

    def __bool__(self) -> bool:
        return self.accepted

    @property
    def bit(self) -> int:
        return int(self.accepted)
