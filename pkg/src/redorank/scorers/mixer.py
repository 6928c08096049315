from __future__ import annotations

import math

from ..errors import DomainError

READ_REFERENCE = 13.0
EDU_FLOOR = 0.001


def mixer(s_read: float, s_edu: float, eps: float = EDU_FLOOR) -> float:
    """Blend readability and educational alignment: ``s_read * log2(13 / s_edu)``.

    ``s_edu`` is floored at ``eps`` so a zero score stays finite.
    """
    if not (0.0 <= s_read <= READ_REFERENCE) or math.isnan(s_read):
        raise DomainError(f"s_read {s_read} outside [0, {READ_REFERENCE}]")
    if not (0.0 <= s_edu <= 1.0) or math.isnan(s_edu):
        raise DomainError(f"s_edu {s_edu} outside [0, 1]")
    return s_read * math.log2(READ_REFERENCE / max(s_edu, eps))
