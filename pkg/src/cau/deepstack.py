"""Run deeply recursive work on a thread with a large C stack.

Trails and terms nest deeply and every traversal is recursive. Raising the
interpreter's recursion limit alone is unsafe on the main thread, whose C
stack is fixed by the OS; a worker thread gets a stack sized to match.
"""

from __future__ import annotations

import sys
import threading
from typing import Any, Callable

__all__ = ["call_deep", "DEEP_RECURSION_LIMIT", "DEEP_STACK_BYTES"]

DEEP_STACK_BYTES = 512 * 1024 * 1024
DEEP_RECURSION_LIMIT = 200_000


def call_deep(fn: Callable[..., Any], *args, **kwargs) -> Any:
    """Call ``fn(*args, **kwargs)`` on a big-stack thread; re-raise its exception."""
    box: dict = {}

    def target():
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # propagated to the caller below
            box["error"] = exc

    old_limit, old_size = sys.getrecursionlimit(), threading.stack_size()
    sys.setrecursionlimit(max(old_limit, DEEP_RECURSION_LIMIT))
    try:
        threading.stack_size(DEEP_STACK_BYTES)
        worker = threading.Thread(target=target, name="cau-deep")
        worker.start()
    finally:
        threading.stack_size(old_size)
    worker.join()
    sys.setrecursionlimit(old_limit)
    if "error" in box:
        raise box["error"]
    return box.get("value")
