"""Run recursive tree walks on a thread with a large native stack.

Unary numerals make terms thousands of nodes deep, and substitution and
printing recurse on term depth.
"""

from __future__ import annotations

import sys
import threading

STACK_BYTES = 512 * 1024 * 1024
RECURSION_LIMIT = 200_000

_lock = threading.Lock()
_local = threading.local()


def run_deep(fn, *args, **kwargs):
    if getattr(_local, "deep", False):
        return fn(*args, **kwargs)
    box: dict = {}

    def target():
        _local.deep = True
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as exc:  # re-raised in the caller
            box["error"] = exc

    with _lock:
        if sys.getrecursionlimit() < RECURSION_LIMIT:
            sys.setrecursionlimit(RECURSION_LIMIT)
        old = threading.stack_size(STACK_BYTES)
        try:
            thread = threading.Thread(target=target, name="lnlfpc-deep")
            thread.start()
        finally:
            threading.stack_size(old)
    thread.join()
    if "error" in box:
        raise box["error"]
    return box["value"]
