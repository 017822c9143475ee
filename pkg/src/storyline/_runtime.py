from __future__ import annotations

import gc
from contextlib import contextmanager


@contextmanager
def gc_paused():
    """Suspend the cyclic garbage collector; the stages allocate many short-lived
    containers and never build reference cycles worth collecting mid-run."""
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()
