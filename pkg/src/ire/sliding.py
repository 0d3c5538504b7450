"""Sliding-window permutation kernels.

One fixed permutation of a W-wide window is applied at every window
position of a buffer, left to right, with the window sliding a single
position between applications: a buffer of N values sees N-W+1 window
applications and N-W one-position shifts. Each application rewrites the
current window in place as window[i] <- window[map[i]].

naive_sliding_permute and naive_sliding_unpermute implement that
description literally, one window at a time. They are the reference
for everything else and the only code here that needs to be read to
know what the operation means.

apply_forward and apply_backward produce identical results in O(N).
The whole pass is one fixed permutation of buffer indices, and that
permutation can be built without stepping every window. Track a single
value through the pass: just before an application it sits at some
in-window offset r, the application moves it to offset g[r] (g is the
inverted window map), and the subsequent one-position slide drops that
to g[r]-1, or retires the value at the current window start when
g[r] == 0. The offset sequence is therefore a walk on the fixed map
r -> g[r]-1, independent of where the window happens to be. Values
inside the first window start the walk at their own offset; every value
entering later starts it at offset W-1, so all interior values retire
after the same number of applications and land at their origin plus a
constant displacement. Only the first window's values (whose walks may
cycle forever and ride along to the end) and the values whose walks are
cut short by the final window need individual treatment. The full index
map follows from O(W^2) walk analysis plus one vectorized range fill.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "invert_map",
    "naive_sliding_permute",
    "naive_sliding_unpermute",
    "global_index_map",
    "apply_forward",
    "apply_backward",
]

WindowHook = Callable[[int, list], None]


def invert_map(pmap: Sequence[int]) -> tuple[int, ...]:
    """Inverse permutation: invert_map(p)[p[i]] == i."""
    inv = [0] * len(pmap)
    for i, p in enumerate(pmap):
        inv[p] = i
    return tuple(inv)


def naive_sliding_permute(
    values: Iterable[int],
    pmap: Sequence[int],
    on_window: WindowHook | None = None,
) -> list:
    """Reference implementation: literally permute every window.

    on_window, when given, is called after each application with the
    window start and the whole working buffer, so callers can count
    applications or capture intermediate states.
    """
    width = len(pmap)
    buf = list(values)
    if len(buf) < width:
        raise ValueError(f"buffer holds {len(buf)} values, need at least {width}")
    for k in range(len(buf) - width + 1):
        window = buf[k:k + width]
        for i, j in enumerate(pmap):
            buf[k + i] = window[j]
        if on_window is not None:
            on_window(k, buf)
    return buf


def naive_sliding_unpermute(
    values: Iterable[int],
    pmap: Sequence[int],
    on_window: WindowHook | None = None,
) -> list:
    """Reference inverse: the inverted map over windows in reverse order."""
    width = len(pmap)
    inv = invert_map(pmap)
    buf = list(values)
    if len(buf) < width:
        raise ValueError(f"buffer holds {len(buf)} values, need at least {width}")
    for k in range(len(buf) - width, -1, -1):
        window = buf[k:k + width]
        for i, j in enumerate(inv):
            buf[k + i] = window[j]
        if on_window is not None:
            on_window(k, buf)
    return buf


def _offset_walks(g: Sequence[int]) -> list[tuple[list[int], int | None, int | None]]:
    """Walk r -> g[r]-1 from every start offset.

    Returns, per start: the offsets visited, the step at which the value
    retires (None if it never does), and the visit index where the walk
    starts repeating (None if it retires).
    """
    walks: list[tuple[list[int], int | None, int | None]] = []
    for start in range(len(g)):
        seq = [start]
        first_seen = {start: 0}
        retire = None
        loop = None
        while True:
            nxt = g[seq[-1]]
            if nxt == 0:
                retire = len(seq) - 1
                break
            nxt -= 1
            if nxt in first_seen:
                loop = first_seen[nxt]
                break
            first_seen[nxt] = len(seq)
            seq.append(nxt)
        walks.append((seq, retire, loop))
    return walks


def _offset_after(walk: tuple[list[int], int | None, int | None], steps: int) -> int:
    seq, _retire, loop = walk
    if steps < len(seq):
        return seq[steps]
    period = len(seq) - loop
    return seq[loop + (steps - loop) % period]


def _final_index(
    g: Sequence[int],
    walks: list[tuple[list[int], int | None, int | None]],
    last_start: int,
    entry_window: int,
    entry_offset: int,
) -> int:
    walk = walks[entry_offset]
    _seq, retire, _loop = walk
    budget = last_start - entry_window
    if retire is not None and retire <= budget:
        return entry_window + retire
    # Still in flight when the final window is applied; no slide follows,
    # so the post-application offset is absolute.
    return last_start + g[_offset_after(walk, budget)]


@lru_cache(maxsize=16)
def global_index_map(pmap: tuple[int, ...], n: int) -> np.ndarray:
    """Final buffer index of every starting index after one forward pass."""
    width = len(pmap)
    if n < width:
        raise ValueError(f"buffer holds {n} values, need at least {width}")
    g = invert_map(pmap)
    last_start = n - width
    walks = _offset_walks(g)
    dtype = np.int32 if n <= np.iinfo(np.int32).max else np.int64
    sigma = np.empty(n, dtype=dtype)
    for a in range(width):
        sigma[a] = _final_index(g, walks, last_start, 0, a)
    _seq, retire, _loop = walks[width - 1]
    if retire is None:
        # Entering values that never retire would starve the one-per-window
        # retirement slot, so this cannot happen for n much larger than
        # width; handled anyway for completeness.
        for a in range(width, n):
            sigma[a] = _final_index(g, walks, last_start, a - width + 1, width - 1)
    else:
        # Entering values all follow the same walk: a constant shift for
        # every origin whose walk completes before the final window.
        full = n - 1 - retire
        if full >= width:
            sigma[width:full + 1] = np.arange(width, full + 1, dtype=dtype) + (retire - width + 1)
        for a in range(max(width, full + 1), n):
            sigma[a] = _final_index(g, walks, last_start, a - width + 1, width - 1)
    sigma.setflags(write=False)
    return sigma


def apply_forward(values: np.ndarray, pmap: tuple[int, ...]) -> np.ndarray:
    """Same result as naive_sliding_permute, in O(len(values))."""
    sigma = global_index_map(pmap, values.size)
    out = np.empty_like(values)
    out[sigma] = values
    return out


def apply_backward(values: np.ndarray, pmap: tuple[int, ...]) -> np.ndarray:
    """Same result as naive_sliding_unpermute: the exact inverse pass."""
    sigma = global_index_map(pmap, values.size)
    return values[sigma]
