"""Fixed-capacity ring buffer with a stride discard.

This is the storage primitive behind every streaming stage: a layer with
window size M keeps one buffer of capacity M per input channel, fills it one
sample at a time, evaluates when full, then discards the s oldest samples so
the window advances by the layer stride without copying anything.
"""

from __future__ import annotations

import numpy as np

from .errors import BufferOverflowError, BufferUnderflowError


class StridedRingBuffer:
    """Circular float32 store with explicit occupancy tracking.

    ``head`` is the next write slot, ``tail`` the oldest retained sample.
    ``count`` disambiguates the full and empty states in which head and tail
    coincide. Invariant: ``head == (tail + count) % capacity``.

    ``storage`` may be supplied by the owner (stages hand each buffer a row of
    a contiguous per-stage array so the compiled kernels see one 2-D block).
    """

    __slots__ = ("capacity", "storage", "head", "tail", "count")

    def __init__(self, capacity: int, storage: np.ndarray | None = None):
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        if storage is None:
            storage = np.zeros(capacity, dtype=np.float32)
        elif storage.shape != (capacity,) or storage.dtype != np.float32:
            raise ValueError("storage must be a float32 vector of length capacity")
        self.capacity = capacity
        self.storage = storage
        self.head = 0
        self.tail = 0
        self.count = 0

    def __len__(self) -> int:
        return self.count

    def __repr__(self):
        return (
            f"StridedRingBuffer(capacity={self.capacity}, count={self.count}, "
            f"head={self.head}, tail={self.tail})"
        )

    @property
    def is_full(self) -> bool:
        return self.count == self.capacity

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def write(self, value) -> None:
        """Store ``value`` at head and advance head by one slot."""
        if self.count == self.capacity:
            raise BufferOverflowError(
                f"write into full buffer (capacity {self.capacity}); "
                "a stage failed to consume before the next sample"
            )
        self.storage[self.head] = value
        self.head = (self.head + 1) % self.capacity
        self.count += 1

    def peek_window(self) -> np.ndarray:
        """Return the retained samples oldest-first without consuming them.

        Non-destructive on purpose: with overlapping windows (stride < M) the
        same sample participates in several evaluations.
        """
        end = self.tail + self.count
        if end <= self.capacity:
            return self.storage[self.tail:end].copy()
        return np.concatenate(
            (self.storage[self.tail:], self.storage[: end - self.capacity])
        )

    def stride(self, s: int) -> None:
        """Discard the ``s`` oldest samples by advancing tail."""
        if s < 1:
            raise ValueError(f"stride must be positive, got {s}")
        if s > self.count:
            raise BufferUnderflowError(
                f"stride {s} exceeds occupancy {self.count}"
            )
        self.tail = (self.tail + s) % self.capacity
        self.count -= s

    def clear(self) -> None:
        self.head = 0
        self.tail = 0
        self.count = 0
