"""
Counter-based random streams.

Rows of an ensemble are generated in fixed-size blocks. Block ``b`` of a
stream with purpose ``tag`` always draws from
``Philox(SeedSequence(seed, spawn_key=(tag, b)))``, and the block size is a
function of the grid size only, so the output does not depend on how many
workers run the blocks or in which order.
"""

from concurrent.futures import ThreadPoolExecutor
from enum import IntEnum
from typing import Callable, Iterator, List, Tuple, TypeVar

import numpy as np

T = TypeVar("T")

_MASK64 = (1 << 64) - 1


class StreamTag(IntEnum):
    PATHS = 0
    SMOOTHING = 1
    PRODUCT = 2
    BRIDGE = 3
    REPLICATION = 4


def block_generator(seed: int, tag: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed & _MASK64, spawn_key=(int(tag), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit child seed for (seed, keys); used to give each replication its own master seed."""
    ss = np.random.SeedSequence(seed & _MASK64, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def rows_per_block(points: int) -> int:
    return max(64, min(8192, (1 << 22) // max(points, 1)))


def block_bounds(n: int, points: int) -> List[Tuple[int, int]]:
    """(start, stop) row ranges covering n rows."""
    size = rows_per_block(points)
    return [(start, min(start + size, n)) for start in range(0, n, size)]


def run_blocks(fn: Callable[[int, int, int], T], n: int, points: int, jobs: int) -> List[T]:
    """
    Apply ``fn(block_index, start, stop)`` to every block.

    Args:
        fn: Block worker; must draw only from the block's own generator.
        n: Number of rows.
        points: Grid size, which fixes the block size.
        jobs: Worker threads; 1 runs inline.

    Returns:
        Results in block order.
    """
    bounds = block_bounds(n, points)

    def work(item: Tuple[int, Tuple[int, int]]) -> T:
        b, (start, stop) = item
        return fn(b, start, stop)

    if jobs <= 1 or len(bounds) == 1:
        return [work(item) for item in enumerate(bounds)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(work, enumerate(bounds)))


def iter_block_bounds(n: int, points: int) -> Iterator[Tuple[int, int, int]]:
    for b, (start, stop) in enumerate(block_bounds(n, points)):
        yield b, start, stop
