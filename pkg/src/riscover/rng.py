"""Counter-based random streams keyed by (seed, slot, link) with trial as counter.

Every link of every slot owns an independent Philox4x64 key. The trial index
is the counter: trial ``t`` consumes the two 64-bit words at positions
``2t, 2t+1`` of its link stream. Any block of trials can therefore be
regenerated in isolation, which keeps Monte Carlo results independent of
chunking, worker count and evaluation order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1

# link ids; element streams do not depend on N
DIRECT_LINK = 0


def bs_ris_link(n: int) -> int:
    return 2 * n + 1


def ris_mr_link(n: int) -> int:
    return 2 * n + 2


# reserved slot value for streams not tied to a time slot
AUX_SLOT = _MASK32


def stream_key(seed: int, slot: int, link: int) -> list[int]:
    if not 0 <= slot <= _MASK32 or not 0 <= link <= _MASK32:
        raise ValueError(f"slot/link out of 32-bit range: {slot}, {link}")
    return [int(seed) & _MASK64, (slot << 32) | link]


def uniforms(seed: int, slot: int, link: int, start: int, count: int) -> np.ndarray:
    """Uniforms on (0, 1] for trials ``start .. start+count-1``, shape (count, 2)."""
    bitgen = np.random.Philox(key=stream_key(seed, slot, link))
    # a Philox block is four words, i.e. two trials
    bitgen.advance(start // 2)
    skip = start % 2
    u = np.random.Generator(bitgen).random(2 * (count + skip))
    return (1.0 - u[2 * skip:]).reshape(count, 2)


def complex_normals(seed: int, slot: int, link: int, start: int, count: int) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussians, E|w|^2 = 1.

    Box-Muller in polar form: |w|^2 = -ln(u1) is Exp(1), arg(w) = 2*pi*u2.
    """
    u = uniforms(seed, slot, link, start, count)
    return np.sqrt(-np.log(u[:, 0])) * np.exp(2j * np.pi * u[:, 1])


def generator(seed: int, tag: int) -> np.random.Generator:
    """Plain generator for auxiliary draws (random baselines, instance sampling)."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, AUX_SLOT, tag)))
