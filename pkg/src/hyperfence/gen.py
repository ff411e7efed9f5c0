"""Seeded random trace-stream generation.

Streams are produced by a small, fully documented 64-bit PRNG so a given
configuration yields byte-identical files on every platform and Python
version.  The first step of every trace is all-false; afterwards each
bit independently flips from its previous value with the configured
probability, so divergences between copies are rare and drifting rather
than uniform noise.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import streams

MASK64 = (1 << 64) - 1

# SplitMix64: Steele, Lea & Flood's split-and-mix generator, fixed here by
# its three standard constants.
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB

RANDOM = "random"
SYMMETRIC = "symmetric"


class SplitMix64:
    """Portable 64-bit PRNG with a single word of state."""

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX_1) & MASK64
        z = ((z ^ (z >> 27)) * MIX_2) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * 2.0**-53

    def chance(self, p: float) -> bool:
        return self.next_float() < p


@dataclass(frozen=True)
class GenConfig:
    """One generation request: alphabet sizes, copy count, length, per-bit
    flip probability, seed, and mode (independent copies or role-swapped
    mirrors of one walk)."""

    inputs: int
    outputs: int
    n: int
    length: int
    flip: float
    seed: int
    mode: str = RANDOM

    def __post_init__(self) -> None:
        if self.inputs < 0 or self.outputs < 0:
            raise ValueError("proposition counts cannot be negative")
        if self.n < 1:
            raise ValueError("need at least one trace copy")
        if self.length < 1:
            raise ValueError("length must be at least 1")
        if not 0.0 <= self.flip <= 1.0:
            raise ValueError("flip probability must lie in [0, 1]")
        if self.mode not in (RANDOM, SYMMETRIC):
            raise ValueError(f"unknown mode {self.mode!r}")


def prop_names(prefix: str, count: int) -> list[str]:
    """Proposition names for one role: a single bit keeps the bare prefix
    ("i", "o"); wider alphabets are numbered ("i1", "i2", ...)."""
    if count == 1:
        return [prefix]
    return [f"{prefix}{j}" for j in range(1, count + 1)]


def _swapped(bits: list[bool]) -> list[bool]:
    """Role swap: reverse the bit order within the role."""
    return bits[::-1]


def gen_lines(cfg: GenConfig) -> list[str]:
    """Produce the protocol lines ("O: ..." / "I: ...") for one stream.

    Bits advance in the order the stream prints them: every copy's output
    bits first, then every copy's input bits.  Symmetric mode walks a
    single base trace; odd-numbered copies see it as-is and even-numbered
    copies see it with each role's bits reversed.
    """
    rng = SplitMix64(cfg.seed)
    out_names = prop_names("o", cfg.outputs)
    in_names = prop_names("i", cfg.inputs)
    walks = cfg.n if cfg.mode == RANDOM else 1
    out_bits = [[False] * cfg.outputs for _ in range(walks)]
    in_bits = [[False] * cfg.inputs for _ in range(walks)]

    def views(bits: list[list[bool]]) -> list[list[bool]]:
        if cfg.mode == RANDOM:
            return bits
        base = bits[0]
        return [base if k % 2 == 0 else _swapped(base) for k in range(cfg.n)]

    lines: list[str] = []
    for step in range(cfg.length):
        if step > 0:
            for row in out_bits:
                for b in range(cfg.outputs):
                    if rng.chance(cfg.flip):
                        row[b] = not row[b]
            for row in in_bits:
                for b in range(cfg.inputs):
                    if rng.chance(cfg.flip):
                        row[b] = not row[b]
        outs = [
            frozenset(nm for nm, bit in zip(out_names, row) if bit)
            for row in views(out_bits)
        ]
        ins = [
            frozenset(nm for nm, bit in zip(in_names, row) if bit)
            for row in views(in_bits)
        ]
        lines.append(streams.format_output_line(outs))
        lines.append(streams.format_input_line(ins))
    return lines
