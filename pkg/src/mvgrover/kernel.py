"""Discretized modular domain: grids, state tensors, quadrature, tensor assembly.

The modular position lives on [0, pi) and the modular momentum on [0, 1),
both sampled at midpoints.  Each cell carries two band amplitudes per mode;
band 1 stands for the [pi, 2pi) half of the modular position axis.  Joint
amplitude tensors are indexed (theta_1..theta_n, k_1..k_n, b_1..b_n) with the
last index fastest, and all reductions run in that lexicographic order.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .errors import (
    AncillaMismatch,
    BadMagic,
    CapacityExceeded,
    GridMismatch,
    ShapeMismatch,
    TruncatedFile,
    ZeroNorm,
    ZeroSize,
)

# Dense storage only; larger mode counts would thrash without a sparse layout.
MAX_MODES = 4

STATE_MAGIC = b"MVGR1"
_HEADER = struct.Struct("<III")


@dataclass(frozen=True)
class ModularGrid:
    """Midpoint discretization of [0, pi) x [0, 1) for each of n modes."""

    n_modes: int
    g_theta: int
    g_k: int

    def __post_init__(self):
        for name in ("n_modes", "g_theta", "g_k"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ZeroSize(f"{name} must be >= 1, got {value}")
        if self.n_modes > MAX_MODES:
            raise CapacityExceeded(
                f"dense storage supports at most {MAX_MODES} modes, got {self.n_modes}"
            )

    @property
    def d_theta(self) -> float:
        return math.pi / self.g_theta

    @property
    def d_k(self) -> float:
        return 1.0 / self.g_k

    @property
    def cell_weight(self) -> float:
        """Quadrature weight of one joint cell, (d_theta * d_k)**n_modes."""
        return (self.d_theta * self.d_k) ** self.n_modes

    @property
    def cell_shape(self) -> tuple[int, ...]:
        return (self.g_theta,) * self.n_modes + (self.g_k,) * self.n_modes

    @property
    def band_shape(self) -> tuple[int, ...]:
        return (2,) * self.n_modes

    def theta_values(self) -> np.ndarray:
        return (np.arange(self.g_theta) + 0.5) * self.d_theta

    def k_values(self) -> np.ndarray:
        return (np.arange(self.g_k) + 0.5) * self.d_k

    def single_mode(self) -> "ModularGrid":
        """The one-mode grid with the same per-mode resolution."""
        if self.n_modes == 1:
            return self
        return replace(self, n_modes=1)


def make_grid(n_modes: int, g_theta: int, g_k: int) -> ModularGrid:
    """Build a grid; raises ZeroSize for empty axes, CapacityExceeded for n > 4."""
    return ModularGrid(n_modes, g_theta, g_k)


def _freeze_amp(amp, shape: tuple[int, ...]) -> np.ndarray:
    arr = np.ascontiguousarray(amp, dtype=np.complex128)
    if arr.shape != shape:
        raise ShapeMismatch(f"amplitude tensor has shape {arr.shape}, expected {shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ModeState:
    """Single-mode amplitudes over grid cells and the two-band index."""

    grid: ModularGrid
    amp: np.ndarray

    def __post_init__(self):
        if self.grid.n_modes != 1:
            raise ShapeMismatch("ModeState requires a single-mode grid")
        shape = (self.grid.g_theta, self.grid.g_k, 2)
        object.__setattr__(self, "amp", _freeze_amp(self.amp, shape))


@dataclass(frozen=True, eq=False)
class JointState:
    """n-mode amplitudes, shape (g_theta,)*n + (g_k,)*n + (2,)*n.

    n_ancilla = 1 appends one extra band axis (the dilation ancilla bit); the
    ancilla carries no quadrature weight of its own.
    """

    grid: ModularGrid
    amp: np.ndarray
    n_ancilla: int = 0

    def __post_init__(self):
        if self.n_ancilla not in (0, 1):
            raise AncillaMismatch(f"n_ancilla must be 0 or 1, got {self.n_ancilla}")
        shape = (
            self.grid.cell_shape
            + self.grid.band_shape
            + (2,) * self.n_ancilla
        )
        object.__setattr__(self, "amp", _freeze_amp(self.amp, shape))


State = Union[ModeState, JointState]


def quad_norm(state: State) -> float:
    """Squared quadrature norm: sum |amp|^2 * (d_theta*d_k)**n_modes."""
    return float(np.vdot(state.amp, state.amp).real) * state.grid.cell_weight


def inner(a: State, b: State) -> complex:
    """Quadrature inner product, conjugate-linear in the first argument."""
    if a.grid != b.grid:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")
    if a.amp.shape != b.amp.shape:
        raise AncillaMismatch(
            f"state shapes differ: {a.amp.shape} vs {b.amp.shape}"
        )
    return complex(np.vdot(a.amp, b.amp)) * a.grid.cell_weight


def tensor(modes: Sequence[ModeState]) -> JointState:
    """Outer product of single-mode states into one joint state.

    Axes come out grouped as (all theta, all k, all bands) in mode order.
    """
    if len(modes) == 0:
        raise ZeroSize("tensor() needs at least one mode")
    if len(modes) > MAX_MODES:
        raise CapacityExceeded(
            f"dense storage supports at most {MAX_MODES} modes, got {len(modes)}"
        )
    base = modes[0].grid
    for m in modes[1:]:
        if m.grid != base:
            raise GridMismatch("all modes must share g_theta and g_k")
    n = len(modes)
    amp = modes[0].amp
    for m in modes[1:]:
        amp = np.multiply.outer(amp, m.amp)
    # mode i contributed axes (3i, 3i+1, 3i+2) = (theta_i, k_i, b_i)
    perm = (
        [3 * i for i in range(n)]
        + [3 * i + 1 for i in range(n)]
        + [3 * i + 2 for i in range(n)]
    )
    amp = np.ascontiguousarray(np.transpose(amp, perm))
    return JointState(ModularGrid(n, base.g_theta, base.g_k), amp)


def normalize(state: State) -> State:
    """Rescale to unit quadrature norm.  Raises ZeroNorm below 1e-30."""
    nrm = quad_norm(state)
    if nrm < 1e-30:
        raise ZeroNorm(f"cannot normalize state with squared norm {nrm:.3e}")
    return replace(state, amp=state.amp / math.sqrt(nrm))


def with_ancilla(state: JointState, value: int = 0) -> JointState:
    """Append the ancilla band bit, initialized to the given basis value."""
    if state.n_ancilla != 0:
        raise AncillaMismatch("state already carries an ancilla bit")
    if value not in (0, 1):
        raise ValueError(f"ancilla value must be 0 or 1, got {value}")
    amp = np.zeros(state.amp.shape + (2,), dtype=np.complex128)
    amp[..., value] = state.amp
    return JointState(state.grid, amp, n_ancilla=1)


def ancilla_branch(state: JointState, value: int) -> JointState:
    """Project out one (unnormalized) ancilla branch as a plain joint state."""
    if state.n_ancilla != 1:
        raise AncillaMismatch("state carries no ancilla bit")
    if value not in (0, 1):
        raise ValueError(f"ancilla value must be 0 or 1, got {value}")
    return JointState(state.grid, state.amp[..., value])


# ---------------------------------------------------------------------------
# Binary state format: magic "MVGR1", three u32 LE (n_modes, g_theta, g_k),
# then complex128 amplitudes as little-endian (real, imag) float64 pairs in
# C order of the joint tensor (theta indices, k indices, band bits; last
# index fastest).
# ---------------------------------------------------------------------------


def state_to_bytes(state: JointState) -> bytes:
    if state.n_ancilla != 0:
        raise AncillaMismatch("ancilla-extended states have no file representation")
    g = state.grid
    header = STATE_MAGIC + _HEADER.pack(g.n_modes, g.g_theta, g.g_k)
    return header + np.ascontiguousarray(state.amp).astype("<c16").tobytes()


def state_from_bytes(buf: bytes) -> JointState:
    if buf[: len(STATE_MAGIC)] != STATE_MAGIC:
        raise BadMagic(
            f"expected magic {STATE_MAGIC!r}, got {bytes(buf[:len(STATE_MAGIC)])!r}"
        )
    offset = len(STATE_MAGIC)
    if len(buf) < offset + _HEADER.size:
        raise TruncatedFile(
            f"header needs {offset + _HEADER.size} bytes, file has {len(buf)}"
        )
    n_modes, g_theta, g_k = _HEADER.unpack_from(buf, offset)
    grid = ModularGrid(n_modes, g_theta, g_k)
    shape = grid.cell_shape + grid.band_shape
    expected = int(np.prod(shape)) * 16
    payload = buf[offset + _HEADER.size :]
    if len(payload) != expected:
        raise TruncatedFile(
            f"expected {expected} payload bytes, got {len(payload)}"
        )
    amp = np.frombuffer(payload, dtype="<c16").reshape(shape)
    return JointState(grid, amp.astype(np.complex128))


def save_state(state: JointState, path) -> None:
    with open(path, "wb") as fh:
        fh.write(state_to_bytes(state))


def load_state(path) -> JointState:
    with open(path, "rb") as fh:
        return state_from_bytes(fh.read())
