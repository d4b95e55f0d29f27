"""Search pipeline: list preparation, iteration schedule, weighted run, readout.

The run applies the (weighted or dilated) search step to the quantum list,
normalizes, and reads the result out as overlaps against the logical basis
states rebuilt from the same envelopes.  A dense-vector qubit search acts
as the independent reference for per-cell equivalence checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import operators as ops
from .errors import (
    AmbiguousAssociation,
    AncillaMismatch,
    BadTargetCount,
    CapacityExceeded,
    DegenerateWeights,
    DuplicateTarget,
    NoAssociation,
    ShapeMismatch,
)
from .kernel import (
    JointState,
    ModularGrid,
    ancilla_branch,
    make_grid,
    normalize,
    quad_norm,
    tensor,
    with_ancilla,
)
from .operators import TargetSpec, joint_weight, mode_table_to_cells
from .zak import EnvelopeSpec, logical_one, logical_zero

AUTO = "auto"

DECISION_THRESHOLD = 1e-8
# Cells with less amplitude than this are skipped by the per-cell check;
# far above underflow, far below any cell an envelope actually populates.
_CELL_FLOOR = 1e-200


@dataclass(frozen=True, eq=False)
class SearchConfig:
    """Everything one run needs; zetas may be None, scalars, or tables."""

    n_modes: int
    g_theta: int
    g_k: int
    envelopes: Sequence[EnvelopeSpec]
    target: TargetSpec
    zetas: Optional[Sequence] = None
    iterations: Union[int, str] = AUTO
    use_dilation: bool = False
    seed: Optional[int] = None  # reserved

    @property
    def grid(self) -> ModularGrid:
        return make_grid(self.n_modes, self.g_theta, self.g_k)


@dataclass(frozen=True)
class SearchReport:
    """Readout of one run.

    identified is a string for single-target runs, a tuple of strings for
    multi-target runs, or None with failure set when the univocal rule has
    no unique answer.  ancilla_branch_norms and branch_identified are filled
    only for dilation runs (indexed by ancilla value).
    """

    norm_constant: float
    overlaps: dict[str, complex]
    identified: Union[str, tuple[str, ...], None]
    per_cell_max_error: float
    iterations_used: int
    ancilla_branch_norms: Optional[tuple[float, float]] = None
    branch_identified: Optional[tuple[Optional[str], Optional[str]]] = None
    failure: Optional[str] = None


def build_list(envelopes: Sequence[EnvelopeSpec], grid: ModularGrid) -> JointState:
    """Quantum list: global Hadamard on the tensor of logical zeros.

    Equals the equal-weight sum of all logical basis states times 2**(-n/2).
    """
    if len(envelopes) != grid.n_modes:
        raise ShapeMismatch(f"need {grid.n_modes} envelopes, got {len(envelopes)}")
    modes = [logical_zero(env, grid) for env in envelopes]
    return ops.apply(ops.hadamard(grid), tensor(modes))


def logical_basis(
    envelopes: Sequence[EnvelopeSpec], grid: ModularGrid
) -> dict[str, JointState]:
    """All 2^n logical basis states built from the given envelopes."""
    if len(envelopes) != grid.n_modes:
        raise ShapeMismatch(f"need {grid.n_modes} envelopes, got {len(envelopes)}")
    n = grid.n_modes
    basis = {}
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - i)) & 1 for i in range(n)]
        modes = [
            logical_one(env, grid) if b else logical_zero(env, grid)
            for env, b in zip(envelopes, bits)
        ]
        basis[format(idx, f"0{n}b")] = tensor(modes)
    return basis


def _cell_profile(tables: Sequence[np.ndarray], grid: ModularGrid) -> np.ndarray:
    """Product of per-mode tables over the joint cell axes (broadcastable)."""
    prof = np.ones((1,) * (2 * grid.n_modes), dtype=np.complex128)
    for mode, table in enumerate(tables):
        prof = prof * mode_table_to_cells(table, mode, grid)
    return prof


def logical_overlaps(
    envelopes: Sequence[EnvelopeSpec], state: JointState
) -> dict[str, complex]:
    """Overlaps <logical s | state> for every band string s.

    Works band-slice by band-slice, so the basis states are never
    materialized; agrees with inner() against logical_basis().
    """
    if state.n_ancilla:
        raise AncillaMismatch("take an ancilla branch before computing overlaps")
    grid = state.grid
    n = grid.n_modes
    tables = [env.table_for(grid.single_mode()) for env in envelopes]
    profile = np.conjugate(_cell_profile(tables, grid))
    out = {}
    for idx in range(2**n):
        bits = tuple((idx >> (n - 1 - i)) & 1 for i in range(n))
        band = state.amp[(Ellipsis,) + bits]
        out[format(idx, f"0{n}b")] = complex(np.sum(profile * band) * grid.cell_weight)
    return out


def iteration_count(n_modes: int, m_targets: int) -> int:
    """Queries needed for maximal success probability, floor(pi/(4 asin sqrt(M/N)))."""
    big_n = 2**n_modes
    if not 1 <= m_targets < big_n:
        raise BadTargetCount(f"need 1 <= M < 2**n = {big_n}, got {m_targets}")
    count = math.floor(math.pi / (4.0 * math.asin(math.sqrt(m_targets / big_n))))
    return max(1, count)


def identify(overlaps: dict[str, complex], threshold: float = DECISION_THRESHOLD) -> str:
    """The unique string with |overlap| above threshold.

    Raises AmbiguousAssociation or NoAssociation when the answer is not
    unique.
    """
    hits = sorted(s for s, v in overlaps.items() if abs(v) > threshold)
    if not hits:
        raise NoAssociation(f"no overlap above {threshold:.1e}")
    if len(hits) > 1:
        raise AmbiguousAssociation(f"{len(hits)} overlaps above {threshold:.1e}: {hits}")
    return hits[0]


def reference_qubit_grover(n: int, targets: Sequence[str], r: int) -> np.ndarray:
    """Dense-vector qubit search: r rounds of (2|u><u| - 1)(1 - 2 sum |t><t|).

    Starts from the uniform 2^n vector; the sign convention matches
    grover_cell (the four-element single-step search lands on +|target>).
    """
    if n > 12:
        raise CapacityExceeded(f"reference search supports n <= 12, got {n}")
    if r < 0:
        raise ValueError(f"iteration count must be >= 0, got {r}")
    idx = [int(str(t), 2) for t in targets]
    if len(set(idx)) != len(idx):
        raise DuplicateTarget(f"targets must be distinct: {list(targets)}")
    big_n = 2**n
    if not all(0 <= i < big_n for i in idx):
        raise ValueError(f"targets out of range for n={n}: {list(targets)}")
    v = np.full(big_n, 1.0 / math.sqrt(big_n), dtype=np.complex128)
    for _ in range(r):
        v[idx] *= -1.0
        v = 2.0 * v.mean() - v
    return v


def _resolved_iterations(cfg: SearchConfig) -> int:
    if cfg.iterations == AUTO:
        return iteration_count(cfg.n_modes, cfg.target.n_targets)
    r = int(cfg.iterations)
    if r < 0:
        raise ValueError(f"iterations must be >= 0 or '{AUTO}', got {cfg.iterations}")
    return r


def _check_not_degenerate(cfg: SearchConfig, grid: ModularGrid) -> None:
    tables = [env.table_for(grid.single_mode()) for env in cfg.envelopes]
    gsq = _cell_profile([np.abs(t) ** 2 for t in tables], grid).real
    w = joint_weight(cfg.zetas, grid)
    mass = float(np.sum(gsq * w**2)) * grid.cell_weight
    if mass <= 1e-20:
        raise DegenerateWeights(
            f"weight product vanishes on the envelope support (mass {mass:.3e})"
        )


def _evolved_state(cfg: SearchConfig) -> tuple[JointState, int]:
    """Run the iteration loop; the returned state is unnormalized."""
    grid = cfg.grid
    if len(cfg.envelopes) != grid.n_modes:
        raise ShapeMismatch(f"need {grid.n_modes} envelopes, got {len(cfg.envelopes)}")
    if cfg.target.n_modes != grid.n_modes:
        raise ShapeMismatch(
            f"target spans {cfg.target.n_modes} modes, grid has {grid.n_modes}"
        )
    _check_not_degenerate(cfg, grid)
    r = _resolved_iterations(cfg)
    state = build_list(cfg.envelopes, grid)
    if cfg.use_dilation:
        op = ops.dilation(cfg.target, cfg.zetas, grid)
        state = with_ancilla(state, 0)
    else:
        op = ops.grover_weighted(cfg.target, cfg.zetas, grid)
    for _ in range(r):
        state = ops.apply(op, state)
    return state, r


def final_state(cfg: SearchConfig, normalized: bool = True) -> JointState:
    """The post-iteration state of a plain (non-dilation) run."""
    if cfg.use_dilation:
        raise ValueError("dilated finals carry an ancilla; run without use_dilation")
    state, _ = _evolved_state(cfg)
    return normalize(state) if normalized else state


def per_cell_max_error(state: JointState, target: TargetSpec, r: int) -> float:
    """Worst per-cell deviation of the normalized band vector from the
    reference qubit search after r rounds.  Cells with negligible amplitude
    are skipped."""
    if state.n_ancilla:
        raise AncillaMismatch("take an ancilla branch before the per-cell check")
    grid = state.grid
    n = grid.n_modes
    d = 2**n
    v = state.amp.reshape(grid.cell_shape + (d,))
    norms = np.linalg.norm(v, axis=-1)
    mask = norms > _CELL_FLOOR
    if not np.any(mask):
        return math.nan
    vhat = np.zeros_like(v)
    np.divide(v, norms[..., None], out=vhat, where=mask[..., None])
    if target.is_constant:
        ref = reference_qubit_grover(n, target.target_strings(), r)
        diff = np.abs(vhat - ref)
    else:
        band = target.band_indices(grid)[..., 0]
        table = np.zeros((d, d), dtype=np.complex128)
        for t in np.unique(band):
            table[int(t)] = reference_qubit_grover(n, [format(int(t), f"0{n}b")], r)
        ref = table[band].reshape((grid.g_theta,) * n + (1,) * n + (d,))
        diff = np.abs(vhat - ref)
    return float(np.max(diff[mask]))


def _readout(
    cfg: SearchConfig, state: JointState, threshold: float
) -> tuple[dict[str, complex], Union[str, tuple[str, ...], None], Optional[str]]:
    overlaps = logical_overlaps(cfg.envelopes, state)
    if cfg.target.is_constant and cfg.target.n_targets > 1:
        hits = tuple(sorted(s for s, v in overlaps.items() if abs(v) > threshold))
        if not hits:
            return overlaps, None, "no-association"
        return overlaps, hits, None
    try:
        return overlaps, identify(overlaps, threshold), None
    except AmbiguousAssociation:
        return overlaps, None, "ambiguous-association"
    except NoAssociation:
        return overlaps, None, "no-association"


def run_search(cfg: SearchConfig, threshold: float = DECISION_THRESHOLD) -> SearchReport:
    """Full pipeline: list, iterations, normalization, univocal readout.

    norm_constant is the squared norm of the state after the last iteration,
    before normalization (1 for unit weights or dilation runs).
    """
    state, r = _evolved_state(cfg)
    norm_constant = quad_norm(state)

    if cfg.use_dilation:
        branches = (ancilla_branch(state, 0), ancilla_branch(state, 1))
        branch_norms = (quad_norm(branches[0]), quad_norm(branches[1]))
        per_branch: list[Optional[str]] = [None, None]
        hit_sets: list[Optional[Union[str, tuple[str, ...]]]] = [None, None]
        overlaps_by_branch: list[Optional[dict[str, complex]]] = [None, None]
        failure = None
        for i, (branch, nrm) in enumerate(zip(branches, branch_norms)):
            if nrm <= 1e-20:
                continue
            ov, ident, fail = _readout(cfg, normalize(branch), threshold)
            overlaps_by_branch[i] = ov
            hit_sets[i] = ident
            per_branch[i] = ident if isinstance(ident, str) else None
            failure = failure or fail
        live = [h for h in hit_sets if h is not None]
        if not live:
            identified, failure = None, failure or "no-association"
        elif all(h == live[0] for h in live):
            identified = live[0]
        else:
            identified, failure = None, "ambiguous-association"
        dominant = int(branch_norms[1] >= branch_norms[0])
        normed = normalize(branches[dominant])
        overlaps = overlaps_by_branch[dominant]
        if overlaps is None:
            overlaps = logical_overlaps(cfg.envelopes, normed)
        return SearchReport(
            norm_constant=norm_constant,
            overlaps=overlaps,
            identified=identified,
            per_cell_max_error=per_cell_max_error(normed, cfg.target, r),
            iterations_used=r,
            ancilla_branch_norms=branch_norms,
            branch_identified=(per_branch[0], per_branch[1]),
            failure=failure,
        )

    normed = normalize(state)
    overlaps, identified, failure = _readout(cfg, normed, threshold)
    return SearchReport(
        norm_constant=norm_constant,
        overlaps=overlaps,
        identified=identified,
        per_cell_max_error=per_cell_max_error(normed, cfg.target, r),
        iterations_used=r,
        failure=failure,
    )


def weighted_list(
    envelopes: Sequence[EnvelopeSpec], zetas, grid: ModularGrid
) -> JointState:
    """The weight-scaled equal-weight sum of all logical basis states.

    amp[cell, b] = w(cell) * prod_i g_i(cell_i) on every band string b; this
    is what the four single-step search results add up to at n = 2.
    """
    if len(envelopes) != grid.n_modes:
        raise ShapeMismatch(f"need {grid.n_modes} envelopes, got {len(envelopes)}")
    tables = [env.table_for(grid.single_mode()) for env in envelopes]
    base = _cell_profile(tables, grid) * joint_weight(zetas, grid)
    amp = np.empty(grid.cell_shape + grid.band_shape, dtype=np.complex128)
    amp[...] = base[(Ellipsis,) + (None,) * grid.n_modes]
    return JointState(grid, amp)


def sum_over_targets(cfg: SearchConfig) -> JointState:
    """Unnormalized sum of the four single-application results at n = 2.

    Runs one application per constant target regardless of cfg.iterations
    (the identity concerns the single-step protocol) and matches
    weighted_list(cfg.envelopes, cfg.zetas, grid) elementwise.
    """
    if cfg.n_modes != 2:
        raise BadTargetCount(f"sum_over_targets is defined for n = 2, got {cfg.n_modes}")
    if not (cfg.target.is_constant and cfg.target.n_targets == 1):
        raise BadTargetCount("sum_over_targets needs a single constant-mode target")
    grid = cfg.grid
    lst = build_list(cfg.envelopes, grid)
    total = np.zeros_like(lst.amp)
    for idx in range(4):
        spec = TargetSpec.bits(format(idx, "02b"))
        op = ops.grover_weighted(spec, cfg.zetas, grid)
        total = total + ops.apply(op, lst).amp
    return JointState(grid, total)
