"""The packed four-step transform and its convolution pipeline.

The forward transform computes, in one pass over the whole batch, the
padded-length DFT of every document: load the packed vector onto the
k x m_total grid (row-major per document block), left-multiply by the
k-point DFT matrix, scale element-wise by per-document twiddles
w_{L_i'}^(a*b), then right-multiply each document's column block by its own
m_i-point DFT matrix.  Because the second DFT is block-diagonal over
document column blocks, no stage ever mixes documents, and all heavy work
is dense GEMM.

The convolution entry point packs the real input and the real filter into
one complex tensor (batch + i * filter), transforms once, recovers both
spectra through conjugate symmetry, multiplies point-wise on the grid,
reorders for the inverse, and reuses the forward kernel via
ifft(x) = conj(fft(conj(x))) / n.  Truncating each document to its original
length at the end removes the padding and leaves a strictly causal,
boundary-respecting result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import counting
from .linalg import GEMM_MODES, dft_matrix
from .packing import (
    DEFAULT_K,
    IndexMap,
    PackedLayout,
    build_layout,
    build_p1,
    build_p2,
    build_pre_ifft_map,
)
from .signal import FilterBank, PackedSignal, embed_filter


@dataclass(frozen=True, eq=False)
class RubiConvPlan:
    """Precomputed, layout-adaptive structures, reusable across layers.

    A plan is a pure function of (doc_lengths, filter_len, k); two plans
    built from equal inputs are bit-identical.  All fields are treated as
    immutable after construction.
    """

    layout: PackedLayout
    m1: np.ndarray  # (k, k) first-stage DFT
    twiddle: np.ndarray  # (k, m_total), block i holds w_{L_i'}^(a*b)
    m2_blocks: tuple[np.ndarray, ...]  # (m_i, m_i) second-stage DFTs
    p1: IndexMap  # packed vector -> grid, row-major per block
    pre_ifft: IndexMap  # column-major -> row-major frequency reorder
    p2: IndexMap  # grid -> packed vector, truncated to original lengths
    inv_scale: np.ndarray  # (m_total,), 1 / L_i' for each column of document i
    rev_rows: np.ndarray  # (k, m_total) per-document frequency reversal gather
    rev_cols: np.ndarray
    unload: IndexMap  # grid -> packed vector at full padded lengths
    load: IndexMap  # inverse of unload
    valid_positions: np.ndarray  # padded-buffer positions of valid outputs

    @property
    def k(self) -> int:
        return self.layout.k


def build_plan(doc_lengths: Sequence[int], filter_len: int, k: int = DEFAULT_K) -> RubiConvPlan:
    """Build every structure the transform needs for one packing.

    Constructed element counts are reported to the operation counter; the
    k x k first-stage matrix is excluded since it depends only on k and is
    shared across all layouts.
    """
    layout = build_layout(doc_lengths, filter_len, k)
    m_total = layout.total_cols

    twiddle = np.empty((k, m_total), dtype=np.complex128)
    rev_rows = np.empty((k, m_total), dtype=np.int64)
    rev_cols = np.empty((k, m_total), dtype=np.int64)
    m2_blocks = []
    rows = np.arange(k, dtype=np.int64)[:, None]
    for off_col, m_i, padded in zip(
        layout.col_offsets, layout.cols_per_doc, layout.padded_lengths
    ):
        cols = np.arange(m_i, dtype=np.int64)[None, :]
        block_cols = slice(off_col, off_col + m_i)
        twiddle[:, block_cols] = np.exp((2j * np.pi / padded) * ((rows * cols) % padded))
        # Cell (a, b) holds frequency f = b*k + a of this document; the
        # reversal points it at frequency (-f) mod L_i' within the block.
        rev_rows[:, block_cols] = np.broadcast_to((-rows) % k, (k, m_i))
        rev_cols[:, block_cols] = off_col + (-cols - (rows > 0)) % m_i
        m2_blocks.append(dft_matrix(m_i))

    inv_scale = np.repeat(
        1.0 / np.asarray(layout.padded_lengths, dtype=np.float64),
        np.asarray(layout.cols_per_doc),
    )
    counting.add_built_elements(
        twiddle.size
        + rev_rows.size
        + rev_cols.size
        + sum(b.size for b in m2_blocks)
        + inv_scale.size
    )

    unload = build_p2(layout, layout.padded_lengths)
    valid_positions = np.concatenate(
        [
            off + np.arange(length, dtype=np.int64)
            for off, length in zip(layout.pos_offsets, layout.doc_lengths)
        ]
    )
    return RubiConvPlan(
        layout=layout,
        m1=dft_matrix(k),
        twiddle=twiddle,
        m2_blocks=tuple(m2_blocks),
        p1=build_p1(layout),
        pre_ifft=build_pre_ifft_map(layout),
        p2=build_p2(layout),
        inv_scale=inv_scale,
        rev_rows=rev_rows,
        rev_cols=rev_cols,
        unload=unload,
        load=unload.inverse(),
        valid_positions=valid_positions,
    )


def _fold_tail(grid: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
    """View (k, m, *tail) as (k, m, prod(tail)); remember tail for unfolding."""
    tail = grid.shape[2:]
    width = int(np.prod(tail, dtype=np.int64)) if tail else 1
    return grid.reshape(grid.shape[0], grid.shape[1], width), tail


def _left_gemm(matrix: np.ndarray, grid: np.ndarray, mode: str) -> np.ndarray:
    """matrix @ grid along the row axis, batched over trailing axes."""
    folded, tail = _fold_tail(grid)
    k, m, width = folded.shape
    counting.add_complex_muls(
        matrix.shape[0] * matrix.shape[1] * m * width,
        real_muls_each=3 if mode == "karatsuba" else 4,
    )
    flat = folded.reshape(k, m * width)
    if mode == "karatsuba":
        p1 = matrix.real @ flat.real
        p2 = matrix.imag @ flat.imag
        p3 = (matrix.real + matrix.imag) @ (flat.real + flat.imag)
        out = (p1 - p2) + 1j * (p3 - p1 - p2)
    else:
        out = matrix @ flat
    return out.reshape((matrix.shape[0], m) + tail)


def _right_gemm_block(block: np.ndarray, matrix: np.ndarray, mode: str) -> np.ndarray:
    """block @ matrix along the column axis, batched over trailing axes."""
    folded, tail = _fold_tail(block)
    k, m, width = folded.shape
    counting.add_complex_muls(
        k * m * matrix.shape[1] * width,
        real_muls_each=3 if mode == "karatsuba" else 4,
    )
    # tensordot contracts the column axis and appends the result axis last.
    if mode == "karatsuba":
        p1 = np.tensordot(folded.real, matrix.real, axes=([1], [0]))
        p2 = np.tensordot(folded.imag, matrix.imag, axes=([1], [0]))
        p3 = np.tensordot(folded.real + folded.imag, matrix.real + matrix.imag, axes=([1], [0]))
        out = (p1 - p2) + 1j * (p3 - p1 - p2)
    else:
        out = np.tensordot(folded, matrix, axes=([1], [0]))
    return np.moveaxis(out, -1, 1).reshape((k, matrix.shape[1]) + tail)


def _check_mode(gemm_mode: str) -> None:
    if gemm_mode not in GEMM_MODES:
        raise ValueError(f"unknown gemm mode {gemm_mode!r}, expected one of {GEMM_MODES}")


def transform_grid(plan: RubiConvPlan, grid: np.ndarray, gemm_mode: str = "standard") -> np.ndarray:
    """Run the three frequency stages on an already loaded grid.

    Input cells hold document values row-major per block; output cell (a, b)
    of document i holds frequency b_local * k + a of its padded-length DFT.
    The second DFT is applied block by block, never as a dense matrix, so
    document blocks stay bit-level independent.
    """
    _check_mode(gemm_mode)
    grid = np.asarray(grid, dtype=np.complex128)
    expected = (plan.k, plan.layout.total_cols)
    if grid.shape[: len(expected)] != expected:
        raise ValueError(f"grid leading shape {grid.shape} does not match {expected}")

    out = _left_gemm(plan.m1, grid, gemm_mode)
    # Twiddle stage; kept as plain complex multiplication in either mode.
    counting.add_complex_muls(out.size, real_muls_each=4)
    out = out * plan.twiddle.reshape(plan.twiddle.shape + (1,) * (out.ndim - 2))
    for off_col, m_i, block in zip(
        plan.layout.col_offsets, plan.layout.cols_per_doc, plan.m2_blocks
    ):
        sl = slice(off_col, off_col + m_i)
        out[:, sl] = _right_gemm_block(out[:, sl], block, gemm_mode)
    return out


def forward(plan: RubiConvPlan, x: np.ndarray, gemm_mode: str = "standard") -> np.ndarray:
    """Padded-length DFT of every document in one packed complex vector.

    The slice of the output covering document i equals the L_i'-point DFT
    of that document's padded values, in natural frequency order.  Extra
    trailing axes of ``x`` are processed as independent channels.
    """
    x = np.asarray(x, dtype=np.complex128)
    if x.shape[0] != plan.layout.total_padded:
        raise ValueError(
            f"packed vector has {x.shape[0]} positions, plan expects "
            f"{plan.layout.total_padded}"
        )
    return plan.unload.apply(transform_grid(plan, plan.p1.apply(x), gemm_mode))


def inverse(plan: RubiConvPlan, y: np.ndarray, gemm_mode: str = "standard") -> np.ndarray:
    """Invert ``forward`` through conjugation: ifft(y) = conj(fft(conj(y))) / L_i'."""
    y = np.asarray(y, dtype=np.complex128)
    if y.shape[0] != plan.layout.total_padded:
        raise ValueError(
            f"packed vector has {y.shape[0]} positions, plan expects "
            f"{plan.layout.total_padded}"
        )
    grid = plan.pre_ifft.apply(plan.load.apply(y))
    out = np.conj(transform_grid(plan, np.conj(grid), gemm_mode))
    counting.add_real_muls(2 * out.size)
    out *= plan.inv_scale.reshape((1, -1) + (1,) * (out.ndim - 2))
    return plan.unload.apply(out)


def filter_grid_embed(plan: RubiConvPlan, bank: FilterBank) -> np.ndarray:
    """Filter taps laid out per document span, zero-padded to each L_i'.

    Every document convolves against the same filter at its own transform
    size; taps at or beyond a document's original length are dropped since
    they cannot reach any valid causal output.
    """
    return embed_filter(plan.layout, bank)


def convolve(
    plan: RubiConvPlan,
    x: PackedSignal,
    bank: FilterBank,
    fused: bool = True,
    gemm_mode: str = "standard",
) -> PackedSignal:
    """Depthwise causal convolution of a packed signal, document by document.

    With ``fused=True`` (default) the batch and filter share one forward
    transform via real-to-complex packing; ``fused=False`` keeps a
    two-transform reference path whose spectra come straight from separate
    forward passes.  Both produce the causal linear convolution truncated
    to each document's original length, re-embedded in the padded buffer
    with zero tails.
    """
    _check_mode(gemm_mode)
    if x.layout != plan.layout:
        raise ValueError("signal layout does not match the plan's layout")
    if bank.channels != x.channels:
        raise ValueError(
            f"channel count mismatch: signal has {x.channels}, filter has {bank.channels}"
        )
    if bank.filter_len != plan.layout.filter_len:
        raise ValueError(
            f"filter length {bank.filter_len} does not match the plan's "
            f"{plan.layout.filter_len}"
        )

    taps_grid = embed_filter(plan.layout, bank)
    if fused:
        packed = plan.p1.apply(x.values + 1j * taps_grid)
        spectrum = transform_grid(plan, packed, gemm_mode)
        batch_hat, filter_hat = split_dual_real(plan, spectrum)
    else:
        batch_hat = transform_grid(
            plan, plan.p1.apply(x.values.astype(np.complex128)), gemm_mode
        )
        filter_hat = transform_grid(
            plan, plan.p1.apply(taps_grid.astype(np.complex128)), gemm_mode
        )

    counting.add_complex_muls(batch_hat.size, real_muls_each=4)
    product = batch_hat * filter_hat
    product = plan.pre_ifft.apply(product)
    out_grid = transform_grid(plan, np.conj(product), gemm_mode)
    counting.add_real_muls(out_grid.size)
    time_grid = out_grid.real * plan.inv_scale[None, :, None]

    valid = plan.p2.apply(time_grid)
    values = np.zeros_like(x.values)
    values[plan.valid_positions] = valid
    return PackedSignal(values, plan.layout)


def split_dual_real(plan: RubiConvPlan, spectrum: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Recover the two real-signal spectra from one packed transform.

    Given the grid spectrum of z = b + i*f for real b and f, conjugate
    symmetry gives b_hat = (z + conj(z at -freq)) / 2 and
    f_hat = -i/2 * (z - conj(z at -freq)), where the negated-frequency
    gather stays inside each document's column block.
    """
    reversed_spectrum = np.conj(spectrum[plan.rev_rows, plan.rev_cols])
    counting.add_complex_muls(2 * spectrum.size, real_muls_each=4)
    batch_hat = 0.5 * (spectrum + reversed_spectrum)
    filter_hat = -0.5j * (spectrum - reversed_spectrum)
    return batch_hat, filter_hat
