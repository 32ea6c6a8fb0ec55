"""Geometry of a packed batch: padded lengths, grid index maps, document ids.

A packed batch lays n variable-length documents end to end in one buffer.
Each document is first extended by min(L_i, L_F) - 1 zeros so that a
frequency-domain product yields a linear (non-circular) causal convolution,
then padded to the next multiple of k.  The padded batch is viewed as a
k x m_total grid in which document i owns m_i = L_i'/k whole columns, so no
grid column ever mixes two documents.

Index maps are materialized as explicit gather/scatter index arrays, not
permutation matrices; building and applying them is linear in the number of
mapped elements.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import counting

DEFAULT_K = 256  # good hardware/padding trade-off for packed totals up to ~32k


@dataclass(frozen=True)
class PackedLayout:
    """Derived geometry for one packed batch.  Immutable once built.

    padded_lengths[i] = k * ceil((L_i + min(L_i, L_F) - 1) / k), so every
    document occupies cols_per_doc[i] = padded_lengths[i] / k whole columns
    of the k x total_cols grid, starting at column col_offsets[i].
    """

    doc_lengths: tuple[int, ...]
    filter_len: int
    k: int
    padded_lengths: tuple[int, ...]
    cols_per_doc: tuple[int, ...]
    col_offsets: tuple[int, ...]
    total_cols: int
    total_padded: int
    pos_offsets: tuple[int, ...]

    @property
    def n_docs(self) -> int:
        return len(self.doc_lengths)

    # Span protocol shared with CtLayout: where each document's padded
    # values live inside the flat packed buffer.
    @property
    def span_lengths(self) -> tuple[int, ...]:
        return self.padded_lengths

    @property
    def span_offsets(self) -> tuple[int, ...]:
        return self.pos_offsets


@dataclass(frozen=True, eq=False)
class IndexMap:
    """Explicit pairing of flat source and flat destination indices.

    Entry j moves flat source element src_flat[j] to flat destination
    dst_flat[j].  Every destination is written at most once.  Shapes are
    recorded so a map can be applied to arrays carrying extra trailing
    (channel) axes.
    """

    src_shape: tuple[int, ...]
    dst_shape: tuple[int, ...]
    src_flat: np.ndarray
    dst_flat: np.ndarray

    @property
    def dest_rows(self) -> np.ndarray:
        if len(self.dst_shape) != 2:
            raise ValueError("dest_rows is defined for 2-D destinations only")
        return self.dst_flat // self.dst_shape[1]

    @property
    def dest_cols(self) -> np.ndarray:
        if len(self.dst_shape) != 2:
            raise ValueError("dest_cols is defined for 2-D destinations only")
        return self.dst_flat % self.dst_shape[1]

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Scatter ``values`` into a zero-initialized destination array.

        Leading axes of ``values`` must equal src_shape; any trailing axes
        are carried through unchanged.
        """
        values = np.asarray(values)
        lead = len(self.src_shape)
        if values.shape[:lead] != self.src_shape:
            raise ValueError(
                f"index map expects leading shape {self.src_shape}, "
                f"got {values.shape}"
            )
        tail = values.shape[lead:]
        src_size = int(np.prod(self.src_shape, dtype=np.int64))
        dst_size = int(np.prod(self.dst_shape, dtype=np.int64))
        flat = values.reshape((src_size,) + tail)
        out = np.zeros((dst_size,) + tail, dtype=values.dtype)
        out[self.dst_flat] = flat[self.src_flat]
        return out.reshape(self.dst_shape + tail)

    def inverse(self) -> "IndexMap":
        """Swap source and destination.  Requires a bijective map."""
        src_size = int(np.prod(self.src_shape, dtype=np.int64))
        dst_size = int(np.prod(self.dst_shape, dtype=np.int64))
        if len(self.src_flat) != src_size or len(self.dst_flat) != dst_size:
            raise ValueError("inverse() requires a bijective index map")
        return IndexMap(self.dst_shape, self.src_shape, self.dst_flat, self.src_flat)


def build_layout(doc_lengths: Sequence[int], filter_len: int, k: int = DEFAULT_K) -> PackedLayout:
    """Compute the padded/grid geometry for one packed batch.

    Zero-length documents are rejected: they have no defined padded length
    and would silently vanish from the grid.
    """
    lengths = tuple(int(x) for x in doc_lengths)
    filter_len = int(filter_len)
    k = int(k)
    if not lengths:
        raise ValueError("a packed batch needs at least one document")
    if any(length < 1 for length in lengths):
        raise ValueError(f"document lengths must be >= 1, got {lengths}")
    if filter_len < 1:
        raise ValueError(f"filter length must be >= 1, got {filter_len}")
    if k < 1:
        raise ValueError(f"grid row count k must be >= 1, got {k}")

    padded = tuple(
        k * (-((length + min(length, filter_len) - 1) // -k)) for length in lengths
    )
    cols = tuple(p // k for p in padded)
    col_offsets = tuple(int(x) for x in np.cumsum((0,) + cols[:-1]))
    pos_offsets = tuple(int(x) for x in np.cumsum((0,) + padded[:-1]))
    return PackedLayout(
        doc_lengths=lengths,
        filter_len=filter_len,
        k=k,
        padded_lengths=padded,
        cols_per_doc=cols,
        col_offsets=col_offsets,
        total_cols=sum(cols),
        total_padded=sum(padded),
        pos_offsets=pos_offsets,
    )


def build_p1(layout: PackedLayout) -> IndexMap:
    """Load map: packed padded vector -> k x m_total grid.

    Document i's padded span fills its column block in row-major order:
    grid[r, col_offsets[i] + c] = x[pos_offsets[i] + r * m_i + c].
    """
    m_total = layout.total_cols
    dst = np.empty(layout.total_padded, dtype=np.int64)
    for off_pos, off_col, m_i, padded in zip(
        layout.pos_offsets, layout.col_offsets, layout.cols_per_doc, layout.padded_lengths
    ):
        t = np.arange(padded, dtype=np.int64)
        dst[off_pos : off_pos + padded] = (t // m_i) * m_total + off_col + t % m_i
    counting.add_built_elements(layout.total_padded)
    return IndexMap(
        src_shape=(layout.total_padded,),
        dst_shape=(layout.k, m_total),
        src_flat=np.arange(layout.total_padded, dtype=np.int64),
        dst_flat=dst,
    )


def build_p2(layout: PackedLayout, valid_lengths: Sequence[int] | None = None) -> IndexMap:
    """Unload map: grid -> packed vector, column-major per document block.

    Each document block is flattened in column-major order and sliced to
    its valid output length (the original document length by default, which
    discards the zero-filled padding tail).
    """
    if valid_lengths is None:
        valid_lengths = layout.doc_lengths
    valid = tuple(int(v) for v in valid_lengths)
    if len(valid) != layout.n_docs:
        raise ValueError("valid_lengths must give one length per document")
    m_total = layout.total_cols
    src_parts = []
    for off_col, m_i, padded, n_valid in zip(
        layout.col_offsets, layout.cols_per_doc, layout.padded_lengths, valid
    ):
        if not 0 <= n_valid <= padded:
            raise ValueError(f"valid length {n_valid} outside [0, {padded}]")
        t = np.arange(n_valid, dtype=np.int64)
        src_parts.append((t % layout.k) * m_total + off_col + t // layout.k)
    src = np.concatenate(src_parts) if src_parts else np.empty(0, dtype=np.int64)
    counting.add_built_elements(len(src))
    return IndexMap(
        src_shape=(layout.k, m_total),
        dst_shape=(len(src),),
        src_flat=src,
        dst_flat=np.arange(len(src), dtype=np.int64),
    )


def build_pre_ifft_map(layout: PackedLayout) -> IndexMap:
    """Reorder a transformed grid from column-major to row-major frequency order.

    The forward grid transform leaves document i's frequency f at cell
    (f mod k, offset_i + f // k).  Feeding the inverse (another forward
    transform on conjugated data) requires frequencies laid out row-major,
    at cell (f // m_i, offset_i + f mod m_i).  This map moves each cell
    accordingly, independently per document block.
    """
    m_total = layout.total_cols
    src_parts = []
    dst_parts = []
    for off_col, m_i in zip(layout.col_offsets, layout.cols_per_doc):
        u = np.arange(layout.k, dtype=np.int64)[:, None]
        v = np.arange(m_i, dtype=np.int64)[None, :]
        f = v * layout.k + u
        src_parts.append((u * m_total + off_col + v).ravel())
        dst_parts.append(((f // m_i) * m_total + off_col + f % m_i).ravel())
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    counting.add_built_elements(len(src))
    shape = (layout.k, m_total)
    return IndexMap(src_shape=shape, dst_shape=shape, src_flat=src, dst_flat=dst)


def segment_ids(layout: PackedLayout) -> np.ndarray:
    """Document index of every position in the padded packed buffer."""
    return np.repeat(
        np.arange(layout.n_docs, dtype=np.int64), np.asarray(layout.padded_lengths)
    )
