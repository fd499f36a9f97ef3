"""Structural similarity between normalized policies.

The score is the longest-common-subsequence ratio over canonical token
streams, as a percentage:

    similarity = 100 * 2 * LCS(a, b) / (len(a) + len(b))

It is symmetric, lands in [0, 100], and is exactly 100 iff the two streams
are identical.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .normalize import NormalizedAst


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence of two token sequences."""
    if not a or not b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    vocab: dict[str, int] = {}
    enc_a = np.array([vocab.setdefault(t, len(vocab)) for t in a], dtype=np.int32)
    enc_b = np.array([vocab.setdefault(t, len(vocab)) for t in b], dtype=np.int32)
    m = len(enc_b)
    prev = np.zeros(m + 1, dtype=np.int64)
    cur = np.zeros(m + 1, dtype=np.int64)
    for tok in enc_a:
        # dp[i][j] = dp[i-1][j-1] + match, maxed with dp[i-1][j] and dp[i][j-1];
        # rows are non-decreasing, so the j-1 term is a running maximum
        np.add(prev[:-1], enc_b == tok, out=cur[1:])
        np.maximum(cur[1:], prev[1:], out=cur[1:])
        np.maximum.accumulate(cur, out=cur)
        prev, cur = cur, prev
    return int(prev[m])


def similarity(a: NormalizedAst, b: NormalizedAst) -> float:
    """LCS-ratio similarity percentage between two normalized policies."""
    sa, sb = a.token_stream, b.token_stream
    total = len(sa) + len(sb)
    if total == 0:
        return 100.0
    return 100.0 * (2.0 * lcs_length(sa, sb)) / total
