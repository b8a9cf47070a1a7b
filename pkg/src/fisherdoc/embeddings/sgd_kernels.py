"""Inner training loops for cBoW and paragraph-vector SGD.

Kernels are written in an njit-compilable subset and compiled with numba
unless the numpy fallback is selected (see ``fisherdoc.accel``).  All
randomness (window shrinking, negative samples) is pregenerated with numpy
outside the kernels, so both backends consume identical draws.

Update rule per position: h is the mean of the participating input vectors,
each output vector u gets ``(label - sigmoid(h.u)) * lr * h``, and the input
vectors share the accumulated error divided by their count (the exact
gradient of the per-example loss through the mean).
"""

import math

import numpy as np

from ..accel import jit_kernel


@jit_kernel
def _sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


@jit_kernel
def _train_pair(h, center, neg_words, w_out, lr, err):
    """One positive target plus its negative samples; accumulates the input
    gradient into ``err`` and updates output vectors in place."""
    d = h.shape[0]
    for j in range(d):
        err[j] = 0.0
    for s in range(neg_words.shape[0] + 1):
        if s == 0:
            u = center
            label = 1.0
        else:
            u = neg_words[s - 1]
            if u == center:
                continue
            label = 0.0
        dot = 0.0
        for j in range(d):
            dot += h[j] * w_out[u, j]
        g = (label - _sigmoid(dot)) * lr
        for j in range(d):
            err[j] += g * w_out[u, j]
            w_out[u, j] += g * h[j]


@jit_kernel
def _train_pair_frozen(h, center, neg_words, w_out, lr, err):
    """Like _train_pair but leaves the output vectors untouched (inference)."""
    d = h.shape[0]
    for j in range(d):
        err[j] = 0.0
    for s in range(neg_words.shape[0] + 1):
        if s == 0:
            u = center
            label = 1.0
        else:
            u = neg_words[s - 1]
            if u == center:
                continue
            label = 0.0
        dot = 0.0
        for j in range(d):
            dot += h[j] * w_out[u, j]
        g = (label - _sigmoid(dot)) * lr
        for j in range(d):
            err[j] += g * w_out[u, j]


@jit_kernel
def cbow_epoch(tokens, doc_offsets, w_in, w_out, win_draws, neg_draws,
               lr_start, lr_end, processed_start, total_updates):
    """One cBoW pass over the corpus; returns updated processed count."""
    d = w_in.shape[1]
    h = np.empty(d)
    err = np.empty(d)
    processed = processed_start
    for doc in range(doc_offsets.shape[0] - 1):
        lo = doc_offsets[doc]
        hi = doc_offsets[doc + 1]
        for pos in range(lo, hi):
            frac = processed / total_updates
            lr = lr_start + (lr_end - lr_start) * frac
            processed += 1
            r = win_draws[pos]
            a = pos - r
            if a < lo:
                a = lo
            b = pos + r + 1
            if b > hi:
                b = hi
            n_ctx = (b - a) - 1
            if n_ctx <= 0:
                continue
            for j in range(d):
                h[j] = 0.0
            for c in range(a, b):
                if c == pos:
                    continue
                wc = tokens[c]
                for j in range(d):
                    h[j] += w_in[wc, j]
            for j in range(d):
                h[j] /= n_ctx
            _train_pair(h, tokens[pos], neg_draws[pos], w_out, lr, err)
            for c in range(a, b):
                if c == pos:
                    continue
                wc = tokens[c]
                for j in range(d):
                    w_in[wc, j] += err[j] / n_ctx
    return processed


@jit_kernel
def dbow_epoch(tokens, doc_offsets, doc_vecs, w_out, neg_draws,
               lr_start, lr_end, processed_start, total_updates, update_out):
    """One PV-DBOW pass: each word is predicted from its document vector."""
    d = doc_vecs.shape[1]
    err = np.empty(d)
    processed = processed_start
    for doc in range(doc_offsets.shape[0] - 1):
        for pos in range(doc_offsets[doc], doc_offsets[doc + 1]):
            frac = processed / total_updates
            lr = lr_start + (lr_end - lr_start) * frac
            processed += 1
            if update_out:
                _train_pair(doc_vecs[doc], tokens[pos], neg_draws[pos],
                            w_out, lr, err)
            else:
                _train_pair_frozen(doc_vecs[doc], tokens[pos], neg_draws[pos],
                                   w_out, lr, err)
            for j in range(d):
                doc_vecs[doc, j] += err[j]
    return processed


@jit_kernel
def dm_epoch(tokens, doc_offsets, w_in, doc_vecs, w_out, win_draws, neg_draws,
             lr_start, lr_end, processed_start, total_updates,
             update_out, update_words):
    """One PV-DM pass: center word predicted from the mean of its context
    word vectors and the document vector."""
    d = w_in.shape[1]
    h = np.empty(d)
    err = np.empty(d)
    processed = processed_start
    for doc in range(doc_offsets.shape[0] - 1):
        lo = doc_offsets[doc]
        hi = doc_offsets[doc + 1]
        for pos in range(lo, hi):
            frac = processed / total_updates
            lr = lr_start + (lr_end - lr_start) * frac
            processed += 1
            r = win_draws[pos]
            a = pos - r
            if a < lo:
                a = lo
            b = pos + r + 1
            if b > hi:
                b = hi
            n_in = b - a  # context words minus center, plus the doc vector
            for j in range(d):
                h[j] = doc_vecs[doc, j]
            for c in range(a, b):
                if c == pos:
                    continue
                wc = tokens[c]
                for j in range(d):
                    h[j] += w_in[wc, j]
            for j in range(d):
                h[j] /= n_in
            if update_out:
                _train_pair(h, tokens[pos], neg_draws[pos], w_out, lr, err)
            else:
                _train_pair_frozen(h, tokens[pos], neg_draws[pos], w_out, lr, err)
            for j in range(d):
                doc_vecs[doc, j] += err[j] / n_in
            if update_words:
                for c in range(a, b):
                    if c == pos:
                        continue
                    wc = tokens[c]
                    for j in range(d):
                        w_in[wc, j] += err[j] / n_in
    return processed
