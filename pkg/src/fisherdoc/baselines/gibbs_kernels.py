"""Collapsed Gibbs sampling sweeps for LDA.

One sweep resamples every token's topic from its full conditional given the
current count tables.  Uniform draws are pregenerated outside the kernel so
the numba and numpy backends walk identical chains.
"""

import numpy as np

from ..accel import jit_kernel


@jit_kernel
def gibbs_init(tokens, doc_of_token, z, n_dk, n_kt, n_k, uniforms):
    """Assign initial topics z[i] = floor(u_i * K) and build count tables."""
    k_topics = n_dk.shape[1]
    for i in range(tokens.shape[0]):
        k = int(uniforms[i] * k_topics)
        if k >= k_topics:
            k = k_topics - 1
        z[i] = k
        n_dk[doc_of_token[i], k] += 1
        n_kt[k, tokens[i]] += 1
        n_k[k] += 1


@jit_kernel
def gibbs_sweep(tokens, doc_of_token, z, n_dk, n_kt, n_k, alpha, beta, uniforms):
    """One full-corpus resampling sweep; count tables updated in place."""
    k_topics = n_dk.shape[1]
    v_beta = n_kt.shape[1] * beta
    p = np.empty(k_topics)
    for i in range(tokens.shape[0]):
        t = tokens[i]
        d = doc_of_token[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_kt[k_old, t] -= 1
        n_k[k_old] -= 1
        total = 0.0
        for k in range(k_topics):
            w = (n_kt[k, t] + beta) / (n_k[k] + v_beta) * (n_dk[d, k] + alpha)
            p[k] = w
            total += w
        u = uniforms[i] * total
        acc = 0.0
        k_new = k_topics - 1
        for k in range(k_topics):
            acc += p[k]
            if u < acc:
                k_new = k
                break
        z[i] = k_new
        n_dk[d, k_new] += 1
        n_kt[k_new, t] += 1
        n_k[k_new] += 1


@jit_kernel
def gibbs_infer_sweeps(tokens, phi, alpha, uniforms, theta_acc, n_burnin):
    """Fold-in inference for one document with topics frozen.

    ``uniforms`` has shape (n_sweeps, n_tokens); theta_acc accumulates the
    doc-topic posterior over the post-burn-in sweeps.
    """
    k_topics = phi.shape[0]
    n_tokens = tokens.shape[0]
    n_sweeps = uniforms.shape[0]
    z = np.empty(n_tokens, dtype=np.int64)
    n_k_doc = np.zeros(k_topics)
    p = np.empty(k_topics)
    for i in range(n_tokens):
        k = int(uniforms[0, i] * k_topics)
        if k >= k_topics:
            k = k_topics - 1
        z[i] = k
        n_k_doc[k] += 1.0
    n_kept = 0
    for sweep in range(1, n_sweeps):
        for i in range(n_tokens):
            k_old = z[i]
            n_k_doc[k_old] -= 1.0
            total = 0.0
            for k in range(k_topics):
                w = phi[k, tokens[i]] * (n_k_doc[k] + alpha)
                p[k] = w
                total += w
            u = uniforms[sweep, i] * total
            acc = 0.0
            k_new = k_topics - 1
            for k in range(k_topics):
                acc += p[k]
                if u < acc:
                    k_new = k
                    break
            z[i] = k_new
            n_k_doc[k_new] += 1.0
        if sweep >= n_burnin:
            n_kept += 1
            denom = n_tokens + k_topics * alpha
            for k in range(k_topics):
                theta_acc[k] += (n_k_doc[k] + alpha) / denom
    return n_kept
