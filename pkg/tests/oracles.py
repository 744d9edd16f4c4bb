"""Brute-force reference computations used only by the tests.

Nothing here calls into the code paths it is used to check.
"""
import math

import numpy as np


def naive_dft_magnitudes(frame):
    n = len(frame)
    k = np.arange(n // 2 + 1)[:, None]
    t = np.arange(n)[None, :]
    basis = np.exp(-2j * np.pi * k * t / n)
    return np.abs(basis @ frame)


def filterbank_loop(n_mels, n_fft, sample_rate):
    """Triangular mel filters built point by point."""
    top = 2595.0 * math.log10(1.0 + (sample_rate / 2.0) / 700.0)
    mels = [top * i / (n_mels + 1) for i in range(n_mels + 2)]
    hz = [700.0 * (10.0 ** (m / 2595.0) - 1.0) for m in mels]
    n_bins = n_fft // 2 + 1
    fb = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        lo, mid, hi = hz[m], hz[m + 1], hz[m + 2]
        for k in range(n_bins):
            f = k * sample_rate / n_fft
            if lo < f <= mid:
                fb[m, k] = (f - lo) / (mid - lo)
            elif mid < f < hi:
                fb[m, k] = (hi - f) / (hi - mid)
    return fb


def dct2_ortho_matrix(n):
    c = np.zeros((n, n))
    for k in range(n):
        scale = math.sqrt(1.0 / n) if k == 0 else math.sqrt(2.0 / n)
        for i in range(n):
            c[k, i] = scale * math.cos(math.pi * k * (2 * i + 1) / (2 * n))
    return c


def mfcc_oracle(power_frame, sample_rate, n_fft, n_mels=40, n_mfcc=13, floor=1e-10):
    fb = filterbank_loop(n_mels, n_fft, sample_rate)
    energies = fb @ power_frame
    logs = np.log(np.maximum(energies, floor))
    return (dct2_ortho_matrix(n_mels) @ logs)[:n_mfcc]


def toeplitz_lpc(r, order):
    """LPC inverse-filter coefficients by a dense solve of R a = -r[1:]."""
    R = np.array([[r[abs(i - j)] for j in range(order)] for i in range(order)])
    a = np.linalg.solve(R, -np.asarray(r[1:order + 1]))
    return np.concatenate([[1.0], a])


def brute_force_root_split(X, g, h, lam, gamma, min_leaf=1, rtol=1e-12):
    """Exhaustive search over every midpoint between distinct sorted values.

    Returns (feature, threshold, gain) or None. Ties (within ``rtol``) go to
    the lower feature index, then the lower threshold.
    """
    G, H = g.sum(), h.sum()
    parent = G * G / (H + lam)
    cands = []
    for f in range(X.shape[1]):
        values = np.unique(X[:, f])
        for a, b in zip(values[:-1], values[1:]):
            thr = 0.5 * a + 0.5 * b
            if thr <= a:
                thr = b
            left = X[:, f] < thr
            nl = int(left.sum())
            if nl < min_leaf or len(g) - nl < min_leaf:
                continue
            GL, HL = g[left].sum(), h[left].sum()
            GR, HR = g[~left].sum(), h[~left].sum()
            gain = 0.5 * (GL ** 2 / (HL + lam) + GR ** 2 / (HR + lam) - parent) - gamma
            cands.append((gain, f, thr))
    if not cands:
        return None
    best = max(c[0] for c in cands)
    tied = [c for c in cands if c[0] >= best - rtol * abs(best)]
    gain, f, thr = min(tied, key=lambda c: (c[1], c[2]))
    return f, thr, gain


def concordance_auc(scores, labels):
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    total = 0.0
    for p in pos:
        for q in neg:
            total += 1.0 if p > q else 0.5 if p == q else 0.0
    return total / (len(pos) * len(neg))
