"""Vectorized whole-frame mixture engine.

Holds the per-pixel Gaussian mixtures of an entire frame (or a band of
rows) in flat numpy arrays and advances all of them in one pass per
frame. The arithmetic mirrors the scalar operations in :mod:`bgsub.gmm`
operation for operation, including summation order, tie-breaking and the
stable rank sort, so that in fixed-alpha mode both paths produce
bit-identical state. The pdf-scaled rho mode can differ from the scalar
path by a final unit in the last place because numpy's vectorized exp is
not guaranteed to round identically to math.exp.

Slots beyond a pixel's live count hold weight exactly 0.0 and never
influence sums, matching or the background prefix.
"""

from __future__ import annotations

import numpy as np

from .gmm import BACKGROUND, FOREGROUND, GAUSS_NORM_3D, PDF_FAITHFUL, ModelParams


class FrameModel:
    """Mixture state for n_pixels pixels, k slots each.

    Arrays are indexed [slot, pixel] (means have a trailing channel axis)
    and are kept sorted per pixel by weight/sigma, highest first. The
    first observe() call seeds every pixel with a single component and
    classifies everything as background.
    """

    def __init__(self, params: ModelParams, n_pixels: int):
        if n_pixels < 1:
            raise ValueError(f"n_pixels must be >= 1, got {n_pixels}")
        k = params.k
        self.params = params
        self.n = n_pixels
        self.weights = np.zeros((k, n_pixels), dtype=np.float64)
        self.means = np.zeros((k, n_pixels, 3), dtype=np.float64)
        self.variances = np.full((k, n_pixels), params.var_init, dtype=np.float64)
        self.live_count = np.zeros(n_pixels, dtype=np.int64)
        self.started = False
        self._slots = np.arange(k, dtype=np.int64)

    def observe(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Advance every pixel model by one frame.

        z is (n, 3) float64. Returns (labels, pos, b): uint8 labels
        (BACKGROUND/FOREGROUND), the post-sort slot that absorbed each
        pixel's value, and the per-pixel background prefix size.
        """
        p = self.params
        n = self.n
        if z.shape != (n, 3):
            raise ValueError(f"expected ({n}, 3) samples, got {z.shape}")
        if not self.started:
            self.weights[0] = 1.0
            self.means[0] = z
            self.live_count[:] = 1
            self.started = True
            labels = np.full(n, BACKGROUND, dtype=np.uint8)
            return labels, np.zeros(n, dtype=np.int64), np.ones(n, dtype=np.int64)

        k = p.k
        w = self.weights
        mu = self.means
        var = self.variances
        live = self._slots[:, None] < self.live_count[None, :]

        diff = z[None, :, :] - mu
        d2 = (
            diff[:, :, 0] * diff[:, :, 0]
            + diff[:, :, 1] * diff[:, :, 1]
            + diff[:, :, 2] * diff[:, :, 2]
        )
        limit = p.d * p.d
        matched = live & (d2 < limit * var)
        matched_any = matched.any(axis=0)
        # argmax picks the first matching slot; garbage where nothing matched,
        # masked out below.
        jm = matched.argmax(axis=0)
        jm_e = jm[None, :]

        one_minus_alpha = 1.0 - p.alpha

        # Matched pixels: decay every live weight, then reward the match.
        decay_m = live & matched_any[None, :]
        w = np.where(decay_m, w * one_minus_alpha, w)

        w_j = np.take_along_axis(w, jm_e, axis=0)[0]
        mu_j = np.take_along_axis(mu, jm[None, :, None], axis=0)[0]
        var_j = np.take_along_axis(var, jm_e, axis=0)[0]
        d2_j = np.take_along_axis(d2, jm_e, axis=0)[0]

        w_j_new = w_j + p.alpha
        if p.rho_mode == PDF_FAITHFUL:
            pdf_j = GAUSS_NORM_3D * var_j**-1.5 * np.exp(-d2_j / (2.0 * var_j))
            rho_j = np.clip(p.alpha * pdf_j, 0.0, 1.0)
        else:
            rho_j = np.full(n, p.alpha, dtype=np.float64)
        one_minus_rho = 1.0 - rho_j
        mu_j_new = one_minus_rho[:, None] * mu_j + rho_j[:, None] * z
        dn = z - mu_j_new
        d2n = dn[:, 0] * dn[:, 0] + dn[:, 1] * dn[:, 1] + dn[:, 2] * dn[:, 2]
        var_j_new = np.maximum(one_minus_rho * var_j + rho_j * d2n, p.var_min)

        # Scatter updated values back; unmatched pixels get their old values
        # rewritten, which leaves them untouched.
        np.put_along_axis(w, jm_e, np.where(matched_any, w_j_new, w_j)[None, :], axis=0)
        np.put_along_axis(
            mu, jm[None, :, None], np.where(matched_any[:, None], mu_j_new, mu_j)[None, :, :], axis=0
        )
        np.put_along_axis(var, jm_e, np.where(matched_any, var_j_new, var_j)[None, :], axis=0)

        # Unmatched pixels: append while there is room, else replace the
        # lowest-weight slot (first on ties, like the scalar scan).
        um = ~matched_any
        has_room = self.live_count < k
        append_px = um & has_room
        jrep = np.argmin(w, axis=0)
        jt = np.where(append_px, self.live_count, jrep)
        jt_e = jt[None, :]

        decay_u = live & um[None, :] & (self._slots[:, None] != jt_e)
        w = np.where(decay_u, w * one_minus_alpha, w)

        w_t = np.take_along_axis(w, jt_e, axis=0)[0]
        np.put_along_axis(w, jt_e, np.where(um, p.w_init, w_t)[None, :], axis=0)
        mu_t = np.take_along_axis(mu, jt[None, :, None], axis=0)[0]
        np.put_along_axis(
            mu, jt[None, :, None], np.where(um[:, None], z, mu_t)[None, :, :], axis=0
        )
        var_t = np.take_along_axis(var, jt_e, axis=0)[0]
        np.put_along_axis(var, jt_e, np.where(um, p.var_init, var_t)[None, :], axis=0)

        new_live = np.where(append_px, self.live_count + 1, self.live_count)
        live = self._slots[:, None] < new_live[None, :]

        # Renormalize unmatched pixels. Dead slots are exactly zero, so the
        # slot-order sum equals the scalar running total.
        total = w[0].copy()
        for kk in range(1, k):
            total = total + w[kk]
        denom = np.where(um, total, 1.0)
        w = np.where(um[None, :] & live, w / denom[None, :], w)

        # Stable rank sort, dead slots last.
        rank = np.where(live, w / np.sqrt(var), -np.inf)
        order = np.argsort(-rank, axis=0, kind="stable")
        w = np.take_along_axis(w, order, axis=0)
        var = np.take_along_axis(var, order, axis=0)
        mu = np.take_along_axis(mu, order[:, :, None], axis=0)

        inv = np.empty_like(order)
        np.put_along_axis(inv, order, np.broadcast_to(self._slots[:, None], (k, n)), axis=0)
        j_abs = np.where(matched_any, jm, jt)
        pos = np.take_along_axis(inv, j_abs[None, :], axis=0)[0]

        running = np.zeros(n, dtype=np.float64)
        b = new_live.copy()
        found = np.zeros(n, dtype=bool)
        for kk in range(k):
            running = running + w[kk]
            hit = ~found & (running > p.t)
            b = np.where(hit, kk + 1, b)
            found |= hit

        labels = np.where(pos < b, BACKGROUND, FOREGROUND).astype(np.uint8)

        self.weights = w
        self.means = mu
        self.variances = var
        self.live_count = new_live
        return labels, pos, b
