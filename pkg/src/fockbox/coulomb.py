"""Periodic Coulomb interaction kernels in momentum space.

The 1/|x-y| interaction on a periodic box enters every energy formula only
through its Fourier coefficients

    3D:  V(k) = 4 pi e^2 / |k|^2        (k = 2 pi q / L, q integer vector)
    1D:  V(k) = e^2 * 2 K0(|k| a)       (softened kernel 1 / sqrt(x^2+a^2))

in units of energy * volume.  The k = 0 coefficient diverges; by default it
is set to zero, which is the usual uniform neutralizing background and only
shifts charge-sector-dependent constants.  The 1D softening length a is a
model choice (default L/100), not a property of the 3D interaction.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.special import k0 as _bessel_k0


class CoulombKernel:
    """Map from integer momentum-transfer vectors q to kernel values V(q)."""

    def __init__(self, dimension: int, box_l: float, e2: float, q0_value: float = 0.0,
                 a: float | None = None):
        if dimension not in (1, 3):
            raise ValueError("dimension must be 1 or 3")
        self.dimension = dimension
        self.box_l = float(box_l)
        self.e2 = float(e2)
        self.q0_value = float(q0_value)
        self.a = float(a) if a is not None else self.box_l / 100.0

    def value(self, q) -> float:
        """V(q) for one integer transfer vector q."""
        q = np.atleast_1d(np.asarray(q, dtype=np.int64))
        if q.size != self.dimension:
            raise ValueError(f"transfer vector has {q.size} components, expected {self.dimension}")
        q2 = float(q @ q)
        if q2 == 0.0:
            return self.q0_value
        k2 = (2.0 * np.pi / self.box_l) ** 2 * q2
        if self.dimension == 3:
            return 4.0 * np.pi * self.e2 / k2
        return self.e2 * 2.0 * float(_bessel_k0(np.sqrt(k2) * self.a))

    def table(self, q_max: int) -> dict[tuple[int, ...], float]:
        """All values on the cube |q_i| <= q_max."""
        rng = range(-q_max, q_max + 1)
        return {
            q: self.value(q)
            for q in itertools.product(rng, repeat=self.dimension)
        }

    def grid_values(self, points_per_axis: int) -> np.ndarray:
        """Kernel on the FFT frequency grid of a G^d spatial grid.

        Entry order matches numpy.fft.fftn of a density array, so the
        periodic Coulomb energy is (1/2V) sum_k V(k) |rho_hat(k)|^2.
        """
        g = int(points_per_axis)
        freqs = np.fft.fftfreq(g, d=1.0 / g).astype(np.int64)  # integer q per axis
        if self.dimension == 1:
            q2 = freqs.astype(float) ** 2
        else:
            qx, qy, qz = np.meshgrid(freqs, freqs, freqs, indexing="ij")
            q2 = (qx.astype(float) ** 2 + qy ** 2 + qz ** 2)
        k2 = (2.0 * np.pi / self.box_l) ** 2 * q2
        out = np.empty_like(k2)
        nz = k2 > 0
        if self.dimension == 3:
            out[nz] = 4.0 * np.pi * self.e2 / k2[nz]
        else:
            out[nz] = self.e2 * 2.0 * _bessel_k0(np.sqrt(k2[nz]) * self.a)
        out[~nz] = self.q0_value
        return out
