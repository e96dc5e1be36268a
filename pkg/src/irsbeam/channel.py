"""Geometric path gains, Rayleigh fading, and sub-surface channel grouping.

The N reflecting elements are split into M sub-surfaces of N/M adjacent
elements sharing one reflection coefficient.  The extended channel stacks the
(conjugated) direct user-AP link in slot 0 followed by the M grouped cascaded
user-IRS-AP channels, so that for a reflection vector theta with theta[0]=1
the effective channel is theta^H @ h_ext.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndivisibleGrouping

# link identifiers: user-AP, user-IRS, IRS-AP
UA, UI, IA = "UA", "UI", "IA"


@dataclass(frozen=True)
class Geometry:
    """Node positions (meters) and large-scale propagation parameters."""

    user_pos: tuple[float, float, float]
    ap_pos: tuple[float, float, float]
    irs_center: tuple[float, float, float]
    pathloss_exp_ua: float = 4.5
    pathloss_exp_ui: float = 2.2
    pathloss_exp_ia: float = 2.5
    ref_gain_db: float = -30.0

    def __post_init__(self):
        for exp in (self.pathloss_exp_ua, self.pathloss_exp_ui, self.pathloss_exp_ia):
            if not 1.5 <= exp <= 6.0:
                raise ValueError(f"path loss exponent {exp} outside [1.5, 6]")
        for d in (
            self.distance(UA),
            self.distance(UI),
            self.distance(IA),
        ):
            if d <= 0.0:
                raise ValueError("all pairwise distances must be positive")

    def distance(self, link: str) -> float:
        u = np.asarray(self.user_pos, dtype=float)
        a = np.asarray(self.ap_pos, dtype=float)
        s = np.asarray(self.irs_center, dtype=float)
        ends = {UA: (u, a), UI: (u, s), IA: (s, a)}
        if link not in ends:
            raise ValueError(f"unknown link {link!r}")
        p, q = ends[link]
        return float(np.linalg.norm(p - q))


def path_gain(geometry: Geometry, link: str) -> float:
    """Linear power gain 10^(ref_db/10) * d^(-exponent) of one link."""
    exponent = {
        UA: geometry.pathloss_exp_ua,
        UI: geometry.pathloss_exp_ui,
        IA: geometry.pathloss_exp_ia,
    }[link]
    ref = 10.0 ** (geometry.ref_gain_db / 10.0)
    return ref * geometry.distance(link) ** (-exponent)


def _ccn(rng: np.random.Generator, variance: float, size) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with the given variance."""
    std = np.sqrt(variance / 2.0)
    return std * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def sample_channels(
    geometry: Geometry, n_elements: int, rng: np.random.Generator
) -> tuple[complex, np.ndarray, np.ndarray]:
    """Draw one Rayleigh-fading realization of all links.

    Returns (h_ua, h_ui_elems, h_ia_elems): the direct user-AP scalar and the
    per-element user-IRS / IRS-AP coefficients, each CN(0, link path gain).
    """
    if n_elements < 1:
        raise ValueError("n_elements must be at least 1")
    h_ua = complex(_ccn(rng, path_gain(geometry, UA), ()))
    h_ui = _ccn(rng, path_gain(geometry, UI), n_elements)
    h_ia = _ccn(rng, path_gain(geometry, IA), n_elements)
    return h_ua, h_ui, h_ia


@dataclass(frozen=True)
class ChannelRealization:
    """Direct, per-element, grouped, and extended channels of one fading block."""

    h_ua: complex
    h_ui_elems: np.ndarray
    h_ia_elems: np.ndarray
    h_r: np.ndarray = field(repr=False)
    h_ext: np.ndarray = field(repr=False)

    @property
    def m_groups(self) -> int:
        return self.h_r.shape[0]

    @property
    def n_elements(self) -> int:
        return self.h_ui_elems.shape[0]


def group_channels(
    h_ua: complex,
    h_ui_elems: np.ndarray,
    h_ia_elems: np.ndarray,
    m_groups: int,
) -> ChannelRealization:
    """Aggregate element channels into M grouped cascaded channels.

    h_r[m] sums conj(h_ia)*h_ui over the m-th block of N/M adjacent elements;
    h_ext = [conj(h_ua), h_r].
    """
    h_ui = np.asarray(h_ui_elems, dtype=np.complex128)
    h_ia = np.asarray(h_ia_elems, dtype=np.complex128)
    n = h_ui.shape[0]
    if h_ia.shape[0] != n:
        raise ValueError("h_ui_elems and h_ia_elems must have equal length")
    if m_groups < 1 or n % m_groups != 0:
        raise IndivisibleGrouping(f"M={m_groups} does not divide N={n}")
    cascade = np.conj(h_ia) * h_ui
    h_r = cascade.reshape(m_groups, n // m_groups).sum(axis=1)
    h_ext = np.concatenate([[np.conj(h_ua)], h_r])
    return ChannelRealization(
        h_ua=complex(h_ua),
        h_ui_elems=h_ui,
        h_ia_elems=h_ia,
        h_r=h_r,
        h_ext=h_ext,
    )
