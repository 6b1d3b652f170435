"""Downlink channel model: Shannon rates, eavesdropping, secrecy, and the
concave surrogate used by the successive-convex-approximation loop.

All arithmetic here is in linear SI units (W, Hz, bits/s).  dB/dBm
conversions are centralized in this module; nothing else in the package
converts units.  Every function broadcasts over numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditionError, DomainError

LN2 = float(np.log(2.0))

# Bandwidth floor (Hz) below which the B*log2(1+c/B) forms are treated as a
# domain error; the inner solvers never search below it.
B_FLOOR = 1.0


def db_to_linear(db):
    """10^(db/10)."""
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)


def linear_to_db(lin):
    """10*log10(lin)."""
    return 10.0 * np.log10(lin)


def dbm_to_watt(dbm):
    """Transmit powers quoted in dBm -> W."""
    return np.power(10.0, (np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watt_to_dbm(watt):
    return 10.0 * np.log10(watt) + 30.0


@dataclass(frozen=True)
class LinkParams:
    """Per-user link constants.

    h               linear channel power gain of the legitimate link
    noise_var       effective noise power spectral density (W/Hz)
    eve_p           eavesdropper-link transmit power (W); 0 disables the tap
    eve_h           eavesdropper channel gain
    eve_noise_var   eavesdropper noise density (W/Hz)
    """

    h: float
    noise_var: float
    eve_p: float
    eve_h: float
    eve_noise_var: float

    def __post_init__(self):
        if self.h <= 0 or self.noise_var <= 0 or self.eve_h <= 0 or self.eve_noise_var <= 0:
            raise DomainError("link gains and noise densities must be strictly positive")
        if self.eve_p < 0:
            raise DomainError("eavesdropper power must be non-negative")

    @property
    def snr_coeff(self) -> float:
        """p * snr_coeff / B is the legitimate SNR at power p, bandwidth B."""
        return self.h / self.noise_var

    @property
    def eve_snr_product(self) -> float:
        """eve_snr_product / B is the eavesdropper SNR at bandwidth B."""
        return self.eve_p * self.eve_h / self.eve_noise_var

    @property
    def min_power_threshold(self) -> float:
        """Smallest power with a non-negative secrecy rate at every bandwidth."""
        return self.noise_var * self.eve_h * self.eve_p / (self.eve_noise_var * self.h)


@dataclass(frozen=True)
class ScaAnchor:
    """Bandwidth at the current linearization point of the eavesdropping rate."""

    b_anchor: float

    def __post_init__(self):
        if self.b_anchor <= 0:
            raise DomainError("anchor bandwidth must be positive")


def path_loss_db(distance_km):
    """Cellular path loss 128.1 + 37.6*log10(d_km) in dB.

    Parameters
    ----------
    distance_km : float or ndarray
        Transmitter-receiver distance in kilometres, strictly positive.
    """
    distance_km = np.asarray(distance_km, dtype=float)
    if np.any(distance_km <= 0):
        raise DomainError("distance must be positive")
    out = 128.1 + 37.6 * np.log10(distance_km)
    return float(out) if out.ndim == 0 else out


def gain_from_loss(loss_db, shadow_db=0.0):
    """Linear channel power gain 10^(-(loss+shadow)/10).

    The shadow term is a sample of zero-mean log-normal shadowing in dB,
    drawn upstream by the scenario generator.
    """
    out = np.power(10.0, -(np.asarray(loss_db, dtype=float) + np.asarray(shadow_db, dtype=float)) / 10.0)
    return float(out) if out.ndim == 0 else out


def _check_bandwidth(B):
    if np.any(np.asarray(B) < B_FLOOR):
        raise DomainError(f"bandwidth below the {B_FLOOR} Hz floor")


def rate(p, B, link: LinkParams):
    """Shannon rate B*log2(1 + p*h/(noise_var*B)) in bits/s.

    Parameters
    ----------
    p : float or ndarray
        Transmit power (W), non-negative.
    B : float or ndarray
        Allocated bandwidth (Hz), at least ``B_FLOOR``.
    """
    _check_bandwidth(B)
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise DomainError("power must be non-negative")
    B = np.asarray(B, dtype=float)
    out = B * np.log1p(p * link.snr_coeff / B) / LN2
    return float(out) if out.ndim == 0 else out


def eavesdrop_rate(B, link: LinkParams):
    """Eavesdropping rate B*log2(1 + eve_p*eve_h/(eve_noise_var*B)) in bits/s."""
    _check_bandwidth(B)
    B = np.asarray(B, dtype=float)
    out = B * np.log1p(link.eve_snr_product / B) / LN2
    return float(out) if out.ndim == 0 else out


def secrecy_rate(p, B, link: LinkParams, user: int | None = None):
    """Secrecy rate: legitimate rate minus eavesdropping rate on the same band.

    Non-negative whenever p is at or above ``link.min_power_threshold``;
    powers below the threshold raise :class:`ConditionError` because the
    difference would be negative on every bandwidth.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p < link.min_power_threshold):
        who = "" if user is None else f" for user {user}"
        raise ConditionError(
            f"power below the minimum-power threshold {link.min_power_threshold:.6g} W{who}; "
            "the secrecy rate would be negative"
        )
    out = rate(p, B, link) - eavesdrop_rate(B, link)
    return float(out) if np.ndim(out) == 0 else out


def _slope_of_blog(x):
    """d/dB of B*log2(1 + c/B) expressed through x = c/B:
    log2(1+x) - x/(ln2*(1+x)).  Series branch avoids cancellation at tiny x."""
    x = np.asarray(x, dtype=float)
    small = x < 1e-5
    with np.errstate(invalid="ignore"):
        direct = (np.log1p(x) - x / (1.0 + x)) / LN2
    series = (0.5 * x * x - (2.0 / 3.0) * x**3) / LN2
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def d_rate_dp(p, B, link: LinkParams):
    """Partial of ``rate`` in p: h/(noise_var*ln2*(1+x)) with x = p*h/(noise_var*B)."""
    _check_bandwidth(B)
    x = np.asarray(p, dtype=float) * link.snr_coeff / np.asarray(B, dtype=float)
    out = link.snr_coeff / (LN2 * (1.0 + x))
    return float(out) if np.ndim(out) == 0 else out


def d_rate_dB(p, B, link: LinkParams):
    """Partial of ``rate`` in B: log2(1+x) - x/(ln2*(1+x))."""
    _check_bandwidth(B)
    x = np.asarray(p, dtype=float) * link.snr_coeff / np.asarray(B, dtype=float)
    return _slope_of_blog(x)


def d_eavesdrop_dB(B, link: LinkParams):
    """Partial of ``eavesdrop_rate`` in B, same form with eavesdropper constants."""
    _check_bandwidth(B)
    x = link.eve_snr_product / np.asarray(B, dtype=float)
    return _slope_of_blog(x)


def surrogate_rate(p, B, link: LinkParams, anchor: ScaAnchor):
    """Concave lower bound on the secrecy rate.

    The eavesdropping term is replaced by its first-order expansion around
    ``anchor.b_anchor``; because that term is concave in B the expansion
    over-estimates it, so the surrogate never exceeds the true secrecy rate
    and matches it exactly at the anchor.
    """
    _check_bandwidth(B)
    b0 = anchor.b_anchor
    tangent = eavesdrop_rate(b0, link) + d_eavesdrop_dB(b0, link) * (np.asarray(B, dtype=float) - b0)
    out = rate(p, B, link) - tangent
    return float(out) if np.ndim(out) == 0 else out


def d_surrogate_dp(p, B, link: LinkParams, anchor: ScaAnchor):
    """Partial of ``surrogate_rate`` in p (the tangent term has none)."""
    return d_rate_dp(p, B, link)


def d_surrogate_dB(p, B, link: LinkParams, anchor: ScaAnchor):
    """Partial of ``surrogate_rate`` in B."""
    out = d_rate_dB(p, B, link) - d_eavesdrop_dB(anchor.b_anchor, link)
    return float(out) if np.ndim(out) == 0 else out
