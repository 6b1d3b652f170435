import numpy as np
import pytest

from secomm import channel
from secomm.channel import LinkParams, ScaAnchor
from secomm.errors import ConditionError, DomainError
from conftest import NOISE, make_link


def test_path_loss_reference_points():
    assert channel.path_loss_db(1.0) == pytest.approx(128.1, abs=1e-12)
    assert channel.path_loss_db(0.1) == pytest.approx(90.5, abs=1e-12)
    # frozen from a high-precision evaluation of the formula
    assert channel.path_loss_db(0.5) == pytest.approx(116.78127216303431, abs=1e-3)


def test_path_loss_rejects_nonpositive_distance():
    with pytest.raises(DomainError):
        channel.path_loss_db(0.0)
    with pytest.raises(DomainError):
        channel.path_loss_db(-2.0)


def test_gain_from_loss():
    assert channel.gain_from_loss(0.0, 0.0) == pytest.approx(1.0)
    assert channel.gain_from_loss(10.0, 0.0) == pytest.approx(0.1)
    # 10^(-9.37), frozen from a high-precision oracle
    assert channel.gain_from_loss(90.5, 3.2) == pytest.approx(4.265795188015927e-10, rel=1e-13)


def test_rate_trivial_points():
    link = make_link(h=1e-11)
    # engineer p so that the SNR is exactly 1 at B = 1e6
    b = 1e6
    p = link.noise_var * b / link.h
    assert channel.rate(p, b, link) == pytest.approx(1e6, rel=1e-12)
    assert channel.rate(0.0, 123456.0, link) == 0.0
    b2 = 2e6
    p3 = 3.0 * link.noise_var * b2 / link.h
    assert channel.rate(p3, b2, link) == pytest.approx(4e6, rel=1e-12)


def test_rate_domain_errors():
    link = make_link()
    with pytest.raises(DomainError):
        channel.rate(1.0, 0.0, link)
    with pytest.raises(DomainError):
        channel.rate(-1.0, 1e6, link)


def test_eavesdrop_rate_points():
    b = 1e6
    eve_p = NOISE * b / 1e-11  # eavesdropper SNR = 1 at b
    link = LinkParams(h=1e-11, noise_var=NOISE, eve_p=eve_p, eve_h=1e-11, eve_noise_var=NOISE)
    assert channel.eavesdrop_rate(b, link) == pytest.approx(1e6, rel=1e-12)
    silent = LinkParams(h=1e-11, noise_var=NOISE, eve_p=0.0, eve_h=1e-11, eve_noise_var=NOISE)
    assert channel.eavesdrop_rate(b, silent) == 0.0
    link2 = LinkParams(h=1e-11, noise_var=NOISE, eve_p=3e6 * NOISE / 1e-11, eve_h=1e-11, eve_noise_var=NOISE)
    assert channel.eavesdrop_rate(1e6, link2) == pytest.approx(2e6, rel=1e-12)


def test_secrecy_rate_symmetric_links_cancel():
    b = 5e5
    p = 0.01
    eve_p = p  # identical SNR-per-Hz on both links
    link = LinkParams(h=1e-11, noise_var=NOISE, eve_p=eve_p, eve_h=1e-11, eve_noise_var=NOISE)
    assert channel.secrecy_rate(p, b, link) == pytest.approx(0.0, abs=1e-6)


def test_secrecy_rate_no_eavesdropper_equals_rate():
    link = LinkParams(h=1e-11, noise_var=NOISE, eve_p=0.0, eve_h=1e-11, eve_noise_var=NOISE)
    assert channel.secrecy_rate(0.02, 7e5, link) == pytest.approx(channel.rate(0.02, 7e5, link), rel=1e-15)


def test_secrecy_rate_log_difference():
    b = 1e6
    link = LinkParams(h=1e-11, noise_var=NOISE, eve_p=1e6 * NOISE / 1e-11, eve_h=1e-11, eve_noise_var=NOISE)
    p = 3e6 * NOISE * 1.0 / 1e-11  # legitimate SNR*B = 3e6 -> SNR = 3 at b
    assert channel.secrecy_rate(p, b, link) == pytest.approx(1e6, rel=1e-12)


def test_secrecy_rate_condition_violation_names_user():
    link = make_link(eve_ratio=0.5, p_min=1e-3)
    with pytest.raises(ConditionError, match="user 4"):
        channel.secrecy_rate(link.min_power_threshold * 0.5, 1e6, link, user=4)


def test_surrogate_equals_secrecy_at_anchor():
    link = make_link()
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = rng.uniform(1e-3, 1.0)
        b = rng.uniform(1e3, 5e6)
        anchor = ScaAnchor(b)
        assert channel.surrogate_rate(p, b, link, anchor) == pytest.approx(
            channel.secrecy_rate(p, b, link), rel=1e-9)


def test_surrogate_without_eavesdropper_is_plain_rate():
    link = LinkParams(h=1e-11, noise_var=NOISE, eve_p=0.0, eve_h=1e-11, eve_noise_var=NOISE)
    anchor = ScaAnchor(3e5)
    for b in (1e4, 2e5, 4e6):
        assert channel.surrogate_rate(0.05, b, link, anchor) == pytest.approx(
            channel.rate(0.05, b, link), rel=1e-15)


def test_surrogate_majorized_by_secrecy_rate():
    # tangent to a concave eavesdropping rate over-estimates it everywhere
    rng = np.random.default_rng(1)
    link = make_link(eve_ratio=0.3)
    for _ in range(1000):
        p = rng.uniform(link.min_power_threshold, 1.0)
        b = rng.uniform(1e3, 5e6)
        b0 = rng.uniform(1e3, 5e6)
        s_rate = channel.secrecy_rate(p, b, link)
        surr = channel.surrogate_rate(p, b, link, ScaAnchor(b0))
        assert surr <= s_rate + 1e-9 * max(abs(s_rate), 1.0)


def test_surrogate_concavity_in_p_and_b():
    rng = np.random.default_rng(2)
    link = make_link(eve_ratio=0.3)
    anchor = ScaAnchor(8e5)
    for _ in range(1000):
        p1, p2 = rng.uniform(1e-3, 1.0, 2)
        b1, b2 = rng.uniform(1e3, 5e6, 2)
        lam = rng.uniform(0.05, 0.95)
        mid = channel.surrogate_rate(lam * p1 + (1 - lam) * p2, lam * b1 + (1 - lam) * b2, link, anchor)
        chord = lam * channel.surrogate_rate(p1, b1, link, anchor) \
            + (1 - lam) * channel.surrogate_rate(p2, b2, link, anchor)
        scale = abs(mid) + abs(chord) + 1.0
        assert mid >= chord - 1e-9 * scale


def test_secrecy_rate_neither_convex_nor_concave():
    # frozen witness pairs: midpoint above the chord breaks convexity,
    # midpoint below the chord breaks concavity
    link = LinkParams(h=1e-11, noise_var=NOISE, eve_p=1e-4, eve_h=1e-11, eve_noise_var=NOISE)

    def gap(x1, x2):
        fm = channel.secrecy_rate(0.5 * (x1[0] + x2[0]), 0.5 * (x1[1] + x2[1]), link)
        f1 = channel.secrecy_rate(*x1, link)
        f2 = channel.secrecy_rate(*x2, link)
        return (fm - 0.5 * (f1 + f2)) / (abs(f1) + abs(f2))

    convexity_breakers = [
        ((0.805198, 1031135.8), (0.808133, 572316.96)),
        ((0.054877, 817537.94), (0.383986, 91505.113)),
    ]
    concavity_breakers = [
        ((0.872323, 1415283.6), (0.019499, 3398.1675)),
        ((0.823429, 810792.21), (0.158102, 147873.15)),
    ]
    for x1, x2 in convexity_breakers:
        assert gap(x1, x2) > 1e-4, "expected the midpoint above the chord"
    for x1, x2 in concavity_breakers:
        assert gap(x1, x2) < -1e-4, "expected the midpoint below the chord"


def test_analytic_derivatives_match_finite_differences():
    from secomm.oracle import finite_diff
    rng = np.random.default_rng(3)
    link = make_link(eve_ratio=0.3)
    anchor = ScaAnchor(5e5)
    for _ in range(1000):
        p = rng.uniform(1e-3, 1.0)
        b = rng.uniform(1e4, 5e6)
        dp, _ = finite_diff(lambda x: channel.rate(x[0], b, link), np.array([p]), unit=1e-3)
        assert dp == pytest.approx(channel.d_rate_dp(p, b, link), rel=1e-6)
        db, _ = finite_diff(lambda x: channel.rate(p, x[0], link), np.array([b]), unit=1e3)
        assert db == pytest.approx(channel.d_rate_dB(p, b, link), rel=1e-6)
        de, _ = finite_diff(lambda x: channel.eavesdrop_rate(x[0], link), np.array([b]), unit=1e3)
        assert de == pytest.approx(channel.d_eavesdrop_dB(b, link), rel=1e-6, abs=1e-15)
        assert channel.d_surrogate_dp(p, b, link, anchor) == channel.d_rate_dp(p, b, link)


def test_derivative_trivial_points():
    link = make_link()
    assert channel.d_rate_dp(0.0, 1e6, link) == pytest.approx(link.h / (link.noise_var * np.log(2)), rel=1e-12)
    assert channel.d_rate_dB(0.0, 1e6, link) == 0.0


def test_rates_finite_on_domain():
    rng = np.random.default_rng(4)
    link = make_link(eve_ratio=0.5)
    for _ in range(200):
        p = rng.uniform(link.min_power_threshold, 10.0)
        b = rng.uniform(1.0, 1e7)
        vals = [
            channel.rate(p, b, link),
            channel.eavesdrop_rate(b, link),
            channel.secrecy_rate(p, b, link),
            channel.surrogate_rate(p, b, link, ScaAnchor(rng.uniform(1.0, 1e7))),
        ]
        assert all(np.isfinite(v) for v in vals)


def test_link_params_validation():
    with pytest.raises(DomainError):
        LinkParams(h=0.0, noise_var=NOISE, eve_p=0.0, eve_h=1e-11, eve_noise_var=NOISE)
    with pytest.raises(DomainError):
        LinkParams(h=1e-11, noise_var=NOISE, eve_p=-1.0, eve_h=1e-11, eve_noise_var=NOISE)
    with pytest.raises(DomainError):
        ScaAnchor(0.0)


def test_unit_conversions():
    assert channel.dbm_to_watt(30.0) == pytest.approx(1.0, rel=1e-12)
    assert channel.dbm_to_watt(0.0) == pytest.approx(1e-3, rel=1e-12)
    assert channel.watt_to_dbm(10.0) == pytest.approx(40.0, abs=1e-12)
    assert channel.db_to_linear(3.0) == pytest.approx(10 ** 0.3, rel=1e-12)
    assert channel.linear_to_db(100.0) == pytest.approx(20.0, abs=1e-12)
