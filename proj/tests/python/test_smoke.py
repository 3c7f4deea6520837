import math
import os

import pytest

import hmts

DATA = hmts.DATA_DIR


def shipped():
    return hmts.ThresholdTable.load(
        [
            os.path.join(DATA, "dvbs2_single.csv"),
            os.path.join(DATA, "hqpsk_thresholds.csv"),
            os.path.join(DATA, "h32apsk_thresholds.csv"),
        ],
        anomalies=os.path.join(DATA, "known_anomalies.csv"),
    )


def test_constellations():
    assert hmts.qpsk_rho_he(30) == pytest.approx(0.75)
    assert hmts.apsk32_rho_he(1.6, 2.6, 28.4) == pytest.approx(0.8, abs=0.005)
    d = hmts.apsk32_barycenter_distance(1.8, 3.4, 30.2)
    assert d * d == pytest.approx(hmts.apsk32_rho_he(1.8, 3.4, 30.2), abs=1e-12)
    assert hmts.qam16_energy_ratio(2) == 9
    pts = hmts.build_apsk32_points(2.4, 5, 32.3)
    assert len(pts) == 32
    assert sum(abs(p) ** 2 for p in pts) / 32 == pytest.approx(1.0, abs=1e-12)
    assert len(hmts.build_qpsk_points(45)) == 4


def test_invalid_parameters_raise_value_error():
    with pytest.raises(ValueError):
        hmts.qpsk_rho_he(90)
    with pytest.raises(hmts.ValidationError):
        hmts.apsk32_rho_he(2.0, 1.5, 20)


def test_tables():
    t = shipped()
    assert len(t) == 28 + 198 + 110
    assert t.threshold("H_QPSK", "HE", "1/4", rho_he=0.5) == -2.6
    assert t.threshold("H_APSK32", "LE", "9/10", rho_he=0.9) == 20.8
    assert t.threshold("QPSK", "SINGLE", "1/2") == 1.0
    diags = t.validate(os.path.join(DATA, "known_anomalies.csv"))
    assert len(diags) == 1 and diags[0]["known_anomaly"]
    assert hmts.signaling_bits(11, 22) == 12
    with pytest.raises(hmts.ParseError):
        hmts.ThresholdTable.parse("")


def test_best_single_modcod():
    t = shipped()
    assert hmts.best_single_modcod(-10, t) is None
    m = hmts.best_single_modcod(1.0, t)
    assert m["family"] == "QPSK" and m["code_rate"] == "1/2"


def test_rate_optimizer():
    r = hmts.equal_rate_point([(0, 0), (2, 0), (0, 2)])
    assert r["r_hm"] == pytest.approx(1.0)
    assert r["tau"] == pytest.approx(0.5)
    assert hmts.classical_pair_rate(2, 3) == pytest.approx(1.2)
    t = shipped()
    sol = hmts.solve_pair(7, 10, t)
    assert sol["r_hm"] >= sol["r_ts"] > 0
    assert (0.0, 0.0) in hmts.achievable_pairs(1, 7, t)
    pairs, unpaired = hmts.group_receivers([1, 4, 7, 10])
    assert pairs == [(0, 3), (1, 2)] and unpaired is None
    g = hmts.system_gain([1, 3, 7, 12], t)
    assert g["gain"] >= 0
    assert hmts.system_gain([-10, -10], t)["gain"] == 0


def test_beam():
    assert hmts.bessel_j1(1.0) == pytest.approx(0.44005058574493351596, abs=1e-12)
    edge = hmts.beam_edge_angle()
    assert edge == pytest.approx(0.0058668218250460216, abs=1e-12)
    assert hmts.antenna_gain_rel(edge) == pytest.approx(10 ** -0.4, abs=1e-9)
    pop = hmts.draw_population(100, 10.0, seed=5)
    assert len(pop) == 100
    assert all(6.0 <= snr <= 10.0 for _, _, snr in pop)
    assert pop == hmts.draw_population(100, 10.0, seed=5)


def test_campaign():
    rep = hmts.run_campaign(receivers=20, repetitions=3, grid="1:3:1", families="h_qpsk", seed=3)
    assert rep["snr_max_db"] == [1.0, 2.0, 3.0]
    curve = rep["curves"]["h_qpsk"]
    assert all(g >= 0 and not math.isnan(g) for g in curve["mean_gain"])
    again = hmts.run_campaign(receivers=20, repetitions=3, grid="1:3:1", families="h_qpsk", seed=3, workers=2)
    assert again == rep
