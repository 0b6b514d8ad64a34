import json
import math

import numpy as np
import pytest

from skc.bench import (RECORD_FIELDS, fit_exponents, length_exponent, order_estimates,
                       records_to_json, records_to_tsv, run_bench)
from skc.gates import evaluate, parse_sequence
from skc.linalg import haar_unitary, op_norm_distance


@pytest.fixture(scope="module")
def small_bench(ct_net16):
    return run_bench(ct_net16, samples=3, n_max=3, seed=5, c_fit=1.4)


def test_single_row(ct_net16):
    res = run_bench(ct_net16, samples=1, n_max=0, seed=0)
    assert len(res.records) == 1
    assert res.records[0].n == 0
    text = records_to_tsv(res)
    assert text.splitlines()[0].split("\t") == list(RECORD_FIELDS)
    assert len([ln for ln in text.splitlines() if not ln.startswith("#")]) == 2


def test_one_record_per_target_and_depth(small_bench):
    keys = [(r.target_id, r.n) for r in small_bench.records]
    assert keys == [(t, n) for t in range(3) for n in range(4)]


def test_measured_eps_recomputable_from_sequence(ct_net16, small_bench):
    rng = np.random.default_rng(5)
    targets = [haar_unitary(2, rng) for _ in range(3)]
    for r in small_bench.records:
        seq = parse_sequence(r.sequence, ct_net16.iset)
        assert len(seq) == r.simplified_length
        assert op_norm_distance(evaluate(seq, ct_net16.iset), targets[r.target_id]) == pytest.approx(
            r.measured_eps, abs=1e-12)


def test_predictions_use_fit(ct_net16, small_bench):
    from skc.engine import predict_eps

    for r in small_bench.records:
        assert r.predicted_eps == pytest.approx(predict_eps(ct_net16.measured_eps0, r.n, 1.4))
    assert small_bench.fits["c_fit"] == 1.4


def test_seeded_runs_identical(ct_net16):
    a = run_bench(ct_net16, samples=2, n_max=2, seed=9)
    b = run_bench(ct_net16, samples=2, n_max=2, seed=9)
    assert records_to_tsv(a) == records_to_tsv(b)
    assert json.dumps(records_to_json(a)) == json.dumps(records_to_json(b))


def test_timings_only_on_request(small_bench):
    assert "level_wall_times" not in records_to_tsv(small_bench)
    assert "level_wall_times" in records_to_tsv(small_bench, timings=True)
    assert "level_wall_times" not in records_to_json(small_bench)["records"][0]
    assert "level_wall_times" in records_to_json(small_bench, timings=True)["records"][0]


def test_json_schema(small_bench):
    doc = records_to_json(small_bench)
    assert set(doc) == {"records", "fits"}
    assert set(doc["records"][0]) == set(RECORD_FIELDS) | {"sequence"}
    assert set(doc["fits"]) == {"length_exponent_simplified", "length_exponent_raw", "order_mean",
                                "order_per_level", "decrease_fraction", "c_fit"}


def test_bad_arguments(ct_net16):
    with pytest.raises(ValueError):
        run_bench(ct_net16, samples=0, n_max=1)
    with pytest.raises(ValueError):
        run_bench(ct_net16, samples=1, n_max=-1)


def test_length_exponent_recovers_synthetic_slope():
    # l = 5^n with ln(1/eps) = 2 * 1.5^n gives slope ln 5 / ln 1.5
    ns = np.arange(6)
    lengths = 5.0 ** ns
    eps = np.exp(-2 * 1.5 ** ns)
    assert length_exponent(lengths, eps) == pytest.approx(math.log(5) / math.log(1.5))


def test_length_exponent_degenerate():
    assert length_exponent([10], [0.1]) is None
    assert length_exponent([10, 20], [1e-12, 1e-13]) is None


def test_order_estimates():
    ladder = [1e-1, 1e-1 ** 1.5, 1e-1 ** 2.25, 1e-20]
    assert order_estimates(ladder) == pytest.approx([1.5, 1.5])


def test_fit_exponents_decrease_fraction(small_bench):
    fits = fit_exponents(small_bench.records)
    pairs = [(a, b) for a, b in zip(small_bench.records, small_bench.records[1:]) if a.target_id == b.target_id]
    expected = sum(b.measured_eps < a.measured_eps for a, b in pairs) / len(pairs)
    assert fits["decrease_fraction"] == pytest.approx(expected)


def test_figures(small_bench, tmp_path):
    pytest.importorskip("matplotlib")
    from skc.plotting import render_bench_figures

    paths = render_bench_figures(small_bench, tmp_path / "figs")
    assert [p.rsplit("/", 1)[-1] for p in paths] == ["error_vs_depth.png", "length_vs_accuracy.png"]
    for p in paths:
        with open(p, "rb") as f:
            assert f.read(8) == b"\x89PNG\r\n\x1a\n"
