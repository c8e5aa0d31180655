import itertools

import pytest

import axkit.dataset as ds
import axkit.netlist as nl
from axkit.errors import CapacityError, ValidationError


# ---------------------------------------------------------------------------
# sampling


def test_exhaustive_random_request_enumerates_everything():
    configs = ds.sample_random(L=5, n=32, seed=0)
    assert len(configs) == 32
    assert set(configs) == set(itertools.product((0, 1), repeat=5))
    assert configs == sorted(configs)          # lexicographic enumeration


def test_random_sampling_reproducible_and_distinct():
    a = ds.sample_random(L=12, n=100, seed=7)
    b = ds.sample_random(L=12, n=100, seed=7)
    c = ds.sample_random(L=12, n=100, seed=8)
    assert a == b
    assert a != c
    assert len(set(a)) == 100


def test_oversampling_rejected():
    with pytest.raises(CapacityError):
        ds.sample_random(L=4, n=17, seed=0)


def test_patterns_include_corners_and_structured_runs():
    plan = ds.SamplingPlan(pattern_families=ds.PATTERN_FAMILIES,
                           window_sizes=(1, 2))
    configs = ds.sample_patterns(8, plan)
    assert configs[0] == nl.all_ones(8)
    assert configs[1] == nl.all_zeros(8)
    assert len(configs) == len(set(configs))
    for w in (1, 2):
        for off in range(8 - w + 1):
            run_of_zeros = tuple(0 if off <= i < off + w else 1 for i in range(8))
            assert run_of_zeros in configs
            run_of_ones = tuple(1 if off <= i < off + w else 0 for i in range(8))
            assert run_of_ones in configs


def test_plan_validation():
    with pytest.raises(ValidationError):
        ds.SamplingPlan(pattern_families=("nope",)).validate(8)
    with pytest.raises(ValidationError):
        ds.SamplingPlan(n_random=-1).validate(8)
    with pytest.raises(ValidationError):
        ds.SamplingPlan(window_sizes=(0,)).validate(8)


def test_build_dataset_full_space(full4_dataset):
    assert len(full4_dataset.records) == 1024
    configs = full4_dataset.configs()
    assert len(set(configs)) == 1024
    assert full4_dataset.L == 10
    assert full4_dataset.provenance == "combined"


def test_dataset_maxima_are_attained(full4_dataset):
    p_max, b_max = full4_dataset.maxima("pdplut", "avg_abs_rel_err")
    assert p_max == max(r.ppa.pdplut for r in full4_dataset.records)
    assert b_max == max(r.behav.avg_abs_rel_err for r in full4_dataset.records)
    assert p_max > 0 and b_max > 0


# ---------------------------------------------------------------------------
# CSV round trip


@pytest.fixture()
def small_dataset(mul4s):
    plan = ds.SamplingPlan(n_random=20, seed=3, pattern_families=(),
                           window_sizes=(1,))
    return ds.build_dataset(mul4s, plan)


def test_csv_round_trip_preserves_records(tmp_path, small_dataset):
    path = tmp_path / "data.csv"
    ds.save_csv(small_dataset, path)
    loaded = ds.ingest_csv(path, small_dataset.L)
    assert loaded.provenance == "ingested"
    assert len(loaded.records) == len(small_dataset.records)
    for got, want in zip(loaded.records, small_dataset.records):
        assert got == want                      # repr() floats survive exactly


def test_saved_csv_is_byte_stable(tmp_path, small_dataset):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    ds.save_csv(small_dataset, p1)
    ds.save_csv(small_dataset, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_csv_header_contract(tmp_path, small_dataset):
    path = tmp_path / "data.csv"
    ds.save_csv(small_dataset, path)
    header = path.read_text().splitlines()[0]
    assert header == ("config,avg_abs_err,avg_abs_rel_err,prob_err,max_abs_err,"
                      "power,cpd,luts,pdp,pdplut,source")


def _write_csv(tmp_path, rows):
    path = tmp_path / "bad.csv"
    path.write_text("\n".join([",".join(ds.CSV_HEADER)] + rows) + "\n")
    return path


GOOD_ROW = "1111111111,0.0,0.0,0.0,0.0,10.3,5.1,10,52.53,525.3,simulated"


def test_ingest_reports_line_numbers(tmp_path):
    bad_field_count = _write_csv(tmp_path, [GOOD_ROW, "0000000000,1.0"])
    with pytest.raises(ValidationError, match="line 3"):
        ds.ingest_csv(bad_field_count, 10)

    bad_config = _write_csv(
        tmp_path, [GOOD_ROW.replace("1111111111", "11x1111111")])
    with pytest.raises(ValidationError, match="line 2"):
        ds.ingest_csv(bad_config, 10)

    wrong_length = _write_csv(tmp_path, [GOOD_ROW.replace("1111111111", "111")])
    with pytest.raises(ValidationError, match="line 2"):
        ds.ingest_csv(wrong_length, 10)

    duplicate = _write_csv(tmp_path, [GOOD_ROW, GOOD_ROW])
    with pytest.raises(ValidationError, match="line 3"):
        ds.ingest_csv(duplicate, 10)

    bad_float = _write_csv(tmp_path, [GOOD_ROW.replace("52.53", "NOPE")])
    with pytest.raises(ValidationError, match="line 2"):
        ds.ingest_csv(bad_float, 10)

    negative = _write_csv(tmp_path, [GOOD_ROW.replace(",10,", ",-10,")])
    with pytest.raises(ValidationError, match="line 2"):
        ds.ingest_csv(negative, 10)

    bad_prob = GOOD_ROW.split(",")
    bad_prob[3] = "150.0"
    with pytest.raises(ValidationError, match="line 2"):
        ds.ingest_csv(_write_csv(tmp_path, [",".join(bad_prob)]), 10)

    bad_source = _write_csv(tmp_path, [GOOD_ROW.replace("simulated", "guessed")])
    with pytest.raises(ValidationError, match="line 2"):
        ds.ingest_csv(bad_source, 10)


def test_ingest_rejects_wrong_header(tmp_path):
    path = tmp_path / "hdr.csv"
    path.write_text("config,power\n")
    with pytest.raises(ValidationError):
        ds.ingest_csv(path, 10)


def test_inconsistent_derived_metrics_flagged_not_fatal(tmp_path):
    row = "1111111111,0.0,0.0,0.0,0.0,2.0,3.0,10,6.0,999.0,simulated"
    path = _write_csv(tmp_path, [row])
    data = ds.ingest_csv(path, 10)
    assert len(data.records) == 1
    assert data.records[0].warnings                 # pdplut != pdp * luts
    assert "pdplut" in data.records[0].warnings[0]
