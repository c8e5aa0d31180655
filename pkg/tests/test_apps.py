import math

import numpy as np
import pytest

import axkit.apps as apps
import axkit.charac as charac
import axkit.netlist as nl
from axkit.errors import DomainError, ValidationError


@pytest.fixture(scope="module")
def table_accurate(mul8s):
    return nl.product_table(mul8s, nl.all_ones(mul8s.removable_count))


@pytest.fixture(scope="module")
def table_zeros(mul8s):
    return nl.product_table(mul8s, nl.all_zeros(mul8s.removable_count))


# ---------------------------------------------------------------------------
# bundled assets


@pytest.mark.parametrize("kind", apps.KERNEL_KINDS)
def test_kernel_assets_pinned_and_cached(kind):
    k1 = apps.make_kernel(kind)
    k2 = apps.make_kernel(kind)
    assert k1 is k2                                 # lru cache identity
    assert k1.fingerprint == apps._EXPECTED_SHA[kind]
    assert k1.kind == kind


def test_unknown_kernel_kind():
    with pytest.raises(ValidationError):
        apps.make_kernel("fft_snr")


def test_fir_asset_threshold_and_reference_peaks():
    k = apps.make_kernel("fir_peak")
    signal = k.data["signal"].astype(np.int64)
    taps = np.asarray(apps.FIR_TAPS, dtype=np.int64)
    y = np.correlate(signal, taps, mode="valid")    # independent filter path
    assert k.data["threshold"] == int(0.6 * int(y.max()))
    for p in k.data["ref_peaks"]:
        lo, hi = max(0, p - 8), min(len(y), p + 9)
        neighborhood = np.concatenate([y[lo:p], y[p + 1:hi]])
        assert y[p] >= k.data["threshold"]
        assert y[p] > neighborhood.max()


def test_gemv_asset_reference_argmax():
    k = apps.make_kernel("gemv_classify")
    scores = k.data["inputs"].astype(np.int64) @ k.data["weights"].astype(np.int64).T
    want = np.argmax(scores, axis=1)
    assert np.array_equal(k.data["ref_argmax"], want)
    assert k.data["inputs"].shape == (200, 64)
    assert k.data["weights"].shape == (10, 64)


def test_conv_asset_reference_output():
    k = apps.make_kernel("conv2d_psnr")
    img = k.data["image"].astype(np.int64)
    kern = k.data["kernel"].astype(np.int64)
    assert int(kern.sum()) == 256
    out = np.zeros((60, 60), dtype=np.int64)
    for r in range(60):
        for c in range(60):
            out[r, c] = (int((img[r:r + 5, c:c + 5] * kern).sum()) + 128) >> 8
    assert np.array_equal(k.data["ref_output"], out)


# ---------------------------------------------------------------------------
# peak bookkeeping


def test_peak_error_hand_cases():
    ref = (100, 200, 300)
    assert apps._peak_error(ref, [100, 200, 300]) == 0.0
    assert apps._peak_error(ref, [103, 197, 300]) == 0.0     # +-3 tolerance
    assert apps._peak_error(ref, [100, 200]) == pytest.approx(1 / 3)
    assert apps._peak_error(ref, [100, 200, 300, 500]) == pytest.approx(1 / 3)
    assert apps._peak_error(ref, []) == 1.0
    assert apps._peak_error(ref, [104, 200, 300]) == pytest.approx(2 / 3)


def test_detect_peaks_strict_local_max():
    y = np.zeros(40, dtype=np.int64)
    y[10] = 50                          # isolated peak
    y[20] = 50
    y[21] = 50                          # plateau: neither strictly greater
    y[35] = 30                          # below threshold
    assert apps._detect_peaks(y, 40) == [10]


# ---------------------------------------------------------------------------
# behavioral scoring


@pytest.mark.parametrize("kind", apps.KERNEL_KINDS)
def test_accurate_table_scores_zero(kind, table_accurate):
    assert apps.app_behav(apps.make_kernel(kind), table_accurate) == 0.0


def test_all_zero_table_fir_misses_everything(table_zeros):
    # zero products make the filter output flat: no peaks, all misses
    assert apps.app_behav(apps.make_kernel("fir_peak"), table_zeros) == 1.0


def test_all_zero_table_gemv_collapses_to_class_zero(table_zeros):
    k = apps.make_kernel("gemv_classify")
    got = apps.app_behav(k, table_zeros)
    want = float(np.mean(k.data["ref_argmax"] != 0))    # argmax of ties is 0
    assert got == want


def test_all_zero_table_conv_psnr_shortfall(table_zeros):
    k = apps.make_kernel("conv2d_psnr")
    got = apps.app_behav(k, table_zeros)
    ref = k.data["ref_output"].astype(np.float64)
    mse = float(((0.0 - ref) ** 2).mean())              # approx output is identically 0
    want = apps.PSNR_CAP - min(10.0 * math.log10(255.0 ** 2 / mse), apps.PSNR_CAP)
    assert got == pytest.approx(want, abs=1e-12)
    assert 0.0 < got < apps.PSNR_CAP


@pytest.mark.parametrize("kind", apps.KERNEL_KINDS)
def test_table_and_direct_paths_agree(kind, mul8s):
    rng = np.random.default_rng(17)
    kernel = apps.make_kernel(kind)
    L = mul8s.removable_count
    for _ in range(4):
        cfg = tuple(int(b) for b in rng.integers(0, 2, L))
        table = nl.product_table(mul8s, cfg)
        assert apps.app_behav(kernel, table) \
            == apps.app_behav_direct(kernel, mul8s, cfg)


def test_behav_requires_signed_8x8(mul4s):
    kernel = apps.make_kernel("fir_peak")
    table4 = nl.product_table(mul4s, nl.all_ones(mul4s.removable_count))
    with pytest.raises(DomainError):
        apps.app_behav(kernel, table4)
    with pytest.raises(DomainError):
        apps.app_behav_direct(kernel, mul4s, nl.all_ones(mul4s.removable_count))
    unsigned = nl.build_multiplier(8, signed=False)
    with pytest.raises(DomainError):
        apps.app_behav_direct(kernel, unsigned,
                              nl.all_ones(unsigned.removable_count))


def test_app_ppa_delegates_to_characterization(mul4s):
    cfg = nl.all_ones(mul4s.removable_count)
    assert apps.app_ppa(cfg, mul4s) == charac.ppa_metrics(mul4s, cfg)
