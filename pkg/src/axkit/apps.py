"""Application-level behavioral evaluation of approximate multipliers.

Three kernels drive every multiply through a signed 8x8 product table and
score the application-visible damage:

* fir_peak — low-pass filter a synthetic quasi-periodic pulse train, detect
  peaks (strict local maximum in a +-8 window over a fixed absolute
  threshold), and report (missed + spurious) / reference peak count with
  +-3-sample matching tolerance.
* gemv_classify — a fixed 10-class linear layer over 200 bundled feature
  vectors; score is the top-1 disagreement rate against the exact-arithmetic
  argmax (ties resolve to the lowest class index).
* conv2d_psnr — 5x5 integer Gaussian smoothing of one bundled 64x64 image;
  score is the PSNR shortfall 90 dB - PSNR(exact, approximate), 0 when the
  images are identical.

All inputs are generated by a fixed linear congruential generator and pinned
by SHA-256 fingerprints, so the bundled data cannot drift silently.
Accumulation is 64-bit; the convolution output is renormalized by
(acc + 128) >> 8 (the kernel weights sum to 256).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import charac
from . import netlist as nl
from .errors import DomainError, ValidationError

KERNEL_KINDS = ("fir_peak", "gemv_classify", "conv2d_psnr")
ASSET_VERSION = "v1"
PSNR_CAP = 90.0
PEAK_HALF_WINDOW = 8
PEAK_MATCH_TOL = 3
FIR_TAPS = (1, 2, 4, 6, 8, 9, 8, 6, 4, 2, 1)
GAUSS_ROW = (1, 4, 6, 4, 1)

_EXPECTED_SHA = {
    "fir_peak": "ee63a37d6d29e7f6c569eaa21ccc66113f8b18ca52d41a164fd8a5c7c0567893",
    "gemv_classify": "35bf34382a83df1b35aa28b5b5abc040287093152169ef554a36518f6dae3d69",
    "conv2d_psnr": "0fdd11dbee8998b6623ef05ef0c6f15d5e6dedf39a32299fbfa19c5afac8c77f",
}


class _Lcg:
    """Fixed 32-bit linear congruential generator for bundled asset data."""

    def __init__(self, seed: int):
        self.state = seed & 0xFFFFFFFF

    def next_raw(self) -> int:
        self.state = (1664525 * self.state + 1013904223) & 0xFFFFFFFF
        return self.state

    def int_in(self, lo: int, hi: int) -> int:
        return lo + (self.next_raw() >> 16) % (hi - lo + 1)


@dataclass(frozen=True)
class AppKernel:
    kind: str
    data: dict
    fingerprint: str


def _fingerprint(kind: str, arrays: list[np.ndarray]) -> str:
    h = hashlib.sha256()
    h.update(f"{kind}:{ASSET_VERSION}".encode())
    for arr in arrays:
        h.update(np.ascontiguousarray(arr).tobytes())
    return h.hexdigest()


def _exact_products(a, b) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)


# ---------------------------------------------------------------------------
# asset generation


def _build_fir() -> dict:
    lcg = _Lcg(0xF17)
    n = 2048
    template = (0, 10, 24, 46, 72, 96, 110, 96, 72, 46, 24, 10, 0)
    signal = np.zeros(n, dtype=np.int64)
    pos = 30
    while pos + len(template) < n:
        amp = lcg.int_in(80, 100)
        for k, t in enumerate(template):
            signal[pos + k] += (t * amp) // 100
        pos += 160 + lcg.int_in(-10, 10)
    for k in range(n):
        signal[k] += lcg.int_in(-6, 6)
    signal = np.clip(signal, -128, 127).astype(np.int8)

    taps = np.array(FIR_TAPS, dtype=np.int8)
    y_exact = _fir_outputs(signal, taps, _exact_products)
    threshold = int(0.6 * int(y_exact.max()))
    ref_peaks = _detect_peaks(y_exact, threshold)
    if not ref_peaks:
        raise ValidationError("fir_peak asset produced no reference peaks")
    return {"signal": signal, "taps": taps, "threshold": threshold,
            "ref_peaks": tuple(ref_peaks)}


def _build_gemv() -> dict:
    lcg = _Lcg(0x6E37)
    n_classes, n_feat, n_samples = 10, 64, 200
    weights = np.array([[lcg.int_in(-60, 60) for _ in range(n_feat)]
                        for _ in range(n_classes)], dtype=np.int8)
    labels = np.array([lcg.int_in(0, n_classes - 1) for _ in range(n_samples)],
                      dtype=np.int64)
    inputs = np.zeros((n_samples, n_feat), dtype=np.int64)
    for s in range(n_samples):
        proto = weights[labels[s]].astype(np.int64)
        for k in range(n_feat):
            inputs[s, k] = (proto[k] * 3) // 4 + lcg.int_in(-20, 20)
    inputs = np.clip(inputs, -128, 127).astype(np.int8)
    scores = _gemv_scores(weights, inputs, _exact_products)
    ref_argmax = np.argmax(scores, axis=1)
    return {"weights": weights, "inputs": inputs,
            "ref_argmax": ref_argmax.astype(np.int64)}


def _build_conv() -> dict:
    lcg = _Lcg(0xC0DD)
    side = 64
    img = np.zeros((side, side), dtype=np.int64)
    for r in range(side):
        for c in range(side):
            base = ((r - 32) ** 2 + (c - 32) ** 2) // 16 - 64
            img[r, c] = base + lcg.int_in(-12, 12)
    img = np.clip(img, -128, 127).astype(np.int8)
    kern = np.outer(GAUSS_ROW, GAUSS_ROW).astype(np.int8)   # weights sum to 256
    ref = _conv_outputs(img, kern, _exact_products)
    return {"image": img, "kernel": kern, "ref_output": ref}


@lru_cache(maxsize=None)
def make_kernel(kind: str) -> AppKernel:
    if kind == "fir_peak":
        data = _build_fir()
        arrays = [data["signal"], np.asarray(data["taps"]),
                  np.array([data["threshold"]], dtype=np.int64),
                  np.array(data["ref_peaks"], dtype=np.int64)]
    elif kind == "gemv_classify":
        data = _build_gemv()
        arrays = [data["weights"], data["inputs"], data["ref_argmax"]]
    elif kind == "conv2d_psnr":
        data = _build_conv()
        arrays = [data["image"], data["kernel"], data["ref_output"]]
    else:
        raise ValidationError(f"unknown kernel kind {kind!r}")
    digest = _fingerprint(kind, arrays)
    expected = _EXPECTED_SHA[kind]
    if expected != digest:
        raise ValidationError(
            f"bundled data for {kind} drifted: sha256 {digest} != pinned {expected}")
    return AppKernel(kind=kind, data=data, fingerprint=digest)


# ---------------------------------------------------------------------------
# kernel computation, generic over the product source


def _fir_outputs(signal, taps, prodfn) -> np.ndarray:
    n_out = len(signal) - len(taps) + 1
    acc = np.zeros(n_out, dtype=np.int64)
    for t, coeff in enumerate(taps):
        window = np.asarray(signal[t:t + n_out])
        acc += prodfn(np.full(n_out, coeff, dtype=np.int64), window)
    return acc


def _detect_peaks(y, threshold: int) -> list[int]:
    peaks = []
    n = len(y)
    for k in range(n):
        if y[k] < threshold:
            continue
        lo, hi = max(0, k - PEAK_HALF_WINDOW), min(n, k + PEAK_HALF_WINDOW + 1)
        seg = np.concatenate([y[lo:k], y[k + 1:hi]])
        if len(seg) == 0 or y[k] > seg.max():
            peaks.append(k)
    return peaks


def _peak_error(ref: tuple[int, ...], got: list[int]) -> float:
    i = j = hits = 0
    while i < len(ref) and j < len(got):
        d = got[j] - ref[i]
        if abs(d) <= PEAK_MATCH_TOL:
            hits += 1
            i += 1
            j += 1
        elif d < 0:
            j += 1
        else:
            i += 1
    return ((len(ref) - hits) + (len(got) - hits)) / len(ref)


def _gemv_scores(weights, inputs, prodfn) -> np.ndarray:
    n_samples, n_classes = len(inputs), len(weights)
    scores = np.zeros((n_samples, n_classes), dtype=np.int64)
    for c in range(n_classes):
        w = np.asarray(weights[c], dtype=np.int64)
        prods = prodfn(np.broadcast_to(w, inputs.shape), np.asarray(inputs))
        scores[:, c] = prods.sum(axis=1)
    return scores


def _conv_outputs(image, kern, prodfn) -> np.ndarray:
    side = image.shape[0]
    ksz = kern.shape[0]
    out_side = side - ksz + 1
    acc = np.zeros((out_side, out_side), dtype=np.int64)
    for u in range(ksz):
        for v in range(ksz):
            patch = np.asarray(image[u:u + out_side, v:v + out_side])
            coeff = np.full(acc.shape, int(kern[u, v]), dtype=np.int64)
            acc += prodfn(coeff, patch)
    return (acc + 128) >> 8


def _run_kernel(kernel: AppKernel, prodfn) -> float:
    if kernel.kind == "fir_peak":
        y = _fir_outputs(kernel.data["signal"], kernel.data["taps"], prodfn)
        got = _detect_peaks(y, kernel.data["threshold"])
        return _peak_error(kernel.data["ref_peaks"], got)
    if kernel.kind == "gemv_classify":
        scores = _gemv_scores(kernel.data["weights"], kernel.data["inputs"], prodfn)
        pred = np.argmax(scores, axis=1)
        return float(np.mean(pred != kernel.data["ref_argmax"]))
    out = _conv_outputs(kernel.data["image"], kernel.data["kernel"], prodfn)
    diff = out - kernel.data["ref_output"]
    mse = float((diff.astype(np.float64) ** 2).mean())
    if mse == 0.0:
        return 0.0
    psnr = 10.0 * math.log10(255.0 ** 2 / mse)
    return PSNR_CAP - min(psnr, PSNR_CAP)


def app_behav(kernel: AppKernel, table: nl.ProductTable) -> float:
    """Application error when every multiply goes through the product table."""
    if table.widths != (8, 8) or not table.signed:
        raise DomainError("application kernels need a signed 8x8 product table")
    return _run_kernel(kernel, lambda a, b: table.lookup(a, b).astype(np.int64))


def app_behav_direct(kernel: AppKernel, netlist: nl.Netlist,
                     config: nl.Config) -> float:
    """Oracle path: identical kernel arithmetic, products via evaluate_batch."""
    if netlist.widths != (8, 8) or not netlist.signed:
        raise DomainError("application kernels need a signed 8x8 multiplier")
    return _run_kernel(
        kernel, lambda a, b: nl.evaluate_batch(netlist, config, a, b))


def app_ppa(config: nl.Config, netlist: nl.Netlist) -> charac.PpaMetrics:
    """Circuit-cost metrics of the operator driving a kernel (plain delegation)."""
    return charac.ppa_metrics(netlist, config)
