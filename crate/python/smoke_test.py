#!/usr/bin/env python3
"""Smoke test for the specdecay_py extension module.

Builds nothing itself: run `cargo build -p specdecay-py --release` first.
The cdylib is copied next to a temp dir under the name Python expects
(specdecay_py.so) and imported from there.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / "release" / "libspecdecay_py.so",
        REPO / "target" / "debug" / "libspecdecay_py.so",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit(
            "libspecdecay_py.so not found; run `cargo build -p specdecay-py --release` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="specdecay-py-"))
    shutil.copy2(lib, stage / "specdecay_py.so")
    sys.path.insert(0, str(stage))
    import specdecay_py

    return specdecay_py


def main():
    sd = load_module()
    print(f"loaded specdecay_py {sd.__version__}")

    # Regime classification.
    assert sd.DampingParams(0.0, 2.0).regime() == "Undamped"
    assert sd.DampingParams(0.5, 2.0).regime() == "Effective"
    assert sd.DampingParams(1.0, 2.0).regime() == "Critical"
    assert sd.DampingParams(1.5, 2.0).regime() == "NonEffective"
    try:
        sd.DampingParams(3.0, 2.0)
        raise AssertionError("inadmissible exponents accepted")
    except ValueError as e:
        assert "theta" in str(e) or "sigma" in str(e)

    # Mode roots: critical lambda=1 gives the pair -1/2 +- i sqrt(3)/2.
    crit = sd.DampingParams(1.0, 2.0)
    roots = sd.char_roots(1.0, crit)
    assert roots["branch"] == "ComplexPair"
    assert abs(roots["re_plus"] + 0.5) < 1e-12
    assert abs(roots["im"] - math.sqrt(3) / 2) < 1e-12
    assert abs(sd.mode_decay_rate(1.0, crit) - 0.5) < 1e-12

    # Kernel initial conditions and closed forms. theta = 0 puts unit
    # damping on every mode; on the zero mode that leaves u'' + u' = 0,
    # so E1(t) = 1 - exp(-t). Critical lambda = 1 rings at sqrt(3)/2.
    und = sd.DampingParams(0.0, 2.0)
    assert sd.eval_e0(1.0, und, 0.0) == 1.0
    assert sd.eval_e1(1.0, und, 0.0) == 0.0
    assert abs(sd.eval_e1(0.0, und, 1.3) - (1.0 - math.exp(-1.3))) < 1e-12
    w = math.sqrt(3) / 2
    expected = math.exp(-0.65) * math.sin(w * 1.3) / w
    assert abs(sd.eval_e1(1.0, crit, 1.3) - expected) < 1e-12

    # Partition of the circle spectrum under critical damping: the zero
    # mode sits alone in R1, every positive mode is complex (R2).
    spec = sd.Spectrum.torus_1d(4)
    assert len(spec) == 9  # frequencies -4..4
    part = sd.partition(spec, crit)
    assert part["regime"] == "Critical"
    assert part["labels"][0] == "R1"
    assert all(l == "R2" for l in part["labels"][1:])
    assert part["slot_counts"] == [1, 8, 0, 0]

    # Linear simulation decays at the spectral abscissa; the fit sees it.
    times = [0.05 * i for i in range(401)]
    u0 = [0.0] + [1.0] * 8  # zero mode left empty
    trace = sd.simulate(crit, spec, u0, [0.0] * 9, times, betas=[1.0], ks=[1])
    assert set(trace.keys()) == {"t", "norm_h", "norm_sobolev_1", "norm_dt_1"}
    assert sd.spectral_abscissa(spec, crit) == 0.0  # zero mode never decays
    # With the zero mode left empty the observed rate is the slowest
    # populated mode's, lambda = 1 at rate 1/2.
    assert abs(sd.mode_decay_rate(1.0, crit) - 0.5) < 1e-12
    # Complex modes oscillate under the envelope, so the windowed fit
    # carries a few percent of phase bias; 10% brackets it comfortably.
    fit = sd.fit_exponential_rate(trace["t"], trace["norm_h"], (8.0, 20.0))
    assert abs(fit["rate"] - 0.5) < 0.05, fit

    # Rate table: critical-regime Sobolev row carries exponent beta/theta.
    rows = sd.theoretical_rates(crit, betas=[1.0])
    sob = [r for r in rows if r["quantity"] == "norm_sobolev_1" and r["channel"] == "u0"]
    assert len(sob) == 1 and abs(sob[0]["small_time_exponent"] - 1.0) < 1e-12

    # Fourier realization round trip and Plancherel.
    real = sd.TorusRealization(4, 32)
    coeffs = [0.3, 1.0, -0.5, 0.0, 0.25, 0.0, 0.0, -1.0, 0.1]
    grid_vals = real.inverse(coeffs)
    back = real.forward(grid_vals)
    assert max(abs(a - b) for a, b in zip(coeffs, back)) < 1e-12
    norm_c = math.sqrt(sum(c * c for c in coeffs))
    assert abs(real.quadrature_norm(grid_vals) - norm_c) < 1e-12

    # Small-data semilinear run stays near the linear one; big data raises.
    small = [1e-3 * c for c in coeffs]
    nl_trace, report = sd.solve_semilinear(
        crit, spec, small, [0.0] * 9, times, 3.0, 1.0, realization=real
    )
    lin_trace = sd.simulate(crit, spec, small, [0.0] * 9, times)
    assert report["contraction_factor"] < 1.0
    rel = max(
        abs(a - b) / max(a, 1e-30)
        for a, b in zip(lin_trace["norm_h"], nl_trace["norm_h"])
    )
    assert rel < 1e-4, rel
    try:
        sd.solve_semilinear(crit, spec, [2.0] * 9, [0.0] * 9, times, 3.0, 100.0)
        raise AssertionError("divergent iteration accepted")
    except RuntimeError as e:
        assert "contraction" in str(e).lower(), e

    print("smoke test passed")


if __name__ == "__main__":
    main()
