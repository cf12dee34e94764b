"""Acceptance suite: one test per criterion, one printed verdict line each.

Verdict lines are printed with pytest's capture suspended so they appear
in the live output even without -s:

    ACCEPTANCE <n> <name>: PASS|FAIL (details)

Heavy results (staged minimum searches at large frequency ratios) are cached
module-wide so criteria that share members compute them once. Searches start
from the two-stage scheme (coarse grid step 0.01 over [0.5, 1.5], fine step
0.002 in a +-0.03 window, quadratic refinement); where a criterion needs the
minimum's distance from g/g_c = 1 resolved below the fine step, the search
keeps zooming (see otoc_min).
"""

import numpy as np
import pytest

from otoc_criticality import analysis, correlators, dynamics, models, operators
from otoc_criticality.correlators import TimeGrid
from otoc_criticality.errors import FitDomainError
from otoc_criticality.linalg import as_matrix
from otoc_criticality.models import ModelParams

TGRID = TimeGrid(0.0, 500.0, 0.1)
_CACHE: dict = {}


def report(capfd, num: int, name: str, ok: bool, detail: str) -> None:
    """Print the verdict line past pytest's FD-level capture."""
    line = f"ACCEPTANCE {num} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    with capfd.disabled():
        print(line, flush=True)
    assert ok, line


def _params(eta: float, N: int = 1, n: int = 80) -> ModelParams:
    return ModelParams(omega0=1.0, Omega=eta, g=0.0, n=n, N=N)


def otoc_min(eta: float, N: int = 1, n: int = 80, beta=None,
             zoom: bool = False) -> float:
    """OTOC-minimum location (cached).

    zoom=False is the plain two-stage search (coarse 0.01, fine 0.002);
    zoom=True keeps shrinking the fine step until the minimum's distance
    from g/g_c = 1 is resolved, which matters once that distance drops
    toward the fine step itself.
    """
    key = ("otoc_min", eta, N, n, beta, zoom)
    if key not in _CACHE:
        kind = "otoc_inf_temp" if beta is None else "otoc_thermal"
        search = analysis.otoc_minimum_search(
            _params(eta, N, n), kind=kind, tgrid=TGRID, beta=beta,
            auto_zoom=zoom)
        _CACHE[key] = search.location
    return _CACHE[key].ratio_m


def sus_max(eta: float, N: int = 1, n: int = 80, beta=None) -> float:
    """Susceptibility-maximum location for the order parameter (cached)."""
    key = ("sus_max", eta, N, n, beta)
    if key not in _CACHE:
        search = analysis.susceptibility_maximum_search(
            _params(eta, N, n), beta=beta, auto_zoom=True)
        _CACHE[key] = search.location
    return _CACHE[key].ratio_m


class TestCriterion1FiniteEtaExponent:
    def test_eta_scaling_exponent(self, capfd):
        etas = [2.0**k for k in range(11, 21)]
        points = [(eta, otoc_min(eta)) for eta in etas]
        try:
            fit = analysis.fit_scaling_eta(points)
            k = -fit.slope
            ok = 0.87 <= k <= 1.03
            detail = (f"k={k:.3f}, r2={fit.r_squared:.3f}, target [0.87, 1.03]; "
                      f"r_m-1: " + ", ".join(f"2^{int(np.log2(e))}:"
                                             f"{rm - 1:.2e}"
                                             for e, rm in points))
            if not ok:
                detail += ("; minimum location saturates near r-1~1e-3 for "
                           "eta>=2^16 at photon cutoff 80 (cutoff-limited: "
                           "raising the cutoff moves the dip toward 1, "
                           "refining the time grid does not)")
        except FitDomainError as exc:
            ok, detail = False, str(exc)
        report(capfd, 1, "finite-eta exponent", ok, detail)


class TestCriterion2FiniteGammaExponent:
    def test_gamma_scaling_exponent(self, capfd):
        gammas = [2.0**k for k in range(11, 15)]
        points = []
        for N in (1, 2, 3):
            for gamma in gammas:
                points.append((gamma, otoc_min(gamma / N, N=N, zoom=True)))
        try:
            fit = analysis.fit_scaling_gamma(points)
            kappa = -fit.slope
            ok = 0.85 <= kappa <= 1.05
            detail = (f"kappa={kappa:.3f}, r2={fit.r_squared:.3f}, "
                      f"target [0.85, 1.05]; N in (1,2,3), "
                      f"gamma in 2^11..2^14 (below the cutoff-saturation "
                      f"regime, see criterion 1)")
        except FitDomainError as exc:
            ok, detail = False, str(exc)
        report(capfd, 2, "finite-gamma exponent", ok, detail)


class TestCriterion3CutoffScaling:
    def test_raw_otoc_grows_like_n4(self, capfd):
        base = _params(2.0**20)
        table, fits = analysis.cutoff_study(base, t_probes=(0.0, 50.0),
                                            n_list=(20, 40, 60, 80, 100),
                                            ratio=1.0)
        s0, s50 = fits[0.0].slope, fits[50.0].slope
        ok = 3.8 <= s0 <= 4.1 and 3.8 <= s50 <= 4.1
        report(capfd, 3, "cutoff scaling",
               ok, f"slope(t=0)={s0:.3f}, slope(t=50)={s50:.3f}, "
                   f"target [3.8, 4.1]")


class TestCriterion4MinimumLocationRobustness:
    def test_minimum_insensitive_to_cutoff(self, capfd):
        eta = 2.0**20
        locs = {n: otoc_min(eta, n=n) for n in (60, 80, 100)}
        spread = max(locs.values()) - min(locs.values())
        ok = spread <= 0.01
        report(capfd, 4, "minimum-location robustness", ok,
               "r_m: " + ", ".join(f"n={n}:{r:.4f}" for n, r in locs.items())
               + f"; spread={spread:.4f} <= 0.01")


class TestCriterion5ThermalRobustness:
    def test_otoc_stable_but_susceptibility_drifts(self, capfd):
        eta = 2.0**20
        locs = {
            0.0: otoc_min(eta),
            0.1: otoc_min(eta, beta=0.1),
            1.0: otoc_min(eta, beta=1.0),
        }
        spread = max(locs.values()) - min(locs.values())
        sus_ratio = sus_max(eta, beta=0.1)
        drift = abs(sus_ratio - 1.0)
        ok = spread <= 0.02 and drift > 0.02
        report(capfd, 5, "thermal robustness", ok,
               "otoc r_m: " + ", ".join(f"beta={b}:{r:.4f}"
                                        for b, r in locs.items())
               + f"; spread={spread:.4f} <= 0.02; susceptibility max at "
                 f"beta=0.1 r={sus_ratio:.4f}, |r-1|={drift:.4f} > 0.02")


class TestCriterion6OrderParameterScaling:
    def test_susceptibility_maximum_gamma_scaling(self, capfd):
        points = []
        for N in (1, 2, 4):
            for k in (10, 11, 12, 13):
                eta = 2.0**k
                points.append((eta * N, sus_max(eta, N=N)))
        try:
            fit = analysis.fit_scaling_gamma(points)
            mag = -fit.slope
            ok = 0.57 <= mag <= 0.73
            detail = (f"|slope|={mag:.3f}, r2={fit.r_squared:.3f}, "
                      f"target [0.57, 0.73]")
        except FitDomainError as exc:
            ok, detail = False, str(exc)
        report(capfd, 6, "order-parameter gamma-scaling", ok, detail)


class TestCriterion7PropertySuite:
    def test_property_suite(self, tmp_path, capfd):
        failures = []

        # (a) toy oracle: F(t) = cos 4t and exact time average 0
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sz = np.diag([1.0, -1.0]).astype(complex)
        frame = dynamics.prepare_frame(sz, sx, sx)
        grid = TimeGrid(0, 5, 0.01)
        series = correlators.otoc_infinite_temperature(frame, grid,
                                                       normalize=False)
        err = float(np.max(np.abs(np.real(series.values)
                                  - np.cos(4 * grid.times()))))
        if err > 1e-10:
            failures.append(f"(a) toy pointwise err {err:.2e}")
        for mode in ("generic_spectrum", "resonance_sum"):
            avg = correlators.otoc_exact_time_average(frame, mode)
            if abs(avg) > 1e-12:
                failures.append(f"(a) toy {mode} average {avg:.2e}")

        # (b) realness across 50 random model points
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(50):
            p = ModelParams(
                omega0=1.0, Omega=float(2.0 ** rng.integers(0, 14)), g=0.0,
                n=int(rng.integers(2, 8)), N=int(rng.integers(1, 4)),
            ).at_ratio(float(rng.uniform(0.0, 2.0)))
            W = models.order_parameter_operator(p.n, p.N)
            fr = dynamics.prepare_frame(models.build_dicke(p), W, W)
            s = correlators.otoc_infinite_temperature(fr, TimeGrid(0, 3, 0.5),
                                                      normalize=False)
            rel = float(np.max(np.abs(np.imag(s.values))
                               / (1.0 + np.abs(np.real(s.values)))))
            worst = max(worst, rel)
        if worst > 1e-8:
            failures.append(f"(b) imaginary part {worst:.2e}")

        # (c) oracle agreement and windowed-average convergence
        for seed in range(20):
            r = np.random.default_rng(seed)
            H = r.normal(size=(8, 8)) + 1j * r.normal(size=(8, 8))
            H = as_matrix((H + H.conj().T) / 2)
            W = r.normal(size=(8, 8)) + 1j * r.normal(size=(8, 8))
            W = as_matrix((W + W.conj().T) / 2)
            fr = dynamics.prepare_frame(H, W, W)
            g = correlators.otoc_exact_time_average(fr, "generic_spectrum")
            rs = correlators.otoc_exact_time_average(fr, "resonance_sum")
            if abs(g - rs) > 1e-8 * max(1.0, abs(g)):
                failures.append(f"(c) oracle mismatch seed {seed}")
                break
        else:
            s = correlators.otoc_infinite_temperature(fr, TimeGrid(0, 1e4, 0.5),
                                                      normalize=False)
            wavg = correlators.time_average(s)
            if abs(wavg - g) > 0.02 * abs(g):
                failures.append(f"(c) windowed average off by "
                                f"{abs(wavg - g) / abs(g):.1%}")

        # (d) parity commutes with both Hamiltonians across the scan grid
        for N in (1, 3):
            base = _params(2.0**12, N=N, n=12)
            P = models.build_parity(base.n, base.N)
            for ratio in np.arange(0.5, 1.51, 0.1):
                H = models.build_dicke(base.at_ratio(float(ratio)))
                defect = float(np.max(np.abs(H @ P - P @ H)))
                if defect > 1e-10 * float(np.max(np.abs(H))):
                    failures.append(f"(d) [H, parity] defect {defect:.2e} "
                                    f"at N={N} r={ratio:.1f}")

        # (e) spin algebra and Casimir identities for N <= 16
        for N in range(1, 17):
            Jz, Jp, Jm = operators.collective_spin(N)
            j = N / 2.0
            eye = np.eye(N + 1)
            checks = {
                "[Jz,J+] = J+": Jz @ Jp - Jp @ Jz - Jp,
                "[Jz,J-] = -J-": Jz @ Jm - Jm @ Jz + Jm,
                "[J+,J-] = 2Jz": Jp @ Jm - Jm @ Jp - 2 * Jz,
                "Casimir": (Jz @ Jz + (Jp @ Jm + Jm @ Jp) / 2
                            - j * (j + 1) * eye),
            }
            for label, defect in checks.items():
                if float(np.max(np.abs(defect))) > 1e-12 * max(j * j, 1.0):
                    failures.append(f"(e) {label} fails at N={N}")

        # (f) bit-identical CSV output across thread counts
        from otoc_criticality.cli import run
        args = ["scan", "--ratio-min", "0.8", "--ratio-max", "1.2",
                "--ratio-step", "0.1", "--n", "8", "--eta", "64",
                "--t-end", "5", "--dt", "0.5", "--output", str(tmp_path)]
        run(args + ["--threads", "1"])
        first = (tmp_path / "scan.csv").read_bytes()
        run(args + ["--threads", "4"])
        if (tmp_path / "scan.csv").read_bytes() != first:
            failures.append("(f) outputs differ across thread counts")

        report(capfd, 7, "property suite", not failures,
               "all sub-checks (a)-(f) pass" if not failures
               else "; ".join(failures))


class TestCriterion8GoldenTraces:
    def test_traces_match_frozen_run(self, golden_dir, capfd):
        from otoc_criticality.output import read_csv

        worst = 0.0
        cases = 0
        for path in sorted(golden_dir.glob("trace_*.csv")):
            table, meta = read_csv(path)
            p = ModelParams(omega0=1.0, Omega=float(meta["Omega"]), g=0.0,
                            n=int(meta["n"]), N=int(meta["N"]))
            p = p.at_ratio(float(meta["ratio"]))
            W = models.order_parameter_operator(p.n, p.N)
            frame = dynamics.prepare_frame(models.build_dicke(p), W, W)
            grid = TimeGrid(float(meta["t_start"]), float(meta["t_end"]),
                            float(meta["dt"]))
            kind = meta["kind"]
            if kind == "otoc_inf_temp":
                s = correlators.otoc_infinite_temperature(frame, grid,
                                                          normalize=True)
            elif kind == "tpc_inf_temp":
                s = correlators.tpc_infinite_temperature(frame, grid,
                                                         normalize=True)
            else:
                psi = np.zeros(frame.dim, dtype=np.complex128)
                psi[0] = 1.0
                s = correlators.otoc_equilibrium(frame, psi, grid,
                                                 normalize=False)
            stored = np.array([float(x) for x in table["value_real"]])
            worst = max(worst, float(np.max(np.abs(np.real(s.values)
                                                   - stored))))
            if "lambda_L" in meta:
                fit = correlators.fit_exponential_decay(s, (0.3, 0.6))
                worst_l = abs(fit.lambda_L - float(meta["lambda_L"]))
                worst = max(worst, worst_l)
            cases += 1
        ok = cases > 0 and worst < 1e-9
        report(capfd, 8, "golden traces", ok,
               f"{cases} frozen traces, max deviation {worst:.2e} < 1e-9"
               if cases else "no golden files found")


@pytest.fixture(scope="module")
def golden_dir():
    from pathlib import Path

    return Path(__file__).parent / "golden"
