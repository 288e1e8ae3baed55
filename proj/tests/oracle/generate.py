"""Reference values for the unit tests, computed with mpmath at 50 digits.

Every quantity is evaluated from its defining integral or sum, independently of the
C++ code paths (no hypergeometric series, no compensated summation).
"""
import mpmath as mp

mp.mp.dps = 50


def params(lambda_bs_km2=20, lambda_ue_km2=8, alpha=4, noise_dbm=-90, pu_dbm=23, rho_dbm=-70):
    mw = lambda dbm: mp.mpf(10) ** (mp.mpf(dbm) / 10)
    p = dict(lbs=mp.mpf(lambda_bs_km2) / 10**6, lue=mp.mpf(lambda_ue_km2) / 10**6, alpha=mp.mpf(alpha),
             noise=mw(noise_dbm), pu=mw(pu_dbm), rho=mw(rho_dbm))
    p["R"] = (p["pu"] / p["rho"]) ** (1 / p["alpha"])
    return p


def J(theta, alpha):
    return mp.quad(lambda y: y / (y**alpha + 1), [theta ** (-1 / alpha), 1, mp.inf])


def g(theta, alpha):
    return theta ** (2 / alpha) * J(theta, alpha)


def pmf_voronoi(n, p, c=mp.mpf(7) / 2):
    x = p["lue"] / (c * p["lbs"])
    return mp.gamma(n + c) / (mp.factorial(n) * mp.gamma(c)) * x**n / (1 + x) ** (n + c)


def pmf_range(n, p):
    mu = p["lue"] * mp.pi * p["R"] ** 2
    return mu**n / mp.factorial(n) * mp.exp(-mu)


def coefficient(p, f0):
    x = mp.pi * p["lbs"] * p["R"] ** 2
    return 2 * (1 - f0) * mp.gammainc(2, 0, x) / (1 - mp.exp(-x))


def terms(theta, p, f0, n_max):
    c = coefficient(p, f0)
    return [mp.exp(-k * theta * p["noise"] / p["rho"] - c * g(k * theta, p["alpha"])) for k in range(1, n_max + 1)]


def conditional(n, T):
    return mp.fsum(mp.binomial(n, k) * (-1) ** (k + 1) * T[k - 1] for k in range(1, n + 1))


def marginal(theta, p, pmf, n_max):
    f0 = pmf(0, p)
    T = terms(theta, p, f0, n_max)
    return mp.fsum(pmf(n, p) * conditional(n, T) for n in range(1, n_max + 1))


def rate_round_robin(p, f0):
    c = coefficient(p, f0)
    f = lambda x: mp.exp(-x * p["noise"] / p["rho"] - c * g(x, p["alpha"])) / (1 + x)
    return (1 - f0) * mp.quad(f, [0, 1, 10, 100, mp.inf])


def show(name, value):
    print(f"{name} = {mp.nstr(value, 17)}")


if __name__ == "__main__":
    d = params()
    show("R_default_m", d["R"])
    show("outage_20", mp.exp(-mp.pi * d["lbs"] * d["R"] ** 2))
    show("pu_mw", d["pu"])
    show("voronoi_f0_ratio_0.4", pmf_voronoi(0, d))
    show("range_f0", pmf_range(0, d))
    show("range_mean", d["lue"] * mp.pi * d["R"] ** 2)
    for t, a in [(0.5, 3), (2, 4), (7, 2.5), (0.01, 6)]:
        show(f"g(theta={t}, alpha={a})", g(mp.mpf(t), mp.mpf(a)))
    # Closed-form regime: alpha=4, no noise, no power cap, fN0=0.
    for n in (5, 30):
        T = [mp.exp(-mp.sqrt(k) * mp.atan(mp.sqrt(k))) for k in range(1, n + 1)]
        show(f"closed_form_n{n}_theta1", conditional(n, T))
    show("no_scheduling_rate_simplest",
         mp.quad(lambda x: mp.exp(-mp.sqrt(x) * mp.atan(mp.sqrt(x))) / (1 + x), [0, 1, 10, 100, mp.inf]))
    hi = params(lambda_bs_km2=20)
    lo = params(lambda_bs_km2=0.2)
    for db in (0, 10):
        th = mp.mpf(10) ** (mp.mpf(db) / 10)
        show(f"marginal_fn1_lbs20_{db}dB", marginal(th, hi, pmf_voronoi, 40))
        show(f"marginal_fn2_lbs0.2_{db}dB", marginal(th, lo, pmf_range, 40))
        show(f"conditional_n3_lbs20_fn1_{db}dB", conditional(3, terms(th, hi, pmf_voronoi(0, hi), 3)))
    show("rate_rr_fn1_lbs20", rate_round_robin(hi, pmf_voronoi(0, hi)))
    show("rate_rr_fn2_lbs0.2", rate_round_robin(lo, pmf_range(0, lo)))
    # Deep cancellation: n = 150 needs about 60 digits of working precision.
    mp.mp.dps = 90
    hi = params(lambda_bs_km2=20)
    show("conditional_n150_lbs20_fn1_0dB", conditional(150, terms(mp.mpf(1), hi, pmf_voronoi(0, hi), 150)))
    show("closed_form_n100_theta0.1",
         conditional(100, [mp.exp(-mp.sqrt(k * mp.mpf("0.1")) * mp.atan(mp.sqrt(k * mp.mpf("0.1")))) for k in range(1, 101)]))
