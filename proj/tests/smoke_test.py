"""Smoke test for the python extension (run with PYTHONPATH set to the build dir)."""
import math
import sys

import _msfilter as m


def main():
    cat = m.list_experiments()
    assert len(cat) == 9, cat
    ids = {e["id"] for e in cat}
    assert "fig5-l96-sweep" in ids

    cfg = m.default_config("fig1-linear")
    assert "fig1-linear" in cfg
    problems = [p for p in m.validate_config(cfg) if not p.startswith("warning:")]
    assert problems == [], problems

    p = m.LinearTwoScaleParams()
    p.a11, p.a12, p.a21, p.a22 = -1.0, 1.0, -1.0, -1.0
    p.sigma_x = p.sigma_y = math.sqrt(2.0)
    p.eps = 0.25
    p.r_obs = 0.5
    a_tilde, a_hat = m.derived_coefficients(p)
    assert abs(a_tilde + 2.0) < 1e-14 and abs(a_hat + 1.0) < 1e-14

    # moment-fit identity: expanded statistics reproduce the optimal parameters
    c11, t_c = m.equilibrium_stats(p, expanded=True)
    a_fit, s_fit = m.msm_fit(c11, t_c)
    a_opt, s_opt = m.reduced_params_for(p, "optimal")
    assert abs(a_fit - a_opt) < 1e-12 and abs(s_fit - s_opt) < 1e-12

    # stability dichotomy of the second preset
    assert abs(m.spekf_stability_exponent(2, "rsfc") - 0.9) < 1e-10
    assert m.spekf_stability_exponent(2, "rspekf") < 0.0

    r = m.spekf_reduced_params(2, "rspekf")
    assert r["beta_sq"] > 0.0 and r["sigma1_sq"] > 0.0

    print("smoke test ok")


if __name__ == "__main__":
    sys.exit(main())
