"""Grid and fuzz verification of every inequality in the supermartingale proof."""

from __future__ import annotations

import numpy as np

from . import supermartingale as sm

DEFAULT_A = (-3.0, -1.0, -0.1)
DEFAULT_B = (0.1, 1.0, 2.0)
DEFAULT_H = np.linspace(-5.0, 5.0, 41)
DEFAULT_X_COUNT = 33


def grid_tuples(a_values=DEFAULT_A, b_values=DEFAULT_B, h_values=DEFAULT_H, x_count=DEFAULT_X_COUNT):
    """Flat arrays ``(a, b, h, x)`` over the product grid, ``x`` spanning ``[a, b]``."""
    rows = []
    for a in a_values:
        for b in b_values:
            xs = np.linspace(a, b, x_count)
            xs[0], xs[-1] = a, b
            A, B, H, X = np.meshgrid([a], [b], np.asarray(h_values, dtype=float), xs, indexing="ij")
            rows.append(np.stack([A.ravel(), B.ravel(), H.ravel(), X.ravel()]))
    return tuple(np.concatenate(rows, axis=1))


def fuzz_tuples(n: int, seed: int):
    rng = np.random.default_rng(seed)
    a = -(10.0 ** rng.uniform(-2, np.log10(3.0), n))
    b = 10.0 ** rng.uniform(-2, np.log10(3.0), n)
    h = rng.uniform(-5, 5, n)
    x = a + (b - a) * rng.random(n)
    ends = rng.random(n)
    x = np.where(ends < 0.025, a, np.where(ends > 0.975, b, x))
    return a, b, h, x


def _summ(name, slack, tol, scale, a, b, h, x=None):
    rel = slack / np.maximum(np.abs(scale), 1e-300)
    bad = slack < -tol
    i = int(np.argmin(slack + tol))
    worst = {"a": a[i].item(), "b": b[i].item(), "h": h[i].item()}
    if x is not None:
        worst["x"] = x[i].item()
    out = {
        "check": name,
        "count": int(slack.size),
        "min_slack": float(slack.min()),
        "min_relative_slack": float(rel.min()),
        "violations": int(bad.sum()),
        "worst_tuple": worst,
        "passed": not bool(bad.any()),
    }
    return out


def evaluate(a, b, h, x, rel_tol: float = sm.REL_TOL, abs_tol: float = sm.ABS_TOL) -> dict:
    """Run every check on the tuples and summarise worst slacks."""
    tol = lambda scale: sm.tolerance(scale, rel_tol, abs_tol)  # noqa: E731
    checks = []

    curve = np.exp(h * x)
    s = sm.check_chord_dominance(a, b, h, x)
    checks.append(_summ("chord_dominance", s, tol(curve), curve, a, b, h, x))
    chord_s = s

    rhs = sm.goal_rhs(a, b, h, x)
    scale = np.maximum(curve, np.abs(rhs))
    s = sm.check_goal_inequality(a, b, h, x)
    checks.append(_summ("goal_inequality", s, tol(scale), scale, a, b, h, x))
    goal_s = s

    w = b - a
    red_scale = np.exp(h * h * w * w / 8.0)
    s = sm.check_reduced_inequality(a, b, h)
    checks.append(_summ("reduced_inequality", s, tol(red_scale), red_scale, a, b, h))
    red_s = s

    log_scale = np.maximum(np.abs(h * h * w * w / 8.0 + np.log(w)), 1.0)
    s = sm.check_simpler_inequality(a, b, h)
    checks.append(_summ("simpler_inequality", s, tol(log_scale), log_scale, a, b, h))

    u, second = sm.check_quarter_bound(a, b, h)
    u_s = np.minimum(u, 1.0 - u)
    checks.append(_summ("quarter_u_in_unit_interval", np.where(u_s > 0, u_s, -np.inf),
                        np.zeros_like(u_s), np.ones_like(u_s), a, b, h))
    checks.append(_summ("quarter_bound", 0.25 - u * (1.0 - u), tol(0.25), np.full_like(u, 0.25), a, b, h))
    bound2 = w * w / 4.0
    checks.append(_summ("second_derivative_bound", bound2 - second, tol(bound2), bound2, a, b, h))

    # The proof's implication order: goal slack decomposes as chord + reduced.
    chain = -np.abs(goal_s - chord_s - red_s)
    checks.append(_summ("proof_chain", chain, tol(scale), scale, a, b, h, x))
    checks.append(_summ("goal_dominates_reduced", goal_s - red_s, tol(scale), scale, a, b, h, x))

    zero = h == 0
    if zero.any():
        h0 = max(
            float(np.max(np.abs(sm.check_chord_dominance(a[zero], b[zero], h[zero], x[zero])))),
            float(np.max(np.abs(sm.check_goal_inequality(a[zero], b[zero], h[zero], x[zero])))),
            float(np.max(np.abs(sm.check_simpler_inequality(a[zero], b[zero], h[zero])))),
        )
    else:
        h0 = None
    return {
        "checks": checks,
        "h_zero_rows": int(zero.sum()),
        "h_zero_max_abs_slack": h0,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
        "passed": all(c["passed"] for c in checks),
    }


def run_verification(a_values=DEFAULT_A, b_values=DEFAULT_B, h_values=DEFAULT_H,
                     x_count=DEFAULT_X_COUNT, fuzz: int = 0, seed: int | None = None,
                     rel_tol: float = sm.REL_TOL, abs_tol: float = sm.ABS_TOL) -> dict:
    parts = [grid_tuples(a_values, b_values, h_values, x_count)]
    if fuzz:
        if seed is None:
            raise ValueError("fuzzing needs an explicit seed")
        parts.append(fuzz_tuples(fuzz, seed))
    a, b, h, x = (np.concatenate(col) for col in zip(*parts))
    report = evaluate(a, b, h, x, rel_tol, abs_tol)
    report["grid_tuples"] = int(parts[0][0].size)
    report["fuzz_tuples"] = int(fuzz)
    report["seed"] = seed
    return report
