"""Numeric tracing of the motion curve through its plane-sextic model:
pose extraction, predictor-corrector walking, branch/component assembly,
start positions and coupler-curve output."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .mechanism import Leg, Mechanism, Pose


class TraceError(RuntimeError):
    pass


@dataclass
class MotionFamily:
    """Float specialization of the curve family at fixed parameters: the
    sextic f, the rotation chart (Ahat, that), the line ell and the three
    translation cubics, all as exponent->coefficient maps on (s1,s2,s3)."""

    f: dict
    Ahat: list  # 3x3 of dicts
    that: dict
    ell: dict
    b: list  # 3 dicts

    def _eval(self, coeffs: dict, s) -> float:
        return float(
            sum(c * s[0] ** e[0] * s[1] ** e[1] * s[2] ** e[2] for e, c in coeffs.items())
        )

    def f_value(self, s) -> float:
        return self._eval(self.f, s)

    def f_gradient(self, s) -> np.ndarray:
        g = np.zeros(3)
        for e, c in self.f.items():
            for i in range(3):
                if e[i]:
                    ee = list(e)
                    ee[i] -= 1
                    g[i] += c * e[i] * s[0] ** ee[0] * s[1] ** ee[1] * s[2] ** ee[2]
        return g

    def pose_at(self, s) -> Pose:
        """A = Ahat/that, b = b_cubics/(ell*that); raises on poles."""
        th = self._eval(self.that, s)
        el = self._eval(self.ell, s)
        if abs(th) < 1e-14 or abs(el) < 1e-14:
            raise TraceError("pose pole: ell*that vanishes")
        A = tuple(
            tuple(self._eval(self.Ahat[i][j], s) / th for j in range(3)) for i in range(3)
        )
        b = tuple(self._eval(self.b[i], s) / (el * th) for i in range(3))
        return Pose(A, b)


@dataclass
class MotionSample:
    s: tuple
    pose: Pose
    leg_lengths: tuple
    coupler: tuple | None = None


@dataclass
class BranchTrace:
    samples: list
    closed: bool
    end_flags: tuple = ("", "")  # "" | "node" | "chart-exhausted"

    def __len__(self):
        return len(self.samples)


def _normalize_chart(s: np.ndarray) -> np.ndarray:
    chart = int(np.argmax(np.abs(s)))
    return s / s[chart]


def find_curve_points(family: MotionFamily, attempts: int = 400, rng_seed: int = 3) -> list:
    """Real points on the sextic, found by solving f on random lines
    through random chart points."""
    rng = np.random.default_rng(rng_seed)
    pts = []
    for _ in range(attempts):
        chart = rng.integers(0, 3)
        a = np.zeros(3)
        a[chart] = 1.0
        idx = [i for i in range(3) if i != chart]
        a[idx[0]], a[idx[1]] = rng.uniform(-3, 3, 2)
        d = np.zeros(3)
        d[idx[0]], d[idx[1]] = rng.uniform(-1, 1, 2)
        # f(a + t d) univariate degree 6: solve
        ts = np.linspace(-8, 8, 13)
        vals = [family.f_value(a + t * d) for t in ts]
        coeffs = np.polyfit(ts, vals, 6)
        roots = np.roots(coeffs)
        for r in roots:
            if abs(r.imag) < 1e-9:
                s = a + r.real * d
                if abs(family.f_value(_normalize_chart(s))) < 1e-6:
                    pts.append(_normalize_chart(s))
    return pts


def _newton_correct(family: MotionFamily, s: np.ndarray, chart: int, tol: float):
    idx = [i for i in range(3) if i != chart]
    for _ in range(40):
        val = family.f_value(s)
        if abs(val) < tol:
            return s, True
        g = family.f_gradient(s)
        gc = np.array([g[idx[0]], g[idx[1]]])
        n2 = float(gc @ gc)
        if n2 < 1e-20:
            return s, False
        step = -val / n2
        s[idx[0]] += step * gc[0]
        s[idx[1]] += step * gc[1]
    return s, abs(family.f_value(s)) < tol


def trace_branch(
    family: MotionFamily,
    start,
    step: float = 1e-3,
    tol: float = 1e-12,
    max_steps: int = 100_000,
    node_grad: float = 1e-4,
    mech: Mechanism | None = None,
    coupler: tuple | None = None,
    direction: int = 1,
) -> BranchTrace:
    """Tangent predictor + Newton corrector walk from a curve point.

    The walk stays in the affine chart of the largest coordinate, switching
    charts as needed; it stops on closure (back near the start with aligned
    tangent), at a node (vanishing gradient), or on step exhaustion.
    """
    s = _normalize_chart(np.array(start, dtype=float))
    chart = int(np.argmax(np.abs(s)))
    s, ok = _newton_correct(family, s, chart, tol)
    if not ok:
        raise TraceError("start point does not converge onto the curve")

    def chart_tangent(s, chart):
        g = family.f_gradient(s)
        idx = [i for i in range(3) if i != chart]
        t2 = np.array([-g[idx[1]], g[idx[0]]])
        n = np.linalg.norm(t2)
        if n < node_grad:
            return None, idx
        t = np.zeros(3)
        t[idx[0]], t[idx[1]] = t2 / n
        return t, idx

    samples = [_make_sample(family, s, mech, coupler)]
    t0, _ = chart_tangent(s, chart)
    if t0 is None:
        return BranchTrace(samples=samples, closed=False, end_flags=("node", "node"))
    tprev = direction * t0
    start_pt = s.copy()
    start_tan = tprev.copy()
    closed = False
    end_flag = "chart-exhausted"
    h = step
    steps = 0
    while steps < max_steps:
        steps += 1
        t, idx = chart_tangent(s, chart)
        if t is None:
            end_flag = "node"
            break
        if float(t @ tprev) < 0:
            t = -t
        cand = s + h * t
        cand, ok = _newton_correct(family, cand.copy(), chart, tol)
        if not ok:
            if h > step / 64:
                h *= 0.5
                continue
            end_flag = "corrector-failed"
            break
        h = min(step, h * 1.6)
        s = cand
        tprev = t
        if np.max(np.abs(s)) > 1.8:
            s = _normalize_chart(s)
            chart = int(np.argmax(np.abs(s)))
            s, ok = _newton_correct(family, s, chart, tol)
            if not ok:
                end_flag = "chart-switch-failed"
                break
        samples.append(_make_sample(family, s, mech, coupler))
        if steps > 20 and np.linalg.norm(s - start_pt) < 1.5 * step and float(tprev @ start_tan) > 0:
            closed = True
            end_flag = ""
            break
    return BranchTrace(samples=samples, closed=closed, end_flags=(end_flag, ""))


def _make_sample(family, s, mech, coupler):
    pose = family.pose_at(s)
    lengths = ()
    cp = None
    if mech is not None:
        lengths = tuple(
            math.sqrt(sum((m - q) ** 2 for m, q in zip(pose.apply(leg.p), leg.q)))
            for leg in mech.legs
        )
    if coupler is not None:
        cp = pose.apply(coupler)
    return MotionSample(s=tuple(s), pose=pose, leg_lengths=lengths, coupler=cp)


def trace_components(
    family: MotionFamily,
    mech: Mechanism | None = None,
    coupler: tuple | None = None,
    step: float = 1e-3,
    tol: float = 1e-12,
    max_steps: int = 100_000,
    seeds: int = 200,
    rng_seed: int = 3,
) -> list[list[BranchTrace]]:
    """Trace the whole real curve: components are lists of branch traces
    merged at nodes when the tangent directions match."""
    pts = find_curve_points(family, attempts=seeds, rng_seed=rng_seed)
    components: list[list[BranchTrace]] = []
    visited: list[np.ndarray] = []

    def seen(s):
        sn = _normalize_chart(np.array(s))
        for v in visited:
            if np.linalg.norm(v - sn) < 4 * step:
                return True
        return False

    for pt in pts:
        if seen(pt):
            continue
        branch = trace_branch(
            family, pt, step=step, tol=tol, max_steps=max_steps, mech=mech, coupler=coupler
        )
        traces = [branch]
        if not branch.closed:
            back = trace_branch(
                family,
                pt,
                step=step,
                tol=tol,
                max_steps=max_steps,
                mech=mech,
                coupler=coupler,
                direction=-1,
            )
            traces.append(back)
        for tr in traces:
            stride = max(1, len(tr.samples) // 600)
            for smp in tr.samples[::stride]:
                visited.append(_normalize_chart(np.array(smp.s)))
        components.append(traces)
    return components


def start_positions(mech: Mechanism, pose: Pose) -> tuple:
    """Moved platform anchors A p + b (base anchors never move)."""
    return tuple(pose.apply(leg.p) for leg in mech.legs)


def leg_length_deviation(mech: Mechanism, samples) -> float:
    rest = [math.sqrt(float(leg.length_sq())) for leg in mech.legs]
    worst = 0.0
    for smp in samples:
        for L, L0 in zip(smp.leg_lengths, rest):
            worst = max(worst, abs(L - L0))
    return worst


def coupler_csv(samples) -> str:
    header = (
        "index,s1,s2,s3,"
        + ",".join(f"A{i}{j}" for i in range(1, 4) for j in range(1, 4))
        + ",b1,b2,b3,coupler_x,coupler_y,coupler_z,"
        + ",".join(f"len{i}" for i in range(1, 7))
    )
    lines = [header]
    for k, smp in enumerate(samples):
        A = smp.pose.A
        row = [k, *smp.s]
        row.extend(A[i][j] for i in range(3) for j in range(3))
        row.extend(smp.pose.b)
        row.extend(smp.coupler if smp.coupler else ("", "", ""))
        row.extend(smp.leg_lengths)
        lines.append(",".join(str(v) for v in row))
    return "\n".join(lines) + "\n"


def coupler_svg(components, width: int = 640, height: int = 640) -> str:
    """Orthographic (x, y) projection of the coupler curves, plain paths."""
    allpts = [
        smp.coupler
        for comp in components
        for tr in comp
        for smp in tr.samples
        if smp.coupler is not None
    ]
    if not allpts:
        return "<svg xmlns='http://www.w3.org/2000/svg'/>"
    xs = [p[0] for p in allpts]
    ys = [p[1] for p in allpts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-9)
    pad = 0.05 * span

    def sx(x):
        return (x - x0 + pad) / (span + 2 * pad) * width

    def sy(y):
        return height - (y - y0 + pad) / (span + 2 * pad) * height

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]
    paths = []
    for ci, comp in enumerate(components):
        for tr in comp:
            pts = [smp.coupler for smp in tr.samples if smp.coupler is not None]
            if len(pts) < 2:
                continue
            d = "M" + " L".join(f"{sx(p[0]):.2f},{sy(p[1]):.2f}" for p in pts)
            paths.append(
                f"<path d='{d}' fill='none' stroke='{colors[ci % len(colors)]}' stroke-width='1'/>"
            )
    return (
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}' "
        f"viewBox='0 0 {width} {height}'>" + "".join(paths) + "</svg>"
    )
