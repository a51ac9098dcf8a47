"""Deterministic SVG pictures of planar partitions (C^1, R^1 and R^2)."""

from __future__ import annotations

import numpy as np

from .groups import FiniteSubgroup
from .measures import MassDistribution, measure_regions
from .partition import PartitionParams, fan_boundary

SIZE = 480
PAD = 36
POS_COLOR = "#1f5fa8"
NEG_COLOR = "#c8372d"
RAY_COLOR = "#222222"


class PlotError(ValueError):
    pass


def _fmt(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


class _Canvas:
    def __init__(self, pts: np.ndarray):
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        span = float(max(hi - lo)) or 1.0
        centre = (lo + hi) / 2
        self.lo = centre - 0.6 * span
        self.scale = (SIZE - 2 * PAD) / (1.2 * span)
        self.items: list[str] = []

    def xy(self, p) -> tuple[str, str]:
        x = PAD + (p[0] - self.lo[0]) * self.scale
        y = SIZE - PAD - (p[1] - self.lo[1]) * self.scale
        return _fmt(x), _fmt(y)

    def reach(self) -> float:
        return 2.0 * SIZE / self.scale

    def line(self, a, b, dash: bool = False):
        (x1, y1), (x2, y2) = self.xy(a), self.xy(b)
        extra = ' stroke-dasharray="6 4"' if dash else ""
        self.items.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                          f'stroke="{RAY_COLOR}" stroke-width="1.5"{extra}/>')

    def atom(self, p, w: float, wmax: float):
        x, y = self.xy(p)
        r = 9.0 * np.sqrt(abs(w) / wmax) if wmax > 0 else 3.0
        color = POS_COLOR if w >= 0 else NEG_COLOR
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{_fmt(r)}" fill="{color}" fill-opacity="0.8"/>')

    def label(self, p, text: str):
        x, y = self.xy(p)
        self.items.append(f'<text x="{x}" y="{y}" font-size="12" text-anchor="middle">{text}</text>')

    def render(self, title: str) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
                f'viewBox="0 0 {SIZE} {SIZE}">')
        clip = (f'<defs><clipPath id="frame"><rect x="0" y="0" width="{SIZE}" height="{SIZE}"/>'
                f'</clipPath></defs>')
        body = "\n".join(f"  {item}" for item in self.items)
        return (f'{head}\n{clip}\n<rect width="{SIZE}" height="{SIZE}" fill="white"/>\n'
                f'<text x="{PAD}" y="20" font-size="13">{title}</text>\n'
                f'<g clip-path="url(#frame)">\n{body}\n</g>\n</svg>\n')


def _signed_weights(dist: MassDistribution) -> np.ndarray:
    # non-real weights are drawn by their real part
    return dist.cloud().weights[:, 0]


def _measure_text(value: np.ndarray) -> str:
    if len(value) == 1 or np.all(value[1:] == 0):
        return _fmt(float(value[0]))
    return "(" + ", ".join(_fmt(float(v)) for v in value) + ")"


def render_svg(dists: list[MassDistribution], params: PartitionParams, G: FiniteSubgroup) -> str:
    """SVG with atoms (area ~ |w|, colour by sign), boundary rays and region measures."""
    algebra, n = params.algebra, params.n
    if algebra == "C" and n == 1:
        return _render_complex_fan(dists, params, G)
    if algebra == "R" and n in (1, 2):
        return _render_real(dists, params, G)
    raise PlotError(f"plotting supports C^1, R^1 and R^2, not {algebra}^{n}")


def _complex(a) -> complex:
    return complex(a[0], a[1])


def _render_complex_fan(dists, params, G) -> str:
    if params.at_pole():
        raise PlotError("parameters are at a pole; there is no fan to draw")
    u0, u1 = _complex(params.u[0]), _complex(params.u[1])
    # v = x conj(u1) + conj(u0), so x = (v - conj(u0)) / conj(u1)
    to_x = lambda v: (v - u0.conjugate()) / u1.conjugate()  # noqa: E731
    apex = to_x(0)
    pts = np.concatenate([d.cloud().positions[:, 0, :] for d in dists] + [[[apex.real, apex.imag]]])
    cv = _Canvas(pts)
    for h in fan_boundary(params, G):
        lam = _complex(h.direction.coords)
        end = to_x(cv.reach() * lam)
        cv.line((apex.real, apex.imag), (end.real, end.imag))
    wmax = max(float(np.abs(_signed_weights(d)).max()) for d in dists)
    for d in dists:
        for x, w in zip(d.cloud().positions[:, 0, :], _signed_weights(d)):
            cv.atom(x, float(w), wmax)
    rms = [measure_regions(d, params, G) for d in dists]
    radius = 0.35 * (SIZE - 2 * PAD) / cv.scale
    for g in range(G.order):
        site = _complex(G.elements[g])
        v = site * radius * abs(u1)
        p = to_x(v)
        text = f"S{g}: " + " | ".join(_measure_text(rm.values[g]) for rm in rms)
        cv.label((p.real, p.imag), text)
    return cv.render(f"{G.name} fan, {G.order} sectors")


def _render_real(dists, params, G) -> str:
    u = params.u[:, 0]
    n = params.n
    if n == 1:
        pos = [np.column_stack([d.cloud().positions[:, 0, 0], np.zeros(d.cloud().size)]) for d in dists]
    else:
        pos = [d.cloud().positions[:, :, 0] for d in dists]
    pts = np.concatenate(pos)
    tail = np.linalg.norm(u[1:])
    rms = [measure_regions(d, params, G) for d in dists]
    if tail > 0:
        a = u[1:] / tail
        c = -u[0] / tail
        foot = c * a if n == 2 else np.array([c, 0.0])
        pts = np.vstack([pts, foot])
    cv = _Canvas(pts)
    if tail > 0:
        if n == 2:
            along = np.array([-a[1], a[0]])
            normal = a
        else:
            along = np.array([0.0, 1.0])
            normal = np.array([a[0], 0.0])
        cv.line(foot - cv.reach() * along, foot + cv.reach() * along)
    wmax = max(float(np.abs(_signed_weights(d)).max()) for d in dists)
    for d, p in zip(dists, pos):
        for x, w in zip(p, _signed_weights(d)):
            cv.atom(x, float(w), wmax)
    if tail > 0:
        offset = 0.3 * (SIZE - 2 * PAD) / cv.scale
        for g, sign in ((0, 1.0), (1, -1.0)):
            text = f"R{g}: " + " | ".join(_measure_text(rm.values[g]) for rm in rms)
            cv.label(foot + sign * offset * normal, text)
    return cv.render(f"{G.name} partition of R^{n}")
