"""Observables extracted from states and runs: kinks, spectra, packets, distances."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.stats import theilslopes

from .grid import FieldState, local_energy, local_seminorm

MIN_SPECTRUM_SAMPLES = 1024


@dataclass
class KinkRecord:
    position: float
    width: float
    polarity: int
    velocity: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("kink width must be positive")
        if self.polarity not in (1, -1):
            raise ValueError("polarity is +1 or -1")


def _crossing(x, f, level, i0, i1):
    """Linear interpolation of the first crossing of ``level`` in f[i0..i1]."""
    seg = f[i0:i1 + 1] - level
    s = np.nonzero(np.sign(seg[:-1]) != np.sign(seg[1:]))[0]
    if s.size == 0:
        return None
    j = i0 + s[0]
    a, b = f[j] - level, f[j + 1] - level
    if a == b:
        return x[j]
    return x[j] + (x[j + 1] - x[j]) * a / (a - b)


def detect_kinks(state: FieldState, eps: float = 0.1) -> list[KinkRecord]:
    """Transits of a real field between the vacua -1 and +1.

    A transit runs from the last sample beyond ``-1+eps`` to the first sample
    beyond ``1-eps`` (or the reverse).  Position is the zero crossing, width
    the distance between the +-0.5 crossings.
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    psi = np.real(state.psi)
    x = state.grid.x
    label = np.zeros(psi.size, dtype=int)
    label[psi < -1 + eps] = -1
    label[psi > 1 - eps] = 1
    out = []
    last, last_i = 0, -1
    for i in np.nonzero(label)[0]:
        if last != 0 and label[i] != last:
            pol = int(label[i])
            x0 = _crossing(x, psi, 0.0, last_i, i)
            xp = _crossing(x, psi, 0.5, last_i, i)
            xm = _crossing(x, psi, -0.5, last_i, i)
            if x0 is not None and xp is not None and xm is not None and xp != xm:
                out.append(KinkRecord(float(x0), float(abs(xp - xm)), pol))
        last, last_i = label[i], i
    return out


@dataclass
class KinkTrack:
    polarity: int
    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    widths: list = field(default_factory=list)
    velocity: float = float("nan")

    def record(self) -> KinkRecord:
        return KinkRecord(self.positions[-1], self.widths[-1], self.polarity,
                          0.0 if math.isnan(self.velocity) else self.velocity)


@dataclass
class TrackResult:
    tracks: list
    fragments: int

    def persistent(self, t_min: float) -> list:
        """Tracks alive over the whole span after ``t_min``."""
        t_end = max((tr.times[-1] for tr in self.tracks), default=t_min)
        return [tr for tr in self.tracks if tr.times[0] <= t_min + 1e-9 and tr.times[-1] >= t_end - 1e-9]


def track(records_over_time: Sequence, max_speed: float = 1.0, slack: float = 0.0,
          max_gap: int = 2) -> TrackResult:
    """Greedy nearest-position matching of kinks between consecutive samples.

    A match may jump at most ``max_speed * dt + slack`` where dt is the time
    since the track was last seen.  A track survives up to ``max_gap``
    consecutive samples without a detection (radiation can briefly hide a
    kink from the threshold detector).  Velocities are least-squares slopes
    of position against time per track.
    """
    if len(records_over_time) < 5:
        raise ValueError("tracking needs at least 5 time samples")
    open_tracks: list[KinkTrack] = []
    misses: list[int] = []
    done: list[KinkTrack] = []
    for t, recs in records_over_time:
        recs = list(recs)
        used = set()
        pairs = sorted(
            (abs(r.position - tr.positions[-1]), ti, ri)
            for ti, tr in enumerate(open_tracks) for ri, r in enumerate(recs)
            if r.polarity == tr.polarity)
        taken_t = set()
        for d, ti, ri in pairs:
            tr = open_tracks[ti]
            if ti in taken_t or ri in used or d > max_speed * (t - tr.times[-1]) + slack:
                continue
            taken_t.add(ti)
            used.add(ri)
            tr.times.append(t)
            tr.positions.append(recs[ri].position)
            tr.widths.append(recs[ri].width)
        still, still_m = [], []
        for ti, tr in enumerate(open_tracks):
            m = 0 if ti in taken_t else misses[ti] + 1
            if m > max_gap:
                done.append(tr)
            else:
                still.append(tr)
                still_m.append(m)
        open_tracks, misses = still, still_m
        for ri, r in enumerate(recs):
            if ri not in used:
                open_tracks.append(KinkTrack(r.polarity, [t], [r.position], [r.width]))
                misses.append(0)
    tracks = done + open_tracks
    for tr in tracks:
        if len(tr.times) >= 2:
            tr.velocity = float(np.polyfit(tr.times, tr.positions, 1)[0])
    tracks.sort(key=lambda tr: (tr.times[0], tr.positions[0]))
    n_samples = len(records_over_time)
    fragments = sum(1 for tr in tracks if len(tr.times) < n_samples // 2)
    return TrackResult(tracks, fragments)


@dataclass
class SpectrumReport:
    freqs: np.ndarray
    power: np.ndarray
    window: dict
    peak_freq: float
    gap_mass_fraction: float

    @property
    def df(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def to_json(self) -> dict:
        return {"window": self.window, "peak_freq": self.peak_freq,
                "gap_mass_fraction": self.gap_mass_fraction, "n_bins": int(self.freqs.size)}

    def write(self, stem: str | Path) -> None:
        stem = Path(stem)
        stem.with_suffix(".json").write_text(json.dumps(self.to_json(), indent=2, sort_keys=True))
        with open(stem.with_suffix(".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["freq", "power"])
            for f, p in zip(self.freqs, self.power):
                w.writerow([repr(float(f)), repr(float(p))])


def point_trace_spectrum(t, trace, window: tuple[float, float] | None = None,
                         m: float = 1.0, delta: float | None = None) -> SpectrumReport:
    """Hann-tapered normalized power spectrum of a uniformly sampled trace.

    A component ``e^{i w t}`` sits at angular frequency ``w``, so the trace
    ``e^{-i 0.7 t}`` peaks at ``w = -0.7``.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(trace)
    if window is None:
        window = (t[0], t[-1])
    start, end = window
    sel = (t >= start - 1e-9) & (t <= end + 1e-9)
    n = int(sel.sum())
    if n < MIN_SPECTRUM_SAMPLES:
        raise ValueError(f"window has {n} samples; at least {MIN_SPECTRUM_SAMPLES} required")
    dt = float(np.mean(np.diff(t[sel])))
    zz = z[sel] * np.hanning(n)
    power = np.fft.fftshift(np.abs(np.fft.fft(zz)) ** 2)
    freqs = np.fft.fftshift(2 * np.pi * np.fft.fftfreq(n, dt))
    tot = power.sum()
    power = power / tot if tot > 0 else np.full(n, 1.0 / n)
    report = SpectrumReport(freqs, power, {"start": float(start), "end": float(end), "taper": "hann"},
                            float(freqs[np.argmax(power)]), float("nan"))
    if delta is None:
        delta = max(0.05, 2 * report.df)
    report.gap_mass_fraction = gap_mass(report, m, delta)
    return report


def gap_mass(report: SpectrumReport, m: float, delta: float) -> float:
    """Fraction of normalized power at ``|w| > m + delta``."""
    if delta < 2 * report.df - 1e-12:
        raise ValueError("delta must span at least two frequency bins")
    return float(np.clip(report.power[np.abs(report.freqs) > m + delta].sum(), 0.0, 1.0))


def peak_cluster_fraction(report: SpectrumReport, bins: int = 3) -> float:
    """Power within ``bins`` bins of the peak (Hann main lobe is +-2 bins)."""
    i = int(np.argmax(report.power))
    return float(report.power[max(i - bins, 0):i + bins + 1].sum())


def internal_mode_frequency(t, trace, min_periods: float = 20.0, snr: float = 10.0,
                            min_freq: float = 0.0) -> float | None:
    """Dominant positive angular frequency of a real trace, or None.

    A linear trend is removed first and bins below ``min_freq`` are ignored
    (a probe slowly drifting against the kink shows up there).  The peak is
    refined by a parabola through the log-power of the three bins around the
    maximum.  None when the peak is below ``snr`` times the median power.
    """
    t = np.asarray(t, dtype=float)
    y = np.real(np.asarray(trace))
    y = y - np.polyval(np.polyfit(t, y, 1), t)
    n = y.size
    dt = float(np.mean(np.diff(t)))
    p = np.abs(np.fft.rfft(y * np.hanning(n))) ** 2
    w = 2 * np.pi * np.fft.rfftfreq(n, dt)
    p[w < max(min_freq, 1e-300)] = 0.0
    floor = np.median(p)
    i = int(np.argmax(p))
    if p[i] <= 0 or p[i] < snr * floor or i == 0 or i == p.size - 1:
        return None
    a, b, c = np.log(p[i - 1:i + 2] + 1e-300)
    shift = 0.5 * (a - c) / (a - 2 * b + c)
    freq = float(w[i] + shift * (w[1] - w[0]))
    if freq * (t[-1] - t[0]) / (2 * np.pi) < min_periods:
        raise ValueError("trace shorter than the required number of periods")
    return freq


@dataclass
class Packet:
    speed: float
    frequency: float
    band_center: float
    n_probes: int
    arrivals: list

    def predicted_speed(self, mass2: float = 2.0) -> float:
        w = self.frequency
        return math.sqrt(max(w * w - mass2, 0.0)) / w


def _probe_traces(source, probes):
    if isinstance(source, dict):
        keys = sorted(source)
        xs = [source[k][0] for k in keys]
        t = np.asarray(source[keys[0]][1][0])
        return t, np.asarray(xs, dtype=float), np.array([np.asarray(source[k][1][1]) for k in keys])
    snaps = list(source)
    grid = snaps[0].grid
    if probes is None:
        probes = np.linspace(0.1 * grid.x_max, 0.6 * grid.x_max, 9)
    idx = [grid.nearest_index(p) for p in probes]
    t = np.array([s.time for s in snaps])
    traces = np.array([[s.psi[i] for s in snaps] for i in idx])
    return t, grid.x[idx], traces


def _band_envelope(sig, dt, wc, sw):
    n = sig.size
    N = 4 * n
    f = 2 * np.pi * np.fft.fftfreq(N, dt)
    S = np.fft.fft(sig, N) * 2 * np.exp(-0.5 * ((f - wc) / sw) ** 2)
    return np.abs(np.fft.ifft(S))[:n], np.abs(S) ** 2, f


def packet_group_velocities(source, vacuum: float = 1.0, threshold: float = 0.01,
                            probes=None, bands=None, min_probes: int = 3) -> list[Packet]:
    """Front speeds and local frequencies of outgoing radiation packets.

    ``source`` is a sequence of snapshots (probes sampled from them) or a
    mapping ``name -> (x_probe, (t, values))`` of point traces.  Each
    frequency band is isolated with a Gaussian filter of width
    ``max(0.2, 0.08 w)``; a packet front reaches a probe when the band
    envelope of ``|psi| - vacuum`` first exceeds ``threshold``.  Speeds are
    Theil-Sen slopes of ``|x|`` against arrival time.  Default bands: spectral
    peaks above the continuum edge plus an integer ladder 3, 4, ... up to half
    the Nyquist frequency, keeping only bands whose filter (two widths) stays
    above the edge.
    """
    t, xs, traces = _probe_traces(source, probes)
    dt = float(np.mean(np.diff(t)))
    d = np.abs(traces) - vacuum
    if bands is None:
        p = np.abs(np.fft.rfft(d * np.hanning(t.size), axis=1)) ** 2
        p = p.sum(axis=0)
        w = 2 * np.pi * np.fft.rfftfreq(t.size, dt)
        edge = math.sqrt(2.0) * 1.05
        ok = w > edge
        floor = np.median(p[ok]) if ok.any() else 0.0
        peaks = [float(w[i]) for i in range(1, p.size - 1)
                 if ok[i] and p[i] >= p[i - 1] and p[i] >= p[i + 1] and p[i] > 100 * floor]
        ladder = [float(k) for k in range(3, int(0.5 * np.pi / dt) + 1)]
        # a filter reaching below the edge mixes in non-propagating content
        bands = sorted(set(round(b, 6) for b in peaks + ladder
                           if b - 2 * max(0.2, 0.08 * b) > math.sqrt(2.0)))
    packets = []
    for wc in bands:
        sw = max(0.2, 0.08 * wc)
        arr_x, arr_t, num, den = [], [], 0.0, 0.0
        for x, sig in zip(xs, d):
            env, S2, f = _band_envelope(sig, dt, wc, sw)
            hit = np.nonzero(env > threshold)[0]
            if hit.size:
                arr_x.append(abs(float(x)))
                arr_t.append(float(t[hit[0]]))
                pos = f > 0
                num += float(np.sum(f[pos] * S2[pos]))
                den += float(np.sum(S2[pos]))
        if len(arr_x) < min_probes or den == 0:
            continue
        slope = float(theilslopes(arr_x, arr_t)[0])
        if slope <= 0:
            continue
        packets.append(Packet(slope, num / den, float(wc), len(arr_x), list(zip(arr_x, arr_t))))
    return packets


def dist_to_stationary(state: FieldState, targets: Sequence[FieldState], R: float,
                       variant: str = "kg") -> tuple[float, int]:
    """Smallest local seminorm distance to ``targets`` (first index on ties)."""
    if not targets:
        raise ValueError("no stationary targets")
    best, best_i = math.inf, -1
    for i, tgt in enumerate(targets):
        s = local_seminorm(state, tgt, R, variant)
        if s < best:
            best, best_i = s, i
    return best, best_i


def constant_targets(grid, values) -> list[FieldState]:
    """Stationary states ``psi = q`` (constants), e.g. zeros of F or vacua."""
    n = grid.n_points
    return [FieldState(grid, np.full(n, float(q)), np.zeros(n)) for q in values]


def radiated_energy(run, R: float, T1: float, T2: float) -> float:
    """Energy in ``[-R, R]`` at ``T1`` minus energy there at ``T2``."""
    s1 = run.snapshot_at(T1)
    s2 = run.snapshot_at(T2)
    return local_energy(run.model, s1, R) - local_energy(run.model, s2, R)


def tridiagonal_eigenvalues(d, e, k: int, tol: float = 1e-12) -> np.ndarray:
    """Lowest ``k`` eigenvalues of a symmetric tridiagonal matrix by Sturm bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    n = d.size
    if not 0 < k <= n:
        raise ValueError(f"k_eigs={k} outside 1..{n}")
    r = np.zeros(n)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    lo0, hi0 = float(np.min(d - r)), float(np.max(d + r))
    dl, e2 = d.tolist(), (e * e).tolist()
    out = []
    lo = lo0
    for j in range(k):
        a, b = lo, hi0
        while b - a > tol * max(1.0, abs(a) + abs(b)):
            mid = 0.5 * (a + b)
            if _sturm_count(dl, e2, mid) > j:
                b = mid
            else:
                a = mid
        out.append(0.5 * (a + b))
        lo = a
    return np.array(out)


def _sturm_count(d, e2, lam):
    count = 0
    q = d[0] - lam
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0.0:
            q = 1e-300
        q = d[i] - lam - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def schrodinger_spectrum(potential, dx: float, shift: float = 0.0, k_eigs: int = 2) -> np.ndarray:
    """Lowest eigenvalues of ``-d^2/dx^2 + shift + V`` with Dirichlet ends.

    ``potential`` holds V on all grid nodes; the two end nodes carry the
    Dirichlet condition and are dropped.
    """
    V = np.asarray(potential, dtype=float)[1:-1]
    d = 2.0 / dx ** 2 + shift + V
    e = np.full(V.size - 1, -1.0 / dx ** 2)
    return tridiagonal_eigenvalues(d, e, k_eigs)


def report_json(obj) -> str:
    if hasattr(obj, "to_json"):
        obj = obj.to_json()
    elif hasattr(obj, "__dataclass_fields__"):
        obj = asdict(obj)
    return json.dumps(obj, indent=2, sort_keys=True, default=float)
