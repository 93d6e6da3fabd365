"""Experiment runner: single scattering points, parameter sweeps, stationary
photon statistics, resonance tables, and the five figure presets.

Every dataset is written as an RFC-4180-style CSV (header row, LF endings,
12 significant digits) with a JSON metadata sidecar carrying the full
resolved configuration, per-point engine choices, spot-check records and the
package version, sufficient to re-run the job exactly.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, engine, photons, resonances
from .profiles import ModeProfile, from_name
from .scattering import rabi_wavenumber

PI = math.pi

QUANTITIES = ("pem", "t", "te", "tf", "re", "rf")
_QTY_ATTR = {"pem": "Pem", "t": "T", "te": "Te", "tf": "Tf", "re": "Re", "rf": "Rf"}
_QTY_COL = {"pem": "Pem", "t": "T", "te": "Te", "tf": "Tf", "re": "Re", "rf": "Rf"}

#: channels with coherent-state weight below this are skipped in fig4; the
#: induced error in T is below 2e-6 and is recorded in the metadata.
FIG4_WEIGHT_FLOOR = 1e-6


def parse_len(text: str) -> float:
    """Float with an optional trailing 'pi' (e.g. '100pi' -> 100*pi)."""
    s = str(text).strip().lower()
    if s.endswith("pi"):
        return float(s[:-2] or "1") * PI
    return float(s)


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return "nan"
    return f"{v:.12g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def write_metadata(path: Path, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _engine_summary(per_point) -> object:
    uniq = sorted(set(per_point))
    if len(uniq) == 1:
        return uniq[0]
    return list(per_point)


def _grid(lo: float, hi: float, step: float) -> np.ndarray:
    if not (hi > lo and step > 0):
        raise SystemExit("window must be nonempty with a positive step")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(count)


def _profiles_arg(name: str) -> list[ModeProfile]:
    if name == "both":
        return [from_name("sinusoidal"), from_name("mesa")]
    return [from_name(name)]


# ----------------------------------------------------------------------
# sweep machinery shared by `sweep` and the figure presets
# ----------------------------------------------------------------------

def run_sweep(profiles, ns, quantities, k_over_kappa0, lo, hi, step,
              eng, spot_checks, out_dir, name, extra_meta=None):
    grid = _grid(lo, hi, step)
    kl = k_over_kappa0 * grid
    header = ["kappa0L"]
    columns = [grid]
    engines_meta = {}
    spot_meta = []
    suffix_profile = len(profiles) > 1
    for profile in profiles:
        for n in ns:
            kapn = rabi_wavenumber(1.0, n) * grid
            out = engine.outcomes_batch(profile, kl, kapn, eng)
            tag = f"_n{n}" + (f"_{profile.kind}" if suffix_profile else "")
            for q in quantities:
                header.append(_QTY_COL[q] + tag)
                columns.append(getattr(out, _QTY_ATTR[q]))
            engines_meta["series" + tag] = _engine_summary(out.engine)
            semi = out.engine == engine.SEMICLASSICAL
            if spot_checks > 0 and np.any(semi):
                recs = engine.spot_check(profile, kl[semi], kapn[semi],
                                         max_points=spot_checks)
                for r in recs:
                    r["series"] = "series" + tag
                spot_meta.extend(recs)
    rows = zip(*columns)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    write_csv(csv_path, header, rows)
    meta = {
        "command": name,
        "version": __version__,
        "config": {
            "profiles": [p.kind for p in profiles],
            "photon_numbers": list(ns),
            "quantities": list(quantities),
            "k_over_kappa0": k_over_kappa0,
            "kappa0L_min": lo,
            "kappa0L_max": hi,
            "step": step,
            "engine": eng,
            "spot_checks": spot_checks,
        },
        "engine_per_point": engines_meta,
        "spot_check_records": spot_meta,
    }
    if extra_meta:
        meta.update(extra_meta)
    write_metadata(out_dir / f"{name}.meta.json", meta)
    return csv_path


def build_gain(profile, kind, kappa0L, k_over_kappa0, nex, nb, eng,
               start=64, cap=100_000):
    """Gain curve grown until the stationary tail converges."""
    count = start
    while True:
        if kind == "zero":
            gain = np.zeros(count)
        elif kind == "conventional":
            gain = photons.conventional_gain(kappa0L, k_over_kappa0, count)
        else:
            gain = engine.gain_curve(profile, kappa0L, k_over_kappa0, count, eng)
        cfg = photons.MicromaserConfig(nex=nex, nb=nb, gain=gain)
        try:
            dist = photons.steady_state_distribution(cfg)
        except photons.GainCurveExhausted as e:
            if count >= cap:
                raise
            count = max(2 * count, e.needed + 32)
            continue
        return dist, gain


def run_steady_state(profile, gain_kind, kappa0L, k_over_kappa0, nex, nb,
                     eng, out_dir, name, extra_meta=None):
    dist, gain = build_gain(profile, gain_kind, kappa0L, k_over_kappa0,
                            nex, nb, eng)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / f"{name}.csv", ["n", "p_n"],
              ((n, p) for n, p in enumerate(dist.p)))
    meta = {
        "command": name,
        "version": __version__,
        "config": {
            "profile": profile.kind,
            "gain": gain_kind,
            "kappa0L": kappa0L,
            "k_over_kappa0": k_over_kappa0,
            "nex": nex,
            "nb": nb,
            "engine": eng,
        },
        "n_max": dist.n_max,
        "gain_entries": len(gain),
    }
    if extra_meta:
        meta.update(extra_meta)
    write_metadata(out_dir / f"{name}.meta.json", meta)
    return out_dir / f"{name}.csv"


def run_resonances(profile, k_over_kappa_n, lo, hi, eng, out_dir, name):
    preds = dict(resonances.predicted_positions(profile, k_over_kappa_n, lo, hi))
    try:
        found = resonances.find_resonances(profile, k_over_kappa_n, (lo, hi),
                                           engine=eng)
    except resonances.WindowTooCoarse:
        raise
    rows = [(r.index, r.position, r.fwhm, r.parity, r.peak_value, r.shallow,
             preds.get(r.index, math.nan)) for r in found]
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / f"{name}.csv",
              ["index", "position", "fwhm", "parity", "peak_t2", "shallow",
               "predicted_position"], rows)
    write_metadata(out_dir / f"{name}.meta.json", {
        "command": name,
        "version": __version__,
        "config": {
            "profile": profile.kind,
            "k_over_kappa_n": k_over_kappa_n,
            "window": [lo, hi],
            "engine": eng,
        },
        "count": len(rows),
    })
    return out_dir / f"{name}.csv"


# ----------------------------------------------------------------------
# figure presets
# ----------------------------------------------------------------------

def preset_fig1(args):
    """Vacuum-field emission probability across 100pi..104pi, both modes."""
    step = args.step if args.step else 0.005
    return run_sweep(_profiles_arg("both"), [0], ["pem"], 0.01,
                     100 * PI, 104 * PI, step, args.engine_or("exact"),
                     args.spot_checks, args.out, "fig1")


def preset_fig2a(args):
    """Stationary photon statistics, mesa gain at kappa_2 L = 99 pi."""
    kappa0L = 99 * PI / 3 ** 0.25
    return run_steady_state(from_name("mesa"), "scattering", kappa0L, 0.01,
                            1000.0, 1.0, args.engine_or("exact"),
                            args.out, "fig2a")


def preset_fig2b(args):
    """Stationary photon statistics, sinusoidal gain at the 100th resonance.

    The resonance position is located, not taken from a printed rounding:
    the m = 99 root of the localization condition seeds a narrow window and
    the |t_-|^2 peak is refined inside it at k/kappa_2 held to the same
    physical atom momentum (k/kappa_0 = 0.01).
    """
    sin = from_name("sinusoidal")
    ratio2 = 0.01 / 3 ** 0.25  # k/kappa_2 with k tied to kappa_0
    (root,) = resonances.resonance_condition_roots(ratio2, [99])
    spacing = PI * (PI / 2) / resonances.wkb_integral(ratio2)
    window = (root - 1.2 * spacing, root + 1.2 * spacing)
    found = resonances.find_resonances(sin, ratio2, window, engine="exact")
    best = min(found, key=lambda r: abs(r.position - root))
    kappa0L = best.position / 3 ** 0.25
    return run_steady_state(
        sin, "scattering", kappa0L, 0.01, 1000.0, 1.0,
        args.engine_or("auto"), args.out, "fig2b",
        extra_meta={"resonance": {
            "index": best.index, "kappa2L": best.position,
            "kappa2L_over_pi": best.position / PI, "fwhm": best.fwhm,
            "parity": best.parity, "predicted_kappa2L": root,
        }})


def preset_fig3(args):
    """T^n and P_em^n for n = 0..3 across the realistic-coupling window."""
    step = args.step if args.step else 0.02
    return run_sweep(_profiles_arg("sinusoidal"), [0, 1, 2, 3], ["t", "pem"],
                     0.01, 30000 * PI, 30005 * PI, step,
                     args.engine_or("auto"), args.spot_checks, args.out, "fig3")


def preset_fig4(args):
    """Coherent-state total transmission, both modes, nbar = 0.25 and 2."""
    step = args.step if args.step else 0.01
    lo, hi = 100 * PI, 105 * PI
    eng = args.engine_or("exact")
    grid = _grid(lo, hi, step)
    kl = 0.01 * grid
    nbars = (0.25, 2.0)
    weights = {nb: photons.field_weights(photons.FieldState("coherent", nb))
               for nb in nbars}
    n_count = max(
        int(np.max(np.nonzero(w >= FIG4_WEIGHT_FLOOR)[0])) + 1
        for w in weights.values())
    header = ["kappa0L"]
    columns = [grid]
    engines_meta = {}
    for profile in _profiles_arg("both"):
        t_channels = np.empty((n_count, grid.size))
        eng_used = []
        for n in range(n_count):
            out = engine.outcomes_batch(profile, kl,
                                        rabi_wavenumber(1.0, n) * grid, eng)
            t_channels[n] = out.T
            eng_used.append(_engine_summary(out.engine))
        engines_meta[profile.kind] = eng_used
        for nb in nbars:
            w = weights[nb][:n_count]
            header.append(f"T_{profile.kind}_nbar{nb:g}")
            columns.append(w @ t_channels)
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / "fig4.csv", header, zip(*columns))
    write_metadata(args.out / "fig4.meta.json", {
        "command": "fig4",
        "version": __version__,
        "config": {
            "profiles": ["sinusoidal", "mesa"],
            "nbar": list(nbars),
            "k_over_kappa0": 0.01,
            "kappa0L_min": lo,
            "kappa0L_max": hi,
            "step": step,
            "engine": eng,
            "channels": n_count,
            "channel_weight_floor": FIG4_WEIGHT_FLOOR,
            "truncation_error_bound": float(sum(
                w[n_count:].sum() for w in weights.values())),
        },
        "engine_per_point": engines_meta,
    })
    return args.out / "fig4.csv"


PRESETS = {
    "fig1": preset_fig1,
    "fig2a": preset_fig2a,
    "fig2b": preset_fig2b,
    "fig3": preset_fig3,
    "fig4": preset_fig4,
}


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

class _Args(argparse.Namespace):
    def engine_or(self, default: str) -> str:
        return self.engine if self.engine else default


def _add_common(p):
    p.add_argument("--out", type=Path, default=Path("out"),
                   help="output directory (default ./out)")
    p.add_argument("--engine", choices=[engine.EXACT, engine.SEMICLASSICAL,
                                        engine.AUTO], default=None)
    p.add_argument("--threads", type=int, default=None,
                   help="numba thread count for the integrator kernels")
    p.add_argument("--config", type=Path, default=None,
                   help="JSON file with defaults for any long option")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="mazer",
        description="Ultracold-atom cavity scattering: exact and semiclassical "
                    "engines, resonances, and micromaser photon statistics.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("scatter", help="single point, prints all probabilities")
    p.add_argument("--profile", required=True, choices=["mesa", "sinusoidal"])
    p.add_argument("--kappa0L", type=parse_len, required=True)
    p.add_argument("--k-over-kappa0", type=float, required=True)
    p.add_argument("--n", type=int, default=0)
    _add_common(p)

    p = sub.add_parser("sweep", help="grid sweep over kappa_0 L")
    p.add_argument("--profile", required=True,
                   choices=["mesa", "sinusoidal", "both"])
    p.add_argument("--n", default="0", help="comma-separated photon numbers")
    p.add_argument("--quantity", default="pem,t",
                   help=f"comma-separated from {','.join(QUANTITIES)}")
    p.add_argument("--k-over-kappa0", type=float, required=True)
    p.add_argument("--min", type=parse_len, required=True)
    p.add_argument("--max", type=parse_len, required=True)
    p.add_argument("--step", type=parse_len, required=True)
    p.add_argument("--name", default="sweep")
    p.add_argument("--spot-checks", type=int, default=2)
    _add_common(p)

    p = sub.add_parser("steady-state", help="stationary photon distribution")
    p.add_argument("--profile", required=True, choices=["mesa", "sinusoidal"])
    p.add_argument("--kappa0L", type=parse_len, required=True)
    p.add_argument("--k-over-kappa0", type=float, required=True)
    p.add_argument("--nex", type=float, required=True)
    p.add_argument("--nb", type=float, required=True)
    p.add_argument("--gain", choices=["scattering", "conventional", "zero"],
                   default="scattering")
    p.add_argument("--name", default="steady_state")
    _add_common(p)

    p = sub.add_parser("resonances", help="locate |t_-|^2 resonances")
    p.add_argument("--profile", required=True, choices=["mesa", "sinusoidal"])
    p.add_argument("--k-over-kappa-n", type=float, required=True)
    p.add_argument("--min", type=parse_len, required=True)
    p.add_argument("--max", type=parse_len, required=True)
    p.add_argument("--name", default="resonances")
    _add_common(p)

    p = sub.add_parser("preset", help="regenerate a figure dataset")
    p.add_argument("which", choices=sorted(PRESETS))
    p.add_argument("--step", type=parse_len, default=None)
    p.add_argument("--spot-checks", type=int, default=2)
    _add_common(p)
    return ap


def _apply_config_file(ap, argv):
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config", type=Path, default=None)
    known, _ = probe.parse_known_args(argv)
    if known.config is not None:
        with open(known.config) as fh:
            defaults = json.load(fh)
        for action in ap._subparsers._group_actions[0].choices.values():
            usable = {k: v for k, v in defaults.items()
                      if any(k == a.dest for a in action._actions)}
            action.set_defaults(**usable)
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    _apply_config_file(ap, argv)
    args = ap.parse_args(argv, namespace=_Args())
    if getattr(args, "spot_checks", None) is not None:
        args.spot_checks = max(0, min(10, args.spot_checks))
    if args.threads:
        import numba
        numba.set_num_threads(args.threads)

    try:
        if args.cmd == "scatter":
            profile = from_name(args.profile)
            kl = args.k_over_kappa0 * args.kappa0L
            kapn = rabi_wavenumber(args.kappa0L, args.n)
            out = engine.outcomes_point(profile, kl, kapn,
                                        args.engine_or("auto"))
            used = engine.choose_engine(profile, kl, kapn,
                                        args.engine_or("auto"))[0]
            for label, v in [("Te", out.Te), ("Tf", out.Tf), ("Re", out.Re),
                             ("Rf", out.Rf), ("Pem", out.Pem), ("T", out.T)]:
                print(f"{label} = {fmt(v)}")
            print(f"engine = {used}")
        elif args.cmd == "sweep":
            ns = [int(s) for s in str(args.n).split(",") if s != ""]
            qs = [q.strip().lower() for q in args.quantity.split(",") if q]
            for q in qs:
                if q not in QUANTITIES:
                    raise SystemExit(f"unknown quantity {q!r}")
            path = run_sweep(_profiles_arg(args.profile), ns, qs,
                             args.k_over_kappa0, args.min, args.max, args.step,
                             args.engine_or("auto"), args.spot_checks,
                             args.out, args.name)
            print(f"wrote {path}")
        elif args.cmd == "steady-state":
            path = run_steady_state(from_name(args.profile), args.gain,
                                    args.kappa0L, args.k_over_kappa0,
                                    args.nex, args.nb, args.engine_or("auto"),
                                    args.out, args.name)
            print(f"wrote {path}")
        elif args.cmd == "resonances":
            path = run_resonances(from_name(args.profile), args.k_over_kappa_n,
                                  args.min, args.max,
                                  args.engine_or("exact"), args.out, args.name)
            print(f"wrote {path}")
        elif args.cmd == "preset":
            path = PRESETS[args.which](args)
            print(f"wrote {path}")
    except engine.InfeasibleEngine as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
