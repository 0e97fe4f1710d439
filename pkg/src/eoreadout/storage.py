"""Output artifacts: manifests, CSV/NPZ writers, key-value reports.

Every data file carries a `#` header line referencing the manifest that
produced it (config hash, subcommand, seed, scheme).  Data files contain
no timestamps, so a rerun with identical inputs is byte-identical; the
manifest JSON is the only place wall-clock time appears.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = ["Manifest", "header_line", "write_trajectory_csv",
           "write_trajectory_npz", "write_trace_csv", "write_histogram_csv",
           "write_report", "write_rows_csv", "write_shots_npz"]


@dataclass
class Manifest:
    """Provenance record for one CLI invocation."""

    subcommand: str
    config_path: str
    config_hash: str
    seed: int
    scheme: str | None
    out_dir: str
    flags: dict = field(default_factory=dict)
    timestamp: str = ""

    @property
    def run_id(self) -> str:
        blob = json.dumps([self.subcommand, self.config_hash, self.seed,
                           self.scheme, self.flags], sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def save(self, path) -> None:
        doc = asdict(self)
        doc["run_id"] = self.run_id
        doc["timestamp"] = self.timestamp or time.strftime(
            "%Y-%m-%dT%H:%M:%S", time.gmtime())
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Manifest":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        doc.pop("run_id", None)
        return cls(**doc)


def header_line(manifest: Manifest) -> str:
    return (f"# eoreadout {manifest.subcommand} | manifest={manifest.run_id} "
            f"config={manifest.config_hash} seed={manifest.seed} "
            f"scheme={manifest.scheme}")


def _write_csv(path, header_lines, columns, names):
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write("#" + ",".join(names) + "\n")
        rows = np.column_stack(columns)
        for row in rows:
            fh.write(",".join(f"{v:.12e}" for v in row) + "\n")


def write_trajectory_csv(path, traj, manifest: Manifest) -> None:
    """Columnar text export: time plus re/im of every mode and output."""
    names = ["time_s"]
    cols = [traj.t]
    for k, mode in enumerate(("a_c", "a_e", "a_o", "a_s_conj", "a_tm_conj")):
        names += [f"re_{mode}", f"im_{mode}"]
        cols += [np.real(traj.modes[:, k]), np.imag(traj.modes[:, k])]
    for k, out in enumerate(("a_c_out", "a_e_out", "a_o_out")):
        names += [f"re_{out}", f"im_{out}"]
        cols += [np.real(traj.outputs[:, k]), np.imag(traj.outputs[:, k])]
    _write_csv(path, [header_line(manifest)], cols, names)


def write_trajectory_npz(path, traj, manifest: Manifest) -> None:
    np.savez_compressed(path, t=traj.t, modes=traj.modes, outputs=traj.outputs,
                        inputs=traj.inputs, g=traj.g,
                        manifest=header_line(manifest))


def write_trace_csv(path, result, manifest: Manifest) -> None:
    """Detected-envelope trace of one scenario run."""
    extra = (f"# state={result.state_label} port={result.port} "
             f"steady_power={result.steady_power:.12e} "
             f"n_meas_sqrt={result.n_meas_sqrt:g}")
    _write_csv(path, [header_line(manifest), extra],
               [result.t, np.real(result.envelope), np.imag(result.envelope),
                result.power],
               ["time_s", "re_envelope", "im_envelope", "power"])


def write_histogram_csv(path, scores_g, scores_e, fit, manifest: Manifest,
                        bins: int = 81) -> None:
    """Fixed-width-bin histograms of both classes plus fitted-curve samples."""
    all_scores = np.concatenate([scores_g, scores_e])
    lo, hi = float(all_scores.min()), float(all_scores.max())
    pad = 0.05 * (hi - lo or 1.0)
    edges = np.linspace(lo - pad, hi + pad, bins + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    count_g, _ = np.histogram(scores_g, bins=edges)
    count_e, _ = np.histogram(scores_e, bins=edges)
    width = edges[1] - edges[0]

    def component(mu, sigma, w, n):
        return n * w * width / (np.sqrt(2 * np.pi) * sigma) * np.exp(
            -0.5 * ((centers - mu) / sigma) ** 2)

    n_tot = all_scores.size
    fit_lo = component(fit.mu_g, fit.sigma_g, fit.w_g, n_tot)
    fit_hi = component(fit.mu_e, fit.sigma_e, fit.w_e, n_tot)
    extra = (f"# threshold={fit.threshold:.12e} mu_g={fit.mu_g:.12e} "
             f"mu_e={fit.mu_e:.12e} sigma_g={fit.sigma_g:.12e} "
             f"sigma_e={fit.sigma_e:.12e} w_g={fit.w_g:.12e}")
    _write_csv(path, [header_line(manifest), extra],
               [centers, count_g, count_e, fit_lo, fit_hi],
               ["bin_center", "count_g", "count_e", "fit_g", "fit_e"])


def write_report(path, mapping: dict, manifest: Manifest) -> None:
    """Key-value text report (one `key = value` row per entry)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header_line(manifest) + "\n")
        for key, value in mapping.items():
            if isinstance(value, float):
                fh.write(f"{key} = {value:.12e}\n")
            else:
                fh.write(f"{key} = {value}\n")


def write_rows_csv(path, names, rows, manifest: Manifest) -> None:
    """Generic sweep table."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header_line(manifest) + "\n")
        fh.write("#" + ",".join(names) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.12e}" for v in row) + "\n")


def write_shots_npz(path, shotset, scores, manifest: Manifest,
                    include_iq: bool = False) -> None:
    """Binary columnar shot archive: labels, seeds, scores, optional I/Q."""
    payload = dict(
        prepared=shotset.prepared, envelope_label=shotset.envelope_label,
        decay_time=shotset.decay_time, scores=scores,
        shot_index=np.arange(len(shotset)),
        seed=np.int64(shotset.seed), sigma_det=np.float64(shotset.sigma_det),
        t=shotset.t, manifest=header_line(manifest))
    if include_iq:
        payload["iq"] = shotset.iq
    np.savez_compressed(path, **payload)
