"""Regenerate the project figures from CSV produced by the main package's CLI.

Inputs live in one data directory:

    mlkem_sizes.csv     comparison rows: scheme,pk_bytes,sk_bytes,ct_bytes,security_bits
    params.txt          key=value output of `kyfrog params`
    runs.csv            per-run breakdown from `kyfrog summarize --runs-csv-out`
    reference.records   record line carrying the externally estimated security level

Outputs fig1.png (ciphertext sizes), fig2.png (candidate density per q-range),
fig3.png (security versus public-key size), fig4.png (key sizes). Rendering is
deterministic: fixed style, fixed dpi, no timestamps, so re-rendering from the
same inputs reproduces identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

__all__ = ["SchemaError", "load_inputs", "render", "render_all", "main"]

FIGURE_IDS = ("fig1", "fig2", "fig3", "fig4")

_STYLE = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}
_BAR_COLOR = "#4878a8"
_HIGHLIGHT = "#b2465a"


class SchemaError(ValueError):
    """An input table is missing a required column or row."""


def _read_csv(path: pathlib.Path, required: tuple[str, ...]) -> list[dict]:
    if not path.exists():
        raise SchemaError(f"missing input table {path.name}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        cols = reader.fieldnames or []
        missing = [c for c in required if c not in cols]
        if missing:
            raise SchemaError(f"{path.name}: missing columns {', '.join(missing)}")
        return list(reader)


def _read_params(path: pathlib.Path) -> dict[str, str]:
    if not path.exists():
        raise SchemaError(f"missing input table {path.name}")
    pairs = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if "=" in line:
            key, value = line.split("=", 1)
            pairs[key.strip()] = value.strip()
    for key in ("pk_bytes", "sk_bytes", "ct_bytes"):
        if key not in pairs:
            raise SchemaError(f"{path.name}: missing key {key}")
    return pairs


def _read_security_record(path: pathlib.Path) -> float:
    if not path.exists():
        raise SchemaError(f"missing input table {path.name}")
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = dict(token.split("=", 1) for token in line.split() if "=" in token)
        if "classical_bits" not in fields:
            raise SchemaError(f"{path.name}: record line missing classical_bits")
        return float(fields["classical_bits"])
    raise SchemaError(f"{path.name}: no record line found")


def load_inputs(data_dir) -> dict:
    data_dir = pathlib.Path(data_dir)
    mlkem = _read_csv(data_dir / "mlkem_sizes.csv",
                      ("scheme", "pk_bytes", "sk_bytes", "ct_bytes", "security_bits"))
    params = _read_params(data_dir / "params.txt")
    runs = _read_csv(data_dir / "runs.csv",
                     ("q_lo", "q_hi", "candidate_count"))
    security_bits = _read_security_record(data_dir / "reference.records")
    return {"mlkem": mlkem, "params": params, "runs": runs,
            "security_bits": security_bits}


def _bar(ax, labels, values, colors, ylabel, log=False):
    ax.bar(labels, values, color=colors)
    ax.set_ylabel(ylabel)
    if log:
        ax.set_yscale("log")
    ax.set_axisbelow(True)


def _schemes(inputs):
    labels = [row["scheme"] for row in inputs["mlkem"]] + ["KyFrog"]
    colors = [_BAR_COLOR] * len(inputs["mlkem"]) + [_HIGHLIGHT]
    return labels, colors


def _render_fig1(inputs, ax):
    labels, colors = _schemes(inputs)
    values = [int(row["ct_bytes"]) for row in inputs["mlkem"]]
    values.append(int(inputs["params"]["ct_bytes"]))
    # the spread covers three orders of magnitude, so the axis is logarithmic
    _bar(ax, labels, values, colors, "ciphertext bytes", log=True)
    ax.set_title("Ciphertext sizes")


def _render_fig2(inputs, ax):
    runs = inputs["runs"]
    labels = [f"[{row['q_lo']}, {row['q_hi']}]" for row in runs]
    density = []
    for row in runs:
        width = int(row["q_hi"]) - int(row["q_lo"]) + 1
        density.append(1000.0 * int(row["candidate_count"]) / width)
    ax.bar(range(len(runs)), density, color=_BAR_COLOR)
    ax.set_xticks(range(len(runs)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("accepted candidates per 1000 q")
    ax.set_title("Candidate density per q-range")
    ax.set_axisbelow(True)


def _render_fig3(inputs, ax):
    for row in inputs["mlkem"]:
        ax.scatter(int(row["pk_bytes"]), float(row["security_bits"]),
                   color=_BAR_COLOR, s=45)
        ax.annotate(row["scheme"], (int(row["pk_bytes"]), float(row["security_bits"])),
                    textcoords="offset points", xytext=(6, 4), fontsize=8)
    pk = int(inputs["params"]["pk_bytes"])
    bits = inputs["security_bits"]
    ax.scatter(pk, bits, color=_HIGHLIGHT, s=60, marker="D")
    ax.annotate("KyFrog", (pk, bits), textcoords="offset points",
                xytext=(6, 4), fontsize=8)
    ax.set_xlabel("public key bytes")
    ax.set_ylabel("classical security (bits)")
    ax.set_title("Security versus public-key size")
    ax.set_axisbelow(True)


def _render_fig4(inputs, ax):
    labels, _colors = _schemes(inputs)
    pk = [int(row["pk_bytes"]) for row in inputs["mlkem"]]
    pk.append(int(inputs["params"]["pk_bytes"]))
    sk = [int(row["sk_bytes"]) for row in inputs["mlkem"]]
    sk.append(int(inputs["params"]["sk_bytes"]))
    x = range(len(labels))
    width = 0.38
    ax.bar([i - width / 2 for i in x], pk, width, label="public key", color=_BAR_COLOR)
    ax.bar([i + width / 2 for i in x], sk, width, label="secret key", color=_HIGHLIGHT)
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels)
    ax.set_ylabel("bytes")
    ax.set_title("Key sizes")
    ax.legend()
    ax.set_axisbelow(True)


_RENDERERS = {"fig1": _render_fig1, "fig2": _render_fig2,
              "fig3": _render_fig3, "fig4": _render_fig4}


def render(figure_id: str, inputs: dict, out_path) -> pathlib.Path:
    """Render one figure to out_path; deterministic for identical inputs."""
    if figure_id not in _RENDERERS:
        raise ValueError(f"unknown figure id {figure_id!r}; expected one of {FIGURE_IDS}")
    out_path = pathlib.Path(out_path)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        _RENDERERS[figure_id](inputs, ax)
        fig.tight_layout()
        fig.savefig(out_path, format="png", metadata={"Software": None})
        plt.close(fig)
    return out_path


def render_all(data_dir, out_dir) -> list[pathlib.Path]:
    inputs = load_inputs(data_dir)
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [render(fid, inputs, out_dir / f"{fid}.png") for fid in FIGURE_IDS]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figures",
        description="regenerate fig1..fig4 from the artifact's CSV outputs")
    parser.add_argument("--data", required=True, help="input data directory")
    parser.add_argument("--out", required=True, help="output directory for images")
    args = parser.parse_args(argv)
    try:
        paths = render_all(args.data, args.out)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
