"""Self-contained SVG rendering of metrics and pruning-statistics CSVs.

Hand-rolled SVG 1.1 output (no plotting dependency) so the files open
anywhere and tests can assert on their structure.
"""
import csv
import math
from pathlib import Path

from .errors import MalformedCsv
from .metrics import geometric_mean_series, read_metrics_csv

WIDTH, HEIGHT = 760, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 190, 24, 52
PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


def emit_plot(csv_path, kind, out_path):
    """Render a metrics CSV (kinds "mse_w", "snr") or a pruning summary
    CSV (kind "prune") to a standalone SVG file."""
    out_path = Path(out_path)
    if kind == "mse_w":
        svg = _line_plot(csv_path, value="mse_w", log_y=True,
                         y_label="filter MSE vs. centralized (geo. mean)")
    elif kind == "snr":
        svg = _line_plot(csv_path, value="snr_db", log_y=False,
                         y_label="output SNR [dB] (mean)")
    elif kind == "prune":
        svg = _prune_plot(csv_path)
    else:
        raise MalformedCsv(f"unknown plot kind {kind!r}")
    out_path.write_text(svg)
    return out_path


def _series_from_rows(rows, value):
    """Group rows into {(algorithm, pruning, connectivity): {env: {it: v}}}.

    NaN connectivity (natural or per-iteration-varying topologies) maps
    to one "natural" series per algorithm/pruning pair.
    """
    table = {}
    for r in rows:
        if value == "snr_db" and r["snr_db"] is None:
            continue
        conn = r["connectivity_c"]
        key = (r["algorithm"], r["pruning"],
               "natural" if math.isnan(conn) else round(conn, 6))
        table.setdefault(key, {}).setdefault(r["env"], {})[r["iteration"]] = r[value]
    return table


def _aggregate(per_env, value):
    """Per-iteration aggregate over envs: geometric mean for MSE curves,
    arithmetic mean otherwise (on iterations present in every env)."""
    common = None
    for it_map in per_env.values():
        its = set(it_map)
        common = its if common is None else common & its
    iterations = sorted(common or ())
    if not iterations:
        return [], []
    rows = [[it_map[i] for i in iterations] for it_map in per_env.values()]
    if value == "mse_w":
        agg = geometric_mean_series([[max(v, 1e-300) for v in row] for row in rows])
    else:
        agg = [sum(col) / len(col) for col in zip(*rows)]
    return iterations, list(agg)


def _line_plot(csv_path, value, log_y, y_label):
    rows = read_metrics_csv(csv_path)
    table = _series_from_rows(rows, value)
    series = []
    for key in sorted(table, key=str):
        iterations, values = _aggregate(table[key], value)
        if iterations:
            series.append((key, iterations, values))

    x_max = max((s[1][-1] for s in series), default=1) or 1
    if log_y:
        transformed = [
            (key, its, [math.log10(max(v, 1e-300)) for v in vals])
            for key, its, vals in series
        ]
    else:
        transformed = series
    y_vals = [v for _, _, vals in transformed for v in vals]
    y_min = min(y_vals, default=0.0)
    y_max = max(y_vals, default=1.0)
    if y_max == y_min:
        y_max = y_min + 1.0

    def sx(x):
        return MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) * x / x_max

    def sy(y):
        span = y_max - y_min
        return HEIGHT - MARGIN_B - (HEIGHT - MARGIN_T - MARGIN_B) * (y - y_min) / span

    parts = [_svg_header(), _axes()]
    parts.append(_text(WIDTH // 2, HEIGHT - 12, "iteration", anchor="middle"))
    parts.append(_text(16, HEIGHT // 2, y_label, anchor="middle",
                       transform=f"rotate(-90 16 {HEIGHT // 2})"))
    for tick in range(5):
        y = y_min + (y_max - y_min) * tick / 4
        label = f"1e{y:.1f}" if log_y else f"{y:.2f}"
        parts.append(_text(MARGIN_L - 6, sy(y) + 4, label, anchor="end", size=11))
        x = x_max * tick / 4
        parts.append(_text(sx(x), HEIGHT - MARGIN_B + 16, f"{x:.0f}",
                           anchor="middle", size=11))
    for idx, (key, its, vals) in enumerate(transformed):
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{sx(i):.2f},{sy(v):.2f}" for i, v in zip(its, vals))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}" />'
        )
        parts.append(_legend_entry(idx, key, color))
    parts.append("</svg>")
    return "\n".join(parts)


def _legend_entry(idx, key, color):
    algorithm, pruning, conn = key
    label = algorithm
    if pruning:
        label += f" {pruning}"
    if isinstance(conn, float) and not math.isnan(conn):
        label += f" C={conn:.2f}"
    x = WIDTH - MARGIN_R + 12
    y = MARGIN_T + 16 + 18 * idx
    return (
        f'<line x1="{x}" y1="{y - 4}" x2="{x + 22}" y2="{y - 4}" '
        f'stroke="{color}" stroke-width="2" />'
        + _text(x + 28, y, label, size=12)
    )


def _prune_plot(csv_path):
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"k_nodes", "pruning", "metric", "q05", "q25", "q50", "q75", "q95"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise MalformedCsv(f"{csv_path} lacks pruning summary columns")
        rows = [
            {
                "k_nodes": int(r["k_nodes"]), "pruning": r["pruning"],
                "metric": r["metric"],
                **{q: float(r[q]) for q in ("q05", "q25", "q50", "q75", "q95")},
            }
            for r in reader
        ]
    parts = [_svg_header()]
    panels = (("u_avg", "avg. root neighbors"), ("e_avg", "avg. tree length [m]"))
    panel_w = (WIDTH - 40) // 2
    for p_idx, (metric_name, title) in enumerate(panels):
        sel = [r for r in rows if r["metric"] == metric_name]
        x0 = 20 + p_idx * panel_w
        parts.append(_text(x0 + panel_w // 2, 16, title, anchor="middle"))
        if not sel:
            continue
        ks = sorted({r["k_nodes"] for r in sel})
        y_hi = max(r["q95"] for r in sel) * 1.05 or 1.0
        box_w = 14

        def sy(v):
            return HEIGHT - MARGIN_B - (HEIGHT - MARGIN_T - MARGIN_B) * v / y_hi

        for r in sel:
            k_pos = ks.index(r["k_nodes"])
            slot = x0 + 60 + k_pos * ((panel_w - 80) // max(len(ks), 1))
            x = slot + (0 if r["pruning"] == "mst" else box_w + 6)
            color = PALETTE[0] if r["pruning"] == "mst" else PALETTE[1]
            parts.append(
                f'<line x1="{x + box_w / 2}" y1="{sy(r["q05"]):.1f}" '
                f'x2="{x + box_w / 2}" y2="{sy(r["q95"]):.1f}" '
                f'stroke="{color}" stroke-width="1" />'
            )
            parts.append(
                f'<rect x="{x}" y="{sy(r["q75"]):.1f}" width="{box_w}" '
                f'height="{max(sy(r["q25"]) - sy(r["q75"]), 0.5):.1f}" '
                f'fill="none" stroke="{color}" />'
            )
            parts.append(
                f'<line x1="{x}" y1="{sy(r["q50"]):.1f}" x2="{x + box_w}" '
                f'y2="{sy(r["q50"]):.1f}" stroke="{color}" stroke-width="2" />'
            )
        for k_pos, k in enumerate(ks):
            slot = x0 + 60 + k_pos * ((panel_w - 80) // max(len(ks), 1))
            parts.append(_text(slot + box_w, HEIGHT - MARGIN_B + 16, f"K={k}",
                               anchor="middle", size=11))
    parts.append(_legend_entry(0, ("mst", "", math.nan), PALETTE[0]))
    parts.append(_legend_entry(1, ("mmut", "", math.nan), PALETTE[1]))
    parts.append("</svg>")
    return "\n".join(parts)


def _svg_header():
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white" />'
    )


def _axes():
    x0, y0 = MARGIN_L, HEIGHT - MARGIN_B
    x1, y1 = WIDTH - MARGIN_R, MARGIN_T
    return (
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" />'
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" />'
    )


def _text(x, y, content, anchor="start", size=13, transform=None):
    tr = f' transform="{transform}"' if transform else ""
    return (
        f'<text x="{x:.0f}" y="{y:.0f}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}"{tr}>{content}</text>'
    )
