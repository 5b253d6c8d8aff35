"""SVG file writer for learning-curve charts."""

from pathlib import Path
from typing import List, Sequence, Tuple

from ophrl.core.errors import ParameterError

Point = Tuple[float, float]
Series = Tuple[str, Sequence[Point]]

WIDTH, HEIGHT = 800, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 80, 160, 30, 60
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf")
TICKS = 5


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _bounds(values: List[float]) -> Tuple[float, float]:
    lo, hi = min(values), max(values)
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    return lo, hi


class SVGWriter:
    """Writes SVG line charts of mean return against episode.

    Attributes:
        output_dir: Directory where SVG files will be written
    """

    def __init__(self, output_dir: str | Path = "runs") -> None:
        """Initialize the SVG writer.

        Args:
            output_dir: Directory to write SVG files to
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def generate_chart_svg(self, series: Sequence[Series], title: str = "") -> str:
        """Generate SVG content for a line chart with one polyline per series.

        Args:
            series: (label, points) pairs; every point list must be nonempty
            title: Optional chart title

        Returns:
            SVG document as a string
        """
        if not series:
            raise ParameterError("a chart needs at least one series")
        for label, points in series:
            if not points:
                raise ParameterError(f"series {label!r} has no points")

        xs = [float(x) for _, points in series for x, _ in points]
        ys = [float(y) for _, points in series for _, y in points]
        x_lo, x_hi = _bounds(xs)
        y_lo, y_hi = _bounds(ys)
        plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

        def px(x: float) -> float:
            return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

        def py(y: float) -> float:
            return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

        parts = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
            f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        ]
        if title:
            parts.append(
                f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="20" text-anchor="middle" '
                f'font-family="sans-serif" font-size="14">{_escape(title)}</text>'
            )

        bottom, right = MARGIN_TOP + plot_h, MARGIN_LEFT + plot_w
        parts.append(
            f'<path d="M{MARGIN_LEFT},{MARGIN_TOP} V{bottom} H{right}" '
            f'fill="none" stroke="black" stroke-width="1"/>'
        )
        for i in range(TICKS + 1):
            x_value = x_lo + (x_hi - x_lo) * i / TICKS
            y_value = y_lo + (y_hi - y_lo) * i / TICKS
            parts.append(
                f'<text x="{px(x_value):.1f}" y="{bottom + 18}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="11">{x_value:.6g}</text>'
            )
            parts.append(
                f'<text x="{MARGIN_LEFT - 6}" y="{py(y_value) + 4:.1f}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11">{y_value:.6g}</text>'
            )
        parts.append(
            f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">episode</text>'
        )
        parts.append(
            f'<text x="20" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13" '
            f'transform="rotate(-90 20 {MARGIN_TOP + plot_h / 2:.1f})">mean return</text>'
        )

        for index, (label, points) in enumerate(series):
            colour = COLOURS[index % len(COLOURS)]
            coords = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in points)
            parts.append(
                f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{coords}"/>'
            )
            legend_y = MARGIN_TOP + 10 + 18 * index
            parts.append(
                f'<line x1="{right + 12}" y1="{legend_y}" x2="{right + 32}" y2="{legend_y}" '
                f'stroke="{colour}" stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{right + 38}" y="{legend_y + 4}" font-family="sans-serif" '
                f'font-size="11">{_escape(label)}</text>'
            )

        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    def write_chart_file(self, name: str, series: Sequence[Series], title: str = "") -> Path:
        """Write an SVG chart file.

        Args:
            name: File stem inside output_dir
            series: (label, points) pairs
            title: Optional chart title

        Returns:
            Path to the created SVG file
        """
        svg_content = self.generate_chart_svg(series, title)
        file_path = self.output_dir / f"{name}.svg"
        with open(file_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(svg_content)
        return file_path


def emit_svg(series: Sequence[Series], path: str | Path, title: str = "") -> Path:
    """Write a chart to an explicit path."""
    path = Path(path)
    svg_content = SVGWriter(path.parent).generate_chart_svg(series, title)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(svg_content)
    return path
