// SVG line chart: history as a solid line, the 5-week forecast as a dashed
// continuation in its own colour. Each data point is a <circle> carrying a
// "history" or "forecast" class so the two series stay distinguishable.

const WIDTH = 900;
const HEIGHT = 300;
const PAD = 28;
const SVG_NS = "http://www.w3.org/2000/svg";

export interface ChartPoint {
  week: string;
  value: number;
}

function scale(
  points: ChartPoint[],
): (index: number, value: number) => { x: number; y: number } {
  const values = points.map((p) => p.value);
  const lo = Math.min(...values, 0);
  const hi = Math.max(...values, 1);
  const span = hi - lo || 1;
  const step = (WIDTH - 2 * PAD) / Math.max(points.length - 1, 1);
  return (index, value) => ({
    x: PAD + index * step,
    y: HEIGHT - PAD - ((value - lo) / span) * (HEIGHT - 2 * PAD),
  });
}

function polyline(coords: { x: number; y: number }[], cls: string): SVGPolylineElement {
  const line = document.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", coords.map((c) => `${c.x},${c.y}`).join(" "));
  line.setAttribute("class", cls);
  line.setAttribute("fill", "none");
  return line;
}

export function renderChart(
  container: HTMLElement,
  history: ChartPoint[],
  forecast: ChartPoint[],
): void {
  container.textContent = "";
  const all = [...history, ...forecast];
  if (all.length === 0) return;
  const toXY = scale(all);

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.setAttribute("class", "trend-chart");
  svg.setAttribute("role", "img");

  const historyCoords = history.map((p, i) => toXY(i, p.value));
  // the forecast line starts from the last history point so it reads as a
  // continuation, but only forecast weeks get forecast-class markers
  const forecastCoords = forecast.map((p, i) => toXY(history.length + i, p.value));
  svg.appendChild(polyline(historyCoords, "line history"));
  if (forecastCoords.length > 0) {
    const joined = historyCoords.length
      ? [historyCoords[historyCoords.length - 1], ...forecastCoords]
      : forecastCoords;
    const line = polyline(joined, "line forecast");
    line.setAttribute("stroke-dasharray", "6 4");
    svg.appendChild(line);
  }

  all.forEach((point, index) => {
    const { x, y } = toXY(index, point.value);
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(x));
    circle.setAttribute("cy", String(y));
    circle.setAttribute("r", "3");
    circle.setAttribute("class", index < history.length ? "point history" : "point forecast");
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = `${point.week}: ${point.value}`;
    circle.appendChild(title);
    svg.appendChild(circle);
  });

  container.appendChild(svg);
}
