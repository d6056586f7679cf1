/** Dependency-free SVG pie and bar charts for the visualization data.
 *
 * All geometry is computed in pure functions that return SVG markup as
 * strings, so the charts are unit-testable without a DOM.
 */

import { escapeHtml, fmtSig } from './format.js';
import type { VisualizationData } from './types.js';

export interface PieSlice {
  label: string;
  value: number;
  /** share of the total, 0..1 */
  fraction: number;
  startAngle: number;
  endAngle: number;
}

const PALETTE = [
  '#2e7d32', '#1565c0', '#ef6c00', '#6a1b9a', '#c62828',
  '#00838f', '#9e9d24', '#4e342e', '#37474f', '#ad1457',
];

export function sliceColor(index: number): string {
  return PALETTE[index % PALETTE.length] ?? '#888888';
}

/** Angular extent of every positive-valued entry; zero entries are kept
 * (with empty extent) so labels stay aligned with the legend. */
export function pieSlices(data: VisualizationData): PieSlice[] {
  const total = data.impacts.reduce((acc, v) => acc + Math.max(v, 0), 0);
  const slices: PieSlice[] = [];
  let angle = 0;
  data.ingredients.forEach((label, i) => {
    const value = Math.max(data.impacts[i] ?? 0, 0);
    const fraction = total > 0 ? value / total : 0;
    const extent = fraction * 2 * Math.PI;
    slices.push({
      label, value, fraction,
      startAngle: angle, endAngle: angle + extent,
    });
    angle += extent;
  });
  return slices;
}

function polar(cx: number, cy: number, r: number, angle: number): [number, number] {
  // Angles start at 12 o'clock and run clockwise.
  return [cx + r * Math.sin(angle), cy - r * Math.cos(angle)];
}

export function arcPath(
  cx: number, cy: number, r: number, start: number, end: number,
): string {
  const [x0, y0] = polar(cx, cy, r, start);
  const [x1, y1] = polar(cx, cy, r, end);
  const largeArc = end - start > Math.PI ? 1 : 0;
  return `M ${cx} ${cy} L ${x0.toFixed(3)} ${y0.toFixed(3)} ` +
    `A ${r} ${r} 0 ${largeArc} 1 ${x1.toFixed(3)} ${y1.toFixed(3)} Z`;
}

export function renderPieChart(data: VisualizationData, size = 260): string {
  const slices = pieSlices(data);
  const cx = size / 2;
  const cy = size / 2;
  const r = size / 2 - 4;
  if (slices.every((s) => s.fraction === 0)) {
    return `<svg viewBox="0 0 ${size} ${size}" role="img" aria-label="impact share">` +
      `<text x="${cx}" y="${cy}" text-anchor="middle" class="chart-empty">no impact data</text></svg>`;
  }
  const paths = slices
    .filter((s) => s.endAngle > s.startAngle)
    .map((s, i) => {
      const pct = (s.fraction * 100).toFixed(1);
      const title = `${escapeHtml(s.label)}: ${fmtSig(s.value)} kg CO2-eq (${pct}%)`;
      return `<path d="${arcPath(cx, cy, r, s.startAngle, s.endAngle)}" ` +
        `fill="${sliceColor(i)}" data-label="${escapeHtml(s.label)}" ` +
        `data-pct="${pct}"><title>${title}</title></path>`;
    });
  return `<svg viewBox="0 0 ${size} ${size}" role="img" aria-label="impact share">` +
    paths.join('') + '</svg>';
}

export function renderLegend(data: VisualizationData): string {
  const slices = pieSlices(data);
  const items = slices.map((s, i) =>
    `<li><span class="swatch" style="background:${sliceColor(i)}"></span>` +
    `${escapeHtml(s.label)} — ${(s.fraction * 100).toFixed(1)}%</li>`);
  return `<ul class="legend">${items.join('')}</ul>`;
}

export function renderBarChart(
  data: VisualizationData, width = 420, barHeight = 22,
): string {
  const n = data.ingredients.length;
  if (n === 0) {
    return `<svg viewBox="0 0 ${width} 40" role="img" aria-label="impact per ingredient">` +
      `<text x="${width / 2}" y="20" text-anchor="middle" class="chart-empty">no impact data</text></svg>`;
  }
  const labelWidth = 140;
  const gap = 6;
  const height = n * (barHeight + gap) + gap;
  const maxValue = Math.max(...data.impacts, 0) || 1;
  const rows = data.ingredients.map((label, i) => {
    const value = Math.max(data.impacts[i] ?? 0, 0);
    const w = ((width - labelWidth - 60) * value) / maxValue;
    const y = gap + i * (barHeight + gap);
    return `<text x="${labelWidth - 8}" y="${y + barHeight * 0.7}" ` +
      `text-anchor="end" class="bar-label">${escapeHtml(label)}</text>` +
      `<rect x="${labelWidth}" y="${y}" width="${w.toFixed(2)}" ` +
      `height="${barHeight}" fill="${sliceColor(i)}" data-label="${escapeHtml(label)}"/>` +
      `<text x="${labelWidth + w + 6}" y="${y + barHeight * 0.7}" ` +
      `class="bar-value">${fmtSig(value)}</text>`;
  });
  return `<svg viewBox="0 0 ${width} ${height}" role="img" ` +
    `aria-label="impact per ingredient">${rows.join('')}</svg>`;
}
