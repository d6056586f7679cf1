/** Number and text formatting shared by the views and charts. */

/** Round to the given number of significant figures. */
export function roundSig(x: number, figures = 3): number {
  if (x === 0) return 0;
  const magnitude = Math.floor(Math.log10(Math.abs(x)));
  const factor = Math.pow(10, figures - 1 - magnitude);
  return Math.round(x * factor) / factor;
}

/** Compact 3-sig-fig rendering, e.g. 0.486 -> "0.486", 122.4 -> "122". */
export function fmtSig(x: number, figures = 3): string {
  return String(roundSig(x, figures));
}

/** "0.0331-0.241 kg CO2-eq", collapsing degenerate ranges. */
export function fmtRange(min: number, max: number): string {
  if (min === max) return `${fmtSig(min)} kg CO2-eq`;
  return `${fmtSig(min)}-${fmtSig(max)} kg CO2-eq`;
}

export function fmtGrams(grams: number): string {
  return `${Number(grams.toFixed(2))} g`;
}

/** Similarity as a percentage, e.g. 0.8712 -> "87%". */
export function fmtSimilarity(similarity: number): string {
  return `${Math.round(similarity * 100)}%`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

export const SOURCE_LABELS: Record<string, string> = {
  BONSAI: 'BONSAI',
  AGRIBALYSE: 'Agribalyse',
  BIG_CLIMATE: 'Big Climate Database',
};

export function sourceLabel(source: string): string {
  return SOURCE_LABELS[source] ?? source;
}
