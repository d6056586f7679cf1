import { describe, expect, it } from 'vitest';

import {
  escapeHtml, fmtGrams, fmtRange, fmtSig, fmtSimilarity, roundSig,
  sourceLabel,
} from '../src/format.js';

describe('roundSig', () => {
  it('keeps three significant figures', () => {
    expect(roundSig(0.48987)).toBe(0.49);
    expect(roundSig(122.4675)).toBe(122);
    expect(roundSig(1.39962857)).toBe(1.4);
    expect(roundSig(0.0023199)).toBe(0.00232);
  });

  it('handles zero and negatives', () => {
    expect(roundSig(0)).toBe(0);
    expect(roundSig(-0.48987)).toBe(-0.49);
  });
});

describe('fmtRange', () => {
  it('renders a proper range', () => {
    expect(fmtRange(0.0331, 0.241)).toBe('0.0331-0.241 kg CO2-eq');
  });

  it('collapses degenerate ranges', () => {
    expect(fmtRange(0.0159, 0.0159)).toBe('0.0159 kg CO2-eq');
  });
});

describe('misc formatting', () => {
  it('formats grams, similarity, and sig figs', () => {
    expect(fmtGrams(75)).toBe('75 g');
    expect(fmtGrams(0.125)).toBe('0.13 g');
    expect(fmtSimilarity(0.8712)).toBe('87%');
    expect(fmtSig(0.52592)).toBe('0.526');
  });

  it('maps source codes to friendly labels', () => {
    expect(sourceLabel('BIG_CLIMATE')).toBe('Big Climate Database');
    expect(sourceLabel('AGRIBALYSE')).toBe('Agribalyse');
    expect(sourceLabel('SOMETHING_ELSE')).toBe('SOMETHING_ELSE');
  });
});

describe('escapeHtml', () => {
  it('escapes markup characters', () => {
    expect(escapeHtml(`<b>"olives" & 'oregano'</b>`))
      .toBe('&lt;b&gt;&quot;olives&quot; &amp; &#39;oregano&#39;&lt;/b&gt;');
  });
});
