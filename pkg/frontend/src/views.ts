/** HTML renderers for each wizard step. Pure string-in, string-out so
 * they are testable without a DOM; app.ts wires them to the page. */

import {
  candidateLabel, groupBySource, isChosen, unmatchedIngredients,
  type SelectionState,
} from './candidates.js';
import { renderBarChart, renderLegend, renderPieChart } from './charts.js';
import {
  escapeHtml, fmtGrams, fmtRange, fmtSig, fmtSimilarity, sourceLabel,
} from './format.js';
import type {
  AssessmentResponse, Candidate, ParsedIngredient,
} from './types.js';

export function renderIngredientList(
  ingredients: ParsedIngredient[], notes: string[],
): string {
  const rows = ingredients.map((i) =>
    `<tr><td>${escapeHtml(i.name)}</td><td>${fmtGrams(i.grams)}</td>` +
    `<td class="provenance">${escapeHtml(i.provenance.toLowerCase())}</td></tr>`);
  const noteItems = notes.map((n) => `<p class="note">${escapeHtml(n)}</p>`);
  return `<table class="ingredients"><thead>` +
    `<tr><th>Ingredient</th><th>Amount</th><th>Quantity source</th></tr>` +
    `</thead><tbody>${rows.join('')}</tbody></table>${noteItems.join('')}`;
}

export function renderCandidateGroups(
  ingredient: string, candidates: Candidate[], state: SelectionState,
): string {
  const groups = groupBySource(candidates).map((group) => {
    const items = group.candidates.map((c) => {
      const checked = isChosen(state, ingredient, c.product_id) ? ' checked' : '';
      return `<label class="candidate"><input type="checkbox" ` +
        `data-ingredient="${escapeHtml(ingredient)}" ` +
        `data-product-id="${escapeHtml(c.product_id)}"${checked}>` +
        `<span class="cand-name">${escapeHtml(candidateLabel(c))}</span>` +
        `<span class="cand-sim">${fmtSimilarity(c.similarity)}</span></label>`;
    });
    return `<div class="source-group"><h4>${escapeHtml(sourceLabel(group.source))}</h4>` +
      items.join('') + '</div>';
  });
  return `<section class="ingredient-candidates">` +
    `<h3>${escapeHtml(ingredient)}</h3>${groups.join('')}</section>`;
}

export function renderCandidatesStep(
  candidates: Record<string, Candidate[]>, state: SelectionState,
): string {
  const sections = Object.entries(candidates).map(([ingredient, cands]) =>
    renderCandidateGroups(ingredient, cands, state));
  const unmatched = unmatchedIngredients(state);
  const warning = unmatched.length
    ? `<p class="warning">No product chosen for ` +
      `${unmatched.map(escapeHtml).join(', ')}; these will be excluded ` +
      `from the totals.</p>`
    : '';
  return `<p class="hint">Products marked with * have no data for your ` +
    `country; their impact is averaged over available regions.</p>` +
    sections.join('') + warning;
}

export function renderAssessment(result: AssessmentResponse): string {
  const a = result.assessment;
  const rows = [...a.ingredient_impacts]
    .sort((x, y) => y.midpoint - x.midpoint ||
      x.ingredient.localeCompare(y.ingredient))
    .map((i) => i.unmatched
      ? `<tr class="unmatched"><td>${escapeHtml(i.ingredient)}</td>` +
        `<td>${fmtGrams(i.grams)}</td><td>excluded (no match)</td></tr>`
      : `<tr><td>${escapeHtml(i.ingredient)}</td>` +
        `<td>${fmtGrams(i.grams)}</td><td>${fmtRange(i.min, i.max)}</td></tr>`);

  const cooking = a.cooking.required
    ? `${a.cooking.method} for ${a.cooking.duration_min} min` +
      (a.cooking.temperature_c ? ` at ${a.cooking.temperature_c}°C` : '') +
      `: ${fmtRange(a.cooking.min, a.cooking.max)}`
    : 'No cooking required (0 kg CO2-eq)';

  const equivalences = a.equivalences.map((e) =>
    `<li>${escapeHtml(e.phrase)}</li>`);

  const vis = result.visualization;
  return `
<table class="impacts"><thead>
<tr><th>Ingredient</th><th>Amount</th><th>Impact</th></tr>
</thead><tbody>${rows.join('')}</tbody></table>
<p class="cooking">Cooking — ${escapeHtml(cooking)}</p>
<p class="totals">Total: <strong>${fmtRange(a.total_min, a.total_max)}</strong>
(average ${fmtSig(a.total_avg)} kg CO2-eq)</p>
<h3>Equivalent to</h3>
<ul class="equivalences">${equivalences.join('')}</ul>
<div class="charts">
  <figure><figcaption>Share of total</figcaption>
    ${renderPieChart(vis)}${renderLegend(vis)}</figure>
  <figure><figcaption>Impact per ingredient (midpoint, kg CO2-eq)</figcaption>
    ${renderBarChart(vis)}</figure>
</div>
<details class="report"><summary>Full report</summary>
<pre>${escapeHtml(result.report)}</pre></details>`;
}

export function renderChatMessage(role: 'user' | 'assistant', text: string): string {
  return `<div class="chat-msg chat-${role}">${escapeHtml(text)}</div>`;
}
