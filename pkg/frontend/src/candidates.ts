/** View-model for the candidate-selection step.
 *
 * Groups candidates per source (the API caps them at 3 per source),
 * tracks the user's picks, and produces the selection payload the API
 * expects. Products without data for the target country are marked
 * with an asterisk so the averaging fallback is visible up front.
 */

import type { Candidate } from './types.js';

export interface SourceGroup {
  source: string;
  candidates: Candidate[];
}

export interface SelectionState {
  /** ingredient -> set of chosen product ids */
  chosen: Map<string, Set<string>>;
}

/** Candidates grouped by source, sources in first-seen order,
 * candidates within a source by descending similarity. */
export function groupBySource(candidates: Candidate[]): SourceGroup[] {
  const groups = new Map<string, Candidate[]>();
  for (const c of candidates) {
    const bucket = groups.get(c.source);
    if (bucket) bucket.push(c);
    else groups.set(c.source, [c]);
  }
  return Array.from(groups.entries()).map(([source, cands]) => ({
    source,
    candidates: [...cands].sort((a, b) =>
      b.similarity - a.similarity || a.product_id.localeCompare(b.product_id)),
  }));
}

/** Display name; "*" flags products with no data for the target country. */
export function candidateLabel(c: Candidate): string {
  return c.has_target_country_data ? c.name : `${c.name} *`;
}

/** Default selection: the top candidate of every source group. */
export function defaultSelection(
  candidates: Record<string, Candidate[]>,
): SelectionState {
  const chosen = new Map<string, Set<string>>();
  for (const [ingredient, cands] of Object.entries(candidates)) {
    const picks = new Set<string>();
    for (const group of groupBySource(cands)) {
      const top = group.candidates[0];
      if (top) picks.add(top.product_id);
    }
    chosen.set(ingredient, picks);
  }
  return { chosen };
}

export function emptySelection(
  candidates: Record<string, Candidate[]>,
): SelectionState {
  const chosen = new Map<string, Set<string>>();
  for (const ingredient of Object.keys(candidates)) {
    chosen.set(ingredient, new Set());
  }
  return { chosen };
}

export function toggle(
  state: SelectionState, ingredient: string, productId: string,
): SelectionState {
  const chosen = new Map(
    Array.from(state.chosen.entries(), ([k, v]) => [k, new Set(v)] as const));
  const picks = chosen.get(ingredient) ?? new Set<string>();
  if (picks.has(productId)) picks.delete(productId);
  else picks.add(productId);
  chosen.set(ingredient, picks);
  return { chosen };
}

export function isChosen(
  state: SelectionState, ingredient: string, productId: string,
): boolean {
  return state.chosen.get(ingredient)?.has(productId) ?? false;
}

/** Ingredients left with no pick; they will be excluded from the totals. */
export function unmatchedIngredients(state: SelectionState): string[] {
  return Array.from(state.chosen.entries())
    .filter(([, picks]) => picks.size === 0)
    .map(([ingredient]) => ingredient)
    .sort();
}

/** Payload for POST /api/sessions/{id}/selection. */
export function selectionPayload(
  state: SelectionState,
): { selections: Record<string, string[]> } {
  const selections: Record<string, string[]> = {};
  for (const [ingredient, picks] of state.chosen.entries()) {
    selections[ingredient] = Array.from(picks).sort();
  }
  return { selections };
}
