/** Page wiring: recipe form -> candidate selection -> assessment + chat. */

import { ApiClient, ApiError } from './api.js';
import {
  defaultSelection, selectionPayload, toggle, type SelectionState,
} from './candidates.js';
import type { Candidate, Meta } from './types.js';
import {
  renderAssessment, renderCandidatesStep, renderChatMessage,
  renderIngredientList,
} from './views.js';

interface AppState {
  sessionId: string | null;
  candidates: Record<string, Candidate[]>;
  selection: SelectionState;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showError(message: string): void {
  const box = el<HTMLElement>('error');
  box.textContent = message;
  box.hidden = message === '';
}

async function guarded(action: () => Promise<void>): Promise<void> {
  showError('');
  try {
    await action();
  } catch (err) {
    showError(err instanceof ApiError ? err.detail : String(err));
  }
}

export function initApp(api = new ApiClient()): void {
  const state: AppState = {
    sessionId: null,
    candidates: {},
    selection: { chosen: new Map() },
  };

  const countrySelect = el<HTMLSelectElement>('country');
  void api.getMeta().then((meta: Meta) => {
    countrySelect.innerHTML = meta.countries
      .map((c) => `<option value="${c}"${c === 'NL' ? ' selected' : ''}>${c}</option>`)
      .join('');
  }).catch(() => { /* keep the static default options */ });

  const redrawCandidates = (): void => {
    el('candidates').innerHTML =
      renderCandidatesStep(state.candidates, state.selection);
    for (const input of el('candidates').querySelectorAll('input[type=checkbox]')) {
      input.addEventListener('change', (event) => {
        const box = event.target as HTMLInputElement;
        state.selection = toggle(
          state.selection,
          box.dataset['ingredient'] ?? '',
          box.dataset['productId'] ?? '');
        redrawCandidates();
      });
    }
  };

  el<HTMLFormElement>('recipe-form').addEventListener('submit', (event) => {
    event.preventDefault();
    void guarded(async () => {
      const text = el<HTMLTextAreaElement>('recipe-text').value;
      const created = await api.createSession(text, countrySelect.value);
      state.sessionId = created.session_id;
      el('ingredients').innerHTML =
        renderIngredientList(created.ingredients, created.notes);

      const proposal = await api.getCandidates(created.session_id);
      state.candidates = proposal.candidates;
      state.selection = defaultSelection(proposal.candidates);
      redrawCandidates();
      el('step-candidates').hidden = false;
      el('step-result').hidden = true;
    });
  });

  el<HTMLButtonElement>('confirm-btn').addEventListener('click', () => {
    void guarded(async () => {
      if (!state.sessionId) return;
      const result = await api.postSelection(
        state.sessionId, selectionPayload(state.selection).selections);
      el('result').innerHTML = renderAssessment(result);
      el('step-result').hidden = false;
      el('chat-log').innerHTML = '';
    });
  });

  el<HTMLFormElement>('chat-form').addEventListener('submit', (event) => {
    event.preventDefault();
    void guarded(async () => {
      if (!state.sessionId) return;
      const input = el<HTMLInputElement>('chat-input');
      const message = input.value.trim();
      if (!message) return;
      const log = el('chat-log');
      log.insertAdjacentHTML('beforeend', renderChatMessage('user', message));
      input.value = '';
      const reply = await api.chat(state.sessionId, message);
      log.insertAdjacentHTML('beforeend',
        renderChatMessage('assistant', reply.answer));
      log.scrollTop = log.scrollHeight;
    });
  });
}

if (typeof document !== 'undefined' && document.getElementById('recipe-form')) {
  initApp();
}
