/**
 * DOM rendering for trial results and session review.
 *
 * The console renders service payloads verbatim: structured fields land
 * in data attributes and numbers are stringified without formatting, so
 * what appears in the DOM is exactly what the service computed.
 */

import type { PseudowordPayload, RanPayload, ResultRecord } from './api';

function el<K extends keyof HTMLElementTagNameMap>(tag: K, className?: string,
                                                   text?: string): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function metric(name: string, value: unknown): HTMLElement {
  const row = el('div', 'metric');
  row.dataset.field = name;
  row.append(el('span', 'metric-name', name), el('span', 'metric-value', String(value)));
  return row;
}

export function renderRanStimulus(container: HTMLElement, grid: string[]): void {
  const list = el('ul', 'ran-grid');
  for (const word of grid) {
    const cell = el('li', 'cell', word);
    cell.dataset.expected = word;
    list.append(cell);
  }
  container.replaceChildren(list);
}

export function renderRanResult(container: HTMLElement, payload: RanPayload): void {
  const list = el('ul', 'ran-grid');
  for (const mark of payload.marks) {
    const cell = el('li', `cell mark-${mark.kind}`, mark.expected);
    cell.dataset.kind = mark.kind;
    cell.dataset.expected = mark.expected;
    if (mark.said !== null) {
      cell.dataset.said = mark.said;
      if (mark.said !== mark.expected) cell.append(el('span', 'said', mark.said));
    }
    list.append(cell);
  }

  const metrics = el('div', 'metrics');
  metrics.append(metric('accuracy', payload.accuracy),
                 metric('total_time_s', payload.total_time_s),
                 metric('items_per_s', payload.items_per_s));

  container.replaceChildren(list, metrics);
  if (payload.extras.length > 0) {
    const extras = el('ul', 'extras');
    for (const word of payload.extras) {
      const item = el('li', 'extra', word);
      item.dataset.word = word;
      extras.append(item);
    }
    container.append(extras);
  }
}

export function renderPseudowordResult(container: HTMLElement,
                                       payload: PseudowordPayload): void {
  const table = el('table', 'phoneme-diff');
  const targetRow = el('tr', 'target-row');
  const responseRow = el('tr', 'response-row');
  for (const step of payload.alignment) {
    const target = el('td', `phone ${step.kind}`, step.target ?? '');
    const response = el('td', `phone ${step.kind}`, step.response ?? '');
    target.dataset.kind = step.kind;
    response.dataset.kind = step.kind;
    if (step.target !== null) target.dataset.target = step.target;
    if (step.response !== null) response.dataset.response = step.response;
    targetRow.append(target);
    responseRow.append(response);
  }
  table.append(targetRow, responseRow);

  const metrics = el('div', 'metrics');
  metrics.append(metric('target_word', payload.target_word),
                 metric('response_text', payload.response_text),
                 metric('per', payload.per),
                 metric('exact_match', payload.exact_match));

  container.replaceChildren(table, metrics);
  if (payload.exact_match) container.append(el('span', 'badge pass', 'pass'));
}

export function renderError(container: HTMLElement, message: string,
                            onRetry: () => void): void {
  const banner = el('div', 'error');
  banner.append(el('span', 'error-text', message));
  const retry = el('button', 'retry', 'retry');
  retry.onclick = onRetry;
  banner.append(retry);
  container.replaceChildren(banner);
}

export function renderResults(container: HTMLElement, results: ResultRecord[],
                              stale = false): void {
  container.replaceChildren();
  if (stale) {
    container.append(el('div', 'stale-banner', 'service unreachable, showing last loaded results'));
  }
  if (results.length === 0) {
    container.append(el('p', 'empty', 'no results in this session yet'));
    return;
  }
  const table = el('table', 'results');
  for (const record of results) {
    const row = el('tr', 'result-row');
    row.dataset.resultId = record.id;
    row.dataset.task = record.task;
    const summary = record.task === 'ran'
      ? `accuracy ${String((record.payload as RanPayload).accuracy)}`
      : `per ${String((record.payload as PseudowordPayload).per)}`;
    row.append(el('td', 'task', record.task), el('td', 'summary', summary));
    table.append(row);
  }
  container.append(table);
}
