/**
 * Examiner console wiring.
 *
 * One active trial at a time. Each trial walks the TrialView state
 * machine; a pseudo-word prompt must finish playing before the record
 * button unlocks, and a result is only rendered from the payload the
 * service persisted.
 */

import { ApiError, ServiceClient } from './api';
import type { ResultRecord } from './api';
import type { PromptPlayer, Recorder } from './recorder';
import {
  renderError,
  renderPseudowordResult,
  renderRanResult,
  renderRanStimulus,
  renderResults,
} from './render';
import { TestPlan, TrialView, validatePlan } from './state';

export interface AppDeps {
  client: ServiceClient;
  recorder: Recorder;
  player: PromptPlayer;
}

export class ExaminerApp {
  readonly views: TrialView[];
  sessionId: string | null = null;
  private activeTrial: number | null = null;
  private lastResults: ResultRecord[] = [];

  constructor(private root: HTMLElement, readonly plan: TestPlan,
              private deps: AppDeps) {
    validatePlan(plan);
    this.views = plan.trials.map((trial) => new TrialView(trial));
  }

  async start(): Promise<void> {
    this.sessionId = await this.deps.client.createSession(this.plan.childAlias);
    this.render();
  }

  private render(): void {
    this.root.replaceChildren();
    const header = document.createElement('div');
    header.id = 'session-info';
    header.textContent = `session ${this.sessionId} / ${this.plan.childAlias}`;
    this.root.append(header);

    this.plan.trials.forEach((trial, index) => {
      const section = document.createElement('section');
      section.className = 'trial';
      section.dataset.trial = String(index);
      section.dataset.kind = trial.kind;

      const title = document.createElement('h2');
      title.textContent = trial.kind === 'ran'
        ? `trial ${index + 1}: rapid naming`
        : `trial ${index + 1}: repeat "${trial.target}"`;

      const startBtn = document.createElement('button');
      startBtn.className = 'start-trial';
      startBtn.textContent = 'start trial';
      startBtn.onclick = () => void this.beginTrial(index);

      const recordBtn = document.createElement('button');
      recordBtn.className = 'record';
      recordBtn.textContent = 'record';
      recordBtn.disabled = true;

      const stopBtn = document.createElement('button');
      stopBtn.className = 'stop';
      stopBtn.textContent = 'stop and score';
      stopBtn.disabled = true;

      const stimulus = document.createElement('div');
      stimulus.className = 'stimulus';
      const outcome = document.createElement('div');
      outcome.className = 'outcome';

      section.append(title, startBtn, recordBtn, stopBtn, stimulus, outcome);
      this.root.append(section);
    });

    const review = document.createElement('section');
    review.id = 'review';
    const refresh = document.createElement('button');
    refresh.className = 'refresh-review';
    refresh.textContent = 'refresh results';
    refresh.onclick = () => void this.review();
    const table = document.createElement('div');
    table.className = 'review-table';
    review.append(refresh, table);
    this.root.append(review);
  }

  private section(index: number): HTMLElement {
    return this.root.querySelector(`[data-trial="${index}"]`) as HTMLElement;
  }

  async beginTrial(index: number): Promise<void> {
    if (this.activeTrial !== null && this.activeTrial !== index) return;
    const view = this.views[index];
    const section = this.section(index);
    const recordBtn = section.querySelector('.record') as HTMLButtonElement;
    const stopBtn = section.querySelector('.stop') as HTMLButtonElement;
    const stimulus = section.querySelector('.stimulus') as HTMLElement;
    const outcome = section.querySelector('.outcome') as HTMLElement;

    this.activeTrial = index;
    outcome.replaceChildren();
    try {
      view.to('prompting');
      if (view.plan.kind === 'ran') {
        renderRanStimulus(stimulus, view.plan.grid);
      } else {
        stimulus.textContent = 'playing prompt...';
        // interlock: the child must hear the word before recording opens
        await this.deps.player.play(view.plan.promptUrl);
        stimulus.textContent = 'repeat now';
      }
      recordBtn.disabled = false;
      recordBtn.onclick = () => void this.beginRecording(index, recordBtn, stopBtn);
      stopBtn.onclick = () => void this.finishTrial(index, stopBtn);
    } catch (err) {
      this.trialFailed(index, err);
    }
  }

  private async beginRecording(index: number, recordBtn: HTMLButtonElement,
                               stopBtn: HTMLButtonElement): Promise<void> {
    const view = this.views[index];
    try {
      await this.deps.recorder.start();
      view.to('recording');
      recordBtn.disabled = true;
      stopBtn.disabled = false;
    } catch (err) {
      this.trialFailed(index, err);
    }
  }

  private async finishTrial(index: number, stopBtn: HTMLButtonElement): Promise<void> {
    const view = this.views[index];
    const section = this.section(index);
    const outcome = section.querySelector('.outcome') as HTMLElement;
    stopBtn.disabled = true;
    try {
      view.to('uploading');
      const wav = await this.deps.recorder.stop();
      const client = this.deps.client;
      const recordingId = await client.uploadRecording(this.sessionId!,
                                                       view.plan.kind, wav);
      if (view.plan.kind === 'ran') {
        const payload = await client.scoreRan(recordingId, view.plan.grid);
        view.scored(payload);
        renderRanResult(outcome, payload);
      } else {
        const payload = await client.scorePseudoword(recordingId, view.plan.target);
        view.scored(payload);
        renderPseudowordResult(outcome, payload);
      }
      this.activeTrial = null;
    } catch (err) {
      this.trialFailed(index, err);
    }
  }

  private trialFailed(index: number, err: unknown): void {
    const view = this.views[index];
    const outcome = this.section(index).querySelector('.outcome') as HTMLElement;
    const message = err instanceof ApiError ? err.message
      : err instanceof Error ? err.message : String(err);
    if (view.state !== 'failed') view.failed(message);
    this.activeTrial = null;
    renderError(outcome, message, () => void this.beginTrial(index));
  }

  async review(): Promise<void> {
    const container = this.root.querySelector('.review-table') as HTMLElement;
    try {
      const results = await this.deps.client.sessionResults(this.sessionId!);
      this.lastResults = results;
      renderResults(container, results);
    } catch {
      // service unreachable: keep the last loaded view, flag it stale
      renderResults(container, this.lastResults, true);
    }
  }
}
