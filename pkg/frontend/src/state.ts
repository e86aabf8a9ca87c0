/**
 * Test plan and trial state machine.
 *
 * A trial advances idle -> prompting -> recording -> uploading and ends
 * scored or failed. Errors (mic denied, upload failure, scoring error)
 * drop to failed from any active state, and a failed trial may restart
 * at prompting (the retry affordance). scored is reachable only from
 * uploading, so a view can never hold a result the service did not
 * persist.
 */

import type { RanPayload, PseudowordPayload } from './api';

export interface RanTrialPlan {
  kind: 'ran';
  grid: string[];      // stimulus words, reading order
}

export interface PseudowordTrialPlan {
  kind: 'pseudoword';
  target: string;      // word the child must repeat
  promptUrl: string;   // audio played before recording unlocks
}

export type TrialPlan = RanTrialPlan | PseudowordTrialPlan;

export interface TestPlan {
  childAlias: string;
  trials: TrialPlan[];
}

export function validatePlan(plan: TestPlan): void {
  if (plan.trials.length === 0) throw new Error('test plan has no trials');
  for (const trial of plan.trials) {
    if (trial.kind === 'ran' && trial.grid.length === 0) {
      throw new Error('ran trial has an empty grid');
    }
    if (trial.kind === 'pseudoword' && trial.target === '') {
      throw new Error('pseudoword trial has no target');
    }
  }
}

export type TrialState = 'idle' | 'prompting' | 'recording' | 'uploading' | 'scored' | 'failed';

const LEGAL: Record<TrialState, TrialState[]> = {
  idle: ['prompting'],
  prompting: ['recording', 'failed'],
  recording: ['uploading', 'failed'],
  uploading: ['scored', 'failed'],
  scored: [],
  failed: ['prompting'],
};

export class TrialView {
  state: TrialState = 'idle';
  result: RanPayload | PseudowordPayload | null = null;
  error: string | null = null;

  constructor(readonly plan: TrialPlan) {}

  to(next: TrialState): void {
    if (!LEGAL[this.state].includes(next)) {
      throw new Error(`illegal transition ${this.state} -> ${next}`);
    }
    this.state = next;
  }

  scored(payload: RanPayload | PseudowordPayload): void {
    this.to('scored');
    this.result = payload;
    this.error = null;
  }

  failed(message: string): void {
    this.to('failed');
    this.error = message;
  }
}
