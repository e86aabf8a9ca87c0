/**
 * Entry point: builds the default test plan and mounts the console.
 *
 * The plan below is a demo; deployments swap in their own grids and
 * recorded prompt audio. Prompt tones here are synthesized client-side
 * so the page works against a bare service.
 */

import { ServiceClient } from './api';
import { encodeWavPcm16, sineTone, wavDataUrl } from './audio';
import { ExaminerApp } from './app';
import { HtmlPromptPlayer, MicRecorder } from './recorder';
import type { TestPlan } from './state';

const COLORS = ['ghermez', 'abi', 'sabz', 'zard', 'siyah', 'meshki'];

function defaultPlan(childAlias: string): TestPlan {
  const grid: string[] = [];
  for (let i = 0; i < 15; i++) grid.push(COLORS[i % COLORS.length]);
  const prompt = (freq: number) => wavDataUrl(encodeWavPcm16(sineTone(freq, 0.8)));
  return {
    childAlias,
    trials: [
      { kind: 'ran', grid },
      { kind: 'pseudoword', target: 'mashogh', promptUrl: prompt(440) },
      { kind: 'pseudoword', target: 'dakhol', promptUrl: prompt(523) },
    ],
  };
}

function mount(): void {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app container');

  const form = document.createElement('div');
  form.id = 'session-form';
  const alias = document.createElement('input');
  alias.id = 'child-alias';
  alias.placeholder = 'child alias';
  alias.value = 'anon';
  const begin = document.createElement('button');
  begin.id = 'begin-session';
  begin.textContent = 'begin session';
  begin.onclick = () => {
    const app = new ExaminerApp(root, defaultPlan(alias.value || 'anon'), {
      client: new ServiceClient(''),
      recorder: new MicRecorder(),
      player: new HtmlPromptPlayer(),
    });
    void app.start();
  };
  form.append(alias, begin);
  root.replaceChildren(form);
}

mount();
