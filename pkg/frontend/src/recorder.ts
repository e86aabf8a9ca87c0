/**
 * Microphone capture.
 *
 * Raw PCM is collected through an AudioContext tap rather than
 * MediaRecorder, which would hand back a compressed container the
 * service does not accept. stop() resamples to 16 kHz and returns
 * ready-to-upload WAV bytes.
 */

import { encodeWavPcm16, resampleTo } from './audio';

export interface Recorder {
  start(): Promise<void>;
  stop(): Promise<Uint8Array<ArrayBuffer>>;
}

export class MicRecorder implements Recorder {
  private chunks: Float32Array[] = [];
  private context: AudioContext | null = null;
  private stream: MediaStream | null = null;
  private processor: ScriptProcessorNode | null = null;

  async start(): Promise<void> {
    this.stream = await navigator.mediaDevices.getUserMedia({ audio: true });
    this.context = new AudioContext();
    const source = this.context.createMediaStreamSource(this.stream);
    this.processor = this.context.createScriptProcessor(4096, 1, 1);
    this.chunks = [];
    this.processor.onaudioprocess = (event) => {
      this.chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
    };
    source.connect(this.processor);
    this.processor.connect(this.context.destination);
  }

  async stop(): Promise<Uint8Array<ArrayBuffer>> {
    if (!this.context || !this.stream) throw new Error('recorder was never started');
    this.processor?.disconnect();
    this.stream.getTracks().forEach((track) => track.stop());
    const captureRate = this.context.sampleRate;
    await this.context.close();

    let total = 0;
    for (const chunk of this.chunks) total += chunk.length;
    const joined = new Float32Array(total);
    let offset = 0;
    for (const chunk of this.chunks) {
      joined.set(chunk, offset);
      offset += chunk.length;
    }
    this.context = null;
    this.stream = null;
    this.processor = null;
    return encodeWavPcm16(resampleTo(joined, captureRate));
  }
}

/** Prompt audio playback; resolves once playback finishes. */
export interface PromptPlayer {
  play(url: string): Promise<void>;
}

export class HtmlPromptPlayer implements PromptPlayer {
  play(url: string): Promise<void> {
    return new Promise((resolve, reject) => {
      const audio = new Audio(url);
      audio.onended = () => resolve();
      audio.onerror = () => reject(new Error('prompt audio failed to play'));
      void audio.play().catch(reject);
    });
  }
}
