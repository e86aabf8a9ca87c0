/**
 * Client-side audio utilities.
 *
 * The service decodes a single format, so every capture is resampled to
 * 16 kHz mono and encoded as PCM16 WAV before upload.
 */

export const TARGET_RATE = 16000;

/** Linear-interpolation resample of a mono buffer. */
export function resampleTo(samples: Float32Array, fromRate: number,
                           toRate = TARGET_RATE): Float32Array {
  if (fromRate === toRate) return samples;
  const outLength = Math.max(1, Math.round(samples.length * toRate / fromRate));
  const out = new Float32Array(outLength);
  const step = (samples.length - 1) / Math.max(1, outLength - 1);
  for (let i = 0; i < outLength; i++) {
    const pos = i * step;
    const lo = Math.floor(pos);
    const hi = Math.min(lo + 1, samples.length - 1);
    const frac = pos - lo;
    out[i] = samples[lo] * (1 - frac) + samples[hi] * frac;
  }
  return out;
}

/** Encode mono float samples in [-1, 1] as a PCM16 RIFF/WAVE file. */
export function encodeWavPcm16(samples: Float32Array,
                               sampleRate = TARGET_RATE): Uint8Array<ArrayBuffer> {
  const dataBytes = samples.length * 2;
  const buffer = new ArrayBuffer(44 + dataBytes);
  const view = new DataView(buffer);

  const writeAscii = (offset: number, text: string) => {
    for (let i = 0; i < text.length; i++) view.setUint8(offset + i, text.charCodeAt(i));
  };

  writeAscii(0, 'RIFF');
  view.setUint32(4, 36 + dataBytes, true);
  writeAscii(8, 'WAVE');
  writeAscii(12, 'fmt ');
  view.setUint32(16, 16, true);           // fmt chunk size
  view.setUint16(20, 1, true);            // PCM
  view.setUint16(22, 1, true);            // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true); // byte rate
  view.setUint16(32, 2, true);            // block align
  view.setUint16(34, 16, true);           // bits per sample
  writeAscii(36, 'data');
  view.setUint32(40, dataBytes, true);

  for (let i = 0; i < samples.length; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]));
    view.setInt16(44 + i * 2, Math.round(clamped * 32767), true);
  }
  return new Uint8Array(buffer);
}

/** Synthesize a sine tone, used for prompt audio and tests. */
export function sineTone(freqHz: number, durationS: number, amplitude = 0.3,
                         sampleRate = TARGET_RATE): Float32Array {
  const n = Math.round(durationS * sampleRate);
  const out = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = amplitude * Math.sin(2 * Math.PI * freqHz * i / sampleRate);
  }
  return out;
}

/** Base64 data URL for a WAV buffer, playable by an <audio> element. */
export function wavDataUrl(wav: Uint8Array): string {
  let binary = '';
  for (let i = 0; i < wav.length; i++) binary += String.fromCharCode(wav[i]);
  return 'data:audio/wav;base64,' + btoa(binary);
}
