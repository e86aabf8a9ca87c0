import { describe, expect, it } from 'vitest';
import { encodeWavPcm16, resampleTo, sineTone, wavDataUrl } from '../src/audio';

function ascii(bytes: Uint8Array, start: number, length: number): string {
  return String.fromCharCode(...bytes.subarray(start, start + length));
}

describe('encodeWavPcm16', () => {
  it('writes a canonical PCM16 mono header', () => {
    const wav = encodeWavPcm16(new Float32Array(160), 16000);
    const view = new DataView(wav.buffer);
    expect(ascii(wav, 0, 4)).toBe('RIFF');
    expect(ascii(wav, 8, 4)).toBe('WAVE');
    expect(ascii(wav, 12, 4)).toBe('fmt ');
    expect(view.getUint32(16, true)).toBe(16);     // fmt chunk size
    expect(view.getUint16(20, true)).toBe(1);      // PCM
    expect(view.getUint16(22, true)).toBe(1);      // mono
    expect(view.getUint32(24, true)).toBe(16000);
    expect(view.getUint32(28, true)).toBe(32000);  // byte rate
    expect(view.getUint16(32, true)).toBe(2);      // block align
    expect(view.getUint16(34, true)).toBe(16);
    expect(ascii(wav, 36, 4)).toBe('data');
    expect(view.getUint32(40, true)).toBe(320);
    expect(view.getUint32(4, true)).toBe(wav.length - 8);
    expect(wav.length).toBe(44 + 320);
  });

  it('scales samples to int16 and clamps out-of-range values', () => {
    const wav = encodeWavPcm16(new Float32Array([0, 1, -1, 2, -2]), 16000);
    const view = new DataView(wav.buffer);
    expect(view.getInt16(44, true)).toBe(0);
    expect(view.getInt16(46, true)).toBe(32767);
    expect(view.getInt16(48, true)).toBe(-32767);
    expect(view.getInt16(50, true)).toBe(32767);   // clamped
    expect(view.getInt16(52, true)).toBe(-32767);
  });
});

describe('resampleTo', () => {
  it('passes through at the target rate', () => {
    const samples = sineTone(440, 0.1);
    expect(resampleTo(samples, 16000)).toBe(samples);
  });

  it('halves the length from 32 kHz', () => {
    const out = resampleTo(new Float32Array(3200), 32000);
    expect(out.length).toBe(1600);
  });

  it('preserves endpoints and constants', () => {
    const ramp = Float32Array.from({ length: 441 }, (_, i) => i / 440);
    const out = resampleTo(ramp, 44100);
    expect(out[0]).toBeCloseTo(0, 6);
    expect(out[out.length - 1]).toBeCloseTo(1, 6);

    const flat = new Float32Array(4410).fill(0.25);
    for (const v of resampleTo(flat, 44100)) expect(v).toBeCloseTo(0.25, 6);
  });
});

describe('sineTone', () => {
  it('has the requested length and amplitude bound', () => {
    const tone = sineTone(440, 0.5, 0.3);
    expect(tone.length).toBe(8000);
    let peak = 0;
    for (const v of tone) peak = Math.max(peak, Math.abs(v));
    expect(peak).toBeLessThanOrEqual(0.3 + 1e-7);
    expect(peak).toBeGreaterThan(0.29);
  });
});

describe('wavDataUrl', () => {
  it('round-trips through base64', () => {
    const wav = encodeWavPcm16(sineTone(440, 0.05));
    const url = wavDataUrl(wav);
    expect(url.startsWith('data:audio/wav;base64,')).toBe(true);
    const decoded = Uint8Array.from(atob(url.split(',')[1]), (c) => c.charCodeAt(0));
    expect(decoded).toEqual(wav);
  });
});
