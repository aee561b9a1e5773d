/**
 * Audio cues: a distinct chime for connects and another for disconnects.
 * Assets are synthesized (no media files); what matters is that the two
 * are audibly different and keyed to the cue codes the service returns.
 */

export interface CueAsset {
  code: string;
  frequencyHz: number;
  durationMs: number;
  wave: OscillatorType;
  gain: number;
}

export const CONNECT_CUE: CueAsset = {
  code: "chime-connect",
  frequencyHz: 880, // bright A5 blip
  durationMs: 140,
  wave: "sine",
  gain: 0.25,
};

export const DISCONNECT_CUE: CueAsset = {
  code: "chime-disconnect",
  frequencyHz: 392, // lower G4, longer tail
  durationMs: 260,
  wave: "triangle",
  gain: 0.25,
};

const BY_CODE = new Map([
  [CONNECT_CUE.code, CONNECT_CUE],
  [DISCONNECT_CUE.code, DISCONNECT_CUE],
]);

export function cueForCode(code: string): CueAsset {
  const asset = BY_CODE.get(code);
  if (!asset) {
    throw new Error(`unknown cue code: ${code}`);
  }
  return asset;
}

/** Browser-only playback; no-op where WebAudio is unavailable (tests). */
export function playCue(asset: CueAsset, ctx?: AudioContext): void {
  const AudioCtx = (globalThis as { AudioContext?: typeof AudioContext }).AudioContext;
  const audio = ctx ?? (AudioCtx ? new AudioCtx() : undefined);
  if (!audio) return;
  const osc = audio.createOscillator();
  const gain = audio.createGain();
  osc.type = asset.wave;
  osc.frequency.value = asset.frequencyHz;
  gain.gain.value = asset.gain;
  gain.gain.exponentialRampToValueAtTime(0.001, audio.currentTime + asset.durationMs / 1000);
  osc.connect(gain).connect(audio.destination);
  osc.start();
  osc.stop(audio.currentTime + asset.durationMs / 1000);
}
