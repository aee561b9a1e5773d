/**
 * Prototype spin: the target shape turns continuously about its vertical
 * axis at a slow fixed rate so every aspect becomes visible over time.
 */

export const PROTOTYPE_RPM = 2.7;

/** Display angle in degrees for a given elapsed time since task start. */
export function rotationAngleDeg(elapsedSeconds: number, rpm: number = PROTOTYPE_RPM): number {
  const angle = (elapsedSeconds / 60) * rpm * 360;
  return ((angle % 360) + 360) % 360;
}

/**
 * Measured rate in rpm over a window of (timeSeconds, angleDeg) samples,
 * unwrapping the 360 degree jumps a mod-360 display angle produces.
 */
export function measuredRpm(samples: Array<[number, number]>): number {
  if (samples.length < 2) {
    throw new Error("need at least two samples to measure a rate");
  }
  let total = 0;
  for (let i = 1; i < samples.length; i++) {
    let delta = samples[i][1] - samples[i - 1][1];
    while (delta < 0) delta += 360; // unwrap forward rotation
    total += delta;
  }
  const seconds = samples[samples.length - 1][0] - samples[0][0];
  return total / 360 / (seconds / 60);
}
