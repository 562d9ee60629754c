/**
 * Sample-rate reduction by index decimation, contract-identical to the
 * server: output[j] = input[floor(j * srcRate / dstRate)] and the
 * output holds floor(n * dstRate / srcRate) samples.  Raising the rate
 * is not supported.
 */

export function decimate(
  input: Float64Array | number[],
  srcRate: number,
  dstRate: number,
): Float64Array {
  if (!Number.isInteger(srcRate) || !Number.isInteger(dstRate) || srcRate <= 0 || dstRate <= 0) {
    throw new Error(`rates must be positive integers, got ${srcRate} -> ${dstRate}`);
  }
  if (dstRate > srcRate) {
    throw new Error(`cannot decimate ${srcRate} Hz up to ${dstRate} Hz`);
  }
  const n = input.length;
  const outLen = Math.floor((n * dstRate) / srcRate);
  const out = new Float64Array(outLen);
  for (let j = 0; j < outLen; j++) {
    out[j] = input[Math.floor((j * srcRate) / dstRate)];
  }
  return out;
}
