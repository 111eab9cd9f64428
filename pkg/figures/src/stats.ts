export const mean = (xs: number[]): number =>
  xs.reduce((a, b) => a + b, 0) / xs.length;

export const stdDev = (xs: number[]): number => {
  if (xs.length < 2) return 0;
  const m = mean(xs);
  return Math.sqrt(
    xs.reduce((a, b) => a + (b - m) * (b - m), 0) / (xs.length - 1)
  );
};

// Silverman's rule of thumb, floored so degenerate samples still render.
export function kdeBandwidth(xs: number[]): number {
  const sd = stdDev(xs);
  const h = 1.06 * sd * Math.pow(xs.length, -1 / 5);
  return Math.max(h, 1e-3);
}

// Gaussian kernel density estimate at x.
export function kde(xs: number[], x: number, bandwidth: number): number {
  const norm = 1 / (Math.sqrt(2 * Math.PI) * bandwidth * xs.length);
  return (
    norm *
    xs.reduce((sum, xi) => {
      const z = (x - xi) / bandwidth;
      return sum + Math.exp(-0.5 * z * z);
    }, 0)
  );
}

export function kdeCurve(
  xs: number[],
  lo: number,
  hi: number,
  points = 200
): Array<[number, number]> {
  const bandwidth = kdeBandwidth(xs);
  const curve: Array<[number, number]> = [];
  for (let i = 0; i <= points; i++) {
    const x = lo + ((hi - lo) * i) / points;
    curve.push([x, kde(xs, x, bandwidth)]);
  }
  return curve;
}
