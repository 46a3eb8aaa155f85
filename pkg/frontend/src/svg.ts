/**
 * Minimal deterministic SVG line-chart renderer.
 *
 * One panel = belief of the shared hypothesis vs iteration, one curve per
 * strategy.  The y axis is fixed to [0, 1] (beliefs), so plotted pixel
 * coordinates are an exactly invertible affine map of the data — tests
 * recover the data by re-parsing the polyline points.
 */

export interface Curve {
  label: string;
  x: number[];
  y: number[];
}

export interface PanelOptions {
  title?: string;
  width?: number;
  height?: number;
  xLabel?: string;
  yLabel?: string;
}

export const MARGIN = { top: 34, right: 16, bottom: 42, left: 52 };

// solid for the self-aware curve, dashed for masked-only, dotted for the
// traditional reference — cycled in input order
const STROKES = ["#1f77b4", "#d62728", "#333333", "#2ca02c", "#9467bd"];
const DASHES = ["", "7 4", "2 3", "10 3", "4 4"];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export interface Transform {
  xScale: (v: number) => number;
  yScale: (v: number) => number;
  xMax: number;
  plotW: number;
  plotH: number;
}

export function panelTransform(curves: Curve[], width: number, height: number): Transform {
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const xMax = Math.max(1, ...curves.map((c) => c.x[c.x.length - 1] ?? 1));
  return {
    xScale: (v) => MARGIN.left + (v / xMax) * plotW,
    yScale: (v) => MARGIN.top + (1 - v) * plotH,
    xMax,
    plotW,
    plotH,
  };
}

export function renderPanel(curves: Curve[], opts: PanelOptions = {}): string {
  if (curves.length === 0) throw new Error("panel needs at least one curve");
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const t = panelTransform(curves, width, height);
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" data-x-max="${t.xMax}" ` +
      `font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (opts.title) {
    parts.push(
      `<text x="${width / 2}" y="20" text-anchor="middle" font-size="14">${esc(opts.title)}</text>`,
    );
  }

  // frame and gridlines at belief 0, 0.5, 1
  for (const v of [0, 0.5, 1]) {
    const y = t.yScale(v);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${y}" x2="${width - MARGIN.right}" y2="${y}" ` +
        `stroke="#ddd" stroke-width="1"/>`,
      `<text x="${MARGIN.left - 6}" y="${y + 4}" text-anchor="end">${v}</text>`,
    );
  }
  for (const frac of [0, 0.5, 1]) {
    const xVal = Math.round(frac * t.xMax);
    const x = t.xScale(xVal);
    parts.push(
      `<text x="${x}" y="${height - MARGIN.bottom + 16}" text-anchor="middle">${xVal}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${t.plotW}" height="${t.plotH}" ` +
      `fill="none" stroke="#888"/>`,
  );
  parts.push(
    `<text x="${MARGIN.left + t.plotW / 2}" y="${height - 8}" text-anchor="middle">` +
      `${esc(opts.xLabel ?? "iteration")}</text>`,
    `<text x="14" y="${MARGIN.top + t.plotH / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${MARGIN.top + t.plotH / 2})">${esc(opts.yLabel ?? "belief")}</text>`,
  );

  curves.forEach((curve, i) => {
    if (curve.x.length !== curve.y.length) {
      throw new Error(`curve ${curve.label}: x/y length mismatch`);
    }
    for (const v of curve.y) {
      if (!(v >= 0 && v <= 1)) {
        throw new Error(`curve ${curve.label}: belief ${v} outside [0, 1]`);
      }
    }
    const pts = curve.x
      .map((xv, j) => `${t.xScale(xv)},${t.yScale(curve.y[j])}`)
      .join(" ");
    const dash = DASHES[i % DASHES.length];
    parts.push(
      `<polyline class="series" data-label="${esc(curve.label)}" points="${pts}" ` +
        `fill="none" stroke="${STROKES[i % STROKES.length]}" stroke-width="1.5"` +
        (dash ? ` stroke-dasharray="${dash}"` : "") +
        `/>`,
    );
    // legend entry
    const ly = MARGIN.top + 14 + 16 * i;
    const lx = width - MARGIN.right - 150;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 26}" y2="${ly - 4}" ` +
        `stroke="${STROKES[i % STROKES.length]}" stroke-width="1.5"` +
        (dash ? ` stroke-dasharray="${dash}"` : "") +
        `/>`,
      `<text x="${lx + 32}" y="${ly}">${esc(curve.label)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

/** Invert the panel's affine map: recover data values from polyline points. */
export function recoverSeries(
  svg: string,
  label: string,
): { x: number[]; y: number[] } {
  const width = Number(/<svg[^>]*\bwidth="(\d+)"/.exec(svg)?.[1]);
  const height = Number(/<svg[^>]*\bheight="(\d+)"/.exec(svg)?.[1]);
  const re = new RegExp(
    `<polyline class="series" data-label="${label}" points="([^"]*)"`,
  );
  const m = re.exec(svg);
  if (!m) throw new Error(`no series labelled ${label} in SVG`);
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;
  const x: number[] = [];
  const y: number[] = [];
  const pairs = m[1].split(" ").map((p) => p.split(",").map(Number));
  const xMaxData = Number(/data-x-max="([^"]+)"/.exec(svg)?.[1]);
  if (!Number.isFinite(xMaxData)) throw new Error("missing data-x-max attribute");
  for (const [px, py] of pairs) {
    x.push(((px - MARGIN.left) / plotW) * xMaxData);
    y.push(1 - (py - MARGIN.top) / plotH);
  }
  return { x, y };
}
