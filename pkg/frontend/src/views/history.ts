import { clear, htmlEl, polylinePoints, svgEl } from "../svg.js";
import { MODEL_KINDS, ModelKind, ScenarioRunDoc } from "../types.js";

export interface HistoryViewOptions {
  width?: number;
  rowHeight?: number;
}

/**
 * One row per run, oldest first, never reordered. Each row charts the
 * per-model what-if minus baseline curves with the x-axis pinned to
 * y=0 at mid-height, so the curve's side of the axis is the direction
 * of the shift; checkboxes toggle individual model curves.
 */
export class HistoryView {
  private readonly width: number;
  private readonly rowHeight: number;
  private hidden = new Map<number, Set<ModelKind>>();

  constructor(
    private readonly root: HTMLElement,
    options: HistoryViewOptions = {},
  ) {
    this.width = options.width ?? 300;
    this.rowHeight = options.rowHeight ?? 80;
  }

  render(runs: ScenarioRunDoc[]): void {
    clear(this.root);
    this.root.appendChild(htmlEl("div", "view-caption",
      `${runs.length} scenario runs`));
    for (const run of runs) {
      this.root.appendChild(this.row(run));
    }
  }

  private hiddenFor(runId: number): Set<ModelKind> {
    let set = this.hidden.get(runId);
    if (!set) {
      set = new Set();
      this.hidden.set(runId, set);
    }
    return set;
  }

  private row(run: ScenarioRunDoc): HTMLElement {
    const row = htmlEl("div", "history-row");
    row.dataset.runId = String(run.run_id);
    const label = htmlEl("div", "history-label",
      `#${run.run_id} ${run.created_at.slice(0, 19)} ` +
      `mean ${run.overall_mean_diff >= 0 ? "+" : ""}${run.overall_mean_diff.toFixed(3)}`);
    row.appendChild(label);

    const toggles = htmlEl("div", "history-toggles");
    for (const kind of MODEL_KINDS) {
      if (!(kind in run.diff)) continue;
      const wrap = htmlEl("label", "", kind);
      const box = htmlEl("input");
      box.type = "checkbox";
      box.checked = !this.hiddenFor(run.run_id).has(kind);
      box.addEventListener("change", () => {
        const hidden = this.hiddenFor(run.run_id);
        if (box.checked) hidden.delete(kind);
        else hidden.add(kind);
        const replacement = this.row(run);
        row.replaceWith(replacement);
      });
      wrap.prepend(box);
      toggles.appendChild(wrap);
    }
    row.appendChild(toggles);
    row.appendChild(this.diffChart(run));
    return row;
  }

  private diffChart(run: ScenarioRunDoc): SVGSVGElement {
    const svg = svgEl("svg", {
      width: this.width,
      height: this.rowHeight,
      viewBox: `0 0 ${this.width} ${this.rowHeight}`,
      class: "diff-chart",
    });
    let peak = 0;
    for (const curve of Object.values(run.diff)) {
      for (const v of curve) peak = Math.max(peak, Math.abs(v));
    }
    if (peak === 0) peak = 1;
    const mid = this.rowHeight / 2;
    // the zero axis sits at the vertical middle by construction
    svg.appendChild(svgEl("line", {
      x1: 0, y1: mid, x2: this.width, y2: mid, class: "zero-axis",
    }));
    const horizon = run.scenario.horizon;
    const xFor = (s: number) =>
      horizon === 1 ? this.width / 2 : (s / (horizon - 1)) * this.width;
    for (const kind of MODEL_KINDS) {
      const curve = run.diff[kind];
      if (!curve || this.hiddenFor(run.run_id).has(kind)) continue;
      const line = svgEl("polyline", {
        points: polylinePoints(
          curve.map((_, s) => xFor(s)),
          curve.map((v) => mid - (v / peak) * (mid - 4)),
        ),
        class: `diff-line model-${kind}`,
        fill: "none",
      });
      line.dataset.kind = kind;
      svg.appendChild(line);
    }
    return svg;
  }
}
