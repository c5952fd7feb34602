import { decimalsFor, observedRange, pixelToValue, snapValue, valueToY, ValueRange } from "../scale.js";
import { ScenarioDraft } from "../scenario.js";
import { clear, htmlEl, polylinePoints, svgEl } from "../svg.js";
import { FrameDoc, frameColumn } from "../types.js";

export interface WhatifInputOptions {
  frame: FrameDoc;
  variables: string[];
  draft: ScenarioDraft;
  panelWidth?: number;
  panelHeight?: number;
  nearWeeks?: number;
  bollingerWindow?: number;
  bollingerK?: number;
  decimals?: Record<string, number>;
  onChange?: () => void;
}

interface RowState {
  variable: string;
  range: ValueRange;
  lastObserved: number;
  visibleCount: number;
  showBands: boolean;
  element: HTMLElement;
}

interface DragState {
  variable: string;
  step: number;
  grabY: number;
  grabValue: number;
  releaseY: number;
}

/**
 * One row per exogenous variable, three panels sharing the value scale:
 * the full history (wheel to zoom, optional volatility bands), the last
 * four weeks magnified, and the editable future where green points drag
 * vertically. Dragged values snap to the variable's precision and hold
 * forward until the next dragged step.
 */
export class WhatifInputView {
  private readonly width: number;
  private readonly height: number;
  private readonly nearWeeks: number;
  private readonly bandWindow: number;
  private readonly bandK: number;
  private rows = new Map<string, RowState>();
  private drag: DragState | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly options: WhatifInputOptions,
  ) {
    this.width = options.panelWidth ?? 220;
    this.height = options.panelHeight ?? 120;
    this.nearWeeks = options.nearWeeks ?? 4;
    this.bandWindow = options.bollingerWindow ?? 20;
    this.bandK = options.bollingerK ?? 2;
  }

  decimals(variable: string): number {
    return this.options.decimals?.[variable] ?? decimalsFor(variable);
  }

  chartHeight(): number {
    return this.height;
  }

  rangeFor(variable: string): ValueRange {
    const row = this.rows.get(variable);
    if (!row) throw new Error(`unknown variable ${variable}`);
    return row.range;
  }

  render(): void {
    clear(this.root);
    this.rows.clear();
    for (const variable of this.options.variables) {
      const column = frameColumn(this.options.frame, variable);
      const observed = column.filter((v): v is number => v !== null);
      const state: RowState = {
        variable,
        range: observedRange(column),
        lastObserved: observed[observed.length - 1],
        visibleCount: column.length,
        showBands: false,
        element: htmlEl("div", "whatif-row"),
      };
      state.element.dataset.variable = variable;
      this.rows.set(variable, state);
      this.renderRow(state);
      this.root.appendChild(state.element);
    }
  }

  rowFor(variable: string): HTMLElement | null {
    return this.rows.get(variable)?.element ?? null;
  }

  scrollToVariable(variable: string): void {
    const row = this.rowFor(variable);
    row?.scrollIntoView({ behavior: "smooth", block: "center" });
  }

  /** Committed what-if value at a step, after snapping and holding. */
  valueAt(variable: string, step: number): number {
    const row = this.rows.get(variable);
    if (!row) throw new Error(`unknown variable ${variable}`);
    return this.options.draft.previewPath(variable, row.lastObserved)[step];
  }

  private renderRow(state: RowState): void {
    clear(state.element);
    const title = htmlEl("div", "row-title", state.variable);
    const bandToggle = htmlEl("button", "band-toggle",
      state.showBands ? "bands on" : "bands off");
    bandToggle.addEventListener("click", () => {
      state.showBands = !state.showBands;
      this.renderRow(state);
    });
    title.appendChild(bandToggle);
    state.element.appendChild(title);

    const panels = htmlEl("div", "panels");
    panels.appendChild(this.historyPanel(state));
    panels.appendChild(this.nearPanel(state));
    panels.appendChild(this.whatifPanel(state));
    state.element.appendChild(panels);
  }

  private baseSvg(className: string): SVGSVGElement {
    const svg = svgEl("svg", {
      width: this.width,
      height: this.height,
      viewBox: `0 0 ${this.width} ${this.height}`,
      class: className,
    });
    svg.appendChild(svgEl("rect", {
      x: 0, y: 0, width: this.width, height: this.height,
      class: "panel-bg",
    }));
    return svg;
  }

  private linePoints(values: (number | null)[], range: ValueRange): string {
    const n = values.length;
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < n; i++) {
      const v = values[i];
      if (v === null) continue;
      xs.push(n === 1 ? this.width / 2 : (i / (n - 1)) * this.width);
      ys.push(valueToY(v, range, this.height));
    }
    return polylinePoints(xs, ys);
  }

  private historyPanel(state: RowState): SVGSVGElement {
    const svg = this.baseSvg("panel history");
    const column = frameColumn(this.options.frame, state.variable);
    const visible = column.slice(column.length - state.visibleCount);
    svg.appendChild(svgEl("polyline", {
      points: this.linePoints(visible, state.range),
      class: "history-line",
      fill: "none",
    }));
    if (state.showBands) {
      for (const points of this.bandLines(visible, state.range)) {
        svg.appendChild(svgEl("polyline", {
          points, class: "band-line", fill: "none",
        }));
      }
    }
    svg.addEventListener("wheel", (event) => {
      event.preventDefault();
      const factor = (event as WheelEvent).deltaY > 0 ? 1.25 : 0.8;
      const total = column.length;
      state.visibleCount = Math.max(
        Math.min(this.nearWeeks * 2, total),
        Math.min(total, Math.round(state.visibleCount * factor)),
      );
      this.renderRow(state);
    });
    return svg;
  }

  /** Rolling mean +/- k population standard deviations, defined from
   * window-1 on; a presentation overlay computed from served data. */
  private bandLines(values: (number | null)[], range: ValueRange): string[] {
    const w = this.bandWindow;
    const n = values.length;
    if (w > n) return [];
    const mid: (number | null)[] = new Array(n).fill(null);
    const up: (number | null)[] = new Array(n).fill(null);
    const lo: (number | null)[] = new Array(n).fill(null);
    for (let t = w - 1; t < n; t++) {
      const seg = values.slice(t - w + 1, t + 1);
      if (seg.some((v) => v === null)) continue;
      const nums = seg as number[];
      const mean = nums.reduce((a, b) => a + b, 0) / w;
      const variance = nums.reduce((a, b) => a + (b - mean) ** 2, 0) / w;
      const sd = Math.sqrt(variance);
      mid[t] = mean;
      up[t] = mean + this.bandK * sd;
      lo[t] = mean - this.bandK * sd;
    }
    return [mid, up, lo].map((series) => this.linePoints(series, range));
  }

  private nearPanel(state: RowState): SVGSVGElement {
    const svg = this.baseSvg("panel near");
    const column = frameColumn(this.options.frame, state.variable);
    const recent = column.slice(-this.nearWeeks);
    svg.appendChild(svgEl("polyline", {
      points: this.linePoints(recent, state.range),
      class: "near-line",
      fill: "none",
    }));
    for (let i = 0; i < recent.length; i++) {
      const v = recent[i];
      if (v === null) continue;
      svg.appendChild(svgEl("circle", {
        cx: recent.length === 1 ? this.width / 2 : (i / (recent.length - 1)) * this.width,
        cy: valueToY(v, state.range, this.height),
        r: 3,
        class: "near-point",
      }));
    }
    return svg;
  }

  private whatifPanel(state: RowState): SVGSVGElement {
    const svg = this.baseSvg("panel whatif");
    const draft = this.options.draft;
    const horizon = draft.horizon;
    const path = draft.previewPath(state.variable, state.lastObserved);
    const xs = Array.from({ length: horizon }, (_, s) =>
      horizon === 1 ? this.width / 2 : (s / (horizon - 1)) * this.width);
    svg.appendChild(svgEl("polyline", {
      points: polylinePoints(xs, path.map((v) => valueToY(v, state.range, this.height))),
      class: "whatif-line",
      fill: "none",
    }));
    for (let s = 0; s < horizon; s++) {
      const point = svgEl("circle", {
        cx: xs[s],
        cy: valueToY(path[s], state.range, this.height),
        r: 5,
        class: "whatif-point",
      });
      point.dataset.step = String(s);
      point.dataset.value = String(path[s]);
      point.addEventListener("mousedown", (event) => {
        event.preventDefault();
        this.beginDrag(state, s, (event as MouseEvent).clientY, path[s]);
      });
      svg.appendChild(point);
    }
    return svg;
  }

  private beginDrag(state: RowState, step: number, grabY: number, grabValue: number): void {
    this.drag = {
      variable: state.variable,
      step,
      grabY,
      grabValue,
      releaseY: grabY,
    };
    const move = (event: MouseEvent) => {
      if (!this.drag) return;
      this.drag.releaseY = event.clientY;
    };
    const up = () => {
      document.removeEventListener("mousemove", move);
      document.removeEventListener("mouseup", up);
      this.endDrag(state);
    };
    document.addEventListener("mousemove", move);
    document.addEventListener("mouseup", up);
  }

  private endDrag(state: RowState): void {
    const drag = this.drag;
    this.drag = null;
    if (!drag) return;
    const deltaPx = drag.releaseY - drag.grabY;
    if (this.height <= 0) return; // guard: no update on a degenerate chart
    const raw = drag.grabValue + pixelToValue(deltaPx, state.range, this.height);
    const snapped = snapValue(raw, this.decimals(state.variable));
    this.options.draft.setPoint(state.variable, drag.step, snapped);
    this.renderRow(state);
    this.options.onChange?.();
  }
}
