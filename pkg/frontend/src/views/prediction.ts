import { observedRange, valueToY } from "../scale.js";
import { clear, htmlEl, polylinePoints, svgEl } from "../svg.js";
import { MODEL_KINDS, ScenarioRunDoc } from "../types.js";

export interface PredictionViewOptions {
  width?: number;
  height?: number;
}

const MODEL_CLASS: Record<string, string> = {
  mlr: "model-mlr",
  arimax: "model-arimax",
  vecm: "model-vecm",
  lstm: "model-lstm",
};

/** Baseline forecasts as solid lines, what-if forecasts dotted, shared axes. */
export class PredictionView {
  private readonly width: number;
  private readonly height: number;

  constructor(
    private readonly root: HTMLElement,
    options: PredictionViewOptions = {},
  ) {
    this.width = options.width ?? 420;
    this.height = options.height ?? 220;
  }

  render(run: ScenarioRunDoc | null): void {
    clear(this.root);
    if (!run) {
      this.root.appendChild(htmlEl("div", "view-caption",
        "submit a scenario to see predictions"));
      return;
    }
    this.root.appendChild(htmlEl("div", "view-caption",
      `run ${run.run_id}: baseline solid, what-if dotted`));

    const all: (number | null)[] = [];
    for (const kind of Object.keys(run.baseline)) {
      all.push(...run.baseline[kind].values, ...run.whatif[kind].values);
    }
    const range = observedRange(all);
    const svg = svgEl("svg", {
      width: this.width,
      height: this.height,
      viewBox: `0 0 ${this.width} ${this.height}`,
      class: "prediction-chart",
    });
    const horizon = run.scenario.horizon;
    const xFor = (s: number) =>
      horizon === 1 ? this.width / 2 : (s / (horizon - 1)) * this.width;

    for (const kind of MODEL_KINDS) {
      if (!(kind in run.baseline)) continue;
      const xs = run.baseline[kind].values.map((_, s) => xFor(s));
      svg.appendChild(svgEl("polyline", {
        points: polylinePoints(xs,
          run.baseline[kind].values.map((v) => valueToY(v, range, this.height))),
        class: `baseline-line ${MODEL_CLASS[kind]}`,
        fill: "none",
      }));
      const dotted = svgEl("polyline", {
        points: polylinePoints(xs,
          run.whatif[kind].values.map((v) => valueToY(v, range, this.height))),
        class: `whatif-forecast ${MODEL_CLASS[kind]}`,
        fill: "none",
        "stroke-dasharray": "4 3",
      });
      dotted.dataset.kind = kind;
      svg.appendChild(dotted);
    }
    this.root.appendChild(svg);

    const legend = htmlEl("div", "legend");
    for (const kind of MODEL_KINDS) {
      if (!(kind in run.mean_diff_per_model)) continue;
      legend.appendChild(htmlEl("span", `legend-item ${MODEL_CLASS[kind]}`,
        `${kind} ${run.mean_diff_per_model[kind] >= 0 ? "+" : ""}` +
        run.mean_diff_per_model[kind].toFixed(3)));
    }
    this.root.appendChild(legend);
  }
}
