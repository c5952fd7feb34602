import { clear, htmlEl, polylinePoints, svgEl } from "../svg.js";
import { CoefficientsResponse } from "../types.js";

export interface CoefficientViewOptions {
  width?: number;
  rowHeight?: number;
  onSelect?: (variable: string) => void;
}

/**
 * Vertically stacked bell-shaped area charts, one per variable, drawn
 * on a shared value axis so the magnitudes compare directly. Rows are
 * compact on purpose: the view doubles as a variable jump list, and a
 * click hands the variable to the input view for scrolling.
 */
export class CoefficientView {
  private readonly width: number;
  private readonly rowHeight: number;

  constructor(
    private readonly root: HTMLElement,
    private readonly options: CoefficientViewOptions = {},
  ) {
    this.width = options.width ?? 260;
    this.rowHeight = options.rowHeight ?? 44;
  }

  render(data: CoefficientsResponse): void {
    clear(this.root);
    const heading = htmlEl("div", "view-caption",
      `variable impacts (${data.model_kind})`);
    this.root.appendChild(heading);

    const available = data.impacts.filter(
      (i) => i.available && i.mean_impact !== null && i.std_impact !== null);
    let lo = Infinity;
    let hi = -Infinity;
    for (const impact of available) {
      const mean = impact.mean_impact as number;
      const std = impact.std_impact as number;
      lo = Math.min(lo, mean - 3.5 * std);
      hi = Math.max(hi, mean + 3.5 * std);
    }
    if (lo >= hi) {
      lo -= 1;
      hi += 1;
    }

    for (const impact of data.impacts) {
      const row = htmlEl("div", "coef-row");
      row.dataset.variable = impact.variable;
      const label = htmlEl("span", "coef-label", impact.variable);
      row.appendChild(label);
      if (impact.available && impact.mean_impact !== null && impact.std_impact !== null) {
        row.appendChild(this.bellCurve(impact.mean_impact, impact.std_impact, [lo, hi]));
        row.title = `mean ${impact.mean_impact.toFixed(3)}, ` +
          `std ${impact.std_impact.toFixed(3)}`;
      } else {
        row.appendChild(htmlEl("span", "coef-na",
          "no scalar coefficient for this model family"));
      }
      row.addEventListener("click", () => this.options.onSelect?.(impact.variable));
      this.root.appendChild(row);
    }
  }

  private bellCurve(mean: number, std: number, domain: [number, number]): SVGSVGElement {
    const [lo, hi] = domain;
    const svg = svgEl("svg", {
      width: this.width,
      height: this.rowHeight,
      viewBox: `0 0 ${this.width} ${this.rowHeight}`,
      class: "coef-curve",
    });
    // zero spread still needs a visible spike
    const sigma = Math.max(std, (hi - lo) / 200);
    const n = 80;
    const xs: number[] = [];
    const ys: number[] = [];
    xs.push(0);
    ys.push(this.rowHeight);
    for (let i = 0; i <= n; i++) {
      const value = lo + ((hi - lo) * i) / n;
      const density = Math.exp(-((value - mean) ** 2) / (2 * sigma * sigma));
      xs.push((i / n) * this.width);
      ys.push(this.rowHeight - density * (this.rowHeight - 6));
    }
    xs.push(this.width);
    ys.push(this.rowHeight);
    svg.appendChild(svgEl("polygon", {
      points: polylinePoints(xs, ys),
      class: "coef-area",
    }));
    return svg;
  }
}
