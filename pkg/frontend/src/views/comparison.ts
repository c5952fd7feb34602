import { ScenarioDraft } from "../scenario.js";
import { clear, htmlEl } from "../svg.js";
import { ModelsResponse } from "../types.js";

export interface ComparisonViewOptions {
  draft: ScenarioDraft;
  onMetricChange?: (metric: string) => void;
}

/** Scorecard table in ranking order; checkboxes pick the scenario models. */
export class ComparisonView {
  constructor(
    private readonly root: HTMLElement,
    private readonly options: ComparisonViewOptions,
  ) {}

  render(data: ModelsResponse): void {
    clear(this.root);
    const caption = htmlEl("div", "view-caption", `model comparison by ${data.metric}`);
    const picker = htmlEl("select", "metric-picker");
    for (const metric of ["rmse", "mae", "mape"]) {
      const option = htmlEl("option", "", metric);
      option.value = metric;
      if (metric === data.metric) option.selected = true;
      picker.appendChild(option);
    }
    picker.addEventListener("change", () => this.options.onMetricChange?.(picker.value));
    caption.appendChild(picker);
    this.root.appendChild(caption);

    const table = htmlEl("table", "scorecards");
    const head = htmlEl("tr");
    for (const column of ["use", "rank", "model", "rmse", "mae", "mape%", "folds"]) {
      head.appendChild(htmlEl("th", "", column));
    }
    table.appendChild(head);
    data.scorecards.forEach((card, position) => {
      const row = htmlEl("tr", "scorecard");
      row.dataset.kind = card.model_kind;
      const useCell = htmlEl("td");
      const checkbox = htmlEl("input");
      checkbox.type = "checkbox";
      checkbox.checked = this.options.draft.modelSelection.includes(card.model_kind);
      checkbox.addEventListener("change", () => {
        this.options.draft.setModelSelected(card.model_kind, checkbox.checked);
      });
      useCell.appendChild(checkbox);
      row.appendChild(useCell);
      row.appendChild(htmlEl("td", "", String(position + 1)));
      row.appendChild(htmlEl("td", "", card.model_kind));
      row.appendChild(htmlEl("td", "", card.rmse.toFixed(3)));
      row.appendChild(htmlEl("td", "", card.mae.toFixed(3)));
      row.appendChild(htmlEl("td", "", card.mape === null ? "n/a" : card.mape.toFixed(2)));
      row.appendChild(htmlEl("td", "", String(card.n_folds)));
      table.appendChild(row);
    });
    this.root.appendChild(table);
  }
}
