import { Api, HttpApi } from "./api.js";
import { ScenarioDraft } from "./scenario.js";
import { htmlEl } from "./svg.js";
import { RouteSummary } from "./types.js";
import { CoefficientView } from "./views/coefficients.js";
import { ComparisonView } from "./views/comparison.js";
import { HistoryView } from "./views/history.js";
import { MapView } from "./views/map.js";
import { PredictionView } from "./views/prediction.js";
import { WhatifInputView } from "./views/whatifInput.js";

export interface AppElements {
  whatifInput: HTMLElement;
  coefficients: HTMLElement;
  comparison: HTMLElement;
  map: HTMLElement;
  prediction: HTMLElement;
  history: HTMLElement;
  submit: HTMLButtonElement;
  reset: HTMLButtonElement;
  routePicker: HTMLSelectElement;
  status: HTMLElement;
}

export interface AppOptions {
  horizon?: number;
}

/** Glue between the six views and the service; one in-flight submit max. */
export class App {
  private draft!: ScenarioDraft;
  private inputView!: WhatifInputView;
  private coefficientView!: CoefficientView;
  private comparisonView!: ComparisonView;
  private mapView!: MapView;
  private predictionView!: PredictionView;
  private historyView!: HistoryView;
  private route!: RouteSummary;
  private submitting = false;

  constructor(
    private readonly api: Api,
    private readonly els: AppElements,
    private readonly options: AppOptions = {},
  ) {}

  async start(): Promise<void> {
    const routes = await this.api.routes();
    if (!routes.length) {
      this.els.status.textContent = "no routes configured";
      return;
    }
    for (const route of routes) {
      const option = htmlEl("option", "", route.route_id);
      option.value = route.route_id;
      this.els.routePicker.appendChild(option);
    }
    this.els.routePicker.addEventListener("change", () => {
      const route = routes.find((r) => r.route_id === this.els.routePicker.value);
      if (route) void this.loadRoute(route);
    });
    this.els.submit.addEventListener("click", () => void this.submit());
    this.els.reset.addEventListener("click", () => {
      this.draft.clear();
      this.inputView.render();
      this.updateStatus();
    });
    await this.loadRoute(routes[0]);
  }

  async loadRoute(route: RouteSummary): Promise<void> {
    this.route = route;
    this.draft = new ScenarioDraft(route.route_id, this.options.horizon ?? 8);
    for (const kind of route.fitted_models) this.draft.setModelSelected(kind, true);

    const [frame, models, coefficients, vessels, history] = await Promise.all([
      this.api.series(route.route_id, "all"),
      this.api.models(route.route_id),
      this.api.coefficients(route.route_id),
      this.api.vessels(route.route_id),
      this.api.history(route.route_id),
    ]);

    this.inputView = new WhatifInputView(this.els.whatifInput, {
      frame,
      variables: route.exogenous,
      draft: this.draft,
      onChange: () => this.updateStatus(),
    });
    this.inputView.render();

    this.coefficientView = new CoefficientView(this.els.coefficients, {
      onSelect: (variable) => this.inputView.scrollToVariable(variable),
    });
    this.coefficientView.render(coefficients);

    this.comparisonView = new ComparisonView(this.els.comparison, {
      draft: this.draft,
      onMetricChange: (metric) => {
        void this.api.models(route.route_id, metric)
          .then((data) => this.comparisonView.render(data));
      },
    });
    this.comparisonView.render(models);

    this.mapView = new MapView(this.els.map);
    this.mapView.render(vessels);

    this.predictionView = new PredictionView(this.els.prediction);
    this.predictionView.render(history.length ? history[history.length - 1] : null);

    this.historyView = new HistoryView(this.els.history);
    this.historyView.render(history);
    this.updateStatus();
  }

  private updateStatus(): void {
    const doc = this.draft.toDoc();
    const dragged = Object.keys(doc.perturbations).length;
    this.els.status.textContent = dragged
      ? `${dragged} variable(s) perturbed, ready to submit`
      : "drag green points, then submit";
  }

  async submit(): Promise<void> {
    if (this.submitting) return;
    this.submitting = true;
    this.els.submit.disabled = true;
    try {
      const run = await this.api.whatif(this.route.route_id, this.draft.toDoc());
      this.predictionView.render(run);
      this.historyView.render(await this.api.history(this.route.route_id));
      this.els.status.textContent =
        `run ${run.run_id}: overall mean diff ${run.overall_mean_diff.toFixed(3)}`;
    } catch (err) {
      this.els.status.textContent = `submit failed: ${(err as Error).message}`;
    } finally {
      this.submitting = false;
      this.els.submit.disabled = false;
    }
  }
}

export function mount(baseUrl = ""): App {
  const byId = (id: string) => {
    const el = document.getElementById(id);
    if (!el) throw new Error(`missing #${id}`);
    return el;
  };
  const app = new App(new HttpApi(baseUrl), {
    whatifInput: byId("whatif-input"),
    coefficients: byId("coefficients"),
    comparison: byId("comparison"),
    map: byId("map"),
    prediction: byId("prediction"),
    history: byId("history"),
    submit: byId("submit") as HTMLButtonElement,
    reset: byId("reset") as HTMLButtonElement,
    routePicker: byId("route-picker") as HTMLSelectElement,
    status: byId("status"),
  });
  void app.start();
  return app;
}
