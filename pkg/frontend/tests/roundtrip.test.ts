/**
 * Drag -> submit -> render round-trip: the value shown after submission
 * must equal the dragged value within one pixel's value quantum.
 */
import { beforeEach, describe, expect, it } from "vitest";

import type { Api } from "../src/api.js";
import { valueQuantum } from "../src/scale.js";
import { ScenarioDraft } from "../src/scenario.js";
import type {
  FrameDoc,
  ScenarioDoc,
  ScenarioRunDoc,
  ForecastDoc,
} from "../src/types.js";
import { WhatifInputView } from "../src/views/whatifInput.js";
import { PredictionView } from "../src/views/prediction.js";

const FRAME: FrameDoc = {
  index: ["2021-01-04", "2021-01-11", "2021-01-18", "2021-01-25"],
  variables: ["freight_index", "brazil_loading"],
  values: [
    [10.0, 96000],
    [10.4, 97000],
    [10.2, 99000],
    [10.1, 98000],
  ],
};

/** Linear single-coefficient backend stand-in honoring the wire format. */
function fakeApi(coef: number, lastLoading: number): Api & { lastScenario?: ScenarioDoc } {
  const holder: { lastScenario?: ScenarioDoc } = {};

  function forecast(values: number[]): ForecastDoc {
    return { model_kind: "mlr", horizon: values.length, values, origin: "2021-01-25" };
  }

  return {
    lastScenario: undefined,
    async routes() {
      return [];
    },
    async series() {
      return FRAME;
    },
    async models() {
      return { metric: "rmse", scorecards: [], ranking: [] };
    },
    async coefficients() {
      return { model_kind: "mlr", impacts: [] };
    },
    async whatif(_route: string, scenario: ScenarioDoc): Promise<ScenarioRunDoc> {
      holder.lastScenario = scenario;
      (this as { lastScenario?: ScenarioDoc }).lastScenario = scenario;
      const horizon = scenario.horizon;
      const base = new Array<number>(horizon).fill(lastLoading);
      const path = [...base];
      const points = scenario.perturbations["brazil_loading"] ?? [];
      for (const [step, value] of [...points].sort((a, b) => a[0] - b[0])) {
        for (let s = step; s < horizon; s++) path[s] = value;
      }
      const baseline = base.map((v) => 1.0 + coef * v);
      const whatif = path.map((v) => 1.0 + coef * v);
      const diff = whatif.map((v, s) => v - baseline[s]);
      const mean = diff.reduce((a, b) => a + b, 0) / horizon;
      return {
        run_id: 1,
        created_at: "2021-02-01T00:00:00+00:00",
        scenario: {
          route_id: scenario.route_id,
          horizon,
          forward_window: scenario.forward_window ?? 1,
          perturbations: scenario.perturbations,
          model_selection: scenario.model_selection ?? ["mlr"],
        },
        baseline: { mlr: forecast(baseline) },
        whatif: { mlr: forecast(whatif) },
        diff: { mlr: diff },
        mean_diff_per_model: { mlr: mean },
        overall_mean_diff: mean,
      };
    },
    async history() {
      return [];
    },
    async vessels() {
      return { vessels: [], supply: { index: [], variables: ["x"], values: [] } };
    },
  };
}

function dragPoint(root: HTMLElement, variable: string, step: number, deltaPx: number): void {
  const row = root.querySelector<HTMLElement>(`[data-variable="${variable}"]`);
  expect(row).not.toBeNull();
  const point = row!.querySelector<SVGCircleElement>(
    `.whatif-point[data-step="${step}"]`);
  expect(point).not.toBeNull();
  point!.dispatchEvent(new MouseEvent("mousedown", { clientY: 150, bubbles: true }));
  document.dispatchEvent(new MouseEvent("mousemove", { clientY: 150 + deltaPx }));
  document.dispatchEvent(new MouseEvent("mouseup", {}));
}

describe("drag -> submit -> render round-trip", () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "<div id='input'></div><div id='pred'></div>";
    root = document.getElementById("input")!;
  });

  it("keeps the dragged value within one pixel quantum end to end", async () => {
    const height = 120;
    const horizon = 4;
    const draft = new ScenarioDraft("C3", horizon);
    const view = new WhatifInputView(root, {
      frame: FRAME,
      variables: ["brazil_loading"],
      draft,
      panelHeight: height,
      decimals: { brazil_loading: 6 }, // isolate the pixel quantum from snapping
    });
    view.render();

    const range = view.rangeFor("brazil_loading");
    const quantum = valueQuantum(range, height);
    const lastObserved = 98000;
    const deltaPx = 30; // downward drag
    const expected = lastObserved + (-deltaPx * (range[1] - range[0])) / height;

    dragPoint(root, "brazil_loading", 0, deltaPx);

    // the committed draft value matches the drag formula exactly
    const committed = draft.pointsFor("brazil_loading");
    expect(committed).toHaveLength(1);
    expect(committed[0][0]).toBe(0);
    expect(Math.abs(committed[0][1] - expected)).toBeLessThanOrEqual(quantum);

    // submit through the API and re-render from the response
    const api = fakeApi(0.001, lastObserved);
    const run = await api.whatif("C3", draft.toDoc());
    const echoed = run.scenario.perturbations["brazil_loading"][0][1];
    expect(Math.abs(echoed - expected)).toBeLessThanOrEqual(quantum);

    // the re-rendered green point carries the same value
    view.render();
    const point = root.querySelector<SVGCircleElement>(".whatif-point[data-step='0']");
    expect(Number(point!.dataset.value)).toBeCloseTo(echoed, 9);
    expect(Math.abs(Number(point!.dataset.value) - expected))
      .toBeLessThanOrEqual(quantum);

    // prediction view draws one solid and one dotted polyline per model
    const pred = new PredictionView(document.getElementById("pred")!);
    pred.render(run);
    expect(document.querySelectorAll("#pred .baseline-line")).toHaveLength(1);
    expect(document.querySelectorAll("#pred .whatif-forecast")).toHaveLength(1);
  });

  it("holds a dragged value forward until the next dragged step", () => {
    const draft = new ScenarioDraft("C3", 5);
    const view = new WhatifInputView(root, {
      frame: FRAME,
      variables: ["brazil_loading"],
      draft,
      panelHeight: 120,
    });
    view.render();
    dragPoint(root, "brazil_loading", 1, 24);
    const dragged = draft.pointsFor("brazil_loading")[0][1];
    expect(view.valueAt("brazil_loading", 0)).toBe(98000);
    for (const step of [1, 2, 3, 4]) {
      expect(view.valueAt("brazil_loading", step)).toBe(dragged);
    }
  });

  it("snaps tonnage drags to whole units", () => {
    const draft = new ScenarioDraft("C3", 3);
    const view = new WhatifInputView(root, {
      frame: FRAME,
      variables: ["brazil_loading"],
      draft,
      panelHeight: 120,
    });
    view.render();
    dragPoint(root, "brazil_loading", 0, 17);
    const value = draft.pointsFor("brazil_loading")[0][1];
    expect(Number.isInteger(value)).toBe(true);
  });
});
