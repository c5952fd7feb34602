import type { ModelKind, PerturbationPoint, ScenarioDoc } from "./types.js";

/**
 * The pending scenario: every drag across every variable accumulates
 * here until the user submits. Dragging the same step twice keeps the
 * latest value; steps are held sorted so the wire format is canonical.
 */
export class ScenarioDraft {
  private points = new Map<string, Map<number, number>>();
  private selection = new Set<ModelKind>();

  constructor(
    public readonly routeId: string,
    public horizon: number,
  ) {}

  setPoint(variable: string, step: number, value: number): void {
    if (step < 0 || step >= this.horizon) {
      throw new RangeError(`step ${step} outside horizon ${this.horizon}`);
    }
    let perVar = this.points.get(variable);
    if (!perVar) {
      perVar = new Map();
      this.points.set(variable, perVar);
    }
    perVar.set(step, value);
  }

  pointsFor(variable: string): PerturbationPoint[] {
    const perVar = this.points.get(variable);
    if (!perVar) return [];
    return [...perVar.entries()].sort((a, b) => a[0] - b[0]);
  }

  clear(): void {
    this.points.clear();
  }

  get isEmpty(): boolean {
    return this.points.size === 0;
  }

  setModelSelected(kind: ModelKind, selected: boolean): void {
    if (selected) this.selection.add(kind);
    else this.selection.delete(kind);
  }

  get modelSelection(): ModelKind[] {
    return [...this.selection];
  }

  toDoc(): ScenarioDoc {
    const perturbations: Record<string, PerturbationPoint[]> = {};
    for (const variable of [...this.points.keys()].sort()) {
      const pts = this.pointsFor(variable);
      if (pts.length) perturbations[variable] = pts;
    }
    const doc: ScenarioDoc = {
      route_id: this.routeId,
      horizon: this.horizon,
      perturbations,
    };
    if (this.selection.size) doc.model_selection = this.modelSelection;
    return doc;
  }

  /** Future path after drag-then-hold, starting from the carried value. */
  previewPath(variable: string, lastObserved: number): number[] {
    const path = new Array<number>(this.horizon).fill(lastObserved);
    for (const [step, value] of this.pointsFor(variable)) {
      for (let s = step; s < this.horizon; s++) path[s] = value;
    }
    return path;
  }
}
