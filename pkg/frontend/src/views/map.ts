import { clear, htmlEl, svgEl } from "../svg.js";
import { VesselDoc, VesselsResponse } from "../types.js";

export interface MapViewOptions {
  width?: number;
  height?: number;
}

/**
 * Vessels as droplet markers on an equirectangular canvas: the tip
 * points along the heading, red means ballast (empty), blue means
 * laden. Hovering a droplet reveals the vessel's IMO number.
 */
export class MapView {
  private readonly width: number;
  private readonly height: number;
  private tooltip: HTMLElement | null = null;

  constructor(
    private readonly root: HTMLElement,
    options: MapViewOptions = {},
  ) {
    this.width = options.width ?? 420;
    this.height = options.height ?? 260;
  }

  render(data: VesselsResponse): void {
    clear(this.root);
    this.root.appendChild(htmlEl("div", "view-caption",
      `${data.vessels.length} vessels (red = ballast, blue = laden)`));
    const svg = svgEl("svg", {
      width: this.width,
      height: this.height,
      viewBox: `0 0 ${this.width} ${this.height}`,
      class: "vessel-map",
    });
    svg.appendChild(svgEl("rect", {
      x: 0, y: 0, width: this.width, height: this.height, class: "sea",
    }));

    const [latLo, latHi, lonLo, lonHi] = this.bounds(data.vessels);
    for (const vessel of data.vessels) {
      const x = ((vessel.lon - lonLo) / (lonHi - lonLo)) * this.width;
      const y = ((latHi - vessel.lat) / (latHi - latLo)) * this.height;
      const marker = svgEl("path", {
        // teardrop with the tip upward at the origin; rotate to heading
        d: "M0,-9 C4,-3 5,0 0,5 C-5,0 -4,-3 0,-9 Z",
        transform: `translate(${x.toFixed(1)},${y.toFixed(1)}) rotate(${vessel.heading})`,
        class: vessel.cargo_status === "ballast" ? "droplet ballast" : "droplet laden",
      });
      marker.dataset.imo = String(vessel.imo);
      marker.addEventListener("mouseenter", () => this.showTooltip(vessel, x, y));
      marker.addEventListener("mouseleave", () => this.hideTooltip());
      svg.appendChild(marker);
    }
    this.root.appendChild(svg);

    if (data.supply.values.length) {
      const counts = data.supply.values.map((row) => row[0] ?? 0);
      this.root.appendChild(htmlEl("div", "supply-summary",
        `ballast approaching per week: ${counts.join(", ")}`));
    }
  }

  private bounds(vessels: VesselDoc[]): [number, number, number, number] {
    if (!vessels.length) return [-30, 10, -60, -20];
    let latLo = Math.min(...vessels.map((v) => v.lat));
    let latHi = Math.max(...vessels.map((v) => v.lat));
    let lonLo = Math.min(...vessels.map((v) => v.lon));
    let lonHi = Math.max(...vessels.map((v) => v.lon));
    const latPad = Math.max(1, (latHi - latLo) * 0.15);
    const lonPad = Math.max(1, (lonHi - lonLo) * 0.15);
    return [latLo - latPad, latHi + latPad, lonLo - lonPad, lonHi + lonPad];
  }

  private showTooltip(vessel: VesselDoc, x: number, y: number): void {
    this.hideTooltip();
    const tip = htmlEl("div", "map-tooltip", `IMO ${vessel.imo}`);
    tip.dataset.imo = String(vessel.imo);
    tip.style.left = `${x + 10}px`;
    tip.style.top = `${y}px`;
    this.root.appendChild(tip);
    this.tooltip = tip;
  }

  private hideTooltip(): void {
    this.tooltip?.remove();
    this.tooltip = null;
  }
}
