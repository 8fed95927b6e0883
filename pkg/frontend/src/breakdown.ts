import type { PanelKind, Suggestion } from "./types.js";

export interface BreakdownBar {
  label: string;
  value: number | null; // null renders as a neutral (disabled) component
  /** Bar length relative to the largest component of this suggestion. */
  fraction: number;
}

const ROW_COMPONENTS: Array<[string, string]> = [
  ["entity_similarity", "entity similarity"],
  ["label_likelihood", "label likelihood"],
  ["caption_likelihood", "caption likelihood"],
];

const COLUMN_COMPONENTS: Array<[string, string]> = [
  ["coverage", "coverage"],
  ["caption", "caption"],
  ["label_overlap", "label overlap"],
];

/** Per-component score bars; components absent from the response (disabled
 * server-side) render as neutral. */
export function renderBreakdown(suggestion: Suggestion, panel: PanelKind): BreakdownBar[] {
  const mapping = panel === "rows" ? ROW_COMPONENTS : COLUMN_COMPONENTS;
  const present = mapping
    .map(([key]) => suggestion.components[key])
    .filter((v): v is number => v !== undefined);
  const top = Math.max(...present, 1e-12);
  return mapping.map(([key, label]) => {
    const value = suggestion.components[key];
    if (value === undefined) {
      return { label, value: null, fraction: 0 };
    }
    return { label, value, fraction: top > 0 ? Math.min(value / top, 1) : 0 };
  });
}

/**
 * Display-consistency check between the breakdown and the total score.
 *
 * Row scores are the product of the enabled components. Column scores sum
 * bridge-table contributions, of which the breakdown shows the strongest
 * table's factors, so their product is a lower bound on the total.
 */
export function breakdownConsistent(
  suggestion: Suggestion,
  panel: PanelKind,
  tolerance = 1e-9,
): boolean {
  const mapping = panel === "rows" ? ROW_COMPONENTS : COLUMN_COMPONENTS;
  let product = 1;
  for (const [key] of mapping) {
    const value = suggestion.components[key];
    if (value !== undefined) {
      product *= value;
    }
  }
  if (panel === "rows") {
    return Math.abs(product - suggestion.score) <= tolerance * Math.max(1, Math.abs(suggestion.score));
  }
  return product <= suggestion.score + tolerance;
}
