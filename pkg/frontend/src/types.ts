/** Wire types shared with the suggestion service. */

export interface SeedTable {
  caption: string;
  entities: string[];
  labels: string[];
}

export interface Suggestion {
  key: string;
  score: number;
  components: Record<string, number>;
}

export interface SuggestResponse {
  task: "rows" | "columns";
  suggestions: Suggestion[];
  timing_ms: number;
  snapshot_version: string | null;
}

export type PanelKind = "rows" | "columns";
