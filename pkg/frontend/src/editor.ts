import type { SuggestClient } from "./api.js";
import type { PanelKind, SeedTable, Suggestion } from "./types.js";

export interface SuggestionPanel {
  /** Suggestions exactly as received from the service, never reordered. */
  suggestions: Suggestion[];
  loading: boolean;
  error: string | null;
}

export interface EditorState {
  caption: string;
  labels: string[];
  entities: string[];
  rows: SuggestionPanel;
  columns: SuggestionPanel;
}

export interface EditorOptions {
  debounceMs?: number;
  topK?: number;
}

const DEFAULT_DEBOUNCE_MS = 300;
const DEFAULT_TOP_K = 10;

function emptyPanel(): SuggestionPanel {
  return { suggestions: [], loading: false, error: null };
}

/**
 * Grid state plus the suggestion panels that track it.
 *
 * Every edit schedules a debounced refresh of both panels with the current
 * seed table. Responses carry a per-panel sequence number; anything
 * superseded by a newer request is dropped, so panels only ever show the
 * latest edit's suggestions. The grid always mirrors a valid seed table:
 * blank cells are ignored on export and duplicate entities are rejected.
 */
export class TableEditorStore {
  private state: EditorState = {
    caption: "",
    labels: [],
    entities: [],
    rows: emptyPanel(),
    columns: emptyPanel(),
  };

  private readonly debounceMs: number;
  private readonly topK: number;
  private readonly listeners = new Set<(state: EditorState) => void>();
  private readonly seq: Record<PanelKind, number> = { rows: 0, columns: 0 };
  private timer: ReturnType<typeof setTimeout> | undefined;

  constructor(
    private readonly client: SuggestClient,
    options: EditorOptions = {},
  ) {
    this.debounceMs = options.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.topK = options.topK ?? DEFAULT_TOP_K;
  }

  getState(): EditorState {
    return this.state;
  }

  subscribe(listener: (state: EditorState) => void): () => void {
    this.listeners.add(listener);
    return () => this.listeners.delete(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  // -- grid edits ----------------------------------------------------------

  setCaption(text: string): void {
    this.state = { ...this.state, caption: text };
    this.emit();
    this.scheduleRefresh();
  }

  setLabel(index: number, value: string): void {
    const labels = this.state.labels.slice();
    labels[index] = value;
    this.state = { ...this.state, labels };
    this.emit();
    this.scheduleRefresh();
  }

  addLabel(value: string): void {
    this.setLabel(this.state.labels.length, value);
  }

  /** Returns false when the value would duplicate an existing entity. */
  setEntity(index: number, value: string): boolean {
    const trimmed = value.trim();
    if (trimmed) {
      const clash = this.state.entities.some(
        (e, i) => i !== index && e.trim() === trimmed,
      );
      if (clash) {
        return false;
      }
    }
    const entities = this.state.entities.slice();
    entities[index] = value;
    this.state = { ...this.state, entities };
    this.emit();
    this.scheduleRefresh();
    return true;
  }

  addEntity(value: string): boolean {
    return this.setEntity(this.state.entities.length, value);
  }

  acceptRowSuggestion(key: string): boolean {
    const panel = this.state.rows;
    const accepted = panel.suggestions.find((s) => s.key === key);
    if (!accepted) {
      return false;
    }
    const entities = [...this.state.entities, accepted.key];
    this.state = {
      ...this.state,
      entities,
      rows: { ...panel, suggestions: panel.suggestions.filter((s) => s.key !== key) },
    };
    this.emit();
    this.scheduleRefresh();
    return true;
  }

  acceptColumnSuggestion(key: string): boolean {
    const panel = this.state.columns;
    const accepted = panel.suggestions.find((s) => s.key === key);
    if (!accepted) {
      return false;
    }
    const labels = [...this.state.labels, accepted.key];
    this.state = {
      ...this.state,
      labels,
      columns: { ...panel, suggestions: panel.suggestions.filter((s) => s.key !== key) },
    };
    this.emit();
    this.scheduleRefresh();
    return true;
  }

  /** The grid as a seed table: trimmed, blank cells dropped. */
  exportSeedTable(): SeedTable {
    return {
      caption: this.state.caption.trim(),
      entities: this.state.entities.map((e) => e.trim()).filter(Boolean),
      labels: this.state.labels.map((l) => l.trim()).filter(Boolean),
    };
  }

  // -- suggestion refresh ---------------------------------------------------

  private scheduleRefresh(): void {
    clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      void this.refreshNow();
    }, this.debounceMs);
  }

  async refreshNow(): Promise<void> {
    clearTimeout(this.timer);
    const seed = this.exportSeedTable();
    await Promise.all([
      this.refreshPanel("rows", seed),
      this.refreshPanel("columns", seed),
    ]);
  }

  private setPanel(panel: PanelKind, value: SuggestionPanel): void {
    this.state = { ...this.state, [panel]: value };
    this.emit();
  }

  private async refreshPanel(panel: PanelKind, seed: SeedTable): Promise<void> {
    const requestSeq = ++this.seq[panel];
    this.setPanel(panel, { ...this.state[panel], loading: true });
    try {
      const response = await this.client.suggest(panel, seed, this.topK);
      if (requestSeq !== this.seq[panel]) {
        return; // superseded by a newer edit
      }
      this.setPanel(panel, {
        suggestions: response.suggestions,
        loading: false,
        error: null,
      });
    } catch (err) {
      if (requestSeq !== this.seq[panel]) {
        return;
      }
      this.setPanel(panel, {
        ...this.state[panel],
        loading: false,
        error: err instanceof Error ? err.message : String(err),
      });
    }
  }
}
