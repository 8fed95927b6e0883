import { renderBreakdown } from "./breakdown.js";
import type { EditorState, SuggestionPanel, TableEditorStore } from "./editor.js";
import type { PanelKind, Suggestion } from "./types.js";

/** DOM layer: grid editor plus the two suggestion panels. */
export class EditorView {
  constructor(
    private readonly root: HTMLElement,
    private readonly store: TableEditorStore,
  ) {
    store.subscribe((state) => this.render(state));
    this.render(store.getState());
  }

  private render(state: EditorState): void {
    this.root.replaceChildren(
      this.captionInput(state),
      this.grid(state),
      this.exportButton(),
      this.panels(state),
    );
  }

  private captionInput(state: EditorState): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "caption-row";
    const input = document.createElement("input");
    input.className = "caption";
    input.placeholder = "Table caption";
    input.value = state.caption;
    input.addEventListener("change", () => this.store.setCaption(input.value));
    wrap.appendChild(input);
    return wrap;
  }

  private grid(state: EditorState): HTMLElement {
    const table = document.createElement("table");
    table.className = "grid";
    const header = document.createElement("tr");
    header.appendChild(this.headerCell(0, "entity column"));
    state.labels.forEach((label, i) => {
      header.appendChild(this.headerCell(i + 1, "", label));
    });
    header.appendChild(this.headerCell(state.labels.length + 1, "add label…"));
    table.appendChild(header);

    const rows = [...state.entities, ""];
    rows.forEach((entity, r) => {
      const tr = document.createElement("tr");
      const td = document.createElement("td");
      td.className = "entity-cell";
      const input = document.createElement("input");
      input.value = entity;
      input.placeholder = r === state.entities.length ? "add entity…" : "";
      input.addEventListener("change", () => {
        if (!this.store.setEntity(r, input.value)) {
          input.classList.add("invalid");
          input.title = "entities must be unique";
        }
      });
      td.appendChild(input);
      tr.appendChild(td);
      for (let c = 0; c < state.labels.length + 1; c++) {
        const cell = document.createElement("td");
        cell.className = "value-cell";
        cell.textContent = "";
        tr.appendChild(cell);
      }
      table.appendChild(tr);
    });
    return table;
  }

  private headerCell(index: number, placeholder: string, label = ""): HTMLElement {
    const th = document.createElement("th");
    if (index === 0) {
      th.textContent = "Entity";
      th.className = "entity-head";
      return th;
    }
    const input = document.createElement("input");
    input.value = label;
    input.placeholder = placeholder;
    input.addEventListener("change", () => this.store.setLabel(index - 1, input.value));
    th.appendChild(input);
    return th;
  }

  private exportButton(): HTMLElement {
    const button = document.createElement("button");
    button.textContent = "Export seed table";
    button.className = "export";
    button.addEventListener("click", () => {
      const blob = new Blob(
        [JSON.stringify(this.store.exportSeedTable(), null, 2)],
        { type: "application/json" },
      );
      const link = document.createElement("a");
      link.href = URL.createObjectURL(blob);
      link.download = "seed-table.json";
      link.click();
      URL.revokeObjectURL(link.href);
    });
    return button;
  }

  private panels(state: EditorState): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "panels";
    wrap.appendChild(this.panel("rows", "Suggested entities (rows)", state.rows));
    wrap.appendChild(this.panel("columns", "Suggested column headings", state.columns));
    return wrap;
  }

  private panel(kind: PanelKind, title: string, panel: SuggestionPanel): HTMLElement {
    const box = document.createElement("div");
    box.className = `panel panel-${kind}`;
    const head = document.createElement("h2");
    head.textContent = title + (panel.loading ? " …" : "");
    box.appendChild(head);
    if (panel.error) {
      const err = document.createElement("div");
      err.className = "panel-error";
      err.textContent = `service error: ${panel.error}`;
      const retry = document.createElement("button");
      retry.textContent = "retry";
      retry.addEventListener("click", () => void this.store.refreshNow());
      err.appendChild(retry);
      box.appendChild(err);
    }
    const list = document.createElement("ul");
    for (const suggestion of panel.suggestions) {
      list.appendChild(this.suggestionItem(kind, suggestion));
    }
    box.appendChild(list);
    return box;
  }

  private suggestionItem(kind: PanelKind, suggestion: Suggestion): HTMLElement {
    const li = document.createElement("li");
    const accept = document.createElement("button");
    accept.textContent = "+";
    accept.title = kind === "rows" ? "add as next row" : "add as next column";
    accept.addEventListener("click", () => {
      if (kind === "rows") {
        this.store.acceptRowSuggestion(suggestion.key);
      } else {
        this.store.acceptColumnSuggestion(suggestion.key);
      }
    });
    const name = document.createElement("span");
    name.className = "suggestion-key";
    name.textContent = suggestion.key;
    const score = document.createElement("span");
    score.className = "suggestion-score";
    score.textContent = suggestion.score.toExponential(3);
    li.append(accept, name, score, this.bars(kind, suggestion));
    return li;
  }

  private bars(kind: PanelKind, suggestion: Suggestion): HTMLElement {
    const wrap = document.createElement("div");
    wrap.className = "bars";
    for (const bar of renderBreakdown(suggestion, kind)) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const label = document.createElement("span");
      label.className = "bar-label";
      label.textContent = bar.label;
      const track = document.createElement("span");
      track.className = "bar-track";
      const fill = document.createElement("span");
      fill.className = bar.value === null ? "bar-fill neutral" : "bar-fill";
      fill.style.width = bar.value === null ? "100%" : `${Math.round(bar.fraction * 100)}%`;
      fill.title = bar.value === null ? "component disabled (neutral)" : bar.value.toExponential(3);
      track.appendChild(fill);
      row.append(label, track);
      wrap.appendChild(row);
    }
    return wrap;
  }
}
