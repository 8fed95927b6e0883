import { HttpSuggestClient } from "./api.js";
import { TableEditorStore } from "./editor.js";
import { EditorView } from "./ui.js";

// Service base URL: same origin by default, override with ?service=http://host:port
const base = new URLSearchParams(window.location.search).get("service") ?? "";
const store = new TableEditorStore(new HttpSuggestClient(base));
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
new EditorView(root, store);
