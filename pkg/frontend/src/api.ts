import type { PanelKind, SeedTable, SuggestResponse } from "./types.js";

export interface SuggestClient {
  suggest(panel: PanelKind, seed: SeedTable, topK: number): Promise<SuggestResponse>;
}

/** Thin fetch wrapper around the service's two suggestion endpoints. */
export class HttpSuggestClient implements SuggestClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async suggest(panel: PanelKind, seed: SeedTable, topK: number): Promise<SuggestResponse> {
    const resp = await this.fetchFn(`${this.baseUrl}/suggest/${panel}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...seed, top_k: topK }),
    });
    if (!resp.ok) {
      throw new Error(`suggest ${panel} failed: HTTP ${resp.status}`);
    }
    return (await resp.json()) as SuggestResponse;
  }
}
