import type { ClassifyResponse, RegistryResponse } from "./types.js";

export const DEFAULT_TIMEOUT_MS = 500;

/**
 * HTTP client for the classification service. Every call is bounded by the
 * timeout budget: a decision must never delay navigation longer than that,
 * so timeouts and transport errors surface as exceptions the caller turns
 * into fail-open allows.
 */
export class ServiceClient {
  constructor(
    public baseUrl: string,
    private timeoutMs: number = DEFAULT_TIMEOUT_MS,
    private fetchFn: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const controller = new AbortController();
    const timer = setTimeout(() => controller.abort(), this.timeoutMs);
    try {
      const response = await this.fetchFn(`${this.baseUrl}${path}`, {
        ...init,
        signal: controller.signal,
      });
      if (!response.ok) {
        throw new Error(`service returned ${response.status}`);
      }
      return await response.json();
    } finally {
      clearTimeout(timer);
    }
  }

  async classify(url: string, html?: string): Promise<ClassifyResponse> {
    const body: Record<string, string> = { url, client_version: "0.1.0" };
    if (html !== undefined) body.html = html;
    return (await this.request("/classify", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    })) as ClassifyResponse;
  }

  async fetchRegistry(): Promise<string[]> {
    const payload = (await this.request("/registry")) as RegistryResponse;
    return payload.base_domains ?? [];
  }
}
