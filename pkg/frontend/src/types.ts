export type VerdictLabel = "phishing" | "benign" | "unknown";

export interface Verdict {
  label: VerdictLabel;
  score: number;
}

export interface ClassifyResponse {
  verdict: Verdict;
  is_fhd: boolean;
  fhd_name: string | null;
  model_version: string;
  cache: boolean;
  target_brand?: string | null;
  note?: string;
}

export interface RegistryResponse {
  base_domains: string[];
}

export type NavigationDecision =
  | { action: "allow"; warning?: boolean }
  | { action: "block"; interstitialUrl: string };

/** Minimal async key/value surface backed by extension storage. */
export interface StorageArea {
  get(key: string): Promise<unknown>;
  set(key: string, value: unknown): Promise<void>;
}

export class MemoryStorage implements StorageArea {
  private entries = new Map<string, unknown>();

  async get(key: string): Promise<unknown> {
    return this.entries.get(key);
  }

  async set(key: string, value: unknown): Promise<void> {
    this.entries.set(key, value);
  }
}
