import type { VerdictLabel } from "./types.js";

export interface CacheEntry {
  label: VerdictLabel;
  score: number;
  fetched_at: number; // epoch ms
  ttl: number; // ms
}

export const DEFAULT_MAX_ENTRIES = 500;
export const DEFAULT_TTL_MS = 15 * 60 * 1000;

/** Canonical cache key: host plus path, ignoring query and fragment. */
export function cacheKey(rawUrl: string): string {
  const url = new URL(rawUrl);
  return `${url.hostname}${url.pathname}`;
}

/**
 * LRU verdict cache with per-entry TTL. Expired entries are never returned;
 * inserting past capacity evicts the least recently used entry.
 */
export class VerdictCache {
  private entries = new Map<string, CacheEntry>();

  constructor(
    private maxEntries: number = DEFAULT_MAX_ENTRIES,
    private clock: () => number = () => Date.now(),
  ) {}

  get(key: string): CacheEntry | undefined {
    const entry = this.entries.get(key);
    if (entry === undefined) return undefined;
    if (this.clock() - entry.fetched_at > entry.ttl) {
      this.entries.delete(key);
      return undefined;
    }
    // refresh recency
    this.entries.delete(key);
    this.entries.set(key, entry);
    return entry;
  }

  set(key: string, entry: CacheEntry): void {
    this.entries.delete(key);
    this.entries.set(key, entry);
    while (this.entries.size > this.maxEntries) {
      const oldest = this.entries.keys().next().value as string;
      this.entries.delete(oldest);
    }
  }

  get size(): number {
    return this.entries.size;
  }
}
