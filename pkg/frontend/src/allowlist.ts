import type { StorageArea } from "./types.js";

export interface AllowlistEntry {
  prefix: string;
  added_at: number; // epoch ms
}

const STORAGE_KEY = "freephish_allowlist";

/**
 * User-approved URL prefixes ("proceed anyway"). Allowlisted URLs bypass
 * blocking until the user removes them; all access goes through the storage
 * area so concurrent extension contexts observe one consistent list.
 */
export class Allowlist {
  constructor(
    private storage: StorageArea,
    private clock: () => number = () => Date.now(),
  ) {}

  private async read(): Promise<AllowlistEntry[]> {
    const raw = await this.storage.get(STORAGE_KEY);
    return Array.isArray(raw) ? (raw as AllowlistEntry[]) : [];
  }

  async entries(): Promise<AllowlistEntry[]> {
    return this.read();
  }

  async isAllowed(url: string): Promise<boolean> {
    const entries = await this.read();
    return entries.some((e) => url.startsWith(e.prefix));
  }

  async add(prefix: string): Promise<void> {
    const entries = await this.read();
    if (!entries.some((e) => e.prefix === prefix)) {
      entries.push({ prefix, added_at: this.clock() });
      await this.storage.set(STORAGE_KEY, entries);
    }
  }

  async remove(prefix: string): Promise<void> {
    const entries = await this.read();
    await this.storage.set(
      STORAGE_KEY,
      entries.filter((e) => e.prefix !== prefix),
    );
  }
}
