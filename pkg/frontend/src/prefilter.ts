/**
 * Client-side FHD host prefilter, synced from the service's GET /registry.
 *
 * Only hosts matching a registry base domain ever trigger a classify call;
 * everything else is allowed without network traffic. An empty update is
 * treated as a sync failure so the extension never silently degrades to
 * blocking nothing: the last-known-good list is retained.
 */
export class RegistryPrefilter {
  private baseDomains: string[];

  constructor(baseDomains: string[] = []) {
    this.baseDomains = [...baseDomains];
  }

  /** True for the base domain itself or any subdomain of it. */
  matches(host: string): boolean {
    const lowered = host.toLowerCase();
    return this.baseDomains.some(
      (base) => lowered === base || lowered.endsWith("." + base),
    );
  }

  /** Replace the domain list; rejects empty lists and returns false. */
  update(domains: string[]): boolean {
    if (domains.length === 0) return false;
    this.baseDomains = domains.map((d) => d.toLowerCase());
    return true;
  }

  get domains(): string[] {
    return [...this.baseDomains];
  }
}
