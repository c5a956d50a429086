import type { Allowlist } from "./allowlist.js";
import { DEFAULT_TTL_MS, VerdictCache, cacheKey } from "./cache.js";
import type { ServiceClient } from "./client.js";
import type { RegistryPrefilter } from "./prefilter.js";
import type { NavigationDecision } from "./types.js";

export interface DecisionDeps {
  prefilter: RegistryPrefilter;
  cache: VerdictCache;
  allowlist: Allowlist;
  client: ServiceClient;
  /** Base URL of the interstitial page (e.g. chrome.runtime.getURL(...)). */
  interstitialBase: string;
  ttlMs?: number;
}

export function interstitialUrl(
  base: string,
  url: string,
  score: number,
  brand?: string | null,
): string {
  const params = new URLSearchParams({ url, score: score.toFixed(3) });
  if (brand) params.set("brand", brand);
  return `${base}?${params.toString()}`;
}

/**
 * The navigation gate. Ordering matters:
 *  1. only http(s) URLs on registry hosts are ever examined (no service call
 *     otherwise),
 *  2. user allowlist wins,
 *  3. fresh cached verdicts decide without network,
 *  4. otherwise one classify call inside the timeout budget; any failure
 *     fails OPEN with a warning flag (a safety tool must not brick browsing).
 */
export async function decideNavigation(
  rawUrl: string,
  deps: DecisionDeps,
): Promise<NavigationDecision> {
  let url: URL;
  try {
    url = new URL(rawUrl);
  } catch {
    return { action: "allow" };
  }
  if (url.protocol !== "http:" && url.protocol !== "https:") {
    return { action: "allow" };
  }
  if (!deps.prefilter.matches(url.hostname)) {
    return { action: "allow" };
  }
  if (await deps.allowlist.isAllowed(rawUrl)) {
    return { action: "allow" };
  }

  const key = cacheKey(rawUrl);
  const cached = deps.cache.get(key);
  if (cached !== undefined) {
    if (cached.label === "phishing") {
      return {
        action: "block",
        interstitialUrl: interstitialUrl(deps.interstitialBase, rawUrl, cached.score),
      };
    }
    return { action: "allow" };
  }

  try {
    const response = await deps.client.classify(rawUrl);
    deps.cache.set(key, {
      label: response.verdict.label,
      score: response.verdict.score,
      fetched_at: Date.now(),
      ttl: deps.ttlMs ?? DEFAULT_TTL_MS,
    });
    if (response.verdict.label === "phishing") {
      return {
        action: "block",
        interstitialUrl: interstitialUrl(
          deps.interstitialBase,
          rawUrl,
          response.verdict.score,
          response.target_brand,
        ),
      };
    }
    return { action: "allow" };
  } catch {
    return { action: "allow", warning: true };
  }
}
