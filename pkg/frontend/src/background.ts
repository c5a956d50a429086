import { Allowlist } from "./allowlist.js";
import { VerdictCache } from "./cache.js";
import { ServiceClient } from "./client.js";
import { decideNavigation } from "./decision.js";
import { RegistryPrefilter } from "./prefilter.js";
import type { StorageArea } from "./types.js";

export const DEFAULT_SERVICE_URL = "http://127.0.0.1:8787";
const HOSTS_KEY = "freephish_registry_hosts";
const SERVICE_URL_KEY = "freephish_service_url";
export const SYNC_PERIOD_MINUTES = 24 * 60;

export interface BackgroundState {
  prefilter: RegistryPrefilter;
  cache: VerdictCache;
  allowlist: Allowlist;
  client: ServiceClient;
  storage: StorageArea;
  interstitialBase: string;
}

function chromeStorage(): StorageArea {
  return {
    async get(key) {
      const out = await chrome.storage.local.get(key);
      return out[key];
    },
    async set(key, value) {
      await chrome.storage.local.set({ [key]: value });
    },
  };
}

export async function createState(
  storage: StorageArea,
  interstitialBase: string,
  serviceUrl?: string,
): Promise<BackgroundState> {
  const baseUrl =
    serviceUrl ??
    ((await storage.get(SERVICE_URL_KEY)) as string | undefined) ??
    DEFAULT_SERVICE_URL;
  const stored = (await storage.get(HOSTS_KEY)) as string[] | undefined;
  return {
    prefilter: new RegistryPrefilter(stored ?? []),
    cache: new VerdictCache(),
    allowlist: new Allowlist(storage),
    client: new ServiceClient(baseUrl),
    storage,
    interstitialBase,
  };
}

/**
 * Refresh the host prefilter from GET /registry. Failures (including an
 * empty host list) leave the last-known-good list untouched.
 */
export async function syncRegistry(state: BackgroundState): Promise<boolean> {
  try {
    const domains = await state.client.fetchRegistry();
    if (!state.prefilter.update(domains)) return false;
    await state.storage.set(HOSTS_KEY, state.prefilter.domains);
    return true;
  } catch {
    return false;
  }
}

export async function handleNavigation(
  state: BackgroundState,
  details: { tabId: number; frameId: number; url: string },
  tabsUpdate: (tabId: number, props: { url: string }) => unknown,
  setWarning: (on: boolean) => void,
): Promise<void> {
  if (details.frameId !== 0) return; // top-level navigations only
  const decision = await decideNavigation(details.url, {
    prefilter: state.prefilter,
    cache: state.cache,
    allowlist: state.allowlist,
    client: state.client,
    interstitialBase: state.interstitialBase,
  });
  if (decision.action === "block") {
    await tabsUpdate(details.tabId, { url: decision.interstitialUrl });
    return;
  }
  setWarning(decision.action === "allow" && decision.warning === true);
}

interface ProceedMessage {
  type: "freephish-proceed";
  url: string;
  tabId: number;
}

function isProceedMessage(message: unknown): message is ProceedMessage {
  return (
    typeof message === "object" &&
    message !== null &&
    (message as { type?: unknown }).type === "freephish-proceed"
  );
}

/** Entry point for the real service worker; everything above is testable. */
export function start(): void {
  const statePromise = createState(
    chromeStorage(),
    chrome.runtime.getURL("interstitial.html"),
  );

  const setWarning = (on: boolean) => {
    void chrome.action.setBadgeText({ text: on ? "!" : "" });
    if (on) void chrome.action.setBadgeBackgroundColor({ color: "#cc6600" });
  };

  chrome.runtime.onInstalled.addListener(() => {
    void statePromise.then(syncRegistry);
  });
  chrome.runtime.onStartup.addListener(() => {
    void statePromise.then(syncRegistry);
  });
  chrome.alarms.create("freephish-registry-sync", {
    periodInMinutes: SYNC_PERIOD_MINUTES,
  });
  chrome.alarms.onAlarm.addListener((alarm) => {
    if (alarm.name === "freephish-registry-sync") {
      void statePromise.then(syncRegistry);
    }
  });

  chrome.webNavigation.onBeforeNavigate.addListener((details) => {
    void statePromise.then((state) =>
      handleNavigation(state, details, chrome.tabs.update, setWarning),
    );
  });

  chrome.runtime.onMessage.addListener((message, sender, sendResponse) => {
    if (isProceedMessage(message)) {
      const senderTab = (sender as { tab?: { id?: number } }).tab?.id;
      const tabId = senderTab ?? message.tabId;
      void statePromise.then(async (state) => {
        await state.allowlist.add(message.url);
        await chrome.tabs.update(tabId, { url: message.url });
        sendResponse({ ok: true });
      });
      return true; // async response
    }
    return undefined;
  });
}

// The test harness imports this module; only a real extension context starts.
const globals = globalThis as Record<string, unknown>;
if (typeof globals.chrome !== "undefined" && !globals.FREEPHISH_TEST) {
  start();
}
