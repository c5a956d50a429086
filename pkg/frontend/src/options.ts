/** Options page: configure the classification service base URL and review
 * the allowlist. */

const SERVICE_URL_KEY = "freephish_service_url";
const ALLOWLIST_KEY = "freephish_allowlist";
const DEFAULT_URL = "http://127.0.0.1:8787";

async function load(): Promise<void> {
  const stored = await chrome.storage.local.get([SERVICE_URL_KEY, ALLOWLIST_KEY]);
  const input = document.getElementById("service-url") as HTMLInputElement | null;
  if (input) {
    input.value = (stored[SERVICE_URL_KEY] as string | undefined) ?? DEFAULT_URL;
  }
  const list = document.getElementById("allowlist");
  const entries =
    (stored[ALLOWLIST_KEY] as { prefix: string; added_at: number }[]) ?? [];
  if (list) {
    list.textContent = "";
    for (const entry of entries) {
      const item = document.createElement("li");
      item.textContent = `${entry.prefix} (added ${new Date(entry.added_at).toISOString()}) `;
      const remove = document.createElement("button");
      remove.textContent = "remove";
      remove.addEventListener("click", async () => {
        const current =
          ((await chrome.storage.local.get(ALLOWLIST_KEY))[ALLOWLIST_KEY] as {
            prefix: string;
            added_at: number;
          }[]) ?? [];
        await chrome.storage.local.set({
          [ALLOWLIST_KEY]: current.filter((e) => e.prefix !== entry.prefix),
        });
        void load();
      });
      item.appendChild(remove);
      list.appendChild(item);
    }
  }
}

if (typeof document !== "undefined" && document.getElementById("service-url")) {
  void load();
  document.getElementById("save")?.addEventListener("click", async () => {
    const input = document.getElementById("service-url") as HTMLInputElement;
    await chrome.storage.local.set({ [SERVICE_URL_KEY]: input.value.trim() });
    const status = document.getElementById("status");
    if (status) status.textContent = "Saved. Reload the extension to apply.";
  });
}
