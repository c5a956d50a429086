/** Interstitial page logic: render the blocked URL details and wire the two
 * actions ("go back" and "proceed anyway", which allowlists the URL). */

export interface InterstitialDetails {
  url: string;
  score: string;
  brand: string | null;
}

export function parseDetails(search: string): InterstitialDetails {
  const params = new URLSearchParams(search);
  return {
    url: params.get("url") ?? "",
    score: params.get("score") ?? "?",
    brand: params.get("brand"),
  };
}

export function render(doc: Document, details: InterstitialDetails): void {
  const urlEl = doc.getElementById("blocked-url");
  if (urlEl) urlEl.textContent = details.url;
  const scoreEl = doc.getElementById("score");
  if (scoreEl) scoreEl.textContent = details.score;
  const brandRow = doc.getElementById("brand-row");
  const brandEl = doc.getElementById("brand");
  if (details.brand && brandEl) {
    brandEl.textContent = details.brand;
  } else if (brandRow) {
    brandRow.remove();
  }
}

function currentTabId(): number {
  const params = new URLSearchParams(window.location.search);
  return Number(params.get("tabId") ?? "-1");
}

if (typeof document !== "undefined" && document.getElementById("blocked-url")) {
  const details = parseDetails(window.location.search);
  render(document, details);
  document.getElementById("go-back")?.addEventListener("click", () => {
    history.go(-2); // skip the blocked page itself
  });
  document.getElementById("proceed")?.addEventListener("click", () => {
    void chrome.runtime.sendMessage({
      type: "freephish-proceed",
      url: details.url,
      tabId: currentTabId(),
    });
  });
}
