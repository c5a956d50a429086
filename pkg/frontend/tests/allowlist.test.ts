import { describe, expect, it } from "vitest";

import { Allowlist } from "../src/allowlist.js";
import { MemoryStorage } from "../src/types.js";

describe("Allowlist", () => {
  it("bypasses blocking for stored prefixes until removed", async () => {
    const list = new Allowlist(new MemoryStorage(), () => 1234);
    const url = "https://bad.weebly.com/login";
    expect(await list.isAllowed(url)).toBe(false);
    await list.add(url);
    expect(await list.isAllowed(url)).toBe(true);
    expect(await list.isAllowed(url + "?next=1")).toBe(true); // prefix match
    await list.remove(url);
    expect(await list.isAllowed(url)).toBe(false);
  });

  it("records added_at timestamps and dedups prefixes", async () => {
    const list = new Allowlist(new MemoryStorage(), () => 42);
    await list.add("https://a.weebly.com/");
    await list.add("https://a.weebly.com/");
    const entries = await list.entries();
    expect(entries).toEqual([{ prefix: "https://a.weebly.com/", added_at: 42 }]);
  });

  it("shares state through the storage area", async () => {
    const storage = new MemoryStorage();
    const writer = new Allowlist(storage);
    const reader = new Allowlist(storage);
    await writer.add("https://x.weebly.com/");
    expect(await reader.isAllowed("https://x.weebly.com/page")).toBe(true);
  });
});
