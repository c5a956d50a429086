/** Minimal ambient typings for the WebExtensions surface this extension uses. */

interface ChromeEvent<T extends (...args: never[]) => unknown> {
  addListener(callback: T): void;
}

interface ChromeNavigationDetails {
  tabId: number;
  frameId: number;
  url: string;
}

interface ChromeAlarm {
  name: string;
}

declare namespace chrome {
  namespace runtime {
    function getURL(path: string): string;
    const onInstalled: ChromeEvent<() => void>;
    const onStartup: ChromeEvent<() => void>;
    const onMessage: ChromeEvent<
      (
        message: unknown,
        sender: unknown,
        sendResponse: (response?: unknown) => void,
      ) => boolean | void
    >;
    function sendMessage(message: unknown): Promise<unknown>;
  }

  namespace storage {
    interface LocalArea {
      get(keys: string | string[]): Promise<Record<string, unknown>>;
      set(items: Record<string, unknown>): Promise<void>;
    }
    const local: LocalArea;
  }

  namespace webNavigation {
    const onBeforeNavigate: ChromeEvent<
      (details: ChromeNavigationDetails) => void
    >;
  }

  namespace tabs {
    function update(tabId: number, props: { url: string }): Promise<unknown>;
  }

  namespace action {
    function setBadgeText(details: { text: string }): Promise<void> | void;
    function setBadgeBackgroundColor(details: {
      color: string;
    }): Promise<void> | void;
  }

  namespace alarms {
    function create(name: string, info: { periodInMinutes: number }): void;
    const onAlarm: ChromeEvent<(alarm: ChromeAlarm) => void>;
  }
}
