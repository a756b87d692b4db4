/** Hash-routed single-page app over the annotation service.
 *
 *   #/            start a new session (paste a tokenized source sentence)
 *   #/session/ID  the annotation workspace for one session
 *   #/rate        the acceptability rating screen
 *
 * The session id lives in the URL, so a mid-session refresh lands back in
 * the same workspace with state fetched from the service.
 */

import { ApiClient } from "./api.js";
import { RatingScreen } from "./rating.js";
import { parseSourceSentence } from "./state.js";
import { Workspace } from "./workspace.js";

export function mountApp(container: HTMLElement, client: ApiClient = new ApiClient()): void {
  const nav = document.createElement("nav");
  const newLink = link("New session", "#/");
  const rateLink = link("Rate", "#/rate");
  const exportLink = link("Export", client.exportUrl());
  exportLink.setAttribute("download", "annotations.zip");
  nav.appendChild(newLink);
  nav.appendChild(rateLink);
  nav.appendChild(exportLink);
  container.appendChild(nav);

  const outlet = document.createElement("main");
  container.appendChild(outlet);

  let lastRouted: string | null = null;
  const route = () => {
    const hash = window.location.hash;
    // hash assignment fires an async hashchange after a synchronous route;
    // re-rendering the same view would orphan in-flight workspaces
    if (hash === lastRouted) return;
    lastRouted = hash;
    outlet.textContent = "";
    const sessionMatch = /^#\/session\/(.+)$/.exec(hash);
    if (sessionMatch && sessionMatch[1]) {
      const workspace = new Workspace(client, outlet);
      void workspace.load(decodeURIComponent(sessionMatch[1]));
    } else if (hash === "#/rate") {
      new RatingScreen(client, outlet);
    } else {
      renderStart(outlet, client);
    }
  };

  window.addEventListener("hashchange", route);
  route();
}

function renderStart(outlet: HTMLElement, client: ApiClient): void {
  const section = document.createElement("section");
  section.className = "start";

  const title = document.createElement("h2");
  title.textContent = "Start a streaming annotation session";
  section.appendChild(title);

  const hint = document.createElement("p");
  hint.textContent =
    "Paste the tokenized source sentence. Only the first word will be visible; " +
    "READ reveals the next word, Enter writes your token, and written tokens cannot be revised.";
  section.appendChild(hint);

  const input = document.createElement("textarea");
  input.setAttribute("data-role", "source-input");
  input.placeholder = "And this made me sad";
  section.appendChild(input);

  const startButton = document.createElement("button");
  startButton.type = "button";
  startButton.textContent = "Start session";
  startButton.setAttribute("data-role", "start-session");
  section.appendChild(startButton);

  const problem = document.createElement("div");
  problem.className = "error";
  problem.setAttribute("data-role", "start-error");
  section.appendChild(problem);

  startButton.onclick = async () => {
    const { tokens, error } = parseSourceSentence(input.value);
    if (error) {
      problem.textContent = error;
      return;
    }
    try {
      const session = await client.createSession(tokens);
      window.location.hash = `#/session/${session.session_id}`;
    } catch (err) {
      problem.textContent = err instanceof Error ? err.message : String(err);
    }
  };

  outlet.appendChild(section);
}

function link(label: string, href: string): HTMLAnchorElement {
  const a = document.createElement("a");
  a.textContent = label;
  a.href = href;
  return a;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app")!);
}
