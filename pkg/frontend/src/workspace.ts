/** The annotation workspace: one session, three growing columns.
 *
 * Layout mirrors what gets recorded: the exposed source stream, the committed
 * target stream, and the action history. Committed tokens are plain text
 * nodes - the protocol forbids revision, so no edit affordance exists at all.
 * Every mutation is one awaited request carrying the last seen `seq`; a 409
 * means another tab moved first, and the workspace resyncs from the service
 * instead of guessing.
 */

import { ApiClient, ApiError, StreamLogRecord } from "./api.js";
import { WorkspaceState, fromSession, validateToken } from "./state.js";

export class Workspace {
  readonly root: HTMLElement;
  private state: WorkspaceState | null = null;
  private result: StreamLogRecord | null = null;
  private busy = false;

  private readonly errorBox: HTMLElement;
  private readonly sourceRow: HTMLElement;
  private readonly targetRow: HTMLElement;
  private readonly actionList: HTMLOListElement;
  private readonly readButton: HTMLButtonElement;
  private readonly writeButton: HTMLButtonElement;
  private readonly finishButton: HTMLButtonElement;
  private readonly tokenInput: HTMLInputElement;
  private readonly progress: HTMLElement;
  private readonly resultBox: HTMLPreElement;

  constructor(
    private readonly client: ApiClient,
    container: HTMLElement,
  ) {
    this.root = el("section", "workspace");

    this.errorBox = el("div", "error");
    this.errorBox.setAttribute("data-role", "error");
    this.errorBox.hidden = true;
    this.root.appendChild(this.errorBox);

    const streams = el("div", "streams");
    const sourceCol = el("div", "stream-col");
    sourceCol.appendChild(heading("Source stream"));
    this.sourceRow = el("div", "token-row");
    this.sourceRow.setAttribute("data-role", "source-stream");
    sourceCol.appendChild(this.sourceRow);
    const targetCol = el("div", "stream-col");
    targetCol.appendChild(heading("Target stream"));
    this.targetRow = el("div", "token-row");
    this.targetRow.setAttribute("data-role", "target-stream");
    targetCol.appendChild(this.targetRow);
    streams.appendChild(sourceCol);
    streams.appendChild(targetCol);
    this.root.appendChild(streams);

    const controls = el("div", "controls");
    this.readButton = button("READ", "read");
    this.readButton.title = "Reveal the next source word (Space or Enter with empty input)";
    this.tokenInput = document.createElement("input");
    this.tokenInput.type = "text";
    this.tokenInput.placeholder = "target token, then Enter";
    this.tokenInput.setAttribute("data-role", "token-input");
    this.writeButton = button("WRITE", "write");
    this.finishButton = button("FINISH", "finish");
    this.progress = el("span", "progress");
    this.progress.setAttribute("data-role", "progress");
    controls.appendChild(this.readButton);
    controls.appendChild(this.tokenInput);
    controls.appendChild(this.writeButton);
    controls.appendChild(this.finishButton);
    controls.appendChild(this.progress);
    this.root.appendChild(controls);

    const history = el("div", "history");
    history.appendChild(heading("Actions"));
    this.actionList = document.createElement("ol");
    this.actionList.setAttribute("data-role", "action-log");
    history.appendChild(this.actionList);
    this.root.appendChild(history);

    this.resultBox = document.createElement("pre");
    this.resultBox.setAttribute("data-role", "finished-log");
    this.resultBox.hidden = true;
    this.root.appendChild(this.resultBox);

    this.readButton.onclick = () => void this.doRead();
    this.writeButton.onclick = () => void this.doWrite();
    this.finishButton.onclick = () => void this.doFinish();
    // Keyboard-first: annotation is a rapid alternating-action task.
    this.tokenInput.addEventListener("keydown", (event: KeyboardEvent) => {
      if (event.key === "Enter") {
        event.preventDefault();
        if (this.tokenInput.value.trim().length > 0) void this.doWrite();
        else void this.doRead();
      } else if (event.key === " " && this.tokenInput.value.length === 0) {
        event.preventDefault();
        void this.doRead();
      }
    });

    container.appendChild(this.root);
  }

  get sessionId(): string | null {
    return this.state?.sessionId ?? null;
  }

  /** Current state as rendered; for tests and the router. */
  snapshot(): WorkspaceState | null {
    return this.state ? { ...this.state, exposed: [...this.state.exposed], committed: [...this.state.committed], actions: this.state.actions.map((a) => [...a] as [string, string]) } : null;
  }

  async load(sessionId: string): Promise<void> {
    try {
      this.state = fromSession(await this.client.getSession(sessionId));
      this.render();
    } catch (err) {
      this.setError(errorText(err));
    }
  }

  async start(sourceTokens: string[]): Promise<string> {
    const session = await this.client.createSession(sourceTokens);
    this.state = fromSession(session);
    this.render();
    return session.session_id;
  }

  private async doRead(): Promise<void> {
    if (!this.state || this.busy) return;
    if (this.state.readsDone >= this.state.sourceLen) {
      this.setError("The whole source sentence has been read.");
      return;
    }
    await this.mutate(() => this.client.read(this.state!.sessionId, this.state!.seq));
  }

  private async doWrite(): Promise<void> {
    if (!this.state || this.busy) return;
    const text = this.tokenInput.value;
    const problem = validateToken(text);
    if (problem) {
      this.setError(problem);
      return;
    }
    const ok = await this.mutate(() =>
      this.client.write(this.state!.sessionId, text.trim(), this.state!.seq),
    );
    if (ok) this.tokenInput.value = "";
  }

  private async doFinish(): Promise<void> {
    if (!this.state || this.busy) return;
    this.busy = true;
    try {
      this.result = await this.client.finish(this.state.sessionId, this.state.seq);
      this.state = fromSession(await this.client.getSession(this.state.sessionId));
      this.render();
    } catch (err) {
      await this.resync(err);
    } finally {
      this.busy = false;
    }
  }

  /** Run one mutating call; on failure surface the error and resync. */
  private async mutate(call: () => Promise<unknown>): Promise<boolean> {
    this.busy = true;
    try {
      await call();
      this.state = fromSession(
        await this.client.getSession(this.state!.sessionId),
        this.tokenInput.value,
      );
      this.render();
      return true;
    } catch (err) {
      await this.resync(err);
      return false;
    } finally {
      this.busy = false;
    }
  }

  /** Refresh from the service so committed work is never lost to an error. */
  private async resync(err: unknown): Promise<void> {
    let message = errorText(err);
    if (err instanceof ApiError && err.isConflict) {
      message = `Session changed elsewhere: ${err.message}. State reloaded.`;
    }
    if (this.state) {
      try {
        this.state = fromSession(
          await this.client.getSession(this.state.sessionId),
          this.tokenInput.value,
          message,
        );
      } catch {
        this.state.error = message;
      }
    }
    this.render();
    this.setError(message);
  }

  private setError(message: string | null): void {
    this.errorBox.textContent = message ?? "";
    this.errorBox.hidden = message === null;
  }

  private render(): void {
    const state = this.state;
    if (!state) return;
    this.setError(state.error);

    replaceTokens(this.sourceRow, state.exposed, "token source-token");
    // Committed target tokens are inert text: nothing here is editable.
    replaceTokens(this.targetRow, state.committed, "token committed");

    this.actionList.textContent = "";
    for (const [tag, payload] of state.actions) {
      const item = document.createElement("li");
      item.textContent = tag === "R" ? `READ ${payload}` : `WRITE ${payload}`;
      this.actionList.appendChild(item);
    }

    const exhausted = state.readsDone >= state.sourceLen;
    this.readButton.disabled = state.finished || exhausted;
    this.writeButton.disabled = state.finished;
    this.tokenInput.disabled = state.finished;
    this.finishButton.disabled = state.finished || !state.finishable;
    this.progress.textContent = `${state.readsDone} / ${state.sourceLen} source words read`;

    if (state.finished) {
      this.resultBox.hidden = false;
      this.resultBox.textContent = this.result
        ? JSON.stringify(this.result)
        : "Session finished.";
    } else {
      this.resultBox.hidden = true;
    }
  }
}

function el(tag: string, className: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  return node;
}

function heading(text: string): HTMLElement {
  const node = document.createElement("h2");
  node.textContent = text;
  return node;
}

function button(label: string, role: string): HTMLButtonElement {
  const node = document.createElement("button");
  node.type = "button";
  node.textContent = label;
  node.setAttribute("data-role", role);
  return node;
}

function replaceTokens(row: HTMLElement, tokens: string[], className: string): void {
  row.textContent = "";
  for (const token of tokens) {
    const span = document.createElement("span");
    span.className = className;
    span.textContent = token;
    row.appendChild(span);
  }
}

function errorText(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  if (err instanceof Error) return err.message;
  return String(err);
}
