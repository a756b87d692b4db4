/** Acceptability rating screen: one item, one rater, one 1-5 score. */

import { ApiClient } from "./api.js";
import { validateScore } from "./state.js";

export class RatingScreen {
  readonly root: HTMLElement;
  private readonly itemInput: HTMLInputElement;
  private readonly raterInput: HTMLInputElement;
  private readonly scoreInput: HTMLInputElement;
  private readonly message: HTMLElement;

  constructor(
    private readonly client: ApiClient,
    container: HTMLElement,
  ) {
    this.root = document.createElement("section");
    this.root.className = "rating";

    const title = document.createElement("h2");
    title.textContent = "Rate a translation (1 = unusable, 5 = perfect)";
    this.root.appendChild(title);

    this.itemInput = labeledInput(this.root, "Item id", "item-id", "text");
    this.raterInput = labeledInput(this.root, "Rater id", "rater-id", "text");
    this.scoreInput = labeledInput(this.root, "Score (1-5)", "score", "number");
    this.scoreInput.min = "1";
    this.scoreInput.max = "5";
    this.scoreInput.step = "1";

    const submit = document.createElement("button");
    submit.type = "button";
    submit.textContent = "Submit rating";
    submit.setAttribute("data-role", "submit-rating");
    submit.onclick = () => void this.submit();
    this.root.appendChild(submit);

    this.message = document.createElement("div");
    this.message.className = "message";
    this.message.setAttribute("data-role", "rating-message");
    this.root.appendChild(this.message);

    container.appendChild(this.root);
  }

  async submit(): Promise<void> {
    const item = this.itemInput.value.trim();
    const rater = this.raterInput.value.trim();
    if (!item || !rater) {
      this.show("Item id and rater id are both required.", true);
      return;
    }
    const score = Number(this.scoreInput.value);
    const problem = validateScore(score);
    if (problem) {
      this.show(problem, true);
      return;
    }
    try {
      const record = await this.client.submitRating(item, rater, score);
      this.show(`Recorded: ${record.item_id} scored ${record.score} by ${record.rater_id}.`, false);
      this.scoreInput.value = "";
    } catch (err) {
      this.show(err instanceof Error ? err.message : String(err), true);
    }
  }

  private show(text: string, isError: boolean): void {
    this.message.textContent = text;
    this.message.className = isError ? "message error" : "message ok";
  }
}

function labeledInput(
  parent: HTMLElement,
  label: string,
  role: string,
  type: string,
): HTMLInputElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  const caption = document.createElement("span");
  caption.textContent = label;
  const input = document.createElement("input");
  input.type = type;
  input.setAttribute("data-role", role);
  wrap.appendChild(caption);
  wrap.appendChild(input);
  parent.appendChild(wrap);
  return input;
}
