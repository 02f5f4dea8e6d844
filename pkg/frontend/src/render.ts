/** DOM rendering: the page is a direct projection of the view state. */

import type { SubmitGate } from "./gate.js";
import { dotPosition, type ViewState } from "./viewModel.js";

const QUADRANT_CORNERS: Record<string, string> = {
  pos_valence_high_arousal: "quad-ne",
  neg_valence_high_arousal: "quad-nw",
  neg_valence_low_arousal: "quad-sw",
  pos_valence_low_arousal: "quad-se",
};

function el<T extends HTMLElement = HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function option(value: string, label?: string): HTMLOptionElement {
  const opt = document.createElement("option");
  opt.value = value;
  opt.textContent = label ?? value;
  return opt;
}

export function render(state: ViewState, gate: SubmitGate): void {
  el("banner").hidden = state.connected;
  el("stale").hidden = !state.stale;
  el("error").textContent = state.errorMessage ?? "";

  const targetSelect = el<HTMLSelectElement>("target");
  if (targetSelect.options.length !== Object.keys(state.vocabulary).length + 1) {
    targetSelect.replaceChildren(option("", "pick a target emotion"));
    for (const label of Object.keys(state.vocabulary)) targetSelect.appendChild(option(label));
  }
  targetSelect.value = state.target ?? "";

  const modalitySelect = el<HTMLSelectElement>("modality");
  modalitySelect.value = state.modality ?? "";

  const fixtureSelect = el<HTMLSelectElement>("fixture");
  const wanted = state.fixtures.filter(
    (f) => !state.modality || f.modality === state.modality,
  );
  if (fixtureSelect.dataset.key !== `${state.modality}:${wanted.length}`) {
    fixtureSelect.dataset.key = `${state.modality}:${wanted.length}`;
    fixtureSelect.replaceChildren(option("", "pick attempt media"));
    for (const f of wanted) fixtureSelect.appendChild(option(f.path, f.name));
  }

  for (const corner of Object.values(QUADRANT_CORNERS)) {
    el(corner).classList.remove("highlight");
  }
  if (state.highlightedQuadrant) {
    el(QUADRANT_CORNERS[state.highlightedQuadrant]).classList.add("highlight");
  }

  const dot = el("dot");
  if (state.dot) {
    const { x, y } = dotPosition(state.dot);
    dot.hidden = false;
    dot.style.left = `${x * 100}%`;
    dot.style.top = `${(1 - y) * 100}%`;
  } else {
    dot.hidden = true;
  }

  el("recognized").textContent = state.recognized ?? "–";
  el("verdict").textContent =
    state.lastMatch === null
      ? ""
      : state.lastTimeout
        ? "no answer from the analyzer"
        : state.lastMatch
          ? `match! +${state.lastCoins} coins`
          : "not quite, try again";

  const gauges = el("gauges");
  gauges.replaceChildren();
  for (const gauge of state.gauges) {
    const row = document.createElement("div");
    row.className = `gauge light-${gauge.light}`;
    const width = gauge.distance === null ? 0 : Math.min(gauge.distance, 1) * 100;
    row.innerHTML = `<span class="lamp"></span><span class="name">${gauge.name}</span>` +
      `<span class="bar"><span class="fill" style="width:${width}%"></span></span>`;
    gauges.appendChild(row);
  }

  el("wallet").textContent = String(state.game.wallet);
  el("turn").textContent = String(state.game.turn);
  el("winner").textContent = state.game.winner ? `${state.game.winner} wins!` : "";

  const board = el("board");
  board.replaceChildren();
  for (let i = 0; i <= state.game.board_len; i++) {
    const cell = document.createElement("div");
    cell.className = "cell";
    if (i === state.game.player_pos) cell.classList.add("player");
    if (i === state.game.robot_pos) cell.classList.add("robot");
    cell.title = `step ${i}`;
    board.appendChild(cell);
  }

  const submit = el<HTMLButtonElement>("submit");
  submit.disabled = gate.rejection(state) !== null;
  el<HTMLButtonElement>("play-reference").disabled = !state.connected || !state.target;
  el("reference").textContent = state.referenceMedia ?? "";
}
