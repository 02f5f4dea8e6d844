import { BridgeClient } from "./bridge.js";
import { SubmitGate } from "./gate.js";
import { render } from "./render.js";
import { initialState, reduce, type ViewState } from "./viewModel.js";

let state: ViewState = initialState();
const gate = new SubmitGate();

const params = new URLSearchParams(window.location.search);
const url = params.get("bridge") ?? `ws://${window.location.hostname}:8765`;

const client = new BridgeClient({
  url,
  onEvent: (event) => {
    state = reduce(state, event);
    gate.onEvent(event);
    render(state, gate);
  },
});

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

byId<HTMLSelectElement>("target").addEventListener("change", (ev) => {
  const emotion = (ev.target as HTMLSelectElement).value;
  if (emotion) client.send({ type: "select_target", emotion });
});

byId<HTMLSelectElement>("modality").addEventListener("change", (ev) => {
  const modality = (ev.target as HTMLSelectElement).value;
  if (modality) client.send({ type: "select_modality", modality });
});

byId<HTMLButtonElement>("play-reference").addEventListener("click", () => {
  client.send({ type: "play_reference" });
});

byId<HTMLButtonElement>("submit").addEventListener("click", () => {
  const media = byId<HTMLSelectElement>("fixture").value;
  if (!media) return;
  const command = gate.trySubmit(state, media);
  if (command) {
    client.send(command);
    render(state, gate); // reflect the lockout immediately
  }
});

client.connect();
render(state, gate);
