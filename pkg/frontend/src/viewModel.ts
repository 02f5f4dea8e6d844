/**
 * The view model is a pure fold over the bridge event stream: replaying a
 * recorded log always rebuilds the identical final state, and everything the
 * DOM shows comes from here (no client-side extrapolation of game state).
 */

import type {
  AVPoint,
  BridgeEvent,
  FixtureItem,
  GameView,
  Quadrant,
  VocabularyEntry,
} from "./protocol.js";

export interface GaugeView {
  name: string;
  distance: number | null;
  light: string;
}

export interface ViewState {
  connected: boolean;
  stale: boolean;
  vocabulary: Record<string, VocabularyEntry>;
  fixtures: FixtureItem[];
  game: GameView;
  target: string | null;
  modality: string | null;
  highlightedQuadrant: Quadrant | null;
  dot: AVPoint | null;
  recognized: string | null;
  lastMatch: boolean | null;
  lastCoins: number;
  lastTimeout: boolean;
  gauges: GaugeView[];
  referenceMedia: string | null;
  errorMessage: string | null;
}

const EMPTY_GAME: GameView = {
  target: null,
  modality: null,
  player_pos: 0,
  robot_pos: 0,
  board_len: 10,
  wallet: 0,
  turn: 0,
  winner: null,
};

export function initialState(): ViewState {
  return {
    connected: false,
    stale: false,
    vocabulary: {},
    fixtures: [],
    game: EMPTY_GAME,
    target: null,
    modality: null,
    highlightedQuadrant: null,
    dot: null,
    recognized: null,
    lastMatch: null,
    lastCoins: 0,
    lastTimeout: false,
    gauges: [],
    referenceMedia: null,
    errorMessage: null,
  };
}

/** Quadrant rule shared with the platform: zero counts as positive. */
export function quadrantOf(p: AVPoint): Quadrant {
  const posV = p.valence >= 0;
  const posA = p.arousal >= 0;
  if (posV && posA) return "pos_valence_high_arousal";
  if (!posV && posA) return "neg_valence_high_arousal";
  if (!posV && !posA) return "neg_valence_low_arousal";
  return "pos_valence_low_arousal";
}

const clamp = (v: number) => Math.max(-1, Math.min(1, v));

/** Plane coordinates in [0, 1]^2 (x right = valence, y up = arousal). */
export function dotPosition(p: AVPoint): { x: number; y: number } {
  return { x: (clamp(p.valence) + 1) / 2, y: (clamp(p.arousal) + 1) / 2 };
}

const GAUGE_ORDER = [
  "mean_rms",
  "f0_mean_hz",
  "f0_std_hz",
  "f0_onset_len_ms",
  "voiced_ratio",
];

function gaugesFrom(lights: Record<string, string> | null): GaugeView[] {
  if (!lights) return [];
  return GAUGE_ORDER.filter((name) => `light.${name}` in lights).map((name) => ({
    name,
    distance: `d.${name}` in lights ? Number(lights[`d.${name}`]) : null,
    light: lights[`light.${name}`],
  }));
}

export function reduce(state: ViewState, event: BridgeEvent): ViewState {
  switch (event.type) {
    case "connected":
      return { ...state, connected: true, stale: false, errorMessage: null };
    case "disconnected":
      return { ...state, connected: false };
    case "stale":
      return { ...state, stale: true };
    case "hello":
      return {
        ...state,
        connected: true,
        stale: false,
        vocabulary: event.vocabulary,
        fixtures: event.fixtures,
        game: event.game,
      };
    case "state": {
      const target = event.target !== undefined ? event.target : state.target;
      return {
        ...state,
        stale: false,
        game: event.game,
        target,
        modality: event.modality !== undefined ? event.modality : state.modality,
        highlightedQuadrant:
          target && state.vocabulary[target] ? state.vocabulary[target].quadrant : null,
      };
    }
    case "feedback":
      return {
        ...state,
        stale: false,
        game: event.game,
        dot: event.av,
        recognized: event.recognized,
        lastMatch: event.match,
        lastCoins: event.coins,
        lastTimeout: event.timeout,
        gauges: gaugesFrom(event.lights),
        errorMessage: null,
      };
    case "reference":
      return { ...state, referenceMedia: event.media };
    case "error":
      return { ...state, errorMessage: event.message };
    default:
      return state;
  }
}

export function replay(events: BridgeEvent[], from?: ViewState): ViewState {
  return events.reduce(reduce, from ?? initialState());
}
