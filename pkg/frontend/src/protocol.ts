/** JSON protocol spoken with the platform's WebSocket bridge. */

export type Quadrant =
  | "pos_valence_high_arousal"
  | "neg_valence_high_arousal"
  | "neg_valence_low_arousal"
  | "pos_valence_low_arousal";

export interface AVPoint {
  arousal: number;
  valence: number;
}

export interface GameView {
  target: string | null;
  modality: string | null;
  player_pos: number;
  robot_pos: number;
  board_len: number;
  wallet: number;
  turn: number;
  winner: string | null;
}

export interface VocabularyEntry {
  arousal: number;
  valence: number;
  quadrant: Quadrant;
}

export interface FixtureItem {
  path: string;
  name: string;
  modality: string;
}

export interface HelloEvent {
  type: "hello";
  vocabulary: Record<string, VocabularyEntry>;
  fixtures: FixtureItem[];
  game: GameView;
}

export interface StateEvent {
  type: "state";
  game: GameView;
  target?: string | null;
  modality?: string | null;
}

export interface FeedbackEvent {
  type: "feedback";
  turn: number;
  target: string;
  modality: string;
  timeout: boolean;
  match: boolean;
  coins: number;
  av: AVPoint | null;
  recognized: string | null;
  distance: number | null;
  lights: Record<string, string> | null;
  game: GameView;
}

export interface ReferenceEvent {
  type: "reference";
  target: string | null;
  media: string | null;
}

export interface ErrorEvent {
  type: "error";
  message: string;
}

/** Synthetic connection events folded into the same reducer input stream. */
export interface ConnectionEvent {
  type: "connected" | "disconnected" | "stale";
}

export type BridgeEvent =
  | HelloEvent
  | StateEvent
  | FeedbackEvent
  | ReferenceEvent
  | ErrorEvent
  | ConnectionEvent;

export type Command =
  | { type: "select_target"; emotion: string }
  | { type: "select_modality"; modality: string }
  | { type: "submit_attempt"; media: string }
  | { type: "play_reference" };
