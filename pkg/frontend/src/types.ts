/**
 * Wire types for the annotation service.  These mirror the canonical
 * sentence-view JSON documented in the repository README; the client never
 * derives judging state on its own, it only renders what the server sends.
 */

export type JudgmentValue = "good" | "bad";
export type ItemValue = JudgmentValue | "undecided";

export interface TokenView {
  surface: string;
  pos: string;
}

export interface PanelItem {
  key: string;
  display: string;
  kind: string;
  friendliness: number;
  value: ItemValue;
  provenance: string | null;
}

export interface ExpertItem extends PanelItem {
  discriminant: boolean;
}

export interface SentenceView {
  id: string;
  text: string;
  tokens: TokenView[];
  possiblyGood: number;
  state: "consistent" | "conflict";
  status: "undecided" | "ok" | "not-ok";
  failureType: string | null;
  comment: string | null;
  seq: number;
  discriminants: PanelItem[];
  undecidedCount: number;
  hiddenCount: number;
  autoConflict: boolean;
  properties?: ExpertItem[];
  forest?: string[];
}

export const KIND_ORDER = [
  "constituent",
  "semantic-triple",
  "word-sense",
  "sentence-type",
  "rule-name",
  "arg-triple",
];

export const KIND_LABELS: Record<string, string> = {
  constituent: "Constituents",
  "semantic-triple": "Triples",
  "word-sense": "Word senses",
  "sentence-type": "Sentence type",
  "rule-name": "Grammar rules",
  "arg-triple": "Argument positions",
};
