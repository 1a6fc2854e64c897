/** Wire types mirroring the curation service's request/response models. */

export type Profile = "basic" | "aggressive";

export interface TranscriptLine {
  start: number;
  end: number;
  text: string;
}

export interface TranscriptDocument {
  doc_id: string;
  lines: TranscriptLine[];
  text_lang?: string | null;
}

export interface AudioTextPair {
  doc_id: string;
  audio_duration: number;
  manual: TranscriptDocument;
  machine?: TranscriptDocument | null;
  audio_lang?: string | null;
  audio_lang_confidence?: number | null;
}

export interface FilterConfig {
  required_lang?: string;
  doc_wer_threshold?: number;
  segment_wer_threshold?: number;
  case_drop_set?: string[];
  repeat_min_run?: number;
  profile?: Profile;
}

export interface WerBreakdown {
  wer: number;
  substitutions: number;
  deletions: number;
  insertions: number;
  reference_words: number;
}

export interface FilterDecision {
  doc_id: string;
  stage: string;
  kept: boolean;
  reason: string;
  score: number | null;
}

export interface FilterResult {
  decisions: FilterDecision[];
  kept: boolean;
}

export interface MinHashParams {
  shingle_size?: number;
  num_hashes?: number;
  num_bands?: number;
  rows_per_band?: number;
  seed?: number;
}

export interface MinHashSignature {
  doc_id: string;
  /** 112 per-hash minima; each fits well inside a JS safe integer. */
  values: number[];
  /** Hex digests, one per band of 8 values. */
  band_keys: string[];
}

export interface FindDuplicatesResult {
  clusters: string[][];
  duplicates: string[];
  too_short: string[];
}

export interface ContaminationVerdict {
  doc_id: string;
  flagged: boolean;
  sources: string[];
  first_offset: number | null;
}

export interface SegmentWindow {
  doc_id: string;
  window_index: number;
  window_start: number;
  window_duration: number;
  lines: TranscriptLine[];
}

export interface SegmentResult {
  segments: SegmentWindow[];
  total_hours: number;
}

export interface SegmentWindowPair {
  manual: SegmentWindow;
  machine: SegmentWindow;
}

export interface Health {
  status: string;
  version: string;
}
