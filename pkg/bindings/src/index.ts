export { CurationClient, CurationServiceError } from "./client.js";
export type {
  AudioTextPair,
  ContaminationVerdict,
  FilterConfig,
  FilterDecision,
  FilterResult,
  FindDuplicatesResult,
  Health,
  MinHashParams,
  MinHashSignature,
  Profile,
  SegmentResult,
  SegmentWindow,
  SegmentWindowPair,
  TranscriptDocument,
  TranscriptLine,
  WerBreakdown,
} from "./types.js";
