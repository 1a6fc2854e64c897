import type {
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
  SegmentWindowPair,
  TranscriptDocument,
  WerBreakdown,
} from "./types.js";

/** Error carrying the service's machine-readable code and message verbatim. */
export class CurationServiceError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "CurationServiceError";
  }
}

/**
 * Thin client for the curation HTTP service.
 *
 * Every method is a stateless request; results are bit-identical to what
 * the CLI produces for the same inputs, because both sides run the same
 * core functions and the same JSON encoding.
 */
export class CurationClient {
  constructor(private readonly baseUrl: string) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) {
      const payload = (await res.json()) as {
        code?: string;
        message?: string;
        detail?: unknown;
      };
      if (payload.code && payload.message) {
        throw new CurationServiceError(payload.code, payload.message, res.status);
      }
      throw new CurationServiceError(
        "validation-error",
        JSON.stringify(payload.detail ?? payload),
        res.status,
      );
    }
    return (await res.json()) as T;
  }

  async health(): Promise<Health> {
    const res = await fetch(this.baseUrl + "/health");
    if (!res.ok) {
      throw new CurationServiceError("unavailable", `status ${res.status}`, res.status);
    }
    return (await res.json()) as Health;
  }

  async normalizeText(text: string, profile: Profile = "basic"): Promise<string> {
    const body = await this.post<{ normalized: string }>("/normalize", {
      text,
      profile,
    });
    return body.normalized;
  }

  wordErrorRate(
    reference: string,
    hypothesis: string,
    profile: Profile = "basic",
  ): Promise<WerBreakdown> {
    return this.post<WerBreakdown>("/wer", { reference, hypothesis, profile });
  }

  filterPair(
    pair: AudioTextPair,
    config?: FilterConfig,
    stages?: string[],
  ): Promise<FilterResult> {
    return this.post<FilterResult>("/filters/pair", {
      pair,
      ...(config ? { config } : {}),
      ...(stages ? { stages } : {}),
    });
  }

  async filterSegments(
    windows: SegmentWindowPair[],
    config?: FilterConfig,
  ): Promise<FilterDecision[]> {
    const body = await this.post<{ decisions: FilterDecision[] }>(
      "/filters/segments",
      { windows, ...(config ? { config } : {}) },
    );
    return body.decisions;
  }

  signature(
    doc: TranscriptDocument,
    params?: MinHashParams,
  ): Promise<MinHashSignature> {
    return this.post<MinHashSignature>("/dedup/signature", {
      doc,
      ...(params ? { params } : {}),
    });
  }

  findDuplicates(
    docs: TranscriptDocument[],
    params?: MinHashParams,
    verifyThreshold?: number,
  ): Promise<FindDuplicatesResult> {
    return this.post<FindDuplicatesResult>("/dedup/find-duplicates", {
      docs,
      ...(params ? { params } : {}),
      ...(verifyThreshold !== undefined ? { verify_threshold: verifyThreshold } : {}),
    });
  }

  decontaminate(
    doc: TranscriptDocument,
    references: TranscriptDocument[],
    n = 10,
    profile: Profile = "basic",
  ): Promise<ContaminationVerdict> {
    return this.post<ContaminationVerdict>("/decontaminate", {
      doc,
      references,
      n,
      profile,
    });
  }

  segmentDocument(
    pair: AudioTextPair,
    window = 30.0,
    keepEmpty = false,
  ): Promise<SegmentResult> {
    return this.post<SegmentResult>("/segment", {
      pair,
      window,
      keep_empty: keepEmpty,
    });
  }
}
