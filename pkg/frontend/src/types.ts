/** Wire shapes of the detection service API (the only contract). */

export interface DetectionWire {
  seq: number;
  species: string;
  confidence: number;
  timestamp_ms: number;
  modality: "audio" | "image";
  media_ref?: string;
}

export interface DetectionsPayload {
  records: DetectionWire[];
  latest_seq: number;
  evicted_before: number;
}

export interface StatusWire {
  uptime_seconds: number;
  counts: { audio: number; image: number };
  buffer_len: number;
  buffer_capacity: number;
  last_detection_timestamp: number | null;
  backend_identities: string[];
  duty_cycle: { duty_cycle?: number } | null;
  persist_failures: number;
  poll_interval_ms: number;
}

/** fetchJson(path) resolves to the parsed payload or rejects on transport error. */
export type FetchJson = (path: string) => Promise<unknown>;
