/**
 * Client state and the poll step.
 *
 * The dashboard only reads: one status fetch plus one cursor-paged
 * detections fetch per tick. The cursor never decreases, records are
 * deduped by seq, and a history gap (ring eviction passing the cursor)
 * is surfaced rather than papered over.
 */

import type { DetectionsPayload, DetectionWire, FetchJson, StatusWire } from "./types.js";

export type ModalityFilter = "all" | "audio" | "image";

export interface ClientState {
  cursor: number;
  records: DetectionWire[]; // ascending seq, bounded
  status: StatusWire | null;
  pollIntervalMs: number;
  offline: boolean;
  historyGap: boolean;
  filter: ModalityFilter;
  maxRecords: number;
}

export function initialState(pollIntervalMs = 2000, maxRecords = 1000): ClientState {
  return {
    cursor: 0,
    records: [],
    status: null,
    pollIntervalMs,
    offline: false,
    historyGap: false,
    filter: "all",
    maxRecords,
  };
}

export async function pollOnce(state: ClientState, fetchJson: FetchJson): Promise<ClientState> {
  let status: StatusWire;
  let delta: DetectionsPayload;
  try {
    status = (await fetchJson("/api/status")) as StatusWire;
    delta = (await fetchJson(
      `/api/detections?after=${state.cursor}&limit=${state.maxRecords}`,
    )) as DetectionsPayload;
  } catch {
    // transport error: keep everything, flag offline, retry next tick
    return { ...state, offline: true };
  }

  const merged = mergeRecords(state.records, delta.records, state.maxRecords);
  const received = delta.records.length
    ? delta.records[delta.records.length - 1].seq
    : state.cursor;
  // advance to the highest seq actually received, never backwards; a
  // truncated delta is picked up by the next poll rather than skipped
  const cursor = Math.max(state.cursor, received);
  // anything between our cursor and the oldest surviving record is lost
  // to the ring (still on disk server-side, but not pollable)
  const historyGap =
    state.historyGap || (state.cursor > 0 && delta.evicted_before > state.cursor + 1);

  return {
    ...state,
    cursor,
    records: merged,
    status,
    pollIntervalMs: status.poll_interval_ms > 0 ? status.poll_interval_ms : state.pollIntervalMs,
    offline: false,
    historyGap,
  };
}

export function mergeRecords(
  existing: DetectionWire[],
  incoming: DetectionWire[],
  maxRecords: number,
): DetectionWire[] {
  const seen = new Set(existing.map((r) => r.seq));
  const merged = existing.slice();
  for (const record of incoming) {
    if (!seen.has(record.seq)) {
      seen.add(record.seq);
      merged.push(record);
    }
  }
  merged.sort((a, b) => a.seq - b.seq);
  return merged.length > maxRecords ? merged.slice(merged.length - maxRecords) : merged;
}

export function setFilter(state: ClientState, filter: ModalityFilter): ClientState {
  return { ...state, filter };
}

export function visibleRecords(state: ClientState): DetectionWire[] {
  const rows = state.filter === "all"
    ? state.records
    : state.records.filter((r) => r.modality === state.filter);
  return rows.slice().sort((a, b) => b.seq - a.seq); // newest first
}
