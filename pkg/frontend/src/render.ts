/**
 * Pure HTML-string rendering of the client state. The DOM layer in main.ts
 * just assigns these strings; keeping them pure makes the render rules
 * testable without a browser.
 */

import type { ClientState } from "./state.js";
import { visibleRecords } from "./state.js";

export function formatConfidence(confidence: number): string {
  return `${(confidence * 100).toFixed(1)}%`;
}

export function formatUptime(totalSeconds: number): string {
  const s = Math.max(0, Math.floor(totalSeconds));
  const h = Math.floor(s / 3600);
  const m = Math.floor((s % 3600) / 60);
  const sec = s % 60;
  return `${h}h ${String(m).padStart(2, "0")}m ${String(sec).padStart(2, "0")}s`;
}

export function formatLocalTime(timestampMs: number): string {
  return new Date(timestampMs).toLocaleString();
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderBanner(state: ClientState): string {
  const parts: string[] = [];
  if (state.offline) {
    parts.push(`<div class="banner banner-offline" data-banner="offline">` +
      `backend unreachable, retrying</div>`);
  }
  if (state.historyGap) {
    parts.push(`<div class="banner banner-gap" data-banner="gap">` +
      `history gap: some detections were evicted before this client saw them</div>`);
  }
  return parts.join("");
}

export function renderStatus(state: ClientState): string {
  const status = state.status;
  if (!status) {
    return `<div class="status" data-role="status">waiting for first status</div>`;
  }
  const duty = status.duty_cycle?.duty_cycle;
  const dutyText = duty === undefined || duty === null ? "n/a" : formatConfidence(duty);
  return (
    `<div class="status" data-role="status">` +
    `<span class="stat">uptime ${formatUptime(status.uptime_seconds)}</span>` +
    `<span class="stat">audio ${status.counts.audio}</span>` +
    `<span class="stat">image ${status.counts.image}</span>` +
    `<span class="stat">duty cycle ${dutyText}</span>` +
    `<span class="stat">buffer ${status.buffer_len}/${status.buffer_capacity}</span>` +
    `</div>`
  );
}

export function renderLog(state: ClientState): string {
  const rows = visibleRecords(state);
  if (rows.length === 0) {
    return `<p class="empty" data-role="empty">no detections yet</p>`;
  }
  const body = rows
    .map(
      (r) =>
        `<tr data-seq="${r.seq}">` +
        `<td class="species">${escapeHtml(r.species)}</td>` +
        `<td class="confidence">${formatConfidence(r.confidence)}</td>` +
        `<td class="time">${escapeHtml(formatLocalTime(r.timestamp_ms))}</td>` +
        `<td><span class="badge badge-${r.modality}">${r.modality}</span></td>` +
        `</tr>`,
    )
    .join("");
  return (
    `<table class="log" data-role="log">` +
    `<thead><tr><th>species</th><th>confidence</th><th>time</th><th>modality</th></tr></thead>` +
    `<tbody>${body}</tbody></table>`
  );
}

export function render(state: ClientState): { banner: string; status: string; log: string } {
  return {
    banner: renderBanner(state),
    status: renderStatus(state),
    log: renderLog(state),
  };
}
